"""MILP formulation of the allocation problem and LP-format export.

The model maximizes the sum of per-store MAX_MEAN varieties. Because
that objective divides by the assigned-style count, continuous
auxiliaries linearize it: r_s stands for the reciprocal of store s's
style count, u_is for r_s * y_is, and w_ijs for r_s * y_is * y_js. At
integral y the constraint system pins these products exactly, so the
linearization is exact, not a relaxation.

Variable naming: x_i_s, y_i_s, r_s, u_i_s, w_i_j_s (i < j), v_s.
Rendering is deterministic: identical instances yield identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DistributionInstance, DistributionPlan, ensure_valid

__all__ = [
    "LpRow",
    "MilpModel",
    "LinearizationVars",
    "build_milp",
    "export_lp",
    "linearization_witness",
    "check_assignment",
    "var_x",
    "var_y",
    "var_r",
    "var_u",
    "var_w",
    "var_v",
]


def var_x(i: int, s: int) -> str:
    return f"x_{i}_{s}"


def var_y(i: int, s: int) -> str:
    return f"y_{i}_{s}"


def var_r(s: int) -> str:
    return f"r_{s}"


def var_u(i: int, s: int) -> str:
    return f"u_{i}_{s}"


def var_w(i: int, j: int, s: int) -> str:
    if not i < j:
        raise ValueError(f"w variable needs i < j, got ({i}, {j})")
    return f"w_{i}_{j}_{s}"


def var_v(s: int) -> str:
    return f"v_{s}"


@dataclass(frozen=True)
class LpRow:
    """One linear constraint: sum(coef * var) sense rhs."""

    name: str
    terms: tuple[tuple[str, float], ...]
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown sense {self.sense!r}")

    def residual(self, values: dict[str, float]) -> float:
        """lhs - rhs under an assignment (positive means above rhs)."""
        lhs = sum(coef * values[name] for name, coef in self.terms)
        return lhs - self.rhs

    def satisfied(self, values: dict[str, float], tol: float = 1e-9) -> bool:
        res = self.residual(values)
        if self.sense == "<=":
            return res <= tol
        if self.sense == ">=":
            return res >= -tol
        return abs(res) <= tol


@dataclass(frozen=True)
class MilpModel:
    """Complete model: objective terms, rows, and variable classes."""

    objective: tuple[tuple[str, float], ...]
    rows: tuple[LpRow, ...]
    generals: tuple[str, ...]
    binaries: tuple[str, ...]
    continuous: tuple[str, ...]

    @property
    def variable_names(self) -> tuple[str, ...]:
        return self.generals + self.binaries + self.continuous

    def objective_value(self, values: dict[str, float]) -> float:
        return sum(coef * values[name] for name, coef in self.objective)


def build_milp(instance: DistributionInstance) -> MilpModel:
    """Assemble every row of the allocation MILP in deterministic order.

    Row families, in emission order (n articles, s stores):
        store_ub_s, store_lb_s         store quantity bands      (2s rows)
        resource_i                     per-article supply        (n rows)
        min_qty_i_s, cap_i_s           shipment/indicator link   (2ns rows)
        min_styles_s                   at least two styles       (s rows)
        u_lb/u_le_r/u_le_y, u_sum_s    reciprocal linearization  (3ns + s)
        w_lb/w_le_yi/w_le_yj/w_le_r    pair-product linearization
                                       (4s * n(n-1)/2 rows)
        variety_s                      v_s definition            (s rows)
    """
    ensure_valid(instance)
    n, s = instance.n_articles, instance.n_stores
    d = instance.distances.entries
    rows: list[LpRow] = []

    for t in range(s):
        terms = tuple((var_x(i, t), 1.0) for i in range(n))
        rows.append(LpRow(f"store_ub_{t}", terms, "<=", float(instance.upper_band(t))))
    for t in range(s):
        terms = tuple((var_x(i, t), 1.0) for i in range(n))
        rows.append(LpRow(f"store_lb_{t}", terms, ">=", float(instance.lower_band(t))))
    for i in range(n):
        terms = tuple((var_x(i, t), 1.0) for t in range(s))
        rows.append(
            LpRow(f"resource_{i}", terms, "<=", float(instance.articles[i].planned_total))
        )
    for i in range(n):
        for t in range(s):
            m_i = float(instance.articles[i].min_qty)
            rows.append(
                LpRow(
                    f"min_qty_{i}_{t}",
                    ((var_x(i, t), 1.0), (var_y(i, t), -m_i)),
                    ">=",
                    0.0,
                )
            )
    for i in range(n):
        for t in range(s):
            cap_t = float(instance.big_m(t))
            rows.append(
                LpRow(
                    f"cap_{i}_{t}",
                    ((var_x(i, t), 1.0), (var_y(i, t), -cap_t)),
                    "<=",
                    0.0,
                )
            )
    for t in range(s):
        terms = tuple((var_y(i, t), 1.0) for i in range(n))
        rows.append(LpRow(f"min_styles_{t}", terms, ">=", 2.0))

    for i in range(n):
        for t in range(s):
            rows.append(
                LpRow(
                    f"u_lb_{i}_{t}",
                    ((var_u(i, t), 1.0), (var_r(t), -1.0), (var_y(i, t), -1.0)),
                    ">=",
                    -1.0,
                )
            )
    for i in range(n):
        for t in range(s):
            rows.append(
                LpRow(
                    f"u_le_r_{i}_{t}",
                    ((var_u(i, t), 1.0), (var_r(t), -1.0)),
                    "<=",
                    0.0,
                )
            )
    for i in range(n):
        for t in range(s):
            rows.append(
                LpRow(
                    f"u_le_y_{i}_{t}",
                    ((var_u(i, t), 1.0), (var_y(i, t), -1.0)),
                    "<=",
                    0.0,
                )
            )
    for t in range(s):
        terms = tuple((var_u(i, t), 1.0) for i in range(n))
        rows.append(LpRow(f"u_sum_{t}", terms, "=", 1.0))

    for i in range(n):
        for j in range(i + 1, n):
            for t in range(s):
                w = var_w(i, j, t)
                rows.append(
                    LpRow(
                        f"w_lb_{i}_{j}_{t}",
                        (
                            (w, 1.0),
                            (var_r(t), -1.0),
                            (var_y(i, t), -1.0),
                            (var_y(j, t), -1.0),
                        ),
                        ">=",
                        -2.0,
                    )
                )
                rows.append(
                    LpRow(f"w_le_yi_{i}_{j}_{t}", ((w, 1.0), (var_y(i, t), -1.0)), "<=", 0.0)
                )
                rows.append(
                    LpRow(f"w_le_yj_{i}_{j}_{t}", ((w, 1.0), (var_y(j, t), -1.0)), "<=", 0.0)
                )
                rows.append(
                    LpRow(f"w_le_r_{i}_{j}_{t}", ((w, 1.0), (var_r(t), -1.0)), "<=", 0.0)
                )

    for t in range(s):
        terms: list[tuple[str, float]] = [(var_v(t), 1.0)]
        for i in range(n):
            for j in range(i + 1, n):
                terms.append((var_w(i, j, t), -float(d[i, j])))
        rows.append(LpRow(f"variety_{t}", tuple(terms), "=", 0.0))

    generals = tuple(var_x(i, t) for i in range(n) for t in range(s))
    binaries = tuple(var_y(i, t) for i in range(n) for t in range(s))
    continuous = (
        tuple(var_r(t) for t in range(s))
        + tuple(var_u(i, t) for i in range(n) for t in range(s))
        + tuple(
            var_w(i, j, t)
            for i in range(n)
            for j in range(i + 1, n)
            for t in range(s)
        )
        + tuple(var_v(t) for t in range(s))
    )
    objective = tuple((var_v(t), 1.0) for t in range(s))
    return MilpModel(objective, tuple(rows), generals, binaries, continuous)


def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _render_terms(terms: tuple[tuple[str, float], ...]) -> list[str]:
    """Render '+ coef name' pieces, several per line, leading sign trimmed."""
    pieces: list[str] = []
    for name, coef in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        if mag == 1:
            pieces.append(f"{sign} {name}")
        else:
            pieces.append(f"{sign} {_fmt(mag)} {name}")
    if pieces and pieces[0].startswith("+ "):
        pieces[0] = pieces[0][2:]
    lines: list[str] = []
    for start in range(0, len(pieces), 8):
        lines.append(" ".join(pieces[start : start + 8]))
    return lines or ["0"]


def export_lp(instance: DistributionInstance) -> str:
    """Serialize the full MILP in LP text format (deterministic bytes)."""
    model = build_milp(instance)
    out: list[str] = ["Maximize"]
    obj_lines = _render_terms(model.objective)
    out.append(" obj: " + obj_lines[0])
    for line in obj_lines[1:]:
        out.append("      " + line)
    out.append("Subject To")
    for row in model.rows:
        lines = _render_terms(row.terms)
        out.append(f" {row.name}: {lines[0]}")
        for line in lines[1:]:
            out.append("    " + line)
        out[-1] = out[-1] + f" {row.sense} {_fmt(row.rhs)}"
    out.append("Generals")
    for start in range(0, len(model.generals), 8):
        out.append(" " + " ".join(model.generals[start : start + 8]))
    out.append("Binaries")
    for start in range(0, len(model.binaries), 8):
        out.append(" " + " ".join(model.binaries[start : start + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class LinearizationVars:
    """Auxiliary variable values induced by an assignment pattern.

    r[s] = 1 / (style count of store s), u[i, s] = r[s] * y[i, s],
    w[i, j, s] = r[s] * y[i, s] * y[j, s] for i < j (zero elsewhere),
    and v[s] = sum of d_ij * w[i, j, s] over pairs.
    """

    r: tuple[float, ...]
    u: np.ndarray
    w: np.ndarray
    v: tuple[float, ...]

    @classmethod
    def from_pattern(cls, instance: DistributionInstance, y: np.ndarray) -> "LinearizationVars":
        y = np.asarray(y)
        n, s = y.shape
        d = instance.distances.entries
        counts = y.sum(axis=0)
        if np.any(counts < 2):
            raise ValueError("every store needs at least two styles for r = 1/count")
        r = tuple(1.0 / float(c) for c in counts)
        u = np.zeros((n, s))
        w = np.zeros((n, n, s))
        v = []
        for t in range(s):
            for i in range(n):
                u[i, t] = r[t] * float(y[i, t])
            total = 0.0
            for i in range(n):
                for j in range(i + 1, n):
                    w[i, j, t] = r[t] * float(y[i, t]) * float(y[j, t])
                    total += float(d[i, j]) * w[i, j, t]
            v.append(total)
        u.setflags(write=False)
        w.setflags(write=False)
        return cls(r, u, w, tuple(v))


def linearization_witness(instance: DistributionInstance, plan: DistributionPlan) -> dict[str, float]:
    """Flat variable assignment for a plan, keyed by LP variable names.

    Substituting this dict into every row of ``build_milp(instance)``
    satisfies the whole system when the plan is feasible; see
    ``check_assignment``.
    """
    aux = LinearizationVars.from_pattern(instance, plan.y)
    n, s = plan.x.shape
    values: dict[str, float] = {}
    for i in range(n):
        for t in range(s):
            values[var_x(i, t)] = float(plan.x[i, t])
            values[var_y(i, t)] = float(plan.y[i, t])
            values[var_u(i, t)] = float(aux.u[i, t])
    for t in range(s):
        values[var_r(t)] = aux.r[t]
        values[var_v(t)] = aux.v[t]
    for i in range(n):
        for j in range(i + 1, n):
            for t in range(s):
                values[var_w(i, j, t)] = float(aux.w[i, j, t])
    return values


def check_assignment(
    model: MilpModel, values: dict[str, float], tol: float = 1e-9
) -> list[str]:
    """Names of the model rows the assignment violates (empty if none)."""
    return [row.name for row in model.rows if not row.satisfied(values, tol)]
