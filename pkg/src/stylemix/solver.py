"""Allocation solvers: quantity feasibility, exact search, heuristic.

The objective (sum over stores of the MAX_MEAN variety of the assigned
style set) depends only on the assignment indicators y, never on the
shipped quantities x. Both solvers therefore search over assignment
patterns and delegate quantity placement to a flow subproblem:

    quantity_feasible   decides, for a fixed pattern, whether integer
                        quantities exist inside all bounds, returning
                        either the quantities or a certificate cut
    solve_exact         depth-first enumeration of per-store subsets
                        with objective and capacity pruning; optimal
    solve_heuristic     greedy construction, certificate-guided repair,
                        then first-improvement local search

All objective comparisons use a 1e-9 absolute tolerance; quantity
arithmetic is exact integer.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    DistributionInstance,
    DistributionPlan,
    ensure_valid,
    validate_instance,
)
from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InfeasibleError,
    InfeasiblePlanError,
    MalformedInputError,
    TooFewStylesError,
    Violation,
)
from .flow import Edge, cut_violation, feasible_circulation
from .lp import LinearizationVars, export_lp
from .variety import VarietyMeasure, variety

__all__ = [
    "AssignmentPattern",
    "CutCertificate",
    "EdgeCertificate",
    "QuantityResult",
    "SolveStatus",
    "SolveLimits",
    "HeuristicConfig",
    "SolveReport",
    "LinearizationVars",
    "quantity_feasible",
    "plan_from_quantities",
    "evaluate_plan",
    "plan_violations",
    "solve_exact",
    "solve_heuristic",
    "improve_plan",
    "export_lp",
]

OBJECTIVE_TOLERANCE = 1e-9
_TIE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class AssignmentPattern:
    """Binary article-by-store assignment matrix.

    Every store must be assigned at least two distinct styles; the
    constructor rejects anything else.
    """

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.int8)
        if y.ndim != 2:
            raise DimensionMismatchError("pattern must be a 2-D matrix")
        if not np.all((y == 0) | (y == 1)):
            raise MalformedInputError("pattern entries must be 0 or 1")
        counts = y.sum(axis=0)
        short = np.nonzero(counts < 2)[0]
        if short.size:
            raise TooFewStylesError(
                f"store {int(short[0])} is assigned {int(counts[short[0]])} "
                "styles; every store needs at least 2"
            )
        y = y.copy()
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_sets(cls, n_articles: int, sets: list[set[int]] | list[frozenset[int]]) -> "AssignmentPattern":
        y = np.zeros((n_articles, len(sets)), dtype=np.int8)
        for s, members in enumerate(sets):
            for i in members:
                y[i, s] = 1
        return cls(y)

    @property
    def n_articles(self) -> int:
        return int(self.y.shape[0])

    @property
    def n_stores(self) -> int:
        return int(self.y.shape[1])

    def store_set(self, s: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.y[:, s])[0])


@dataclass(frozen=True)
class CutCertificate:
    """Cut witness that no feasible quantities exist.

    ``required`` units must cross into the cut (lower bounds) but only
    ``available`` can, so required > available proves infeasibility.
    When ``demand_driven``, the listed stores' lower quantity bands
    outstrip the supply reachable from the listed articles; otherwise
    the forced minimum shipments into the listed stores exceed what
    those stores can absorb or reroute.
    """

    articles: tuple[int, ...]
    stores: tuple[int, ...]
    demand_driven: bool
    required: int
    available: int

    def __str__(self) -> str:
        where = f"stores {list(self.stores)}" if self.stores else "the stores overall"
        if self.demand_driven:
            return (
                f"{where} demand at least {self.required} units, but at most "
                f"{self.available} can reach them (supply articles {list(self.articles)})"
            )
        return (
            f"minimum shipments into {where} total {self.required} units, "
            f"but at most {self.available} can be absorbed"
        )


@dataclass(frozen=True)
class EdgeCertificate:
    """A single (article, store) pair whose minimum exceeds its cap."""

    article: int
    store: int
    min_qty: int
    cap: int

    def __str__(self) -> str:
        return (
            f"article {self.article} at store {self.store} requires at least "
            f"{self.min_qty} units but is capped at {self.cap}"
        )


@dataclass(frozen=True)
class QuantityResult:
    """Outcome of a quantity-feasibility check for one pattern."""

    feasible: bool
    x: np.ndarray | None = None
    certificate: CutCertificate | EdgeCertificate | None = None


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE_HEURISTIC = "feasible_heuristic"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveLimits:
    """Budgets for the exact solver.

    max_patterns bounds the number of complete patterns submitted to the
    flow check; time_budget (seconds) bounds wall time. Either may be
    None for no limit.
    """

    max_patterns: int | None = 1_000_000
    time_budget: float | None = 60.0


@dataclass(frozen=True)
class HeuristicConfig:
    seed: int = 0
    max_iters: int = 10_000
    neighborhoods: tuple[str, ...] = ("swap", "move", "toggle")
    restarts: int = 16

    def __post_init__(self):
        allowed = {"swap", "move", "toggle"}
        for name in self.neighborhoods:
            if name not in allowed:
                raise ValueError(f"unknown neighborhood {name!r}")


@dataclass(frozen=True)
class SolveReport:
    """Solver outcome plus bookkeeping.

    iterations counts flow-checked patterns (exact) or accepted moves
    (heuristic). trace, when present, lists (iteration, objective) at
    each incumbent improvement and is strictly increasing in objective.
    """

    plan: DistributionPlan | None
    status: SolveStatus
    iterations: int
    wall_time: float
    trace: tuple[tuple[int, float], ...] | None = None

    @property
    def objective(self) -> float | None:
        return None if self.plan is None else self.plan.objective

    def to_dict(self, include_wall_time: bool = True) -> dict:
        payload = {
            "status": self.status.value,
            "objective": self.objective,
            "per_store_variety": (
                [] if self.plan is None else list(self.plan.per_store_variety)
            ),
            "x": [] if self.plan is None else self.plan.x.tolist(),
            "y": [] if self.plan is None else self.plan.y.astype(int).tolist(),
            "iterations": self.iterations,
            "wall_time_s": self.wall_time if include_wall_time else None,
        }
        return payload


def _check_pattern_shape(instance: DistributionInstance, pattern: AssignmentPattern) -> None:
    if pattern.n_articles != instance.n_articles or pattern.n_stores != instance.n_stores:
        raise DimensionMismatchError(
            f"pattern is {pattern.n_articles}x{pattern.n_stores} but the instance "
            f"has {instance.n_articles} articles and {instance.n_stores} stores"
        )


def _build_edges(instance: DistributionInstance, y: np.ndarray):
    """Circulation network for a pattern: SRC=0, SNK=1, then articles, stores."""
    n, s = y.shape
    src, snk = 0, 1
    art = lambda i: 2 + i
    sto = lambda t: 2 + n + t
    edges: list[Edge] = []
    assign_pos: dict[tuple[int, int], int] = {}
    for i, article in enumerate(instance.articles):
        edges.append(Edge(src, art(i), 0, article.planned_total))
    for t in range(s):
        cap_t = instance.big_m(t)
        for i in range(n):
            if y[i, t]:
                assign_pos[(i, t)] = len(edges)
                edges.append(Edge(art(i), sto(t), instance.articles[i].min_qty, cap_t))
    for t in range(s):
        edges.append(Edge(sto(t), snk, instance.lower_band(t), instance.upper_band(t)))
    edges.append(Edge(snk, src, 0, None))
    return edges, assign_pos, 2 + n + s


def _certificate_from_cut(
    instance: DistributionInstance,
    edges: list[Edge],
    reached: frozenset[int],
    n_nodes: int,
) -> CutCertificate:
    n = instance.n_articles
    all_nodes = frozenset(range(n_nodes))
    for candidate in (reached, all_nodes - reached):
        required, available = cut_violation(edges, candidate)
        if required > available:
            demand_driven = 1 in candidate
            if demand_driven:
                # Store lower bands cross into the cut exactly for the
                # stores outside it, and supply leaves over the planned
                # totals of the articles outside it.
                stores = tuple(
                    t for t in range(instance.n_stores) if (2 + n + t) not in candidate
                )
                articles = tuple(
                    i for i in range(n) if (2 + i) not in candidate
                )
            else:
                # Forced minimum shipments flow into the stores inside
                # the cut from the assigned articles left outside it.
                stores = tuple(
                    t for t in range(instance.n_stores) if (2 + n + t) in candidate
                )
                articles = tuple(
                    sorted(
                        {
                            edge.tail - 2
                            for edge in edges
                            if 2 <= edge.tail < 2 + n
                            and edge.tail not in candidate
                            and edge.head in candidate
                        }
                    )
                )
            return CutCertificate(
                articles=articles,
                stores=stores,
                demand_driven=demand_driven,
                required=required,
                available=int(available),
            )
    raise AssertionError("infeasible circulation produced no violated cut")


def quantity_feasible(instance: DistributionInstance, pattern: AssignmentPattern) -> QuantityResult:
    """Decide whether a pattern admits integer shipment quantities.

    Bounds enforced: per assigned pair, min_qty <= x_is <= big_m(s);
    per article, total shipped <= planned_total; per store, the total
    received lies in the integer quantity band. Unassigned pairs ship 0.

    Returns:
        QuantityResult. On success, x is one integer solution (flows are
        integral, so no rounding is involved). On failure, certificate
        explains the obstruction.
    """
    _check_pattern_shape(instance, pattern)
    y = pattern.y
    n, s = y.shape
    for t in range(s):
        cap_t = instance.big_m(t)
        for i in range(n):
            if y[i, t] and instance.articles[i].min_qty > cap_t:
                return QuantityResult(
                    False,
                    certificate=EdgeCertificate(
                        i, t, instance.articles[i].min_qty, cap_t
                    ),
                )
    edges, assign_pos, n_nodes = _build_edges(instance, y)
    result = feasible_circulation(n_nodes, edges)
    if result.feasible:
        x = np.zeros((n, s), dtype=np.int64)
        for (i, t), pos in assign_pos.items():
            x[i, t] = result.flows[pos]
        return QuantityResult(True, x=x)
    certificate = _certificate_from_cut(instance, edges, result.reached, n_nodes)
    return QuantityResult(False, certificate=certificate)


def _store_varieties(instance: DistributionInstance, y: np.ndarray) -> list[float]:
    values = []
    for t in range(y.shape[1]):
        members = np.nonzero(y[:, t])[0]
        if members.size == 0:
            values.append(0.0)
        else:
            values.append(variety(VarietyMeasure.MAX_MEAN, members, instance.distances))
    return values


def plan_from_quantities(instance: DistributionInstance, x: np.ndarray) -> DistributionPlan:
    """Build a plan from shipment quantities, deriving y and varieties."""
    x = np.asarray(x, dtype=np.int64)
    y = (x >= 1).astype(np.int8)
    varieties = _store_varieties(instance, y)
    return DistributionPlan(
        x=x,
        y=y,
        per_store_variety=tuple(varieties),
        objective=float(sum(varieties)),
    )


def plan_violations(instance: DistributionInstance, plan: DistributionPlan) -> list[Violation]:
    """All constraint breaches of a plan against an instance."""
    violations: list[Violation] = []
    if plan.n_articles != instance.n_articles or plan.n_stores != instance.n_stores:
        violations.append(
            Violation(
                "shape_mismatch",
                "plan",
                f"plan is {plan.n_articles}x{plan.n_stores}, instance needs "
                f"{instance.n_articles}x{instance.n_stores}",
            )
        )
        return violations
    x, y = plan.x, plan.y
    for t in range(instance.n_stores):
        count = int(y[:, t].sum())
        if count < 2:
            violations.append(
                Violation(
                    "too_few_styles",
                    instance.stores[t].id,
                    f"store receives {count} styles, needs at least 2",
                )
            )
        total = int(x[:, t].sum())
        lb, ub = instance.lower_band(t), instance.upper_band(t)
        if not (lb <= total <= ub):
            violations.append(
                Violation(
                    "store_band",
                    instance.stores[t].id,
                    f"store total {total} outside [{lb}, {ub}]",
                )
            )
        cap_t = instance.big_m(t)
        for i in range(instance.n_articles):
            if y[i, t]:
                if x[i, t] < instance.articles[i].min_qty:
                    violations.append(
                        Violation(
                            "below_min_qty",
                            f"{instance.articles[i].id}@{instance.stores[t].id}",
                            f"shipment {int(x[i, t])} below minimum "
                            f"{instance.articles[i].min_qty}",
                        )
                    )
                if x[i, t] > cap_t:
                    violations.append(
                        Violation(
                            "above_cap",
                            f"{instance.articles[i].id}@{instance.stores[t].id}",
                            f"shipment {int(x[i, t])} above cap {cap_t}",
                        )
                    )
    for i in range(instance.n_articles):
        shipped = int(x[i].sum())
        if shipped > instance.articles[i].planned_total:
            violations.append(
                Violation(
                    "planned_total_exceeded",
                    instance.articles[i].id,
                    f"shipped {shipped} exceeds planned total "
                    f"{instance.articles[i].planned_total}",
                )
            )
    expected = _store_varieties(instance, y)
    for t, (stored, fresh) in enumerate(zip(plan.per_store_variety, expected)):
        if not math.isclose(stored, fresh, rel_tol=1e-9, abs_tol=1e-9):
            violations.append(
                Violation(
                    "variety_mismatch",
                    instance.stores[t].id,
                    f"stored variety {stored} does not match recomputed {fresh}",
                )
            )
    return violations


def evaluate_plan(instance: DistributionInstance, plan: DistributionPlan) -> float:
    """Validate a plan against every constraint and score it.

    Returns:
        The objective: sum over stores of the MAX_MEAN variety of the
        assigned style set.

    Raises:
        ValidationError: The instance itself is invalid.
        InfeasiblePlanError: Any constraint breach, carrying the list.
    """
    ensure_valid(instance)
    violations = plan_violations(instance, plan)
    if violations:
        raise InfeasiblePlanError(violations)
    return float(sum(_store_varieties(instance, plan.y)))


def _usable_articles(instance: DistributionInstance, t: int) -> list[int]:
    cap_t = instance.big_m(t)
    return [
        i
        for i, article in enumerate(instance.articles)
        if article.min_qty <= cap_t and article.min_qty <= article.planned_total
    ]


def _store_candidates(instance: DistributionInstance, t: int) -> list[tuple[tuple[int, ...], float]]:
    """All admissible style subsets for one store with their varieties.

    Admissible means: at least two styles, the forced minimum shipments
    fit under the store's upper band, and the combined per-pair caps can
    still cover its lower band.
    """
    usable = _usable_articles(instance, t)
    lb, ub = instance.lower_band(t), instance.upper_band(t)
    cap_t = instance.big_m(t)
    mins = instance.min_quantities()
    planned = instance.planned_totals()
    out: list[tuple[tuple[int, ...], float]] = []
    for size in range(2, len(usable) + 1):
        for combo in itertools.combinations(usable, size):
            idx = np.asarray(combo, dtype=np.intp)
            if int(mins[idx].sum()) > ub:
                continue
            if int(np.minimum(planned[idx], cap_t).sum()) < lb:
                continue
            value = variety(VarietyMeasure.MAX_MEAN, idx, instance.distances)
            out.append((combo, value))
    return out


def _flat_y_key(columns: list[tuple[int, ...]], n: int) -> tuple[int, ...]:
    """Row-major flattening of y for lexicographic comparisons."""
    s = len(columns)
    y = np.zeros((n, s), dtype=np.int8)
    for t, members in enumerate(columns):
        for i in members:
            y[i, t] = 1
    return tuple(int(v) for v in y.reshape(-1))


def solve_exact(
    instance: DistributionInstance,
    limits: SolveLimits | None = None,
) -> SolveReport:
    """Enumerate assignment patterns to find the best feasible plan.

    Depth-first search assigns each store an admissible style subset,
    pruning on per-article capacity for the forced minimums and on an
    optimistic objective bound. Complete patterns go through the flow
    feasibility check. Among objective ties (within 1e-12) the plan with
    the lexicographically smallest row-major y wins.

    A quick heuristic run seeds the pruning bound; it cannot change the
    reported optimum, only the search speed.

    Raises:
        ValidationError: Invalid instance.
        InfeasibleError: No pattern admits feasible quantities.
        BudgetExceededError: Budget exhausted before any feasible plan
            was found. If one was found, the report is returned instead
            with status FEASIBLE_HEURISTIC.
    """
    ensure_valid(instance)
    limits = limits or SolveLimits()
    started = time.perf_counter()
    n, s = instance.n_articles, instance.n_stores

    candidates = [_store_candidates(instance, t) for t in range(s)]
    for t, options in enumerate(candidates):
        if not options:
            raise InfeasibleError(
                f"store {instance.stores[t].id!r} has no admissible style subset"
            )

    suffix_best = [0.0] * (s + 1)
    for t in range(s - 1, -1, -1):
        best_here = max(value for _, value in candidates[t])
        suffix_best[t] = suffix_best[t + 1] + best_here

    seed_plan: DistributionPlan | None = None
    seed_bound = -math.inf
    if s > 0:
        try:
            seed_report = solve_heuristic(
                instance, HeuristicConfig(seed=0, max_iters=2000, restarts=4)
            )
            seed_plan = seed_report.plan
            seed_bound = seed_plan.objective - 2 * _TIE_TOLERANCE
        except InfeasibleError:
            seed_plan = None

    mins = instance.min_quantities()
    planned = instance.planned_totals()

    best_value = -math.inf
    best_columns: list[tuple[int, ...]] | None = None
    best_key: tuple[int, ...] | None = None
    best_x: np.ndarray | None = None
    checked = 0
    trace: list[tuple[int, float]] = []
    chosen: list[tuple[int, ...]] = []
    remaining = planned.copy()
    out_of_budget = False
    last_certificate = None

    def bound() -> float:
        return max(best_value, seed_bound)

    def dfs(t: int, partial: float) -> None:
        nonlocal best_value, best_columns, best_key, best_x, checked
        nonlocal out_of_budget, last_certificate
        if out_of_budget:
            return
        if t == s:
            if limits.max_patterns is not None and checked >= limits.max_patterns:
                out_of_budget = True
                return
            if (
                limits.time_budget is not None
                and time.perf_counter() - started > limits.time_budget
            ):
                out_of_budget = True
                return
            checked += 1
            pattern = AssignmentPattern.from_sets(n, [set(c) for c in chosen])
            result = quantity_feasible(instance, pattern)
            if not result.feasible:
                last_certificate = result.certificate
                return
            key = _flat_y_key(chosen, n)
            if partial > best_value + _TIE_TOLERANCE:
                accept = True
            elif (
                best_key is not None
                and partial >= best_value - _TIE_TOLERANCE
                and key < best_key
            ):
                accept = True
            elif best_key is None:
                accept = True
            else:
                accept = False
            if accept:
                if partial > best_value:
                    trace.append((checked, partial))
                best_value = max(best_value, partial)
                best_columns = list(chosen)
                best_key = key
                best_x = result.x
            return
        if partial + suffix_best[t] < bound() - _TIE_TOLERANCE:
            return
        for combo, value in candidates[t]:
            if partial + value + suffix_best[t + 1] < bound() - _TIE_TOLERANCE:
                continue
            idx = np.asarray(combo, dtype=np.intp)
            if np.any(remaining[idx] < mins[idx]):
                continue
            remaining[idx] -= mins[idx]
            chosen.append(combo)
            dfs(t + 1, partial + value)
            chosen.pop()
            remaining[idx] += mins[idx]
            if out_of_budget:
                return

    dfs(0, 0.0)
    elapsed = time.perf_counter() - started

    if best_columns is not None:
        plan = plan_from_quantities(instance, best_x)
        status = SolveStatus.FEASIBLE_HEURISTIC if out_of_budget else SolveStatus.OPTIMAL
        return SolveReport(plan, status, checked, elapsed, tuple(trace))
    if out_of_budget:
        if seed_plan is not None:
            return SolveReport(
                seed_plan, SolveStatus.FEASIBLE_HEURISTIC, checked, elapsed, None
            )
        raise BudgetExceededError(
            f"no feasible plan within budget ({checked} patterns checked)"
        )
    raise InfeasibleError(
        "no assignment pattern admits feasible quantities",
        certificate=last_certificate,
    )


class _SearchState:
    """Mutable pattern state for construction and local search."""

    def __init__(self, instance: DistributionInstance):
        self.instance = instance
        self.d = instance.distances.entries
        self.n = instance.n_articles
        self.s = instance.n_stores
        self.mins = instance.min_quantities()
        self.planned = instance.planned_totals()
        self.sets: list[set[int]] = [set() for _ in range(self.s)]
        self.pair_sums = [0.0] * self.s
        self.committed = np.zeros(self.n, dtype=np.int64)

    def store_value(self, t: int) -> float:
        k = len(self.sets[t])
        return self.pair_sums[t] / k if k >= 2 else 0.0

    def objective(self) -> float:
        return sum(self.store_value(t) for t in range(self.s))

    def links(self, t: int, i: int) -> float:
        members = self.sets[t]
        return float(sum(self.d[i, j] for j in members if j != i))

    def add(self, t: int, i: int) -> None:
        self.pair_sums[t] += self.links(t, i)
        self.sets[t].add(i)
        self.committed[i] += self.mins[i]

    def remove(self, t: int, i: int) -> None:
        self.sets[t].discard(i)
        self.pair_sums[t] -= self.links(t, i)
        self.committed[i] -= self.mins[i]

    def add_gain(self, t: int, i: int) -> float:
        k = len(self.sets[t])
        new_sum = self.pair_sums[t] + self.links(t, i)
        return new_sum / (k + 1) - self.store_value(t)

    def drop_gain(self, t: int, i: int) -> float:
        k = len(self.sets[t])
        new_sum = self.pair_sums[t] - self.links(t, i)
        new_value = new_sum / (k - 1) if k - 1 >= 2 else 0.0
        return new_value - self.store_value(t)

    def can_add(self, t: int, i: int, usable: set[int]) -> bool:
        if i in self.sets[t] or i not in usable:
            return False
        if self.committed[i] + self.mins[i] > self.planned[i]:
            return False
        forced = int(sum(self.mins[j] for j in self.sets[t])) + int(self.mins[i])
        return forced <= self.instance.upper_band(t)

    def pattern(self) -> AssignmentPattern:
        return AssignmentPattern.from_sets(self.n, self.sets)

    def y_bytes(self) -> bytes:
        y = np.zeros((self.n, self.s), dtype=np.int8)
        for t, members in enumerate(self.sets):
            for i in members:
                y[i, t] = 1
        return y.tobytes()


def _construct(
    state: _SearchState,
    usable: list[set[int]],
    priority: list[int],
    gain_driven: bool,
) -> bool:
    """Greedy pattern construction; returns False if some store ends short."""
    instance = state.instance
    rank = {i: pos for pos, i in enumerate(priority)}
    store_order = sorted(
        range(state.s), key=lambda t: (-instance.stores[t].desired_qty, t)
    )
    for t in store_order:
        lb = instance.lower_band(t)
        cap_t = instance.big_m(t)
        while True:
            members = state.sets[t]
            coverage = int(
                sum(min(cap_t, int(state.planned[i])) for i in members)
            )
            if len(members) >= 2 and coverage >= lb:
                break
            addable = [i for i in priority if state.can_add(t, i, usable[t])]
            if not addable:
                break
            if gain_driven:
                chosen = max(addable, key=lambda i: (state.add_gain(t, i), -rank[i]))
            else:
                chosen = addable[0]
            state.add(t, chosen)
    return all(len(members) >= 2 for members in state.sets)


def _repair(state: _SearchState, usable: list[set[int]]) -> QuantityResult | None:
    """Drive a structurally complete pattern to quantity feasibility.

    Uses infeasibility certificates to decide whether a cut needs more
    supply options (add a style) or carries too much forced minimum
    (drop a style). Returns the feasible QuantityResult or None.
    """
    instance = state.instance
    seen: set[bytes] = set()
    for _ in range(4 * state.n * state.s + 8):
        result = quantity_feasible(instance, state.pattern())
        if result.feasible:
            return result
        fingerprint = state.y_bytes()
        if fingerprint in seen:
            return None
        seen.add(fingerprint)
        cert = result.certificate
        changed = False
        if isinstance(cert, EdgeCertificate):
            if len(state.sets[cert.store]) > 2:
                state.remove(cert.store, cert.article)
                changed = True
        elif isinstance(cert, CutCertificate) and cert.demand_driven:
            for t in cert.stores:
                addable = sorted(
                    (i for i in usable[t] if state.can_add(t, i, usable[t])),
                    key=lambda i: (-state.add_gain(t, i), i),
                )
                if addable:
                    state.add(t, addable[0])
                    changed = True
                    break
        elif isinstance(cert, CutCertificate):
            for t in sorted(cert.stores):
                if len(state.sets[t]) > 2:
                    drop = max(
                        sorted(state.sets[t]),
                        key=lambda i: (state.drop_gain(t, i), -i),
                    )
                    state.remove(t, drop)
                    changed = True
                    break
        if not changed:
            return None
    return None


def _local_search(
    state: _SearchState,
    usable: list[set[int]],
    x0: np.ndarray,
    config: HeuristicConfig,
) -> tuple[np.ndarray, int, list[tuple[int, float]]]:
    """First-improvement local search over swap/move/toggle neighborhoods."""
    instance = state.instance
    value = state.objective()
    iterations = 0
    trace: list[tuple[int, float]] = [(0, value)]
    best_x = x0

    def try_apply(mutate, undo) -> QuantityResult | None:
        mutate()
        result = quantity_feasible(instance, state.pattern())
        if result.feasible:
            return result
        undo()
        return None

    scans = {"swap": _scan_swap, "move": _scan_move, "toggle": _scan_toggle}
    improved = True
    while improved and iterations < config.max_iters:
        improved = False
        for neighborhood in config.neighborhoods:
            for delta, mutate, undo in scans[neighborhood](state, usable):
                result = try_apply(mutate, undo)
                if result is None:
                    continue
                value += delta
                iterations += 1
                trace.append((iterations, value))
                best_x = result.x
                improved = True
                break
            if improved:
                break
    return best_x, iterations, trace


def _scan_swap(state: _SearchState, usable: list[set[int]]):
    instance = state.instance
    for t in range(state.s):
        for u in range(t + 1, state.s):
            only_t = sorted(state.sets[t] - state.sets[u])
            only_u = sorted(state.sets[u] - state.sets[t])
            for i in only_t:
                for j in only_u:
                    if j not in usable[t] or i not in usable[u]:
                        continue
                    forced_t = sum(state.mins[a] for a in state.sets[t]) - state.mins[i] + state.mins[j]
                    forced_u = sum(state.mins[a] for a in state.sets[u]) - state.mins[j] + state.mins[i]
                    if forced_t > instance.upper_band(t) or forced_u > instance.upper_band(u):
                        continue
                    delta = (
                        state.drop_gain(t, i)
                        + state.drop_gain(u, j)
                        + _gain_after_drop(state, t, i, j)
                        + _gain_after_drop(state, u, j, i)
                    )
                    if delta > OBJECTIVE_TOLERANCE:

                        def mutate(t=t, u=u, i=i, j=j):
                            state.remove(t, i)
                            state.add(t, j)
                            state.remove(u, j)
                            state.add(u, i)

                        def undo(t=t, u=u, i=i, j=j):
                            state.remove(t, j)
                            state.add(t, i)
                            state.remove(u, i)
                            state.add(u, j)

                        yield delta, mutate, undo


def _gain_after_drop(state: _SearchState, t: int, dropped: int, added: int) -> float:
    """Value change of adding ``added`` to store t after ``dropped`` left."""
    members = state.sets[t] - {dropped}
    k = len(members)
    base_sum = state.pair_sums[t] - state.links(t, dropped)
    base_value = base_sum / k if k >= 2 else 0.0
    link_sum = float(sum(state.d[added, j] for j in members))
    new_value = (base_sum + link_sum) / (k + 1) if k + 1 >= 2 else 0.0
    return new_value - base_value


def _scan_move(state: _SearchState, usable: list[set[int]]):
    instance = state.instance
    for t in range(state.s):
        if len(state.sets[t]) <= 2:
            continue
        for u in range(state.s):
            if u == t:
                continue
            for i in sorted(state.sets[t] - state.sets[u]):
                if i not in usable[u]:
                    continue
                forced_u = sum(state.mins[a] for a in state.sets[u]) + state.mins[i]
                if forced_u > instance.upper_band(u):
                    continue
                delta = state.drop_gain(t, i) + state.add_gain(u, i)
                if delta > OBJECTIVE_TOLERANCE:

                    def mutate(t=t, u=u, i=i):
                        state.remove(t, i)
                        state.add(u, i)

                    def undo(t=t, u=u, i=i):
                        state.remove(u, i)
                        state.add(t, i)

                    yield delta, mutate, undo


def _scan_toggle(state: _SearchState, usable: list[set[int]]):
    for t in range(state.s):
        for i in sorted(usable[t] - state.sets[t]):
            if not state.can_add(t, i, usable[t]):
                continue
            delta = state.add_gain(t, i)
            if delta > OBJECTIVE_TOLERANCE:

                def mutate(t=t, i=i):
                    state.add(t, i)

                def undo(t=t, i=i):
                    state.remove(t, i)

                yield delta, mutate, undo
        if len(state.sets[t]) > 2:
            for i in sorted(state.sets[t]):
                delta = state.drop_gain(t, i)
                if delta > OBJECTIVE_TOLERANCE:

                    def mutate(t=t, i=i):
                        state.remove(t, i)

                    def undo(t=t, i=i):
                        state.add(t, i)

                    yield delta, mutate, undo


def solve_heuristic(
    instance: DistributionInstance,
    config: HeuristicConfig | None = None,
) -> SolveReport:
    """Greedy construction plus local search; deterministic given seed.

    Construction fills stores in descending desired quantity, repeatedly
    taking the remaining-capacity article with the best MAX_MEAN
    marginal gain until the store's lower band is coverable. Certificate
    guided repair then fixes quantity infeasibility; failed attempts
    restart with seeded random article priorities. The surviving pattern
    is polished by first-improvement local search over swap, move, and
    toggle neighborhoods, each accepted move re-checked for quantity
    feasibility.

    Raises:
        ValidationError: Invalid instance.
        InfeasibleError: No feasible pattern was found by any restart.
    """
    ensure_valid(instance)
    config = config or HeuristicConfig()
    started = time.perf_counter()
    usable = [set(_usable_articles(instance, t)) for t in range(instance.n_stores)]

    feasible_state: _SearchState | None = None
    first_x: np.ndarray | None = None
    last_certificate = None
    for attempt in range(max(1, config.restarts)):
        state = _SearchState(instance)
        priority = list(range(instance.n_articles))
        if attempt > 0:
            rng = random.Random(config.seed * 1_000_003 + attempt)
            rng.shuffle(priority)
        gain_driven = attempt % 3 != 2
        if not _construct(state, usable, priority, gain_driven):
            continue
        probe = quantity_feasible(instance, state.pattern())
        if probe.feasible:
            feasible_state, first_x = state, probe.x
            break
        last_certificate = probe.certificate
        repaired = _repair(state, usable)
        if repaired is not None:
            feasible_state, first_x = state, repaired.x
            break

    if feasible_state is None:
        raise InfeasibleError(
            "construction and repair found no feasible pattern",
            certificate=last_certificate,
        )

    best_x, iterations, trace = _local_search(feasible_state, usable, first_x, config)
    plan = plan_from_quantities(instance, best_x)
    elapsed = time.perf_counter() - started
    return SolveReport(
        plan,
        SolveStatus.FEASIBLE_HEURISTIC,
        iterations,
        elapsed,
        tuple(trace),
    )


def improve_plan(
    instance: DistributionInstance,
    plan: DistributionPlan,
    config: HeuristicConfig | None = None,
) -> SolveReport:
    """Polish an already-feasible plan with the local-search phase only.

    Raises:
        ValidationError: Invalid instance.
        InfeasiblePlanError: The starting plan violates constraints.
    """
    ensure_valid(instance)
    config = config or HeuristicConfig()
    started = time.perf_counter()
    violations = plan_violations(instance, plan)
    if violations:
        raise InfeasiblePlanError(violations)
    usable = [set(_usable_articles(instance, t)) for t in range(instance.n_stores)]
    state = _SearchState(instance)
    for t in range(instance.n_stores):
        for i in plan.store_set(t):
            state.add(t, i)
    best_x, iterations, trace = _local_search(
        state, usable, np.asarray(plan.x, dtype=np.int64), config
    )
    polished = plan_from_quantities(instance, best_x)
    elapsed = time.perf_counter() - started
    return SolveReport(
        polished,
        SolveStatus.FEASIBLE_HEURISTIC,
        iterations,
        elapsed,
        tuple(trace),
    )
