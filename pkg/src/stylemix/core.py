"""Shared data model: style catalogs, distance matrices, instances, plans.

Everything here is immutable after construction and safe to share across
threads. Parsing is strict: malformed input raises a specific
``CatalogError`` subclass (or ``MalformedInputError`` for instances)
naming the offending row or field, while semantic problems with an
otherwise well-formed instance are reported by ``validate_instance`` as
a list of ``Violation`` records.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    DimensionMismatchError,
    DuplicateIdError,
    MalformedInputError,
    NonFiniteValueError,
    ValidationError,
    Violation,
)

__all__ = [
    "Metric",
    "BigMPolicy",
    "StyleRecord",
    "FeatureCatalog",
    "DistanceMatrix",
    "Article",
    "Store",
    "DistributionInstance",
    "DistributionPlan",
    "distance_matrix",
    "load_catalog",
    "read_catalog_file",
    "load_instance",
    "read_instance_file",
    "instance_to_json",
    "validate_instance",
    "ensure_valid",
]


class Metric(Enum):
    """Pairwise dissimilarity between feature vectors.

    SQUARED_EUCLIDEAN is the default. EUCLIDEAN satisfies the triangle
    inequality, which some variety-measure guarantees depend on.
    """

    SQUARED_EUCLIDEAN = "squared_euclidean"
    EUCLIDEAN = "euclidean"

    @classmethod
    def from_name(cls, name: str) -> "Metric":
        text = name.strip().lower().replace("-", "_")
        for member in cls:
            if member.value == text:
                return member
        raise MalformedInputError(
            f"unknown metric {name!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


class BigMPolicy(Enum):
    """How the coupling cap on x_is is chosen for each (article, store).

    STORE_QTY caps shipments at the store's desired quantity q_s (wire
    value ``"paper_qs"``, the default). BAND_LIMIT caps them at the
    store's integer upper quantity band floor((1+alpha)*q_s) (wire value
    ``"tolerant_qs"``), which can never bind below a feasible shipment.
    """

    STORE_QTY = "paper_qs"
    BAND_LIMIT = "tolerant_qs"

    @classmethod
    def from_name(cls, name: str) -> "BigMPolicy":
        text = name.strip().lower()
        for member in cls:
            if member.value == text:
                return member
        raise MalformedInputError(
            f"unknown big_m_policy {name!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_exact_fraction(value) -> Fraction:
    """Convert a parsed JSON number (or Python scalar) to an exact Fraction.

    Strings are treated as decimal literals, so ``"0.2"`` becomes exactly
    1/5 rather than the nearest binary float. Floats go through their
    shortest repr, which preserves the decimal the user wrote.
    """
    if isinstance(value, bool):
        raise MalformedInputError("expected a number, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise MalformedInputError(f"expected a finite number, got {value!r}")
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"not a number: {value!r}") from exc
    raise MalformedInputError(f"expected a number, got {type(value).__name__}")


def _as_int(value, *, field_name: str) -> int:
    if isinstance(value, bool):
        raise MalformedInputError(f"{field_name} must be an integer, got a boolean")
    if isinstance(value, int):
        return value
    frac = _as_exact_fraction(value)
    if frac.denominator != 1:
        raise MalformedInputError(f"{field_name} must be an integer, got {value!r}")
    return int(frac)


@dataclass(frozen=True)
class StyleRecord:
    """One style: an identifier plus its feature vector."""

    id: str
    vector: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class FeatureCatalog:
    """Ordered collection of styles with equal-dimension feature vectors.

    Attributes:
        ids: Style identifiers, unique and non-empty, in input order.
        vectors: Read-only float array of shape (n, dim), all finite.
    """

    ids: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise DimensionMismatchError(
                f"vectors must form a 2-D array, got {vectors.ndim} dimensions"
            )
        if vectors.shape[0] != len(self.ids):
            raise DimensionMismatchError(
                f"{len(self.ids)} ids but {vectors.shape[0]} vectors"
            )
        if len(self.ids) == 0:
            raise MalformedInputError("catalog has no styles")
        if vectors.shape[1] < 1:
            raise MalformedInputError("feature vectors must have at least one entry")
        seen = set()
        for sid in self.ids:
            if not sid:
                raise MalformedInputError("style id must be non-empty")
            if sid in seen:
                raise DuplicateIdError(f"duplicate style id {sid!r}")
            seen.add(sid)
        if not np.all(np.isfinite(vectors)):
            bad = int(np.argwhere(~np.isfinite(vectors))[0][0])
            raise NonFiniteValueError(
                f"style {self.ids[bad]!r} has a non-finite vector entry"
            )
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "vectors", _readonly(vectors))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureCatalog):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.vectors, other.vectors)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def styles(self) -> tuple[StyleRecord, ...]:
        return tuple(
            StyleRecord(sid, tuple(float(v) for v in row))
            for sid, row in zip(self.ids, self.vectors)
        )

    def normalized(self) -> "FeatureCatalog":
        """Return a copy with every vector scaled to unit L2 norm."""
        norms = np.linalg.norm(self.vectors, axis=1)
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise NonFiniteValueError(
                f"style {self.ids[int(zero[0])]!r} has a zero vector and "
                "cannot be normalized"
            )
        return FeatureCatalog(self.ids, self.vectors / norms[:, None])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for sid, row in zip(self.ids, self.vectors):
            writer.writerow([sid] + [repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        records = [
            {"id": sid, "vector": [float(v) for v in row]}
            for sid, row in zip(self.ids, self.vectors)
        ]
        return json.dumps(records, indent=2) + "\n"


def _catalog_from_rows(rows: Iterable[tuple[str, list]]) -> FeatureCatalog:
    ids: list[str] = []
    vectors: list[list[float]] = []
    dim: int | None = None
    for sid, raw_vector in rows:
        values: list[float] = []
        for cell in raw_vector:
            if isinstance(cell, bool):
                raise MalformedInputError(
                    f"row {sid!r}: boolean is not a vector entry"
                )
            if isinstance(cell, (int, float)):
                value = float(cell)
            else:
                try:
                    value = float(str(cell).strip())
                except ValueError as exc:
                    raise MalformedInputError(
                        f"row {sid!r}: cannot parse vector entry {cell!r}"
                    ) from exc
            if not math.isfinite(value):
                raise NonFiniteValueError(
                    f"row {sid!r}: non-finite vector entry {cell!r}"
                )
            values.append(value)
        if not values:
            raise MalformedInputError(f"row {sid!r} has no vector entries")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise DimensionMismatchError(
                f"row {sid!r} has {len(values)} entries, expected {dim}"
            )
        if sid in ids:
            raise DuplicateIdError(f"duplicate style id {sid!r}")
        ids.append(sid)
        vectors.append(values)
    if not ids:
        raise MalformedInputError("catalog is empty")
    return FeatureCatalog(tuple(ids), np.array(vectors, dtype=np.float64))


def _decode_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def load_catalog(source: str | bytes | IO, format: str = "csv") -> FeatureCatalog:
    """Parse catalog content in CSV or JSON form.

    Args:
        source: Text, bytes, or a file-like object holding the content.
        format: ``"csv"`` (one row per style, id first, no header) or
            ``"json"`` (array of ``{"id", "vector"}`` objects).

    Returns:
        A validated FeatureCatalog preserving input order.
    """
    text = _decode_text(source)
    fmt = format.strip().lower()
    if fmt == "csv":
        rows = []
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            sid = row[0].strip()
            if not sid:
                raise MalformedInputError(f"line {lineno}: empty style id")
            rows.append((sid, row[1:]))
        return _catalog_from_rows(rows)
    if fmt == "json":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"invalid JSON: {exc}") from exc
        if not isinstance(records, list):
            raise MalformedInputError("catalog JSON must be an array of objects")
        rows = []
        for idx, rec in enumerate(records):
            if not isinstance(rec, dict) or "id" not in rec or "vector" not in rec:
                raise MalformedInputError(
                    f"record {idx}: expected an object with 'id' and 'vector'"
                )
            sid = rec["id"]
            if not isinstance(sid, str) or not sid:
                raise MalformedInputError(f"record {idx}: id must be a non-empty string")
            vec = rec["vector"]
            if not isinstance(vec, list):
                raise MalformedInputError(f"record {sid!r}: vector must be an array")
            rows.append((sid, vec))
        return _catalog_from_rows(rows)
    raise MalformedInputError(f"unknown catalog format {format!r}")


def read_catalog_file(path: str | os.PathLike, format: str | None = None) -> FeatureCatalog:
    """Load a catalog from disk, inferring the format from the suffix."""
    p = Path(path)
    fmt = format
    if fmt is None:
        fmt = "json" if p.suffix.lower() == ".json" else "csv"
    return load_catalog(p.read_text(encoding="utf-8"), fmt)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise dissimilarities with a zero diagonal.

    Attributes:
        entries: Read-only float array of shape (n, n), finite, >= 0.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(
                f"distance matrix must be square, got shape {entries.shape}"
            )
        if not np.all(np.isfinite(entries)):
            raise NonFiniteValueError("distance matrix has non-finite entries")
        if np.any(entries < 0):
            raise MalformedInputError("distance matrix has negative entries")
        if np.any(np.diagonal(entries) != 0):
            raise MalformedInputError("distance matrix diagonal must be zero")
        if not np.array_equal(entries, entries.T):
            raise MalformedInputError("distance matrix must be symmetric")
        object.__setattr__(self, "entries", _readonly(entries))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def from_flat(cls, n: int, entries: Sequence[float]) -> "DistanceMatrix":
        values = np.asarray(list(entries), dtype=np.float64)
        if values.size != n * n:
            raise DimensionMismatchError(
                f"expected {n * n} row-major entries, got {values.size}"
            )
        return cls(values.reshape(n, n))

    def to_flat(self) -> list[float]:
        return [float(v) for v in self.entries.reshape(-1)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.entries:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"n": self.n, "entries": self.to_flat()}
        return json.dumps(payload, indent=2) + "\n"


def distance_matrix(
    catalog: FeatureCatalog,
    metric: Metric = Metric.SQUARED_EUCLIDEAN,
    normalize: bool = False,
) -> DistanceMatrix:
    """Compute all pairwise distances between catalog vectors.

    Args:
        catalog: Validated catalog.
        metric: SQUARED_EUCLIDEAN (default) or EUCLIDEAN.
        normalize: Scale each vector to unit L2 norm first (off by default).

    Returns:
        DistanceMatrix with entries[i][j] = metric(v_i, v_j).
    """
    cat = catalog.normalized() if normalize else catalog
    name = "sqeuclidean" if metric is Metric.SQUARED_EUCLIDEAN else "euclidean"
    d = cdist(cat.vectors, cat.vectors, metric=name)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)


@dataclass(frozen=True)
class Article:
    """A product style available for allocation.

    planned_total is the total units available; min_qty is the smallest
    shipment allowed to any store that receives the article at all.
    """

    id: str
    planned_total: int
    min_qty: int


@dataclass(frozen=True)
class Store:
    id: str
    desired_qty: int


@dataclass(frozen=True, eq=False)
class DistributionInstance:
    """Full parameter set for one allocation problem.

    Attributes:
        articles: Available styles with quantity limits.
        stores: Destinations with desired total quantities.
        alpha: Fractional deviation tolerance on store totals, kept as an
            exact Fraction so integer band bounds never suffer float
            rounding (e.g. floor(1.2 * 30) must be 36, not 35).
        big_m_policy: Cap rule for per-(article, store) shipments.
        distances: Pairwise dissimilarities over the articles.
    """

    articles: tuple[Article, ...]
    stores: tuple[Store, ...]
    alpha: Fraction
    distances: DistanceMatrix
    big_m_policy: BigMPolicy = BigMPolicy.STORE_QTY

    def __post_init__(self):
        object.__setattr__(self, "articles", tuple(self.articles))
        object.__setattr__(self, "stores", tuple(self.stores))
        object.__setattr__(self, "alpha", _as_exact_fraction(self.alpha))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistributionInstance):
            return NotImplemented
        return (
            self.articles == other.articles
            and self.stores == other.stores
            and self.alpha == other.alpha
            and self.big_m_policy is other.big_m_policy
            and self.distances == other.distances
        )

    @property
    def n_articles(self) -> int:
        return len(self.articles)

    @property
    def n_stores(self) -> int:
        return len(self.stores)

    def planned_totals(self) -> np.ndarray:
        return np.array([a.planned_total for a in self.articles], dtype=np.int64)

    def min_quantities(self) -> np.ndarray:
        return np.array([a.min_qty for a in self.articles], dtype=np.int64)

    def desired_quantities(self) -> np.ndarray:
        return np.array([s.desired_qty for s in self.stores], dtype=np.int64)

    def lower_band(self, s: int) -> int:
        """Smallest integer total a store may receive: ceil((1-alpha)*q_s)."""
        return math.ceil((1 - self.alpha) * self.stores[s].desired_qty)

    def upper_band(self, s: int) -> int:
        """Largest integer total a store may receive: floor((1+alpha)*q_s)."""
        return math.floor((1 + self.alpha) * self.stores[s].desired_qty)

    def big_m(self, s: int) -> int:
        """Per-shipment cap for store s under the instance's policy."""
        if self.big_m_policy is BigMPolicy.STORE_QTY:
            return self.stores[s].desired_qty
        return self.upper_band(s)


def validate_instance(instance: DistributionInstance) -> list[Violation]:
    """Check every instance invariant, returning one Violation per breach.

    An empty list means the instance is valid. Nothing is raised here;
    callers that need an exception should use ``ensure_valid``.
    """
    violations: list[Violation] = []
    alpha = instance.alpha
    if not (0 <= alpha < 1):
        violations.append(
            Violation("alpha_out_of_range", "alpha", f"alpha={float(alpha)} must lie in [0, 1)")
        )
    seen_articles: set[str] = set()
    for art in instance.articles:
        if art.id in seen_articles:
            violations.append(
                Violation("duplicate_article_id", art.id, "article id repeats")
            )
        seen_articles.add(art.id)
        if art.planned_total < 0:
            violations.append(
                Violation(
                    "negative_planned_total",
                    art.id,
                    f"planned_total={art.planned_total} must be >= 0",
                )
            )
        if art.min_qty < 1:
            violations.append(
                Violation(
                    "min_qty_below_one",
                    art.id,
                    f"min_qty={art.min_qty} must be >= 1 so assignment "
                    "indicators stay well-defined",
                )
            )
        if art.min_qty > art.planned_total:
            violations.append(
                Violation(
                    "min_exceeds_planned",
                    art.id,
                    f"min_qty={art.min_qty} exceeds planned_total={art.planned_total}",
                )
            )
    seen_stores: set[str] = set()
    for store in instance.stores:
        if store.id in seen_stores:
            violations.append(
                Violation("duplicate_store_id", store.id, "store id repeats")
            )
        seen_stores.add(store.id)
        if store.desired_qty < 1:
            violations.append(
                Violation(
                    "desired_qty_below_one",
                    store.id,
                    f"desired_qty={store.desired_qty} must be >= 1",
                )
            )
    if instance.distances.n != instance.n_articles:
        violations.append(
            Violation(
                "distance_size_mismatch",
                "distances",
                f"distance matrix is {instance.distances.n}x{instance.distances.n} "
                f"but there are {instance.n_articles} articles",
            )
        )
    return violations


def ensure_valid(instance: DistributionInstance) -> DistributionInstance:
    """Raise ValidationError if the instance has any violations."""
    violations = validate_instance(instance)
    if violations:
        raise ValidationError(violations)
    return instance


@dataclass(frozen=True, eq=False)
class DistributionPlan:
    """Integer shipment quantities plus derived assignment indicators.

    Invariants enforced at construction: x and y have identical shape,
    x >= 0, y = 1 exactly where x >= 1, and the objective equals the sum
    of per-store varieties within 1e-9 relative tolerance.
    """

    x: np.ndarray
    y: np.ndarray
    per_store_variety: tuple[float, ...]
    objective: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64)
        y = np.asarray(self.y, dtype=np.int8)
        if x.ndim != 2 or x.shape != y.shape:
            raise DimensionMismatchError(
                f"x shape {x.shape} and y shape {y.shape} must match as 2-D arrays"
            )
        if np.any(x < 0):
            raise MalformedInputError("shipment quantities must be non-negative")
        if not np.array_equal((x >= 1).astype(np.int8), y):
            raise MalformedInputError(
                "assignment indicators must equal 1 exactly where x >= 1"
            )
        varieties = tuple(float(v) for v in self.per_store_variety)
        if len(varieties) != x.shape[1]:
            raise DimensionMismatchError(
                f"{len(varieties)} variety values for {x.shape[1]} stores"
            )
        total = sum(varieties)
        if not math.isclose(self.objective, total, rel_tol=1e-9, abs_tol=1e-9):
            raise MalformedInputError(
                f"objective {self.objective} does not equal the per-store sum {total}"
            )
        object.__setattr__(self, "x", _readonly(x))
        object.__setattr__(self, "y", _readonly(y))
        object.__setattr__(self, "per_store_variety", varieties)
        object.__setattr__(self, "objective", float(self.objective))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistributionPlan):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and self.per_store_variety == other.per_store_variety
            and self.objective == other.objective
        )

    @property
    def n_articles(self) -> int:
        return int(self.x.shape[0])

    @property
    def n_stores(self) -> int:
        return int(self.x.shape[1])

    def store_set(self, s: int) -> tuple[int, ...]:
        """Indices of the articles assigned to store s."""
        return tuple(int(i) for i in np.nonzero(self.y[:, s])[0])

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "per_store_variety": list(self.per_store_variety),
            "x": self.x.tolist(),
            "y": self.y.astype(int).tolist(),
        }


def _parse_distances_block(block, n_articles: int, base_dir: Path | None) -> DistanceMatrix:
    if not isinstance(block, dict):
        raise MalformedInputError("'distances' must be an object")
    if "entries" in block:
        n = _as_int(block.get("n", n_articles), field_name="distances.n")
        raw = block["entries"]
        if not isinstance(raw, list):
            raise MalformedInputError("'distances.entries' must be an array")
        flat: list[float] = []
        for item in raw:
            if isinstance(item, list):
                flat.extend(float(v) for v in item)
            else:
                flat.append(float(item))
        return DistanceMatrix.from_flat(n, flat)
    if "catalog_ref" in block:
        ref = block["catalog_ref"]
        if not isinstance(ref, str) or not ref:
            raise MalformedInputError("'distances.catalog_ref' must be a path string")
        path = Path(ref)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        metric = Metric.from_name(block.get("metric", Metric.SQUARED_EUCLIDEAN.value))
        normalize = bool(block.get("normalize", False))
        catalog = read_catalog_file(path)
        return distance_matrix(catalog, metric, normalize=normalize)
    raise MalformedInputError(
        "'distances' needs either 'entries' (row-major) or 'catalog_ref'"
    )


def load_instance(source: str | bytes | IO, base_dir: str | os.PathLike | None = None) -> DistributionInstance:
    """Parse an instance from JSON text.

    The tolerance ``alpha`` is captured as an exact decimal Fraction
    straight from the JSON text so that quantity band bounds round
    correctly. ``base_dir`` anchors any relative ``catalog_ref`` path.

    Raises:
        MalformedInputError: On structural problems. Semantic violations
            are left to ``validate_instance``.
    """
    text = _decode_text(source)
    try:
        payload = json.loads(text, parse_float=str)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise MalformedInputError("instance JSON must be an object")
    for key in ("alpha", "articles", "stores", "distances"):
        if key not in payload:
            raise MalformedInputError(f"instance JSON missing {key!r}")
    alpha = _as_exact_fraction(payload["alpha"])
    policy = BigMPolicy.from_name(payload.get("big_m_policy", BigMPolicy.STORE_QTY.value))
    articles = []
    raw_articles = payload["articles"]
    if not isinstance(raw_articles, list):
        raise MalformedInputError("'articles' must be an array")
    for idx, rec in enumerate(raw_articles):
        if not isinstance(rec, dict):
            raise MalformedInputError(f"article {idx}: expected an object")
        try:
            articles.append(
                Article(
                    id=str(rec["id"]),
                    planned_total=_as_int(rec["planned_total"], field_name="planned_total"),
                    min_qty=_as_int(rec["min_qty"], field_name="min_qty"),
                )
            )
        except KeyError as exc:
            raise MalformedInputError(f"article {idx}: missing field {exc.args[0]!r}") from exc
    stores = []
    raw_stores = payload["stores"]
    if not isinstance(raw_stores, list):
        raise MalformedInputError("'stores' must be an array")
    for idx, rec in enumerate(raw_stores):
        if not isinstance(rec, dict):
            raise MalformedInputError(f"store {idx}: expected an object")
        try:
            stores.append(
                Store(
                    id=str(rec["id"]),
                    desired_qty=_as_int(rec["desired_qty"], field_name="desired_qty"),
                )
            )
        except KeyError as exc:
            raise MalformedInputError(f"store {idx}: missing field {exc.args[0]!r}") from exc
    base = Path(base_dir) if base_dir is not None else None
    distances = _parse_distances_block(payload["distances"], len(articles), base)
    return DistributionInstance(
        articles=tuple(articles),
        stores=tuple(stores),
        alpha=alpha,
        distances=distances,
        big_m_policy=policy,
    )


def read_instance_file(path: str | os.PathLike) -> DistributionInstance:
    p = Path(path)
    return load_instance(p.read_text(encoding="utf-8"), base_dir=p.parent)


def instance_to_json(instance: DistributionInstance) -> str:
    """Serialize an instance to the documented JSON shape."""
    payload = {
        "alpha": float(instance.alpha),
        "big_m_policy": instance.big_m_policy.value,
        "articles": [
            {"id": a.id, "planned_total": a.planned_total, "min_qty": a.min_qty}
            for a in instance.articles
        ],
        "stores": [
            {"id": s.id, "desired_qty": s.desired_qty} for s in instance.stores
        ],
        "distances": {
            "n": instance.distances.n,
            "entries": instance.distances.to_flat(),
        },
    }
    return json.dumps(payload, indent=2) + "\n"
