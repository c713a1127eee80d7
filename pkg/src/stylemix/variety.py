"""Distance-based variety measures over style subsets.

Five measures are supported, all scoring how dispersed a set of styles
is under a pairwise distance matrix:

    MAX_SUM_SUM   sum of all pairwise distances
    MAX_MIN       smallest pairwise distance
    MAX_MIN_SUM   smallest per-element sum of distances to the rest
    MAX_SUM_MIN   sum of each element's distance to its nearest other
    MAX_MEAN      sum of all pairwise distances divided by the SET SIZE

Note the MAX_MEAN divisor is the number of elements, not the number of
pairs. Singletons score 0 under every measure (the min/sum over an
empty pair set is taken as 0), which keeps greedy construction total.

All functions are pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .core import DistanceMatrix
from .errors import EmptySubsetError, SubsetIndexError

__all__ = [
    "VarietyMeasure",
    "MONOTONICITY_TOLERANCE",
    "variety",
    "pair_distance_sum",
    "marginal_gain",
    "check_monotonicity",
    "MonotonicityResult",
]

MONOTONICITY_TOLERANCE = 1e-12


class VarietyMeasure(Enum):
    MAX_SUM_SUM = "max_sum_sum"
    MAX_MIN = "max_min"
    MAX_MIN_SUM = "max_min_sum"
    MAX_SUM_MIN = "max_sum_min"
    MAX_MEAN = "max_mean"

    @classmethod
    def from_name(cls, name: str) -> "VarietyMeasure":
        text = name.strip().lower().replace("-", "_")
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(
            f"unknown variety measure {name!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


def _validated_indices(subset: Iterable[int], n: int) -> np.ndarray:
    idx = sorted({int(i) for i in subset})
    if not idx:
        raise EmptySubsetError("variety is undefined for an empty subset")
    if idx[0] < 0 or idx[-1] >= n:
        bad = idx[0] if idx[0] < 0 else idx[-1]
        raise SubsetIndexError(f"index {bad} outside [0, {n})")
    return np.asarray(idx, dtype=np.intp)


def pair_distance_sum(subset: Iterable[int], d: DistanceMatrix) -> float:
    """Sum of d_ij over all unordered pairs in the subset."""
    idx = _validated_indices(subset, d.n)
    sub = d.entries[np.ix_(idx, idx)]
    return float(sub.sum()) / 2.0


def variety(measure: VarietyMeasure, subset: Iterable[int], d: DistanceMatrix) -> float:
    """Score a subset of styles under one measure.

    Args:
        measure: Which formula to apply.
        subset: Distinct style indices into d; at least one required.
        d: Distance matrix.

    Returns:
        The measure value; 0.0 for any singleton.

    Raises:
        EmptySubsetError: The subset is empty.
        SubsetIndexError: An index falls outside the matrix.
    """
    idx = _validated_indices(subset, d.n)
    k = idx.size
    if k == 1:
        return 0.0
    sub = d.entries[np.ix_(idx, idx)]
    if measure is VarietyMeasure.MAX_SUM_SUM:
        return float(sub.sum()) / 2.0
    if measure is VarietyMeasure.MAX_MEAN:
        return float(sub.sum()) / 2.0 / k
    if measure is VarietyMeasure.MAX_MIN:
        off = sub[~np.eye(k, dtype=bool)]
        return float(off.min())
    if measure is VarietyMeasure.MAX_MIN_SUM:
        return float(sub.sum(axis=1).min())
    if measure is VarietyMeasure.MAX_SUM_MIN:
        masked = sub + np.where(np.eye(k, dtype=bool), np.inf, 0.0)
        return float(masked.min(axis=1).sum())
    raise ValueError(f"unhandled measure {measure!r}")


def marginal_gain(
    measure: VarietyMeasure,
    subset: Iterable[int],
    candidate: int,
    d: DistanceMatrix,
) -> float:
    """Change in variety from adding ``candidate`` to ``subset``.

    MAX_SUM_SUM, MAX_MEAN, and MAX_MIN are computed incrementally in
    O(|subset|); the two hybrid measures fall back to recomputation.
    """
    idx = _validated_indices(subset, d.n)
    c = int(candidate)
    if c < 0 or c >= d.n:
        raise SubsetIndexError(f"index {c} outside [0, {d.n})")
    if c in idx:
        raise SubsetIndexError(f"candidate {c} is already in the subset")
    k = idx.size
    new_links = d.entries[c, idx]
    if measure is VarietyMeasure.MAX_SUM_SUM:
        return float(new_links.sum())
    if measure is VarietyMeasure.MAX_MEAN:
        pair_sum = float(d.entries[np.ix_(idx, idx)].sum()) / 2.0
        before = 0.0 if k == 1 else pair_sum / k
        return (pair_sum + float(new_links.sum())) / (k + 1) - before
    if measure is VarietyMeasure.MAX_MIN:
        before = variety(measure, idx, d)
        if k == 1:
            return float(new_links.min())
        return float(min(before, float(new_links.min()))) - before
    before = variety(measure, idx, d)
    after = variety(measure, np.append(idx, c), d)
    return after - before


@dataclass(frozen=True)
class MonotonicityResult:
    """Outcome of a single add-one-style monotonicity check."""

    held: bool
    before: float
    after: float


def check_monotonicity(
    measure: VarietyMeasure,
    d: DistanceMatrix,
    subset: Iterable[int],
    added: int,
) -> MonotonicityResult:
    """Test whether adding one style keeps the measure from decreasing.

    The check passes when variety(subset + {added}) >= variety(subset)
    minus a 1e-12 absolute tolerance.

    Raises:
        SubsetIndexError: ``added`` is out of range or already present.
    """
    idx = _validated_indices(subset, d.n)
    a = int(added)
    if a < 0 or a >= d.n:
        raise SubsetIndexError(f"index {a} outside [0, {d.n})")
    if a in idx:
        raise SubsetIndexError(f"added index {a} is already in the subset")
    before = variety(measure, idx, d)
    after = variety(measure, np.append(idx, a), d)
    return MonotonicityResult(after >= before - MONOTONICITY_TOLERANCE, before, after)
