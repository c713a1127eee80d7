"""Exception types and violation records shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class StylemixError(Exception):
    """Base class for all package-specific errors."""


class CatalogError(StylemixError):
    """Base class for catalog parsing and validation failures."""


class MalformedInputError(CatalogError):
    """Input text could not be parsed into the expected shape."""


class DuplicateIdError(CatalogError):
    """Two records share the same identifier."""


class DimensionMismatchError(CatalogError):
    """Feature vectors (or matrix rows) do not all have the same length."""


class NonFiniteValueError(CatalogError):
    """A numeric entry is NaN or infinite."""


class EmptySubsetError(StylemixError):
    """A variety measure was asked to score an empty index collection."""


class SubsetIndexError(StylemixError, IndexError):
    """A subset refers to an index outside the distance matrix."""


class TooFewStylesError(StylemixError):
    """An assignment pattern gives some store fewer than two styles."""


class ValidationError(StylemixError):
    """An instance failed validation.

    Carries the full list of violations so callers can report every
    problem at once instead of fixing them one by one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"instance validation failed: {lines}")


class InfeasiblePlanError(StylemixError):
    """A candidate plan violates instance constraints."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"plan is infeasible: {lines}")


class InfeasibleError(StylemixError):
    """No feasible allocation exists (or none could be found).

    ``certificate`` is set when a structural witness is available, e.g.
    a cut whose lower bounds exceed the capacity that can reach it.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class BudgetExceededError(StylemixError):
    """Search ran out of its pattern or time budget before finding a plan."""


class VerificationError(StylemixError):
    """A built-in self-check produced an unexpected verdict."""


class PopulationTooSmallError(StylemixError):
    """The sampling population has fewer styles than a requested subset."""


@dataclass(frozen=True)
class Violation:
    """One validation failure.

    Attributes:
        code: Stable machine-readable tag, e.g. ``"min_exceeds_planned"``.
        subject: Identifier of the offending article, store, or field.
        message: Human-readable description of the problem.
    """

    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"
