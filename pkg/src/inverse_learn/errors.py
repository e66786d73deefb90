"""Error types shared across the package.

Every error carries a short machine-readable ``code`` that the CLI and the
HTTP service map onto exit codes / status payloads.  Solver *statuses* such
as INFEASIBLE_AT_P or TERMINATED are not errors: they travel on the solution
objects themselves.
"""


class InverseLearnError(Exception):
    """Base class for all package errors."""

    code = "ERROR"

    def __init__(self, message=""):
        super().__init__(message or self.code)


class MalformedError(InverseLearnError):
    """Structurally broken input: dimension mismatch, zero rows, bad flags,
    duplicate names, unparseable files."""

    code = "MALFORMED"


class InfeasibleRegionError(InverseLearnError):
    """The feasible region of the forward problem is empty."""

    code = "INFEASIBLE_REGION"


class ZeroCostError(InverseLearnError):
    """A cost vector of all zeros was supplied where a direction is needed."""

    code = "ZERO_COST"


class EmptySetError(InverseLearnError):
    """An observation set with no rows was used where data is required."""

    code = "EMPTY_SET"


class TooLargeError(InverseLearnError):
    """A brute-force helper was asked to run beyond its guarded size."""

    code = "TOO_LARGE"


class EmptyConeError(InverseLearnError):
    """No constraint is tight at the given point, so its normal cone is {0}."""

    code = "EMPTY_CONE"


class NotOptimalError(InverseLearnError):
    """The supplied point/cost pair admits no optimality certificate."""

    code = "NOT_OPTIMAL"


class NoPreferredError(InverseLearnError):
    """A preference-aware solve was requested on an instance without
    preferred constraints."""

    code = "NO_PREFERRED"


class AllInfeasibleError(InverseLearnError):
    """Every single-constraint projection subproblem was infeasible."""

    code = "ALL_INFEASIBLE"


class UnitMismatchError(InverseLearnError):
    """Two tables declare the same nutrient with different units."""

    code = "UNIT_MISMATCH"


class MissingNutrientError(InverseLearnError):
    """A bounds table references a nutrient the food table does not have."""

    code = "MISSING_NUTRIENT"


class NumericalFailureError(InverseLearnError):
    """The LP engine stalled or produced an inconsistent optimum."""

    code = "NUMERICAL_FAILURE"
