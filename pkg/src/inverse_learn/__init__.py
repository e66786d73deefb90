"""Inverse linear optimization from observed decisions.

Given a forward feasible region split into relevant and trivial constraints
and a batch of observed (possibly infeasible) decision vectors, this package
finds nearby decisions that are optimal for *some* nonzero linear objective,
exposes the closeness-vs-binding-count trade-off as a frontier, and recovers
an objective vector that rationalizes the recommendation.  A diet data path
builds such regions from food/nutrient CSV tables.
"""

__version__ = "0.1.0"

from .errors import (
    AllInfeasibleError,
    EmptyConeError,
    EmptySetError,
    InfeasibleRegionError,
    InverseLearnError,
    MalformedError,
    MissingNutrientError,
    NoPreferredError,
    NotOptimalError,
    NumericalFailureError,
    TooLargeError,
    UnitMismatchError,
    ZeroCostError,
)
from .lp import Agg, DistanceSpec, LpProblem, LpResult, LpStatus, Norm, solve_lp
from .model import (
    ForwardInstance,
    Kind,
    LinearConstraint,
    ObservationSet,
    OptimalityCertificate,
    PercentileTable,
    Sense,
    ValidationReport,
    average_forward_objective,
    check_learning_point,
    observation_stats,
    validate_instance,
)
from .solvers import (
    DEPENDENT,
    INDEPENDENT,
    Frontier,
    FrontierPoint,
    InverseSolution,
    SolverOptions,
    algorithm1,
    sequence_dependent,
    solve_bil,
    solve_il,
    solve_mil,
    solve_seq,
    sweep,
)
from .costs import CostCone, InferredCost, build_cone, certify, infer_cost
from .diet import (
    DietEvaluation,
    FoodTable,
    NutrientBounds,
    build_diet_instance,
    diet_report,
    diet_tables_from_instance,
    evaluate_diet,
    synthetic_diet_fixture,
)
from .serialize import ENGINE_VERSION, canonical_json, solution_document

__all__ = [
    "__version__",
    "ENGINE_VERSION",
    "Agg",
    "AllInfeasibleError",
    "CostCone",
    "DEPENDENT",
    "DietEvaluation",
    "DistanceSpec",
    "EmptyConeError",
    "EmptySetError",
    "FoodTable",
    "ForwardInstance",
    "Frontier",
    "FrontierPoint",
    "INDEPENDENT",
    "InferredCost",
    "InfeasibleRegionError",
    "InverseLearnError",
    "InverseSolution",
    "Kind",
    "LinearConstraint",
    "LpProblem",
    "LpResult",
    "LpStatus",
    "MalformedError",
    "MissingNutrientError",
    "NoPreferredError",
    "Norm",
    "NotOptimalError",
    "NumericalFailureError",
    "NutrientBounds",
    "ObservationSet",
    "OptimalityCertificate",
    "PercentileTable",
    "Sense",
    "SolverOptions",
    "TooLargeError",
    "UnitMismatchError",
    "ValidationReport",
    "ZeroCostError",
    "algorithm1",
    "average_forward_objective",
    "build_cone",
    "build_diet_instance",
    "canonical_json",
    "certify",
    "check_learning_point",
    "diet_report",
    "diet_tables_from_instance",
    "evaluate_diet",
    "infer_cost",
    "observation_stats",
    "sequence_dependent",
    "solution_document",
    "solve_bil",
    "solve_il",
    "solve_lp",
    "solve_mil",
    "solve_seq",
    "sweep",
    "synthetic_diet_fixture",
    "validate_instance",
]
