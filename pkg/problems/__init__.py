"""Local objectives, the synthetic logistic benchmark and the centralized reference solver."""

from problems.base import Problem, SolverError, UnsupportedMetricError, initial_point
from problems.io import load_dataset, save_dataset
from problems.logistic import (
    LogisticProblem,
    Regularizer,
    generate_problem,
    global_gradient,
    global_objective,
    lipschitz_bound,
    local_gradient,
    sigmoid,
    strong_convexity,
)
from problems.quadratic import QuadraticProblem
from problems.reference import ReferenceSolution, solve_reference

__all__ = [
    "LogisticProblem",
    "Problem",
    "QuadraticProblem",
    "ReferenceSolution",
    "Regularizer",
    "SolverError",
    "UnsupportedMetricError",
    "generate_problem",
    "global_gradient",
    "global_objective",
    "initial_point",
    "lipschitz_bound",
    "load_dataset",
    "local_gradient",
    "save_dataset",
    "sigmoid",
    "strong_convexity",
    "solve_reference",
]
