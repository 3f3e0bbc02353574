"""
Reference Solver
----------------
Centralized gradient descent with Armijo backtracking, used to obtain f*
for residual traces. The trial step starts at twice the last accepted step
and is halved until sufficient decrease holds, but never below 1/L: at that
step size sufficient decrease is guaranteed for an L-smooth objective, so a
failed test there is floating-point noise and the step is taken anyway.
"""

import logging
from dataclasses import dataclass

import numpy as np

from problems.base import SolverError, UnsupportedMetricError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
MAX_ITER = 200_000
ARMIJO_C = 0.5


@dataclass(frozen=True)
class ReferenceSolution:
    x_star: np.ndarray
    f_star: float
    gradient_norm: float
    iterations: int


def solve_reference(prob, tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER, x0=None) -> ReferenceSolution:
    """Minimise the global objective until ||grad f|| <= tol."""
    if not prob.is_convex:
        raise UnsupportedMetricError(
            "Nonconvex problems have no reference optimum; use gradient-norm mode instead"
        )

    min_step = 1.0 / prob.lipschitz_bound()
    x = np.zeros(prob.dim) if x0 is None else np.array(x0, dtype=np.float64)
    fx = prob.global_objective(x)
    g = prob.global_gradient(x)
    gnorm = float(np.linalg.norm(g))
    step = 1.0

    for it in range(max_iter):
        if gnorm <= tol:
            logger.info(f"Reference solution: f*={fx:.12g}, ||grad||={gnorm:.2e}, {it} iterations")
            return ReferenceSolution(x_star=x, f_star=fx, gradient_norm=gnorm, iterations=it)

        while True:
            candidate = x - step * g
            f_candidate = prob.global_objective(candidate)
            if f_candidate <= fx - ARMIJO_C * step * gnorm ** 2 or step <= min_step:
                break
            step = max(0.5 * step, min_step)

        x, fx = candidate, f_candidate
        g = prob.global_gradient(x)
        gnorm = float(np.linalg.norm(g))
        step *= 2.0

    raise SolverError(f"Reference solver stopped at ||grad||={gnorm:.3e} > {tol:.0e} after {max_iter} iterations")
