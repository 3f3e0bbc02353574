"""
Mixing Matrices
---------------
Row-stochastic pull matrix R, column-stochastic push matrix C, their
Perron vectors, and the root-intersection check on the pair.

R[i, j] = 1/|in(i)| for every in-neighbour j of i (self included).
C[i, j] = 1/|out(j)| for every out-neighbour i of j (self included).
u_R is the left eigenvector of R for eigenvalue 1, u_C the right eigenvector
of C, both scaled so their entries sum to n.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from graph.digraph import Digraph

logger = logging.getLogger(__name__)

PERRON_TOL = 1e-12
PERRON_MAX_ITER = 1_000_000
STOCHASTIC_TOL = 1e-12
EIGEN_TOL = 1e-9
ROOT_THRESHOLD = 1e-9


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver misses its tolerance within the iteration cap."""


@dataclass(frozen=True, eq=False)
class MixingPair:
    R: np.ndarray
    C: np.ndarray
    u_R: np.ndarray
    u_C: np.ndarray

    @property
    def n(self) -> int:
        return self.R.shape[0]


@dataclass
class AssumptionReport:
    """Outcome of the stochasticity and root-intersection checks on a MixingPair."""

    row_residual: float
    col_residual: float
    left_residual: float
    right_residual: float
    roots_R: frozenset
    roots_C: frozenset
    intersection_nonempty: bool
    overlap: float
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _power_iteration(
    apply: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float,
    max_iter: int,
    label: str,
) -> np.ndarray:
    """Power iteration on a stochastic operator, normalised to sum n.

    After half the budget the iteration switches to the averaged map
    u <- (u + apply(u)) / 2, which has the same fixed point and is aperiodic.
    """
    u = np.ones(n)
    switch_at = max_iter // 2
    residual = np.inf
    for it in range(max_iter):
        v = apply(u)
        residual = float(np.max(np.abs(v - u)))
        if residual <= tol:
            logger.debug(f"{label} Perron vector converged in {it} iterations (residual={residual:.3e})")
            return u
        if it >= switch_at:
            v = 0.5 * (u + v)
        u = v * (n / v.sum())
    raise ConvergenceError(
        f"{label} Perron vector residual {residual:.3e} exceeds {tol:.0e} after {max_iter} iterations"
    )


def left_perron_vector(R: np.ndarray, tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> np.ndarray:
    """u with u^T R = u^T and sum(u) = n."""
    R = np.asarray(R, dtype=float)
    return _power_iteration(lambda u: u @ R, R.shape[0], tol, max_iter, "left")


def right_perron_vector(C: np.ndarray, tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> np.ndarray:
    """u with C u = u and sum(u) = n."""
    C = np.asarray(C, dtype=float)
    return _power_iteration(lambda u: C @ u, C.shape[0], tol, max_iter, "right")


def mixing_pair_from_matrices(R: np.ndarray, C: np.ndarray) -> MixingPair:
    """Wrap a hand-built (R, C) pair, computing its Perron vectors."""
    R = np.array(R, dtype=float)
    C = np.array(C, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1] or R.shape != C.shape:
        raise ValueError(f"R and C must be square and of equal shape, got {R.shape} and {C.shape}")
    if (R < 0).any() or (C < 0).any():
        raise ValueError("Mixing matrices must be nonnegative")
    R.setflags(write=False)
    C.setflags(write=False)
    u_R = left_perron_vector(R)
    u_C = right_perron_vector(C)
    u_R.setflags(write=False)
    u_C.setflags(write=False)
    return MixingPair(R=R, C=C, u_R=u_R, u_C=u_C)


def build_mixing_pair(graph: Digraph) -> MixingPair:
    """Uniform in-degree weights for R and uniform out-degree weights for C."""
    adjacency = graph.adjacency()
    R = adjacency / adjacency.sum(axis=1, keepdims=True)
    C = adjacency / adjacency.sum(axis=0, keepdims=True)
    pair = mixing_pair_from_matrices(R, C)
    logger.debug(f"Built mixing pair for n={graph.n}: u_R^T u_C = {float(pair.u_R @ pair.u_C):.6f}")
    return pair


def check_assumption_one(pair: MixingPair) -> AssumptionReport:
    """Stochasticity residuals, Perron residuals and the root-set intersection."""
    n = pair.n
    ones = np.ones(n)
    row_residual = float(np.max(np.abs(pair.R @ ones - ones)))
    col_residual = float(np.max(np.abs(ones @ pair.C - ones)))
    left_residual = float(np.max(np.abs(pair.u_R @ pair.R - pair.u_R)))
    right_residual = float(np.max(np.abs(pair.C @ pair.u_C - pair.u_C)))

    roots_R = frozenset(int(i) for i in np.flatnonzero(pair.u_R > ROOT_THRESHOLD))
    roots_C = frozenset(int(i) for i in np.flatnonzero(pair.u_C > ROOT_THRESHOLD))
    overlap = float(pair.u_R @ pair.u_C)
    intersection = bool(roots_R & roots_C)

    failures = []
    if row_residual > STOCHASTIC_TOL:
        failures.append(f"R is not row-stochastic (residual {row_residual:.3e})")
    if col_residual > STOCHASTIC_TOL:
        failures.append(f"C is not column-stochastic (residual {col_residual:.3e})")
    if left_residual > EIGEN_TOL:
        failures.append(f"u_R is not a left eigenvector of R (residual {left_residual:.3e})")
    if right_residual > EIGEN_TOL:
        failures.append(f"u_C is not a right eigenvector of C (residual {right_residual:.3e})")
    if not intersection:
        failures.append("Root sets of R and C^T do not intersect")
    if overlap <= 0.0:
        failures.append(f"u_R^T u_C = {overlap:.3e} is not positive")

    for msg in failures:
        logger.warning(msg)

    return AssumptionReport(
        row_residual=row_residual,
        col_residual=col_residual,
        left_residual=left_residual,
        right_residual=right_residual,
        roots_R=roots_R,
        roots_C=roots_C,
        intersection_nonempty=intersection,
        overlap=overlap,
        failures=failures,
    )
