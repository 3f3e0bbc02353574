"""
Problem interface shared by the logistic benchmark and the quadratic test-bed.
"""

from typing import Protocol, runtime_checkable

import numpy as np


class UnsupportedMetricError(ValueError):
    """Requested a metric the problem cannot provide (e.g. f* for a nonconvex objective)."""


class SolverError(RuntimeError):
    """Reference solver missed its tolerance within the iteration cap."""


@runtime_checkable
class Problem(Protocol):
    n_agents: int
    dim: int

    @property
    def is_convex(self) -> bool: ...

    def local_objective(self, i: int, x: np.ndarray) -> float: ...

    def local_gradient(self, i: int, x: np.ndarray) -> np.ndarray: ...

    def stacked_gradients(self, X: np.ndarray) -> np.ndarray: ...

    def global_objective(self, x: np.ndarray) -> float: ...

    def global_gradient(self, x: np.ndarray) -> np.ndarray: ...

    def lipschitz_bound(self) -> float: ...

    def strong_convexity(self) -> float: ...


def check_agent(i: int, n: int) -> int:
    if not 0 <= i < n:
        raise IndexError(f"Agent index {i} out of range for {n} agents")
    return int(i)


def stack_local(problem: Problem, X: np.ndarray) -> np.ndarray:
    """Row i is the local gradient of agent i at X[i]; agents visited in index order."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (problem.n_agents, problem.dim):
        raise ValueError(f"Expected shape {(problem.n_agents, problem.dim)}, got {X.shape}")
    return np.stack([problem.local_gradient(i, X[i]) for i in range(problem.n_agents)])


def initial_point(n: int, p: int, seed: int, shared: bool = False) -> np.ndarray:
    """Uniform [0, 1]^p starting rows, drawn per agent unless ``shared``."""
    rng = np.random.default_rng(seed)
    if shared:
        return np.tile(rng.random(p), (n, 1))
    return rng.random((n, p))
