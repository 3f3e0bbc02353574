"""
Logistic Regression Benchmark
-----------------------------
f(x) = 1/n sum_i f_i(x),  f_i(x) = h_i(x) + rho/2 R(x),
h_i(x) = 1/J sum_j ln(1 + exp(-v_ij u_ij^T x)),

with R(x) = ||x||^2 (convex) or sum_t x[t]^2 / (1 + x[t]^2) (nonconvex).
Synthetic data: ground truth x ~ N(0, I_p), features u_ij ~ N(0, sigma^2 I_p),
labels v_ij = +1 if z_ij <= sigmoid(u_ij^T x) with z_ij ~ U(0, 1), else -1.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from problems.base import check_agent, stack_local

logger = logging.getLogger(__name__)


class Regularizer(str, Enum):
    CONVEX = "convex"
    NONCONVEX = "nonconvex"


def sigmoid(t: np.ndarray) -> np.ndarray:
    """Overflow-free logistic function."""
    t = np.asarray(t, dtype=np.float64)
    e = np.exp(-np.abs(t))
    return np.where(t >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


@dataclass(frozen=True, eq=False)
class LogisticProblem:
    features: np.ndarray
    labels: np.ndarray
    rho: float
    regularizer: Regularizer
    seed: int
    sigma: float
    ground_truth: np.ndarray

    def __post_init__(self):
        if self.features.ndim != 3 or self.labels.shape != self.features.shape[:2]:
            raise ValueError(
                f"Inconsistent dataset shapes: features {self.features.shape}, labels {self.labels.shape}"
            )
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValueError("Labels must be exactly +1 or -1")
        if self.rho < 0:
            raise ValueError(f"rho must be nonnegative, got {self.rho}")

    @property
    def n_agents(self) -> int:
        return self.features.shape[0]

    @property
    def samples_per_agent(self) -> int:
        return self.features.shape[1]

    @property
    def dim(self) -> int:
        return self.features.shape[2]

    @property
    def is_convex(self) -> bool:
        return self.regularizer == Regularizer.CONVEX

    def _reg_value(self, x):
        if self.is_convex:
            return float(x @ x)
        return float(np.sum(x ** 2 / (1.0 + x ** 2)))

    def _reg_gradient(self, x):
        if self.is_convex:
            return 2.0 * x
        return 2.0 * x / (1.0 + x ** 2) ** 2

    def local_objective(self, i, x):
        i = check_agent(i, self.n_agents)
        x = np.asarray(x, dtype=np.float64)
        margins = self.labels[i] * (self.features[i] @ x)
        loss = float(np.mean(np.logaddexp(0.0, -margins)))
        return loss + 0.5 * self.rho * self._reg_value(x)

    def local_gradient(self, i, x):
        i = check_agent(i, self.n_agents)
        x = np.asarray(x, dtype=np.float64)
        u, v = self.features[i], self.labels[i]
        weights = -v * sigmoid(-v * (u @ x))
        return (weights @ u) / self.samples_per_agent + 0.5 * self.rho * self._reg_gradient(x)

    def stacked_gradients(self, X):
        return stack_local(self, X)

    def global_objective(self, x):
        return float(np.mean([self.local_objective(i, x) for i in range(self.n_agents)]))

    def global_gradient(self, x):
        return np.mean(self.stacked_gradients(np.tile(x, (self.n_agents, 1))), axis=0)

    def lipschitz_bound(self) -> float:
        """max_i ||U_i||_2^2 / (4J) + rho; both regularizers have curvature at most rho."""
        top = max(float(np.linalg.norm(u, 2)) ** 2 for u in self.features)
        return top / (4.0 * self.samples_per_agent) + self.rho

    def strong_convexity(self) -> float:
        """mu = rho for the convex regularizer; zero otherwise."""
        return self.rho if self.is_convex else 0.0


def generate_problem(
    p: int,
    n: int,
    J: int,
    sigma: float,
    rho: float,
    regularizer,
    seed: int,
) -> LogisticProblem:
    """Deterministic synthetic logistic-regression dataset."""
    if min(p, n, J) < 1:
        raise ValueError(f"p, n and J must be positive, got ({p}, {n}, {J})")
    regularizer = Regularizer(regularizer)
    rng = np.random.default_rng(seed)
    ground_truth = rng.standard_normal(p)
    features = sigma * rng.standard_normal((n, J, p))
    z = rng.random((n, J))
    labels = np.where(z <= sigmoid(features @ ground_truth), 1.0, -1.0)
    logger.debug(
        f"Generated logistic problem p={p}, n={n}, J={J}, rho={rho}, "
        f"{regularizer.value}, positive fraction {float(np.mean(labels > 0)):.3f}"
    )
    return LogisticProblem(
        features=features,
        labels=labels,
        rho=float(rho),
        regularizer=regularizer,
        seed=int(seed),
        sigma=float(sigma),
        ground_truth=ground_truth,
    )


def local_gradient(prob, i: int, x: np.ndarray) -> np.ndarray:
    return prob.local_gradient(i, x)


def global_objective(prob, x: np.ndarray) -> float:
    return prob.global_objective(x)


def global_gradient(prob, x: np.ndarray) -> np.ndarray:
    return prob.global_gradient(x)


def lipschitz_bound(prob) -> float:
    return prob.lipschitz_bound()


def strong_convexity(prob) -> float:
    return prob.strong_convexity()
