"""Quadratic test-bed: f_i(x) = 1/2 ||x - c_i||^2 with closed-form optimum."""

from dataclasses import dataclass

import numpy as np

from problems.base import check_agent, stack_local


@dataclass(frozen=True, eq=False)
class QuadraticProblem:
    centers: np.ndarray

    @property
    def n_agents(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    @property
    def is_convex(self) -> bool:
        return True

    def local_objective(self, i, x):
        d = np.asarray(x) - self.centers[check_agent(i, self.n_agents)]
        return 0.5 * float(d @ d)

    def local_gradient(self, i, x):
        return np.asarray(x, dtype=np.float64) - self.centers[check_agent(i, self.n_agents)]

    def stacked_gradients(self, X):
        return stack_local(self, X)

    def global_objective(self, x):
        return float(np.mean([self.local_objective(i, x) for i in range(self.n_agents)]))

    def global_gradient(self, x):
        return np.mean(self.stacked_gradients(np.tile(x, (self.n_agents, 1))), axis=0)

    def lipschitz_bound(self):
        return 1.0

    def strong_convexity(self):
        return 1.0

    def optimum(self) -> np.ndarray:
        return self.centers.mean(axis=0)
