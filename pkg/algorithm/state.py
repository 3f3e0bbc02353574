"""
Algorithm State
---------------
RcppState holds every per-iteration matrix of the algorithm plus the cached
local gradients grad F(X). RngStreams holds one random stream per agent per
chain, spawned deterministically from the run seed.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class RcppState:
    k: int
    X: np.ndarray
    Y: np.ndarray
    H_x: np.ndarray
    H_y: np.ndarray
    H_R: np.ndarray
    H_C: np.ndarray
    cumulative_bits: int = 0
    grad: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.Y)))


def init_state(problem, X0: np.ndarray) -> RcppState:
    """Y = grad F(X0), all reference matrices zero, k = 0."""
    X0 = np.array(X0, dtype=np.float64)
    if X0.shape != (problem.n_agents, problem.dim):
        raise ValueError(f"X0 has shape {X0.shape}, expected {(problem.n_agents, problem.dim)}")
    grad = problem.stacked_gradients(X0)
    zeros = np.zeros_like(X0)
    return RcppState(
        k=0,
        X=X0,
        Y=grad.copy(),
        H_x=zeros,
        H_y=zeros.copy(),
        H_R=zeros.copy(),
        H_C=zeros.copy(),
        cumulative_bits=0,
        grad=grad,
    )


class RngStreams:
    """Per-agent generators for the x-chain and y-chain."""

    def __init__(self, x: list[np.random.Generator], y: list[np.random.Generator]):
        if len(x) != len(y):
            raise ValueError("x-chain and y-chain need the same number of streams")
        self.x = x
        self.y = y

    @classmethod
    def from_seed(cls, seed: int, n: int) -> "RngStreams":
        children = np.random.SeedSequence(seed).spawn(2 * n)
        gens = [np.random.Generator(np.random.PCG64(c)) for c in children]
        return cls(x=gens[:n], y=gens[n:])

    def get_state(self) -> list[dict]:
        return [g.bit_generator.state for g in self.x + self.y]

    @classmethod
    def from_state(cls, states: list[dict]) -> "RngStreams":
        if len(states) % 2:
            raise ValueError("Expected an even number of stream states")
        gens = []
        for s in states:
            bit_gen = np.random.PCG64()
            bit_gen.state = s
            gens.append(np.random.Generator(bit_gen))
        n = len(gens) // 2
        return cls(x=gens[:n], y=gens[n:])
