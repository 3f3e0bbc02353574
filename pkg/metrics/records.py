"""
Trace Metrics
-------------
Quantities recorded per iteration: optimality residual, gradient norm at
the weighted average, consensus and tracking errors, the gradient-tracking
gap, and the communication counter.

Consensus and tracking errors use the plain Frobenius norm,
||X - 1 xbar^T||_F^2 and ||Y - u_C ybar^T||_F^2, with xbar = u_R^T X / n and
ybar = 1^T Y / n.
"""

from dataclasses import astuple, dataclass

import numpy as np

from problems.base import UnsupportedMetricError


@dataclass(frozen=True)
class MetricsRecord:
    k: int
    residual: float
    grad_norm: float
    consensus_error: float
    tracking_error: float
    tracking_gap: float
    cumulative_bits: int
    s_k: float
    wall_ms: float = 0.0

    def as_row(self) -> tuple:
        return astuple(self)


# CSV column names, in MetricsRecord field order.
COLUMNS = ["k", "residual", "grad_norm", "consensus_err", "tracking_err", "tracking_gap", "bits", "s_k", "wall_ms"]


def weighted_average(u_R: np.ndarray, X: np.ndarray) -> np.ndarray:
    """xbar = (1/n) u_R^T X."""
    u_R = np.asarray(u_R, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if u_R.shape != (X.shape[0],):
        raise ValueError(f"u_R of shape {u_R.shape} does not match {X.shape[0]} rows")
    return (u_R @ X) / X.shape[0]


def consensus_error(u_R: np.ndarray, X: np.ndarray) -> float:
    diff = X - weighted_average(u_R, X)[None, :]
    return float(np.sum(diff * diff))


def tracking_error(u_C: np.ndarray, Y: np.ndarray) -> float:
    y_bar = Y.sum(axis=0) / Y.shape[0]
    diff = Y - np.outer(u_C, y_bar)
    return float(np.sum(diff * diff))


def tracking_gap(Y: np.ndarray, grad: np.ndarray) -> float:
    """||1^T Y - 1^T grad F(X)||."""
    return float(np.linalg.norm(Y.sum(axis=0) - grad.sum(axis=0)))


def record(state, problem, pair, reference=None, s_k: float = float("nan"), wall_ms: float = 0.0) -> MetricsRecord:
    """Metrics of one algorithm state; ``reference`` enables the residual column."""
    if reference is not None and not problem.is_convex:
        raise UnsupportedMetricError("Residuals need a convex problem; nonconvex runs report gradient norms")
    x_bar = weighted_average(pair.u_R, state.X)
    grad = state.grad if state.grad is not None else problem.stacked_gradients(state.X)
    residual = problem.global_objective(x_bar) - reference.f_star if reference is not None else float("nan")
    return MetricsRecord(
        k=int(state.k),
        residual=float(residual),
        grad_norm=float(np.linalg.norm(problem.global_gradient(x_bar))),
        consensus_error=consensus_error(pair.u_R, state.X),
        tracking_error=tracking_error(pair.u_C, state.Y),
        tracking_gap=tracking_gap(state.Y, grad),
        cumulative_bits=int(state.cumulative_bits),
        s_k=float(s_k),
        wall_ms=float(wall_ms),
    )
