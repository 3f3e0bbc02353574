"""
Robust Compressed Push-Pull
---------------------------
One synchronous round updates both chains:

  X~   = X - Lambda Y
  Q_x  = s_k C((X~ - H_x) / s_k)              (row-wise, agent i uses its own stream)
  X^   = H_x + Q_x,          X^_R = H_R + R Q_x
  H_x  = (1 - a_x) H_x + a_x X^,   H_R = (1 - a_x) H_R + a_x X^_R
  X+   = X~ - g_x (X^ - X^_R)
  Y~   = Y + grad F(X+) - grad F(X)
  and the same compression/mixing steps on Y~ with C, a_y, g_y giving Y+.

Only Q_x and Q_y travel over the network; their payloads are charged to the
bit counter once per out-neighbour (per_edge) or once per agent (broadcast).
"""

import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from algorithm.checkpoint import load_checkpoint, save_checkpoint
from algorithm.params import RcppParams, scaling
from algorithm.state import RcppState, RngStreams, init_state
from compressors.operators import dynamic_scale_compress
from metrics.records import MetricsRecord, record

logger = logging.getLogger(__name__)


class DivergenceError(RuntimeError):
    """Iterates became non-finite; ``state`` is the last finite state."""

    def __init__(self, message: str, state: RcppState, streams: Optional[RngStreams] = None):
        super().__init__(message)
        self.state = state
        self.streams = streams
        self.trace: list = []


@dataclass(frozen=True)
class StepStats:
    bits_x: int
    bits_y: int
    error_x: float
    error_y: float
    s_k: float


def fanout(weights: np.ndarray) -> np.ndarray:
    """Number of agents j != i with weights[j, i] > 0, per sender i."""
    positive = np.asarray(weights) > 0
    return positive.sum(axis=0) - np.diag(positive).astype(np.int64)


def _compress_rows(spec, D: np.ndarray, s_k: float, streams: list) -> tuple[np.ndarray, np.ndarray]:
    Q = np.empty_like(D)
    bits = np.empty(D.shape[0], dtype=np.int64)
    for i in range(D.shape[0]):
        msg, Q[i] = dynamic_scale_compress(spec, D[i], s_k, streams[i])
        bits[i] = msg.bit_count
    return Q, bits


def _charge(bits: np.ndarray, weights: np.ndarray, accounting: str) -> int:
    if accounting == "broadcast":
        return int(bits.sum())
    return int(bits @ fanout(weights))


def step(state: RcppState, params: RcppParams, pair, problem, rng: RngStreams) -> tuple[RcppState, StepStats]:
    """Advance one iteration; raises DivergenceError if the new iterates are not finite."""
    s_k = scaling(state.k, params.schedule)
    lam = params.lambdas(state.n)[:, None]
    grad = state.grad if state.grad is not None else problem.stacked_gradients(state.X)

    X_tilde = state.X - lam * state.Y
    if not np.all(np.isfinite(X_tilde)):
        raise DivergenceError(f"Non-finite descent step at k={state.k + 1}", state)
    Q_x, bits_x = _compress_rows(params.x_compressor, X_tilde - state.H_x, s_k, rng.x)
    X_hat = state.H_x + Q_x
    X_hat_R = state.H_R + pair.R @ Q_x
    H_x = (1.0 - params.alpha_x) * state.H_x + params.alpha_x * X_hat
    H_R = (1.0 - params.alpha_x) * state.H_R + params.alpha_x * X_hat_R
    X_next = X_tilde - params.gamma_x * (X_hat - X_hat_R)

    if not np.all(np.isfinite(X_next)):
        raise DivergenceError(f"Non-finite decision variables at k={state.k + 1}", state)

    grad_next = problem.stacked_gradients(X_next)
    Y_tilde = state.Y + grad_next - grad
    if not np.all(np.isfinite(Y_tilde)):
        raise DivergenceError(f"Non-finite gradient update at k={state.k + 1}", state)
    Q_y, bits_y = _compress_rows(params.y_compressor, Y_tilde - state.H_y, s_k, rng.y)
    Y_hat = state.H_y + Q_y
    Y_hat_C = state.H_C + pair.C @ Q_y
    H_y = (1.0 - params.alpha_y) * state.H_y + params.alpha_y * Y_hat
    H_C = (1.0 - params.alpha_y) * state.H_C + params.alpha_y * Y_hat_C
    Y_next = Y_tilde - params.gamma_y * (Y_hat - Y_hat_C)

    if not np.all(np.isfinite(Y_next)):
        raise DivergenceError(f"Non-finite gradient trackers at k={state.k + 1}", state)

    charged_x = _charge(bits_x, pair.R, params.bit_accounting)
    charged_y = _charge(bits_y, pair.C, params.bit_accounting)
    new_state = RcppState(
        k=state.k + 1,
        X=X_next,
        Y=Y_next,
        H_x=H_x,
        H_y=H_y,
        H_R=H_R,
        H_C=H_C,
        cumulative_bits=state.cumulative_bits + charged_x + charged_y,
        grad=grad_next,
    )
    stats = StepStats(
        bits_x=charged_x,
        bits_y=charged_y,
        error_x=float(np.sum((Q_x - (X_tilde - state.H_x)) ** 2)),
        error_y=float(np.sum((Q_y - (Y_tilde - state.H_y)) ** 2)),
        s_k=s_k,
    )
    return new_state, stats


def _iterate(
    state: RcppState,
    streams: RngStreams,
    problem,
    pair,
    params: RcppParams,
    reference,
    timing: bool,
    checkpoint_path: Optional[str],
    checkpoint_every: int,
) -> list[MetricsRecord]:
    K = params.iterations
    log_every = max(1, K // 10)
    start = time.perf_counter()
    trace = []
    while state.k < K:
        try:
            state, _ = step(state, params, pair, problem, streams)
        except DivergenceError as e:
            e.streams = streams
            e.trace = trace
            raise
        if state.k % params.record_every == 0 or state.k == K:
            wall_ms = (time.perf_counter() - start) * 1e3 if timing else 0.0
            trace.append(record(state, problem, pair, reference, scaling(state.k, params.schedule), wall_ms))
        if checkpoint_path and checkpoint_every and state.k % checkpoint_every == 0:
            save_checkpoint(state, streams, checkpoint_path)
        if state.k % log_every == 0 and trace:
            last = trace[-1]
            logger.debug(
                f"k={state.k}/{K} residual={last.residual:.3e} grad_norm={last.grad_norm:.3e} "
                f"bits={last.cumulative_bits}"
            )
    return trace


def run(
    problem,
    pair,
    params: RcppParams,
    X0: np.ndarray,
    seed: int,
    reference=None,
    timing: bool = False,
    checkpoint_path: Optional[str] = None,
    checkpoint_every: int = 0,
) -> list[MetricsRecord]:
    """Run K iterations from X0 and return the recorded trace.

    A record is taken at k = 0, every ``record_every`` iterations, and at k = K.
    ``wall_ms`` stays 0 unless ``timing`` is on, keeping traces reproducible.
    """
    streams = RngStreams.from_seed(seed, problem.n_agents)
    state = init_state(problem, X0)
    logger.info(
        f"Running RCPP: n={problem.n_agents}, p={problem.dim}, K={params.iterations}, "
        f"x={params.x_compressor.label()}, y={params.y_compressor.label()}, seed={seed}"
    )
    trace = [record(state, problem, pair, reference, scaling(0, params.schedule), 0.0)]
    try:
        trace += _iterate(state, streams, problem, pair, params, reference, timing, checkpoint_path, checkpoint_every)
    except DivergenceError as e:
        e.trace = trace + e.trace
        raise
    logger.info(f"RCPP complete: {len(trace)} records, {trace[-1].cumulative_bits} bits")
    return trace


def resume(
    checkpoint_path: str,
    problem,
    pair,
    params: RcppParams,
    reference=None,
    timing: bool = False,
    checkpoint_every: int = 0,
) -> list[MetricsRecord]:
    """Continue a run from a checkpoint; returns the records after the checkpoint's iteration."""
    state, streams = load_checkpoint(checkpoint_path)
    if (state.n, state.dim) != (problem.n_agents, problem.dim):
        raise ValueError(
            f"Checkpoint shape {(state.n, state.dim)} does not match problem {(problem.n_agents, problem.dim)}"
        )
    logger.info(f"Resuming from k={state.k} ({checkpoint_path})")
    return _iterate(
        state, streams, problem, pair, params, reference, timing,
        checkpoint_path if checkpoint_every else None, checkpoint_every,
    )
