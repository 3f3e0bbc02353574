"""RCPP iteration, parameters, checkpoints and theoretical step-size bounds."""

from algorithm.checkpoint import load_checkpoint, save_checkpoint
from algorithm.params import RcppParams, ScheduleSpec, scaling
from algorithm.rcpp import DivergenceError, StepStats, fanout, resume, run, step
from algorithm.state import RcppState, RngStreams, init_state
from algorithm.theory import (
    TheoryBounds,
    TheoryInputs,
    absolute_error_term,
    compute_M,
    linear_rate,
    theory_bounds,
)

__all__ = [
    "DivergenceError",
    "RcppParams",
    "RcppState",
    "RngStreams",
    "ScheduleSpec",
    "StepStats",
    "TheoryBounds",
    "TheoryInputs",
    "absolute_error_term",
    "compute_M",
    "fanout",
    "init_state",
    "linear_rate",
    "load_checkpoint",
    "resume",
    "run",
    "save_checkpoint",
    "scaling",
    "step",
    "theory_bounds",
]
