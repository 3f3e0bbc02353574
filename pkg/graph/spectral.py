"""
Spectral Norm-Constant Suggestions
----------------------------------
Heuristic estimates of the contraction constants theta_R, theta_C and the
norm-equivalence constants delta_{R,2}, delta_{C,2} used by the theory-bound
calculator. The matrix norms behind these constants are only known to exist,
so these numbers are suggestions printed next to the configured values,
never used as silent defaults.

theta is estimated from the spectral radius of Pi R_gamma with
R_gamma = I - gamma (I - R); delta from the condition number of the
eigenvector basis.
"""

import logging
from dataclasses import dataclass

import numpy as np

from graph.mixing import MixingPair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormConstantSuggestion:
    theta_R: float
    theta_C: float
    delta_R2: float
    delta_C2: float
    rho_R: float
    rho_C: float


def _contraction(M: np.ndarray, projector: np.ndarray, gamma: float) -> tuple[float, float]:
    n = M.shape[0]
    m_gamma = np.eye(n) - gamma * (np.eye(n) - M)
    rho = float(np.max(np.abs(np.linalg.eigvals(projector @ m_gamma)))) if n > 1 else 0.0
    theta = float(np.clip((1.0 - rho) / gamma, 1e-12, 1.0))
    return theta, rho


def _basis_condition(M: np.ndarray) -> float:
    _, vectors = np.linalg.eig(M)
    cond = float(np.linalg.cond(vectors))
    if not np.isfinite(cond):
        logger.warning("Eigenvector basis is numerically singular; delta suggestion is unreliable")
        return float("inf")
    return max(cond, 1.0)


def suggest_norm_constants(pair: MixingPair, gamma_x: float, gamma_y: float) -> NormConstantSuggestion:
    """Suggest (theta_R, theta_C, delta_R2, delta_C2) for the given consensus step-sizes."""
    n = pair.n
    ones = np.ones(n)
    pi_R = np.eye(n) - np.outer(ones, pair.u_R) / n
    pi_C = np.eye(n) - np.outer(pair.u_C, ones) / n

    theta_R, rho_R = _contraction(pair.R, pi_R, gamma_x)
    theta_C, rho_C = _contraction(pair.C, pi_C, gamma_y)
    return NormConstantSuggestion(
        theta_R=theta_R,
        theta_C=theta_C,
        delta_R2=_basis_condition(pair.R),
        delta_C2=_basis_condition(pair.C),
        rho_R=rho_R,
        rho_C=rho_C,
    )
