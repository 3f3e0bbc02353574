"""
Theoretical Parameter Bounds
----------------------------
Pure arithmetic over the step-size conditions that guarantee convergence:
the maximal step-size lambda_hat, the consensus step-size limits, the
auxiliary constants e1..e5, A, B, D, E, beta, and the linear rate rho_tilde.

The norm constants theta_R, theta_C, delta_R2, delta_C2 are inputs; see
graph.spectral for heuristic suggestions. Any expression with C in the
denominator is treated as +inf when C = 0 (the branch drops out of the min).
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)


class TheoryInputs(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    L: float = Field(..., gt=0, description="Smoothness constant")
    theta_R: float = Field(..., gt=0, le=1)
    theta_C: float = Field(..., gt=0, le=1)
    delta_R2: float = Field(..., gt=0)
    delta_C2: float = Field(..., gt=0)
    C: float = Field(..., ge=0, description="Relative compression error constant")
    delta: float = Field(..., gt=0, le=1, description="Contraction of the r-scaled compressor")
    r: float = Field(1.0, gt=0)
    sigma2: float = Field(0.0, ge=0)
    sigma2_r: float = Field(0.0, ge=0)
    alpha_x: float = Field(..., gt=0)
    alpha_y: float = Field(..., gt=0)
    gamma_x: float = Field(..., gt=0, le=1)
    gamma_y: float = Field(..., gt=0, le=1)
    M: float = Field(..., gt=0)
    norm_u_R: float = Field(..., gt=0)
    norm_u_C: float = Field(..., gt=0)
    n: int = Field(..., ge=1)
    mu: Optional[float] = Field(None, ge=0, description="PL constant, needed for rho_tilde")
    lambda_hat: Optional[float] = Field(None, gt=0, description="Configured maximal step-size")

    @model_validator(mode="after")
    def check_alpha(self):
        if max(self.alpha_x, self.alpha_y) > 1.0 / self.r:
            raise ValueError(f"alpha_x and alpha_y must lie in (0, 1/r] = (0, {1.0 / self.r}]")
        return self


@dataclass(frozen=True)
class TheoryBounds:
    e1: float
    e2: float
    e3: float
    e4: float
    e5: float
    A: float
    B: float
    D: float
    E: float
    beta: float
    lambda_hat_max: float
    gamma_x_max: float
    gamma_y_max: float
    rho_tilde: float
    inside_region: Optional[bool]

    def to_dict(self) -> dict:
        return asdict(self)


def _over(num: float, den: float) -> float:
    """num / den with a zero denominator mapped to +inf."""
    return math.inf if den == 0 else num / den


def theory_bounds(inputs: TheoryInputs) -> TheoryBounds:
    p = inputs
    C = p.C
    rdx = p.alpha_x * p.r * p.delta
    rdy = p.alpha_y * p.r * p.delta
    one_minus = 1.0 - p.theta_R * p.gamma_x

    e1 = 2.0 * p.delta_C2 ** 2 * (1.0 + 18.0 * C)
    e2 = 108.0 * C + 112.0
    e3 = min(_over(p.theta_R, 2.0 * p.delta_R2 * one_minus), 1.0)
    e4 = min(_over(p.theta_R, 36.0 * one_minus), 1.0 / (3.0 * math.sqrt(3.0)))
    e5 = min(p.theta_R / (432.0 * math.sqrt(2.0) * p.delta_R2), 1.0 / 72.0)
    E = p.norm_u_R * p.norm_u_C / (p.n ** 2 * p.M)

    lambda_hat_max = min(
        1.0 / 6.0,
        _over(1.0, 6.0 * math.sqrt(C)),
        1.0 / p.M,
        p.theta_C / math.sqrt(54.0 * e1),
        e3 * p.gamma_x / (math.sqrt(96.0 * E) * p.norm_u_C),
        e4 * p.theta_C * p.gamma_y / math.sqrt(48.0 * e1),
    ) / p.L
    gamma_x_max = min(
        1.0,
        _over(e5 * rdx, math.sqrt(C)),
        math.sqrt(p.M * p.norm_u_C) / math.sqrt(108.0 * p.norm_u_R * e1) * p.theta_C * p.gamma_y,
    )
    gamma_y_max = min(
        1.0,
        p.theta_C * e2 / (432.0 * e1),
        _over(p.theta_C * rdy ** 2, 432.0 * e2 * C),
        _over(rdy, math.sqrt(1728.0 * C)),
    )

    A = p.theta_C * p.gamma_y * p.theta_R / (108.0 * e1 * p.gamma_x)
    B = p.L ** 2 * rdx * p.theta_R / (1296.0 * p.gamma_x)
    D = p.theta_C * p.gamma_y * rdy * p.theta_R / (108.0 * e2 * p.gamma_x)
    beta = p.theta_R * p.gamma_x / 8.0

    lam = p.lambda_hat if p.lambda_hat is not None else lambda_hat_max
    rho_tilde = linear_rate(p, lam) if p.mu else math.nan

    inside = None
    if p.lambda_hat is not None:
        inside = bool(p.lambda_hat <= lambda_hat_max and p.gamma_x <= gamma_x_max and p.gamma_y <= gamma_y_max)

    return TheoryBounds(
        e1=e1, e2=e2, e3=e3, e4=e4, e5=e5,
        A=A, B=B, D=D, E=E, beta=beta,
        lambda_hat_max=lambda_hat_max,
        gamma_x_max=gamma_x_max,
        gamma_y_max=gamma_y_max,
        rho_tilde=rho_tilde,
        inside_region=inside,
    )


def linear_rate(p: TheoryInputs, lambda_hat: float) -> float:
    """rho_tilde at step-size ``lambda_hat``; requires the PL constant mu."""
    return max(
        1.0 - 0.5 * p.M * lambda_hat * p.mu,
        1.0 - p.theta_R * p.gamma_x / 16.0,
        1.0 - p.theta_C * p.gamma_y / 8.0,
        1.0 - p.alpha_x * p.r * p.delta / 4.0,
        1.0 - p.alpha_y * p.r * p.delta / 16.0,
    )


def absolute_error_term(p: TheoryInputs, bounds: TheoryBounds, a0: float, a: float, K: int) -> float:
    """Absolute-compression-error part of the averaged squared-gradient bound after K iterations."""
    if not 0 < a < 1:
        raise ValueError("The absolute-error term needs a decaying schedule, 0 < a < 1")
    L2 = p.L ** 2
    sigma2, sigma2_r = p.sigma2, p.sigma2_r
    gx, gy = p.gamma_x, p.gamma_y
    zeta = (
        18.0 * L2 * p.delta_R2 ** 2 * sigma2 / (p.theta_R ** 2 * gx)
        + gy / (6.0 * bounds.e1 * gx ** 2) * (6.0 * p.delta_C2 ** 2 * (1.0 + 18.0 * p.C) * L2 + p.delta_C2 ** 2) * sigma2
        + L2 / (648.0 * gx ** 2) * ((p.alpha_x * p.r) ** 2 * p.delta * sigma2_r + 9.0 * sigma2 * (1.0 / (4.0 * L2) + 18.0))
        + p.theta_C * gy / (108.0 * bounds.e2 * gx ** 2)
        * (2.0 * (p.alpha_y * p.r) ** 2 * p.delta * sigma2_r + 3.0 * sigma2 * (18.0 + 9.0 * bounds.e2 * L2))
    )
    return 32.0 * bounds.E / K * a0 / (1.0 - a) * zeta


def compute_M(pair, lambdas) -> float:
    """M = lambda_bar / lambda_hat with lambda_bar = u_R^T Lambda u_C / n."""
    lambdas = np.asarray(lambdas, dtype=np.float64)
    lambda_hat = float(lambdas.max())
    if lambda_hat <= 0:
        raise ValueError("At least one step-size must be positive")
    lambda_bar = float(pair.u_R @ (lambdas * pair.u_C)) / pair.n
    return lambda_bar / lambda_hat
