"""
Algorithm Parameters
--------------------
Validated parameter set for one RCPP run. Ranges are enforced at
construction so an invalid configuration never reaches the iteration loop.
"""

from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from compressors.specs import CompressorSpec, IdentitySpec


class ScheduleSpec(BaseModel):
    """Dynamic scaling schedule s_k = sqrt(a0 * a^k)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a0: float = Field(1.0, gt=0, description="Initial squared scale")
    a: float = Field(0.99, gt=0, le=1, description="Per-iteration decay of s_k^2")
    constant_ablation: bool = Field(False, description="Hold s_k constant (requires a = 1)")

    @model_validator(mode="after")
    def check_ablation(self):
        if self.a == 1.0 and not self.constant_ablation:
            raise ValueError("a = 1 (constant scaling) is only allowed with constant_ablation: true")
        if self.constant_ablation and self.a != 1.0:
            raise ValueError("constant_ablation requires a = 1")
        return self


class RcppParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha_x: float = Field(0.5, gt=0, description="Reference update weight, x-chain")
    alpha_y: float = Field(0.5, gt=0, description="Reference update weight, y-chain")
    gamma_x: float = Field(0.4, gt=0, le=1, description="Consensus step-size, x-chain")
    gamma_y: float = Field(0.4, gt=0, le=1, description="Consensus step-size, y-chain")
    step_size: Union[float, list[float]] = Field(0.1, description="lambda, scalar or one per agent")
    schedule: ScheduleSpec = Field(default_factory=ScheduleSpec)
    x_compressor: CompressorSpec = Field(default_factory=IdentitySpec)
    y_compressor: CompressorSpec = Field(default_factory=IdentitySpec)
    iterations: int = Field(1000, ge=0, description="K")
    r: float = Field(1.0, gt=0, description="Scaling constant of the compression contract")
    bit_accounting: Literal["per_edge", "broadcast"] = "per_edge"
    record_every: int = Field(1, ge=1)

    @field_validator("step_size")
    @classmethod
    def check_step_size(cls, v):
        values = v if isinstance(v, list) else [v]
        if not values or any(not np.isfinite(s) or s < 0 for s in values):
            raise ValueError("Step-sizes must be finite and nonnegative")
        return v

    @model_validator(mode="after")
    def check_alpha(self):
        for name in ("alpha_x", "alpha_y"):
            if getattr(self, name) > 1.0 / self.r:
                raise ValueError(f"{name}={getattr(self, name)} exceeds 1/r = {1.0 / self.r}")
        return self

    def lambdas(self, n: int) -> np.ndarray:
        """Diagonal of Lambda for ``n`` agents."""
        if isinstance(self.step_size, list):
            if len(self.step_size) != n:
                raise ValueError(f"{len(self.step_size)} step-sizes given for {n} agents")
            return np.asarray(self.step_size, dtype=np.float64)
        return np.full(n, float(self.step_size))


def scaling(k: int, schedule: ScheduleSpec) -> float:
    """s_k = sqrt(a0) * a^(k/2)."""
    if k < 0:
        raise ValueError(f"Iteration index must be nonnegative, got {k}")
    return float(np.sqrt(schedule.a0) * schedule.a ** (k / 2.0))
