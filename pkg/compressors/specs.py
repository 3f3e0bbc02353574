"""
Compressor Specifications
-------------------------
Pydantic models describing one compression operator and its parameters.
The ``kind`` field discriminates the variants so specs can be parsed
straight from experiment YAML:

    x_compressor:
      kind: compose
      outer: {kind: inf_norm_quant, bits: 2}
      inner: {kind: top_k, k: 5}
"""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

MAX_COMPOSE_DEPTH = 4


class _SpecBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def depth(self) -> int:
        return 1

    def label(self) -> str:
        return self.kind


class IdentitySpec(_SpecBase):
    kind: Literal["identity"] = "identity"


class InfNormQuantSpec(_SpecBase):
    """b-bit infinity-norm quantizer with optional stochastic integer rounding of the norm."""

    kind: Literal["inf_norm_quant"] = "inf_norm_quant"
    bits: int = Field(2, ge=1, le=32, description="Magnitude bits per coordinate (b)")
    stochastic_norm: bool = Field(True, description="Round the norm stochastically to an integer before sending")

    def label(self) -> str:
        return f"qn{self.bits}"


class TopKSpec(_SpecBase):
    kind: Literal["top_k"] = "top_k"
    k: int = Field(..., ge=1, description="Number of largest-magnitude coordinates kept")

    def label(self) -> str:
        return f"top{self.k}"


class FixedLevelQuantSpec(_SpecBase):
    """Rounds each coordinate to a multiple of ``step``; ``clamp_level: null`` disables saturation."""

    kind: Literal["fixed_level"] = "fixed_level"
    step: float = Field(1.0, gt=0, description="Quantization step")
    clamp_level: Optional[int] = Field(1, ge=1, description="Saturation level in steps, or null for unbounded")

    def label(self) -> str:
        clamp = "inf" if self.clamp_level is None else self.clamp_level
        return f"fixed{self.step:g}c{clamp}"


class ComposeSpec(_SpecBase):
    """outer(inner(x))."""

    kind: Literal["compose"] = "compose"
    outer: "CompressorSpec"
    inner: "CompressorSpec"

    @property
    def depth(self) -> int:
        return 1 + max(self.outer.depth, self.inner.depth)

    @model_validator(mode="after")
    def check_depth(self):
        if self.depth > MAX_COMPOSE_DEPTH:
            raise ValueError(f"Composition depth {self.depth} exceeds {MAX_COMPOSE_DEPTH}")
        return self

    def label(self) -> str:
        return f"{self.outer.label()}.{self.inner.label()}"


CompressorSpec = Annotated[
    Union[IdentitySpec, InfNormQuantSpec, TopKSpec, FixedLevelQuantSpec, ComposeSpec],
    Field(discriminator="kind"),
]

ComposeSpec.model_rebuild()

_SPEC_ADAPTER = TypeAdapter(CompressorSpec)


def parse_spec(data) -> _SpecBase:
    """Validate a mapping (or an existing spec) into a CompressorSpec variant."""
    if isinstance(data, _SpecBase):
        return data
    return _SPEC_ADAPTER.validate_python(data)
