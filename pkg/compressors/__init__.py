"""Compression operators, bit-exact payloads and contract-constant diagnostics."""

from compressors.constants import CompressionConstants, estimate_constants
from compressors.errors import CompressionDomainError, DecodeError
from compressors.operators import CompressedMessage, build_compressor, compress, decode, dynamic_scale_compress
from compressors.specs import (
    ComposeSpec,
    CompressorSpec,
    FixedLevelQuantSpec,
    IdentitySpec,
    InfNormQuantSpec,
    TopKSpec,
    parse_spec,
)

__all__ = [
    "ComposeSpec",
    "CompressedMessage",
    "CompressionConstants",
    "CompressionDomainError",
    "CompressorSpec",
    "DecodeError",
    "FixedLevelQuantSpec",
    "IdentitySpec",
    "InfNormQuantSpec",
    "TopKSpec",
    "build_compressor",
    "compress",
    "decode",
    "dynamic_scale_compress",
    "estimate_constants",
    "parse_spec",
]
