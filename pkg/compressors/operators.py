"""
Compression Operators
---------------------
Encoders and decoders for every CompressorSpec variant, plus the dynamic
scaling wrapper s_k * C(x / s_k).

Payload layouts (bit-exact, MSB first):

  identity        dim x float64
  inf_norm_quant  x == 0: the single bit 0
                  otherwise [8-bit norm length L][L-bit norm][dim x (sign bit, b magnitude bits)]
                  norm is the integer phi when stochastic, else a float32 (L = 32)
  top_k           k_eff x [ceil(log2 dim)-bit index][float64 value], indices ascending
  fixed_level     clamped:   dim x ceil(log2(2c + 2))-bit two's-complement level codes
                  unbounded: [8-bit code width w][dim x w-bit two's-complement level codes]
  compose         inner top_k: [k_eff x index bits][outer payload over the k_eff kept values]
                  otherwise:   outer payload over outer(inner(x))
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from compressors.bitstream import (
    BitReader,
    bigint_to_bits,
    bits_to_bigint,
    bits_to_uint,
    float32_to_bits,
    float64_to_bits,
    index_width,
    int_to_twos,
    uint_to_bits,
)
from compressors.errors import CompressionDomainError, DecodeError
from compressors.specs import (
    ComposeSpec,
    FixedLevelQuantSpec,
    IdentitySpec,
    InfNormQuantSpec,
    TopKSpec,
    parse_spec,
)

logger = logging.getLogger(__name__)

NORM_LENGTH_BITS = 8
MAX_LEVEL_WIDTH = 62


@dataclass(frozen=True, eq=False)
class CompressedMessage:
    dim: int
    payload: np.ndarray
    bit_count: int
    spec: object

    def __post_init__(self):
        if self.bit_count != self.payload.size:
            raise ValueError(f"bit_count {self.bit_count} does not match payload length {self.payload.size}")


class Compressor:
    """Interface: ``encode`` turns a vector into a bit payload, ``decode`` inverts it."""

    def __init__(self, spec):
        self.spec = spec

    def encode(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def decode(self, bits: np.ndarray, dim: int) -> np.ndarray:
        raise NotImplementedError

    def roundtrip(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.decode(self.encode(x, rng), x.size)


class IdentityCompressor(Compressor):

    def encode(self, x, rng):
        return float64_to_bits(x)

    def decode(self, bits, dim):
        reader = BitReader(bits)
        values = reader.read_float64(dim)
        reader.expect_end()
        return values


class InfNormQuantizer(Compressor):
    """sign(x) * phi / 2^(b-1) * floor(2^(b-1) |x| / ||x||_inf + u), u ~ U[0, 1)."""

    def __init__(self, spec: InfNormQuantSpec):
        super().__init__(spec)
        self.bits = spec.bits
        self.scale = 2.0 ** (spec.bits - 1)

    def _norm_field(self, norm: float, rng) -> np.ndarray:
        if self.spec.stochastic_norm:
            base = math.floor(norm)
            phi = base + int(rng.random() < norm - base)
            width = (phi + 1).bit_length()
            if width >= 1 << NORM_LENGTH_BITS:
                raise CompressionDomainError(f"Norm {norm:.3e} does not fit a {(1 << NORM_LENGTH_BITS) - 1}-bit field")
            return np.concatenate([uint_to_bits(width, NORM_LENGTH_BITS), bigint_to_bits(phi, width)])
        if not np.isfinite(np.float32(norm)):
            raise CompressionDomainError(f"Norm {norm:.3e} overflows float32")
        return np.concatenate([uint_to_bits(32, NORM_LENGTH_BITS), float32_to_bits(norm)])

    def encode(self, x, rng):
        norm = float(np.max(np.abs(x)))
        if norm == 0.0:
            return np.zeros(1, dtype=np.uint8)
        header = self._norm_field(norm, rng)
        u = rng.random(x.size)
        levels = np.floor(self.scale * np.abs(x) / norm + u).astype(np.uint64)
        signs = (x < 0).astype(np.uint8)
        fields = np.hstack([signs[:, None], uint_to_bits(levels, self.bits).reshape(x.size, self.bits)])
        return np.concatenate([header, fields.ravel()])

    def decode(self, bits, dim):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.size == 1:
            if bits[0] != 0:
                raise DecodeError("Single-bit quantizer payload must be the zero flag")
            return np.zeros(dim)
        reader = BitReader(bits)
        width = int(reader.read_uint(NORM_LENGTH_BITS)[0])
        if self.spec.stochastic_norm:
            if width == 0:
                raise DecodeError("Empty norm field")
            phi = float(bits_to_bigint(reader.take(width)))
        else:
            if width != 32:
                raise DecodeError(f"Raw norm field must be 32 bits, got {width}")
            phi = reader.read_float32()
        fields = reader.take(dim * (self.bits + 1)).reshape(dim, self.bits + 1)
        reader.expect_end()
        levels = bits_to_uint(fields[:, 1:].ravel(), self.bits).astype(np.float64)
        if (levels > self.scale).any():
            raise DecodeError(f"Magnitude level above {int(self.scale)}")
        signs = np.where(fields[:, 0] == 1, -1.0, 1.0)
        return (phi / self.scale) * (signs * levels)


class TopKSparsifier(Compressor):
    """Keeps the k largest-magnitude coordinates; ties go to the lowest index."""

    def __init__(self, spec: TopKSpec):
        super().__init__(spec)
        self.k = spec.k

    def support(self, x: np.ndarray) -> np.ndarray:
        k_eff = min(self.k, x.size)
        order = np.argsort(-np.abs(x), kind="stable")[:k_eff]
        return np.sort(order)

    def encode_indices(self, idx: np.ndarray, dim: int) -> np.ndarray:
        return uint_to_bits(idx, index_width(dim))

    def decode_indices(self, reader: BitReader, dim: int) -> np.ndarray:
        k_eff = min(self.k, dim)
        idx = reader.read_uint(index_width(dim), k_eff).astype(np.int64)
        if k_eff and (idx.max() >= dim or (np.diff(idx) <= 0).any()):
            raise DecodeError("Top-k indices must be ascending and below dim")
        return idx

    def encode(self, x, rng):
        idx = self.support(x)
        width = index_width(x.size)
        rows = np.hstack([
            uint_to_bits(idx, width).reshape(idx.size, width),
            float64_to_bits(x[idx]).reshape(idx.size, 64),
        ])
        return rows.ravel()

    def decode(self, bits, dim):
        k_eff = min(self.k, dim)
        width = index_width(dim)
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.size != k_eff * (width + 64):
            raise DecodeError(f"Top-k payload has {bits.size} bits, expected {k_eff * (width + 64)}")
        rows = bits.reshape(k_eff, width + 64)
        idx = self.decode_indices(BitReader(rows[:, :width].ravel()), dim)
        values = BitReader(rows[:, width:].ravel()).read_float64(k_eff)
        out = np.zeros(dim)
        out[idx] = values
        return out


class FixedLevelQuantizer(Compressor):
    """step * round(x / step) with round-half-to-even, optionally clamped to +/- clamp_level steps."""

    def __init__(self, spec: FixedLevelQuantSpec):
        super().__init__(spec)
        self.step = spec.step
        self.clamp = spec.clamp_level
        self.width = None if self.clamp is None else (2 * self.clamp + 1).bit_length()

    def encode(self, x, rng):
        levels = np.rint(x / self.step)
        if self.clamp is not None:
            return int_to_twos(np.clip(levels, -self.clamp, self.clamp).astype(np.int64), self.width)
        if np.max(np.abs(levels)) >= 2.0 ** (MAX_LEVEL_WIDTH - 1):
            raise CompressionDomainError(f"Level magnitude exceeds {MAX_LEVEL_WIDTH}-bit codes")
        levels = levels.astype(np.int64)
        lo, hi = int(levels.min()), int(levels.max())
        width = max(1, hi.bit_length() + 1 if hi > 0 else 1, (-lo - 1).bit_length() + 1 if lo < 0 else 1)
        return np.concatenate([uint_to_bits(width, NORM_LENGTH_BITS), int_to_twos(levels, width)])

    def decode(self, bits, dim):
        reader = BitReader(bits)
        if self.clamp is None:
            width = int(reader.read_uint(NORM_LENGTH_BITS)[0])
            if not 1 <= width <= MAX_LEVEL_WIDTH:
                raise DecodeError(f"Level code width {width} out of range")
        else:
            width = self.width
        levels = reader.read_twos(width, dim)
        reader.expect_end()
        if self.clamp is not None and (np.abs(levels) > self.clamp).any():
            raise DecodeError(f"Level outside +/-{self.clamp}")
        return self.step * levels.astype(np.float64)


class ComposedCompressor(Compressor):
    """outer(inner(x)); a top-k inner stage sends its support once and the outer stage only the kept values."""

    def __init__(self, spec: ComposeSpec):
        super().__init__(spec)
        self.outer = build_compressor(spec.outer)
        self.inner = build_compressor(spec.inner)
        self.sparse = isinstance(self.inner, TopKSparsifier)

    def encode(self, x, rng):
        if self.sparse:
            idx = self.inner.support(x)
            return np.concatenate([self.inner.encode_indices(idx, x.size), self.outer.encode(x[idx], rng)])
        return self.outer.encode(self.inner.roundtrip(x, rng), rng)

    def decode(self, bits, dim):
        if not self.sparse:
            return self.outer.decode(bits, dim)
        reader = BitReader(bits)
        idx = self.inner.decode_indices(reader, dim)
        out = np.zeros(dim)
        out[idx] = self.outer.decode(reader.rest(), idx.size)
        return out


_COMPRESSORS = {
    IdentitySpec: IdentityCompressor,
    InfNormQuantSpec: InfNormQuantizer,
    TopKSpec: TopKSparsifier,
    FixedLevelQuantSpec: FixedLevelQuantizer,
    ComposeSpec: ComposedCompressor,
}


@lru_cache(maxsize=None)
def build_compressor(spec) -> Compressor:
    return _COMPRESSORS[type(spec)](spec)


def _check_input(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise CompressionDomainError(f"Expected a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise CompressionDomainError("Cannot compress non-finite values")
    return x


def compress(spec, x, rng: np.random.Generator) -> CompressedMessage:
    spec = parse_spec(spec)
    x = _check_input(x)
    payload = build_compressor(spec).encode(x, rng)
    payload.setflags(write=False)
    return CompressedMessage(dim=x.size, payload=payload, bit_count=int(payload.size), spec=spec)


def decode(msg: CompressedMessage) -> np.ndarray:
    """Decoded vector; raises DecodeError on malformed payloads."""
    try:
        return build_compressor(msg.spec).decode(msg.payload, msg.dim)
    except (ValueError, IndexError) as e:
        if isinstance(e, DecodeError):
            raise
        raise DecodeError(f"Malformed {msg.spec.kind} payload: {e}") from e


def dynamic_scale_compress(spec, x, s_k: float, rng: np.random.Generator) -> tuple[CompressedMessage, np.ndarray]:
    """Send C(x / s_k); the receiver knows s_k from the shared schedule and recovers s_k * decode."""
    if not (np.isfinite(s_k) and s_k > 0):
        raise CompressionDomainError(f"Scaling factor must be positive and finite, got {s_k}")
    x = _check_input(x)
    msg = compress(spec, x / s_k, rng)
    return msg, s_k * decode(msg)
