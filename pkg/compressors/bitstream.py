"""
Bit-level payload helpers.

Payloads are numpy uint8 arrays holding one bit (0 or 1) per entry, most
significant bit first. Floats are stored big-endian so their bit strings
read the same way as the integer fields around them.
"""

import numpy as np

from compressors.errors import DecodeError


def bit_width(max_value: int) -> int:
    """Bits needed to store unsigned integers 0..max_value (at least 1)."""
    return max(int(max_value).bit_length(), 1)


def index_width(dim: int) -> int:
    """ceil(log2(dim)) bits, zero for a single coordinate."""
    return (int(dim) - 1).bit_length()


def uint_to_bits(values, width: int) -> np.ndarray:
    values = np.atleast_1d(np.asarray(values, dtype=np.uint64))
    if width == 0:
        return np.zeros(0, dtype=np.uint8)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()


def bits_to_uint(bits: np.ndarray, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros(0, dtype=np.uint64)
    groups = np.asarray(bits, dtype=np.uint64).reshape(-1, width)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return (groups << shifts).sum(axis=1, dtype=np.uint64)


def int_to_twos(values, width: int) -> np.ndarray:
    """Two's-complement codes of signed integers in ``width`` bits."""
    values = np.atleast_1d(np.asarray(values, dtype=np.int64))
    mask = np.int64((1 << width) - 1)
    return uint_to_bits((values & mask).astype(np.uint64), width)


def twos_to_int(bits: np.ndarray, width: int) -> np.ndarray:
    codes = bits_to_uint(bits, width).astype(np.int64)
    sign = np.int64(1 << (width - 1))
    return np.where(codes >= sign, codes - np.int64(1 << width), codes)


def float64_to_bits(values) -> np.ndarray:
    raw = np.ascontiguousarray(np.atleast_1d(np.asarray(values, dtype=">f8")))
    return np.unpackbits(raw.view(np.uint8))


def bits_to_float64(bits: np.ndarray) -> np.ndarray:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).view(">f8").astype(np.float64)


def float32_to_bits(value: float) -> np.ndarray:
    raw = np.ascontiguousarray(np.asarray([value], dtype=">f4"))
    return np.unpackbits(raw.view(np.uint8))


def bits_to_float32(bits: np.ndarray) -> float:
    return float(np.packbits(np.asarray(bits, dtype=np.uint8)).view(">f4")[0])


class BitReader:
    """Sequential reader over a bit payload; every read is bounds-checked."""

    def __init__(self, payload: np.ndarray):
        self.payload = np.asarray(payload, dtype=np.uint8)
        self.pos = 0

    @property
    def remaining(self) -> int:
        return self.payload.size - self.pos

    def take(self, count: int) -> np.ndarray:
        if count < 0 or count > self.remaining:
            raise DecodeError(f"Payload truncated: need {count} bits at offset {self.pos}, {self.remaining} left")
        chunk = self.payload[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def read_uint(self, width: int, count: int = 1) -> np.ndarray:
        if width == 0:
            return np.zeros(count, dtype=np.uint64)
        return bits_to_uint(self.take(width * count), width)

    def read_twos(self, width: int, count: int) -> np.ndarray:
        return twos_to_int(self.take(width * count), width)

    def read_float64(self, count: int) -> np.ndarray:
        return bits_to_float64(self.take(64 * count))

    def read_float32(self) -> float:
        return bits_to_float32(self.take(32))

    def rest(self) -> np.ndarray:
        return self.take(self.remaining)

    def expect_end(self) -> None:
        if self.remaining:
            raise DecodeError(f"{self.remaining} trailing bits after payload")


def bigint_to_bits(value: int, width: int) -> np.ndarray:
    """Arbitrary-precision unsigned integer to ``width`` bits."""
    return np.array([(value >> s) & 1 for s in range(width - 1, -1, -1)], dtype=np.uint8)


def bits_to_bigint(bits: np.ndarray) -> int:
    value = 0
    for bit in np.asarray(bits, dtype=np.uint8).tolist():
        value = (value << 1) | bit
    return value
