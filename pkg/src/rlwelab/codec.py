"""Coefficient compression and tight bit-packing.

Wire format of a packed polynomial: coefficient i occupies bits
[i*w, (i+1)*w) of a little-endian bit string (bit 0 is the least significant
bit of byte 0), each field stored least-significant bit first.  The final byte
is zero-padded.  Example, w = 3, coefficients [1, 2, 3, 4] -> ``d1 08``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EncodeError, MalformedInputError, ParameterError
from .ring import ModPoly, ParamSet

FULL = "full"
Rate = Union[int, str]


def validate_rate(rate: Rate, q: int) -> None:
    if rate == FULL:
        return
    if not isinstance(rate, int) or isinstance(rate, bool):
        raise ParameterError(f"rate must be an int or {FULL!r}, got {rate!r}")
    if rate < 2 or rate & (rate - 1) or rate > 1 << (q - 1).bit_length():
        raise ParameterError(f"rate must be a power of two in [2, 2^ceil(log2 q)], got {rate}")


def rate_bits(rate: Rate, q: int) -> int:
    """Bits per transmitted coefficient at this rate."""
    validate_rate(rate, q)
    if rate == FULL:
        return (q - 1).bit_length()
    return (rate - 1).bit_length()


def parse_rate(text: str) -> Rate:
    t = str(text).strip().lower()
    if t in (FULL, "q"):
        return FULL
    return int(t)


@dataclass(frozen=True)
class CompressionRates:
    """Compression rate on v' (``r_v``) and on u (``r_u``)."""

    r_v: Rate = 8
    r_u: Rate = FULL

    def validate(self, q: int) -> None:
        validate_rate(self.r_v, q)
        validate_rate(self.r_u, q)

    def label(self) -> str:
        fmt = lambda r: "q" if r == FULL else str(r)  # noqa: E731
        return f"({fmt(self.r_v)},{fmt(self.r_u)})"


def compress_values(x, rate: int, q: int) -> np.ndarray:
    """round(x * r / q) mod r on raw integers in [0, q), ties rounded up."""
    x = np.asarray(x, dtype=np.int64)
    return ((2 * x * rate + q) // (2 * q)) % rate


def decompress_values(h, rate: int, q: int) -> np.ndarray:
    """round(h * q / r), ties rounded up."""
    h = np.asarray(h, dtype=np.int64)
    return (2 * h * q + rate) // (2 * rate) % q


def compress(p: ModPoly, rate: Rate) -> np.ndarray:
    """Compressed coefficients in [0, r); the identity for FULL."""
    validate_rate(rate, p.params.q)
    if rate == FULL:
        return p.coeffs.copy()
    return compress_values(p.coeffs, rate, p.params.q)


def decompress(h, rate: Rate, params: ParamSet) -> ModPoly:
    validate_rate(rate, params.q)
    h = np.asarray(h, dtype=np.int64)
    bound = params.q if rate == FULL else rate
    if h.size and (h.min() < 0 or h.max() >= bound):
        raise MalformedInputError(f"compressed coefficient outside [0, {bound})")
    if rate == FULL:
        return ModPoly(params, h)
    return ModPoly(params, decompress_values(h, rate, params.q))


@dataclass(frozen=True)
class PackedPoly:
    bits_per_coeff: int
    data: bytes

    def hex(self) -> str:
        return self.data.hex()


def packed_len(n: int, bits_per_coeff: int) -> int:
    return (n * bits_per_coeff + 7) // 8


def pack(values, bits_per_coeff: int) -> PackedPoly:
    """Pack a ModPoly or an integer array into ``bits_per_coeff``-bit fields."""
    if isinstance(values, ModPoly):
        values = values.coeffs
    vals = np.asarray(values, dtype=np.int64)
    if bits_per_coeff < 1 or bits_per_coeff > 62:
        raise EncodeError(f"unsupported field width {bits_per_coeff}")
    if vals.size and (vals.min() < 0 or vals.max() >> bits_per_coeff):
        raise EncodeError(f"coefficient does not fit in {bits_per_coeff} bits")
    shifts = np.arange(bits_per_coeff, dtype=np.int64)
    bits = ((vals[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return PackedPoly(bits_per_coeff, np.packbits(bits, bitorder="little").tobytes())


def unpack_values(packed: PackedPoly, n: int) -> np.ndarray:
    w = packed.bits_per_coeff
    expected = packed_len(n, w)
    if len(packed.data) != expected:
        raise MalformedInputError(f"expected {expected} bytes, got {len(packed.data)}")
    bits = np.unpackbits(np.frombuffer(packed.data, dtype=np.uint8), bitorder="little")
    if bits[n * w:].any():
        raise MalformedInputError("nonzero padding bits")
    fields = bits[: n * w].reshape(n, w).astype(np.int64)
    return fields @ (1 << np.arange(w, dtype=np.int64))


def unpack(packed: PackedPoly, params: ParamSet) -> ModPoly:
    vals = unpack_values(packed, params.n)
    if vals.size and vals.max() >= params.q:
        raise MalformedInputError("unpacked coefficient is not reduced mod q")
    return ModPoly(params, vals)


def ciphertext_size(params: ParamSet, rates: CompressionRates) -> int:
    """Ciphertext bytes, n/8 * (bits(r_v) + bits(r_u)) for n divisible by 8."""
    return packed_len(params.n, rate_bits(rates.r_v, params.q)) + packed_len(
        params.n, rate_bits(rates.r_u, params.q)
    )
