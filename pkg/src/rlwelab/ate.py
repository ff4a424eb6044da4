"""Additive threshold encoding (ATE).

Each of B bits is repeated m times at interleaved positions i, i+B, ..., i+(m-1)B
as one of the poles {0, floor(q/2)}.  Decoding sums the distances
|v_j - floor(q/2)| over the m positions (canonical representatives, not
circular distance) and outputs 1 iff the sum is strictly below m*q/4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ParameterError
from .ring import ModPoly, ParamSet


@dataclass(frozen=True)
class AteParams:
    m: int
    block_len: int

    def __post_init__(self):
        if self.m < 1 or self.block_len < 1:
            raise ParameterError("ATE needs m >= 1 and block_len >= 1")

    @property
    def used(self) -> int:
        return self.m * self.block_len

    def check(self, params: ParamSet) -> None:
        if self.used > params.n:
            raise CapacityError(f"ATE needs {self.used} coefficients, ring has {params.n}")


def positions(ate: AteParams) -> np.ndarray:
    """(B, m) array: row i lists the coefficient indices carrying bit i."""
    return np.arange(ate.block_len)[:, None] + ate.block_len * np.arange(ate.m)[None, :]


def ate_encode(bits, ate: AteParams, params: ParamSet) -> ModPoly:
    bits = np.asarray(bits, dtype=np.int64)
    ate.check(params)
    if bits.shape != (ate.block_len,):
        raise ParameterError(f"expected {ate.block_len} bits, got shape {bits.shape}")
    if ((bits != 0) & (bits != 1)).any():
        raise ParameterError("bits must be 0 or 1")
    coeffs = np.zeros(params.n, dtype=np.int64)
    coeffs[: ate.used] = np.tile(bits, ate.m) * params.half_q
    return ModPoly(params, coeffs)


def ate_distances(v: ModPoly, ate: AteParams) -> np.ndarray:
    """Summed distance to floor(q/2) for every bit, as integers."""
    ate.check(v.params)
    return np.abs(v.coeffs[positions(ate)] - v.params.half_q).sum(axis=1)


def ate_decode(v: ModPoly, ate: AteParams) -> np.ndarray:
    # t < m*q/4  <=>  4t < m*q, exact in integers; the tie decodes to 0
    t = ate_distances(v, ate)
    return (4 * t < ate.m * v.params.q).astype(np.uint8)
