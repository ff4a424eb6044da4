"""Noise distributions of the NewHope-style PKE and the resulting failure rates.

All coefficients are treated as independent.  The per-coefficient noise seen
by the decoder is

    n_t = (e s' - e' s + e'') + n_c - n_u s

where n_c is the rounding error of compressing v' and n_u the rounding error
of compressing u.  The ATE demodulator plus this noise act as a binary
symmetric "super channel" whose cross-over probability feeds either the
plain-ATE block error 1 - (1 - p)^256 or the BCH bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from ..codec import FULL, CompressionRates, Rate, compress_values, decompress_values, validate_rate
from ..ring import ParamSet
from .pmf import (
    DEFAULT_PRECISION,
    Pmf,
    convolve_raw,
    pmf_binomial,
    pmf_convolve,
    pmf_fold,
    pmf_negate,
    pmf_power,
    pmf_product,
)


def compression_error_counts(q: int, rate: Rate) -> dict[int, int]:
    """How many x in [0, q) have each centered error decompress(compress(x)) - x."""
    validate_rate(rate, q)
    if rate == FULL:
        return {0: q}
    x = np.arange(q, dtype=np.int64)
    err = (decompress_values(compress_values(x, rate, q), rate, q) - x) % q
    err[err > q // 2] -= q
    values, counts = np.unique(err, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


@lru_cache(maxsize=64)
def pmf_compression_noise(q: int, rate: Rate, precision: int = DEFAULT_PRECISION) -> Pmf:
    """Exact rounding-error distribution for a uniform coefficient, by
    enumerating all q inputs through the codec."""
    counts = compression_error_counts(q, rate)
    return Pmf.from_fractions({e: Fraction(c, q) for e, c in counts.items()}, precision)


@lru_cache(maxsize=16)
def pmf_difference_noise(params: ParamSet, precision: int = DEFAULT_PRECISION) -> Pmf:
    """Folded distribution of one coefficient of e s' - e' s + e''.

    Each product polynomial coefficient is a signed sum of n independent
    psi_k * psi_k terms; by symmetry the signs drop out, leaving 2n product
    terms plus one psi_k.
    """
    psi = pmf_binomial(params.k, precision)
    prod = pmf_fold(pmf_product(psi, psi), params.q)
    return pmf_convolve(pmf_power(prod, 2 * params.n), psi)


@lru_cache(maxsize=32)
def pmf_u_compression_term(params: ParamSet, rate: Rate, precision: int = DEFAULT_PRECISION) -> Pmf:
    """Folded distribution of one coefficient of -(n_u * s)."""
    term = pmf_product(pmf_negate(pmf_compression_noise(params.q, rate, precision)),
                       pmf_binomial(params.k, precision))
    return pmf_power(pmf_fold(term, params.q), params.n)


def pmf_total_noise(params: ParamSet, rates: CompressionRates,
                    precision: int = DEFAULT_PRECISION) -> Pmf:
    rates.validate(params.q)
    total = pmf_convolve(pmf_difference_noise(params, precision),
                         pmf_compression_noise(params.q, rates.r_v, precision))
    if rates.r_u != FULL:
        total = pmf_convolve(total, pmf_u_compression_term(params, rates.r_u, precision))
    return total


@dataclass(frozen=True)
class SuperChannel:
    """Binary symmetric channel seen by the outer code.

    ``p`` averages the two conditional error rates with equal priors.
    """

    p: mpmath.mpf
    m: int
    p_given_zero: mpmath.mpf
    p_given_one: mpmath.mpf
    precision: int
    label: str = field(default="", compare=False)

    def log2_p(self) -> float:
        with mpmath.workprec(self.precision):
            return float(mpmath.log(self.p, 2)) if self.p > 0 else float("-inf")


def distance_pmf_raw(total: Pmf, pole: int) -> list[int]:
    """Fixed-point weights of |((pole + n_t) mod q) - floor(q/2)| on [0, floor(q/2)]."""
    q = total.modulus
    h = q // 2
    d = [0] * (h + 1)
    for x, w in enumerate(total.weights):
        if w:
            d[abs((pole + x) % q - h)] += w
    return d


def crossover_probability(total: Pmf, m: int, label: str = "") -> SuperChannel:
    """Per-bit error rate of m-fold ATE over the folded total-noise pmf.

    A sent 1 (pole floor(q/2)) errs when the summed distance t satisfies
    4t >= m*q; a sent 0 errs when 4t < m*q.  Both tails are summed directly.
    """
    if total.modulus is None:
        raise ValueError("crossover_probability needs a pmf folded mod q")
    if m < 1:
        raise ValueError("m must be >= 1")
    q, f = total.modulus, total.frac_bits
    tails = []
    for pole, errs_below in ((q // 2, False), (0, True)):
        d = distance_pmf_raw(total, pole)
        s = d
        for _ in range(m - 1):
            s = convolve_raw(s, d, f)
        cut = -(-m * q // 4)  # smallest t with 4t >= m*q
        tails.append(sum(s[:cut]) if errs_below else sum(s[cut:]))
    with mpmath.workprec(total.precision):
        p1 = mpmath.ldexp(mpmath.mpf(tails[0]), -f)
        p0 = mpmath.ldexp(mpmath.mpf(tails[1]), -f)
        return SuperChannel((p0 + p1) / 2, m, p0, p1, total.precision, label)


def dfr_ate(channel: SuperChannel, nbits: int = 256):
    """Block error 1 - (1 - p)^nbits, evaluated without cancellation."""
    with mpmath.workprec(channel.precision):
        p = channel.p
        if p == 0:
            return mpmath.mpf(0)
        return -mpmath.expm1(nbits * mpmath.log1p(-p))


def dfr_bch(p, n: int, t: int, precision: int = DEFAULT_PRECISION):
    """P(more than t of n bits flip) on a BSC with cross-over ``p``.

    Summed as the upper binomial tail, which equals
    1 - sum_{i<=t} C(n,i) p^i (1-p)^(n-i) but keeps full relative precision.
    """
    if isinstance(p, SuperChannel):
        precision = p.precision
        p = p.p
    with mpmath.workprec(precision):
        p = mpmath.mpf(p)
        if p < 0 or p > 1:
            raise ValueError(f"cross-over probability must lie in [0, 1], got {p}")
        if t >= n or p == 0:
            return mpmath.mpf(0)
        if p == 1:
            return mpmath.mpf(1)
        lp, lq = mpmath.log(p), mpmath.log1p(-p)
        terms = [mpmath.exp(mpmath.log(mpmath.binomial(n, i)) + i * lp + (n - i) * lq)
                 for i in range(t + 1, n + 1)]
        return mpmath.fsum(terms)


def log2(x, precision: int = DEFAULT_PRECISION) -> float:
    with mpmath.workprec(precision):
        return float(mpmath.log(x, 2)) if x > 0 else float("-inf")
