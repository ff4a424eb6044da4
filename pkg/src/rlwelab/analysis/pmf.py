"""High-precision probability mass functions on bounded integer supports.

Weights are stored as non-negative Python integers in fixed point with
``2 * precision`` fractional bits, so any probability >= 2^-precision carries
at least ``precision`` significant bits and anything below 2^-(2*precision)
rounds to zero.  Scalars handed out to callers are mpmath floats at
``precision`` bits with unbounded exponent.

Convolutions are computed by Kronecker substitution: both weight vectors are
packed into one big integer each, multiplied with GMP, and unpacked.  The
product is exact; only the final rescaling to the fixed-point grid rounds
(half an ulp per entry).
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Optional

import gmpy2
import mpmath

DEFAULT_PRECISION = 512


class Pmf:
    """Distribution over ``offset .. offset + len(weights) - 1``.

    A folded Pmf (``modulus`` set) lives on Z_q with support exactly [0, q).
    Instances are immutable.
    """

    __slots__ = ("offset", "weights", "precision", "modulus")

    def __init__(self, offset: int, weights: Iterable[int], precision: int,
                 modulus: Optional[int] = None):
        w = tuple(int(x) for x in weights)
        if not w:
            raise ValueError("empty support")
        if any(x < 0 for x in w):
            raise ValueError("negative weight")
        if modulus is not None and (offset != 0 or len(w) != modulus):
            raise ValueError("folded pmf must have support exactly [0, q)")
        object.__setattr__(self, "offset", int(offset))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "precision", int(precision))
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("Pmf is immutable")

    # -- construction ---------------------------------------------------------

    @property
    def frac_bits(self) -> int:
        return 2 * self.precision

    @classmethod
    def from_fractions(cls, probs: Mapping[int, Fraction], precision: int = DEFAULT_PRECISION,
                       modulus: Optional[int] = None) -> "Pmf":
        """Round exact rational probabilities onto the fixed-point grid."""
        if modulus is not None:
            folded: dict[int, Fraction] = {}
            for x, p in probs.items():
                folded[x % modulus] = folded.get(x % modulus, 0) + Fraction(p)
            probs = folded
        lo, hi = (0, modulus - 1) if modulus is not None else (min(probs), max(probs))
        f = 2 * precision
        weights = [0] * (hi - lo + 1)
        for x, p in probs.items():
            p = Fraction(p)
            weights[x - lo] = ((p.numerator << f) * 2 + p.denominator) // (2 * p.denominator)
        return cls(lo, weights, precision, modulus)

    @classmethod
    def point(cls, x: int, precision: int = DEFAULT_PRECISION) -> "Pmf":
        return cls(x, [1 << (2 * precision)], precision)

    # -- queries --------------------------------------------------------------

    @property
    def support(self) -> range:
        return range(self.offset, self.offset + len(self.weights))

    def raw(self, x: int) -> int:
        i = x - self.offset
        return self.weights[i] if 0 <= i < len(self.weights) else 0

    def weight(self, x: int):
        """Probability of ``x`` as an mpmath float."""
        if self.modulus is not None:
            x %= self.modulus
        return self._to_mpf(self.raw(x))

    def _to_mpf(self, raw: int):
        with mpmath.workprec(self.precision):
            return mpmath.ldexp(mpmath.mpf(raw), -self.frac_bits)

    def total(self):
        return self._to_mpf(sum(self.weights))

    def items(self):
        """(value, probability) pairs with nonzero probability."""
        for i, w in enumerate(self.weights):
            if w:
                yield self.offset + i, self._to_mpf(w)

    def log2_weights(self) -> list[tuple[int, float]]:
        out = []
        for i, w in enumerate(self.weights):
            if w:
                out.append((self.offset + i, math.log2(w) - self.frac_bits))
        return out

    def centered_items(self):
        """Folded pmfs reported on (-q/2, q/2]."""
        if self.modulus is None:
            yield from self.items()
            return
        q = self.modulus
        for x, p in self.items():
            yield (x - q if x > q // 2 else x), p

    def moment(self, order: int):
        with mpmath.workprec(self.precision):
            return mpmath.fsum(p * mpmath.mpf(x) ** order for x, p in self.centered_items())

    def mean(self):
        return self.moment(1)

    def variance(self):
        with mpmath.workprec(self.precision):
            return self.moment(2) - self.moment(1) ** 2

    def mass_error(self):
        """|sum of weights - 1| as an mpmath float."""
        with mpmath.workprec(self.precision):
            return abs(self.total() - 1)

    def is_normalized(self) -> bool:
        """Sum within 2^-(precision/2) of one."""
        one = 1 << self.frac_bits
        return abs(sum(self.weights) - one) << (self.precision // 2) <= one

    def with_precision(self, precision: int) -> "Pmf":
        shift = 2 * (precision - self.precision)
        if shift >= 0:
            w = [x << shift for x in self.weights]
        else:
            w = [_round_shift(x, -shift) for x in self.weights]
        return Pmf(self.offset, w, precision, self.modulus)

    def __eq__(self, other):
        if not isinstance(other, Pmf):
            return NotImplemented
        return (self.offset, self.weights, self.precision, self.modulus) == (
            other.offset, other.weights, other.precision, other.modulus)

    def __hash__(self):
        return hash((self.offset, self.weights, self.precision, self.modulus))

    def __repr__(self):
        mod = f", mod {self.modulus}" if self.modulus else ""
        return f"Pmf(support=[{self.offset}, {self.offset + len(self.weights) - 1}]{mod}, P={self.precision})"


def _round_shift(x: int, s: int) -> int:
    if s <= 0:
        return x << -s
    return (x + (1 << (s - 1))) >> s


def _check_compatible(a: Pmf, b: Pmf) -> int:
    if a.precision != b.precision:
        raise ValueError(f"precision mismatch: {a.precision} vs {b.precision}")
    return a.precision


def convolve_raw(a: list[int] | tuple[int, ...], b: list[int] | tuple[int, ...], shift: int) -> list[int]:
    """Exact linear convolution of two non-negative int vectors, each output
    entry divided by 2^shift with round-half-up."""
    slot = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    nbytes = (slot + 7) // 8

    def pack(v):
        return gmpy2.mpz(int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in v), "little"))

    pa = pack(a)
    prod = pa * pa if a is b else pa * pack(b)
    size = len(a) + len(b) - 1
    raw = int(prod).to_bytes(size * nbytes + nbytes, "little")
    out = [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") for i in range(size)]
    if shift:
        half = 1 << (shift - 1)
        out = [(x + half) >> shift for x in out]
    return out


def _trim(offset: int, w: list[int]) -> tuple[int, list[int]]:
    lo = 0
    while lo < len(w) - 1 and w[lo] == 0:
        lo += 1
    hi = len(w)
    while hi > lo + 1 and w[hi - 1] == 0:
        hi -= 1
    return offset + lo, w[lo:hi]


# -- operations ---------------------------------------------------------------


def pmf_binomial(k: int, precision: int = DEFAULT_PRECISION) -> Pmf:
    """Centered binomial psi_k: P(x) = C(2k, k+x) / 4^k on [-k, k]."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return Pmf.from_fractions(
        {x: Fraction(math.comb(2 * k, k + x), 4**k) for x in range(-k, k + 1)}, precision)


def pmf_fold(a: Pmf, q: int) -> Pmf:
    """Distribution of X mod q on [0, q)."""
    if a.modulus == q:
        return a
    if a.modulus is not None:
        raise ValueError(f"pmf already folded mod {a.modulus}")
    w = [0] * q
    for i, x in enumerate(a.weights):
        w[(a.offset + i) % q] += x
    return Pmf(0, w, a.precision, q)


def pmf_negate(a: Pmf) -> Pmf:
    if a.modulus is not None:
        q = a.modulus
        return Pmf(0, [a.weights[(-x) % q] for x in range(q)], a.precision, q)
    return Pmf(-(a.offset + len(a.weights) - 1), a.weights[::-1], a.precision)


def pmf_product(a: Pmf, b: Pmf) -> Pmf:
    """Distribution of X * Y for independent X ~ a, Y ~ b (unfolded inputs)."""
    prec = _check_compatible(a, b)
    if a.modulus is not None or b.modulus is not None:
        raise ValueError("pmf_product needs unfolded (integer) supports")
    acc: dict[int, int] = {}
    for x, wx in zip(a.support, a.weights):
        if not wx:
            continue
        for y, wy in zip(b.support, b.weights):
            if wy:
                acc[x * y] = acc.get(x * y, 0) + wx * wy
    lo, hi = min(acc), max(acc)
    w = [0] * (hi - lo + 1)
    f = 2 * prec
    for v, x in acc.items():
        w[v - lo] = _round_shift(x, f)
    return Pmf(lo, w, prec)


def pmf_convolve(a: Pmf, b: Pmf) -> Pmf:
    """Distribution of X + Y.  Folded inputs give a cyclic convolution mod q."""
    prec = _check_compatible(a, b)
    f = 2 * prec
    q = a.modulus or b.modulus
    if q is not None:
        a, b = pmf_fold(a, q), pmf_fold(b, q)
        if a.modulus != b.modulus:
            raise ValueError("cannot convolve pmfs folded by different moduli")
        lin = convolve_raw(a.weights, a.weights if a is b else b.weights, f)
        w = lin[:q]
        for i, x in enumerate(lin[q:]):
            w[i] += x
        return Pmf(0, w, prec, q)
    off, w = _trim(a.offset + b.offset, convolve_raw(a.weights, a.weights if a is b else b.weights, f))
    return Pmf(off, w, prec)


def pmf_power(a: Pmf, t: int) -> Pmf:
    """Distribution of the sum of ``t`` iid copies, by square-and-multiply."""
    if t < 1:
        raise ValueError("t must be >= 1")
    result = None
    base = a
    while True:
        if t & 1:
            result = base if result is None else pmf_convolve(result, base)
        t >>= 1
        if not t:
            return result
        base = pmf_convolve(base, base)
