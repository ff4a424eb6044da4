"""Narrow-sense binary BCH codes with shortening.

Bit-vector conventions: a length-N word w_0..w_{N-1} is the polynomial
sum_i w_i x^(N-1-i), so the first transmitted bit is the highest-degree
coefficient.  Encoding is systematic: message bits first, then the deg(g)
parity bits of x^deg(g) * m(x) mod g(x).  Shortening drops the leading
(highest-degree) message positions, which are implicitly zero.

Polynomials over GF(2) are Python ints (bit i = coefficient of x^i).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DecodeFailure, ParameterError

# x^4+x+1, x^9+x^4+1 and x^10+x^3+1 are the fields the option codes use
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
}


class GfField:
    """GF(2^m) built from a primitive polynomial, with log/antilog tables."""

    def __init__(self, m: int, poly: int | None = None):
        if poly is None:
            if m not in PRIMITIVE_POLYS:
                raise ParameterError(f"no default primitive polynomial for m={m}")
            poly = PRIMITIVE_POLYS[m]
        if poly.bit_length() - 1 != m:
            raise ParameterError("primitive polynomial has the wrong degree")
        self.m = m
        self.poly = poly
        self.order = (1 << m) - 1
        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.full(1 << m, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            if i and x == 1:
                raise ParameterError(f"polynomial {poly:#x} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= poly
        if x != 1:
            raise ParameterError(f"polynomial {poly:#x} is not primitive")
        exp[self.order:] = exp[: self.order]
        self.exp = exp
        self.log = log

    def __eq__(self, other):
        return isinstance(other, GfField) and (self.m, self.poly) == (other.m, other.poly)

    def __hash__(self):
        return hash((self.m, self.poly))

    def __repr__(self):
        return f"GfField(m={self.m}, poly={self.poly:#x})"

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^m)")
        return int(self.exp[(self.order - self.log[a]) % self.order])

    def alpha_pow(self, e: int) -> int:
        return int(self.exp[e % self.order])


@lru_cache(maxsize=None)
def gf_field(m: int) -> GfField:
    return GfField(m)


def cyclotomic_coset(s: int, m: int) -> tuple[int, ...]:
    """{s, 2s, 4s, ...} mod 2^m - 1."""
    order = (1 << m) - 1
    out, x = [], s % order
    while x not in out:
        out.append(x)
        x = 2 * x % order
    return tuple(sorted(out))


def minimal_polynomial(gf: GfField, s: int) -> int:
    """Minimal polynomial of alpha^s over GF(2), as a bit-int."""
    coeffs = [1]  # field elements, index = degree
    for j in cyclotomic_coset(s, gf.m):
        root = gf.alpha_pow(j)
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] ^= c
            nxt[d] ^= gf.mul(c, root)
        coeffs = nxt
    if any(c not in (0, 1) for c in coeffs):
        raise ArithmeticError("minimal polynomial has non-binary coefficients")
    return sum(c << d for d, c in enumerate(coeffs))


def gf2_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_mod(a: int, g: int) -> int:
    dg = g.bit_length()
    while a.bit_length() >= dg:
        a ^= g << (a.bit_length() - dg)
    return a


@dataclass(frozen=True)
class BchSpec:
    """BCH(Cn, Ck, Ct) over GF(2^m), shortened by ``shorten`` positions."""

    field: GfField = dataclasses.field(repr=False)
    t: int
    shorten: int
    generator: int = dataclasses.field(repr=False)

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def n_full(self) -> int:
        return self.field.order

    @property
    def parity_bits(self) -> int:
        return self.generator.bit_length() - 1

    @property
    def n(self) -> int:
        return self.n_full - self.shorten

    @property
    def k(self) -> int:
        return self.n_full - self.parity_bits - self.shorten

    def __str__(self):
        return f"BCH({self.n},{self.k},{self.t})"


@lru_cache(maxsize=None)
def build_bch(m: int, t: int, shorten: int = 0) -> BchSpec:
    """Narrow-sense code correcting ``t`` errors: g = lcm of the minimal
    polynomials of alpha^1 .. alpha^(2t)."""
    if not 1 <= t < 1 << (m - 1):
        raise ParameterError(f"need 1 <= t < 2^(m-1), got t={t}, m={m}")
    if shorten < 0:
        raise ParameterError("shorten must be non-negative")
    gf = gf_field(m)
    seen: set[int] = set()
    g = 1
    for i in range(1, 2 * t + 1):
        coset = cyclotomic_coset(i, m)
        if coset[0] in seen:
            continue
        seen.add(coset[0])
        g = gf2_mul(g, minimal_polynomial(gf, i))
    spec = BchSpec(gf, t, shorten, g)
    if spec.k <= 0:
        raise ParameterError(f"infeasible code: dimension {spec.k} after shortening")
    if gf2_mod((1 << spec.n_full) | 1, g) != 0:
        raise ArithmeticError("generator does not divide x^n + 1")
    return spec


def _bits_to_int(bits) -> int:
    s = "".join("1" if b else "0" for b in bits)
    return int(s, 2) if s else 0


def _int_to_bits(x: int, width: int) -> np.ndarray:
    return np.frombuffer(format(x, f"0{width}b").encode(), dtype=np.uint8) - ord("0")


def bch_encode(spec: BchSpec, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape != (spec.k,):
        raise ParameterError(f"message must have {spec.k} bits, got shape {msg.shape}")
    shifted = _bits_to_int(msg) << spec.parity_bits
    return _int_to_bits(shifted | gf2_mod(shifted, spec.generator), spec.n)


def syndromes(spec: BchSpec, word: np.ndarray) -> np.ndarray:
    """S_1 .. S_2t of the received word."""
    gf = spec.field
    degrees = spec.n - 1 - np.flatnonzero(word)
    if degrees.size == 0:
        return np.zeros(2 * spec.t, dtype=np.int64)
    i = np.arange(1, 2 * spec.t + 1, dtype=np.int64)[:, None]
    terms = gf.exp[(i * degrees[None, :]) % gf.order]
    return np.bitwise_xor.reduce(terms, axis=1)


def berlekamp_massey(gf: GfField, synd) -> list[int]:
    """Error-locator polynomial sigma(x) (index = degree) from S_1..S_2t."""
    s = [int(x) for x in synd]
    c, b = [1], [1]
    length, shift, b_disc = 0, 1, 1
    for r in range(len(s)):
        d = s[r]
        for i in range(1, length + 1):
            if i < len(c):
                d ^= gf.mul(c[i], s[r - i])
        if d == 0:
            shift += 1
            continue
        coef = gf.mul(d, gf.inv(b_disc))
        t = c[:]
        upd = [0] * shift + [gf.mul(coef, x) for x in b]
        if len(upd) > len(c):
            c = c + [0] * (len(upd) - len(c))
        for i, x in enumerate(upd):
            c[i] ^= x
        if 2 * length <= r:
            length = r + 1 - length
            b, b_disc, shift = t, d, 1
        else:
            shift += 1
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if len(c) - 1 != length:
        raise DecodeFailure("error locator degree disagrees with LFSR length")
    return c


def chien_search(spec: BchSpec, sigma: list[int]) -> np.ndarray:
    """Degrees j in [0, Cn) with sigma(alpha^-j) = 0."""
    gf = spec.field
    j = np.arange(spec.n, dtype=np.int64)
    acc = np.zeros(spec.n, dtype=np.int64)
    for l, c in enumerate(sigma):
        if c:
            acc ^= gf.exp[(gf.log[c] - j * l) % gf.order]
    return np.flatnonzero(acc == 0)


def bch_decode(spec: BchSpec, received) -> tuple[np.ndarray, int]:
    """Return (message bits, number of corrected errors).

    Raises DecodeFailure when the error pattern is detected as uncorrectable.
    """
    word = np.asarray(received, dtype=np.uint8)
    if word.shape != (spec.n,):
        raise ParameterError(f"received word must have {spec.n} bits, got shape {word.shape}")
    synd = syndromes(spec, word)
    if not synd.any():
        return word[: spec.k].copy(), 0
    sigma = berlekamp_massey(spec.field, synd)
    errors = len(sigma) - 1
    if errors > spec.t:
        raise DecodeFailure(f"locator degree {errors} exceeds t={spec.t}")
    roots = chien_search(spec, sigma)
    if roots.size != errors:
        raise DecodeFailure(f"found {roots.size} locator roots, expected {errors}")
    fixed = word.copy()
    fixed[spec.n - 1 - roots] ^= 1
    if syndromes(spec, fixed).any():
        raise DecodeFailure("correction did not reach a codeword")
    return fixed[: spec.k].copy(), errors
