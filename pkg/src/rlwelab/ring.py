"""Arithmetic in R_q = Z_q[x]/(x^n + 1).

Coefficients are always stored in canonical form [0, q).  Multiplication is
available both as an O(n^2) schoolbook reference and through a negacyclic NTT
when q = 1 (mod 2n).  The samplers draw from a SHAKE extendable-output
function so every polynomial is reproducible from its seed.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import numpy as np

from .errors import ParameterError, UnsupportedModulusError


@dataclass(frozen=True)
class ParamSet:
    """Ring dimension ``n``, prime modulus ``q`` and binomial noise parameter ``k``."""

    n: int
    q: int
    k: int

    def __post_init__(self):
        n, q, k = self.n, self.q, self.k
        if n < 2 or n & (n - 1):
            raise ParameterError(f"n must be a power of two >= 2, got {n}")
        if q < 3 or not gmpy2.is_prime(q):
            raise ParameterError(f"q must be an odd prime, got {q}")
        if k < 0 or 8 * k > q:
            raise ParameterError(f"k must satisfy 0 <= k <= q/8, got {k}")

    @property
    def supports_ntt(self) -> bool:
        return (self.q - 1) % (2 * self.n) == 0

    @property
    def coeff_bits(self) -> int:
        """Bits needed for one canonical coefficient, ceil(log2 q)."""
        return (self.q - 1).bit_length()

    @property
    def half_q(self) -> int:
        return self.q // 2


class ModPoly:
    """An immutable element of R_q.

    ``coeffs`` is a read-only int64 array of length ``params.n`` with entries
    in [0, q).
    """

    __slots__ = ("params", "coeffs")

    def __init__(self, params: ParamSet, coeffs):
        arr = np.array(coeffs, dtype=np.int64)
        if arr.shape != (params.n,):
            raise ParameterError(f"expected {params.n} coefficients, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= params.q):
            raise ParameterError("coefficients must lie in [0, q)")
        arr.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ModPoly is immutable")

    @classmethod
    def reduce(cls, params: ParamSet, values) -> "ModPoly":
        """Build a polynomial from arbitrary integers, reducing them mod q."""
        return cls(params, np.mod(np.asarray(values, dtype=np.int64), params.q))

    @classmethod
    def zero(cls, params: ParamSet) -> "ModPoly":
        return cls(params, np.zeros(params.n, dtype=np.int64))

    def centered(self) -> np.ndarray:
        """Signed representatives in (-q/2, q/2]."""
        c = self.coeffs.copy()
        c[c > self.params.q // 2] -= self.params.q
        return c

    def tolist(self) -> list[int]:
        return [int(x) for x in self.coeffs]

    def __eq__(self, other):
        if not isinstance(other, ModPoly):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.params, self.coeffs.tobytes()))

    def __repr__(self):
        head = ", ".join(str(int(x)) for x in self.coeffs[:8])
        more = ", ..." if self.params.n > 8 else ""
        return f"ModPoly(n={self.params.n}, q={self.params.q}, [{head}{more}])"


def _check_same(a: ModPoly, b: ModPoly) -> ParamSet:
    if a.params != b.params:
        raise ParameterError(f"parameter mismatch: {a.params} vs {b.params}")
    return a.params


def poly_add(a: ModPoly, b: ModPoly) -> ModPoly:
    p = _check_same(a, b)
    return ModPoly(p, (a.coeffs + b.coeffs) % p.q)


def poly_sub(a: ModPoly, b: ModPoly) -> ModPoly:
    p = _check_same(a, b)
    return ModPoly(p, (a.coeffs - b.coeffs) % p.q)


def negacyclic_mul_schoolbook(a: ModPoly, b: ModPoly) -> ModPoly:
    """Reference product mod (x^n + 1); works for any modulus."""
    p = _check_same(a, b)
    n, q = p.n, p.q
    if (q - 1) ** 2 * n < 2**62:
        full = np.convolve(a.coeffs, b.coeffs)
    else:
        full = np.convolve(a.coeffs.astype(object), b.coeffs.astype(object))
    full = np.concatenate([full, np.zeros(1, dtype=full.dtype)])
    return ModPoly.reduce(p, np.mod(full[:n] - full[n:2 * n], q).astype(np.int64))


# -- NTT ---------------------------------------------------------------------


def _generator(q: int) -> int:
    """Smallest generator of the multiplicative group Z_q^*."""
    order = q - 1
    factors = []
    m, f = order, 2
    while f * f <= m:
        if m % f == 0:
            factors.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        factors.append(m)
    for g in range(2, q):
        if all(pow(g, order // f, q) != 1 for f in factors):
            return g
    raise UnsupportedModulusError(f"no generator found for q={q}")


@lru_cache(maxsize=None)
def primitive_root_2n(n: int, q: int) -> int:
    """The smallest primitive 2n-th root of unity mod q.

    Candidates are the odd powers of g^((q-1)/2n) for the smallest generator g.
    """
    if (q - 1) % (2 * n):
        raise UnsupportedModulusError(f"q={q} has no primitive {2 * n}-th root of unity")
    base = pow(_generator(q), (q - 1) // (2 * n), q)
    return min(pow(base, j, q) for j in range(1, 2 * n, 2))


@dataclass(frozen=True)
class _NttTables:
    psi_pows: np.ndarray       # psi^i
    psi_inv_pows: np.ndarray   # n^-1 * psi^-i
    stage_twiddles: tuple      # per stage, omega_len^j for j < len/2
    stage_twiddles_inv: tuple
    bitrev: np.ndarray


@lru_cache(maxsize=None)
def _ntt_tables(n: int, q: int) -> _NttTables:
    psi = primitive_root_2n(n, q)
    psi_inv = pow(psi, -1, q)
    omega = psi * psi % q
    omega_inv = pow(omega, -1, q)
    n_inv = pow(n, -1, q)
    psi_pows = np.array([pow(psi, i, q) for i in range(n)], dtype=np.int64)
    psi_inv_pows = np.array([n_inv * pow(psi_inv, i, q) % q for i in range(n)], dtype=np.int64)
    fwd, inv = [], []
    length = 2
    while length <= n:
        w = pow(omega, n // length, q)
        wi = pow(omega_inv, n // length, q)
        fwd.append(np.array([pow(w, j, q) for j in range(length // 2)], dtype=np.int64))
        inv.append(np.array([pow(wi, j, q) for j in range(length // 2)], dtype=np.int64))
        length *= 2
    bits = n.bit_length() - 1
    bitrev = np.array([int(format(i, f"0{bits}b")[::-1], 2) if bits else 0 for i in range(n)])
    for arr in (psi_pows, psi_inv_pows, bitrev, *fwd, *inv):
        arr.setflags(write=False)
    return _NttTables(psi_pows, psi_inv_pows, tuple(fwd), tuple(inv), bitrev)


def _cyclic_ntt(a: np.ndarray, twiddles, bitrev: np.ndarray, q: int) -> np.ndarray:
    # iterative radix-2 Cooley-Tukey, decimation in time; sums are reduced
    # lazily (|entries| < stages * q), products are reduced every stage
    a = a[bitrev]
    n = a.size
    out = np.empty_like(a)
    for tw in twiddles:
        half = tw.size
        blocks = a.reshape(n // (2 * half), 2 * half)
        dst = out.reshape(blocks.shape)
        v = blocks[:, half:] * tw % q
        np.add(blocks[:, :half], v, out=dst[:, :half])
        np.subtract(blocks[:, :half], v, out=dst[:, half:])
        a, out = out, a
    return a % q


def _tables_for(p: ParamSet) -> _NttTables:
    if not p.supports_ntt:
        raise UnsupportedModulusError(f"q={p.q} is not 1 mod 2n={2 * p.n}")
    if (p.q - 1) ** 2 >= 2**62:
        raise UnsupportedModulusError("modulus too large for the int64 NTT path")
    return _ntt_tables(p.n, p.q)


def ntt_forward(a: ModPoly) -> ModPoly:
    """Evaluate ``a`` at psi^(2i+1), i = 0..n-1 (natural output order)."""
    p = a.params
    t = _tables_for(p)
    twisted = a.coeffs * t.psi_pows % p.q
    return ModPoly(p, _cyclic_ntt(twisted, t.stage_twiddles, t.bitrev, p.q))


def ntt_inverse(a_hat: ModPoly) -> ModPoly:
    p = a_hat.params
    t = _tables_for(p)
    out = _cyclic_ntt(a_hat.coeffs, t.stage_twiddles_inv, t.bitrev, p.q)
    return ModPoly(p, out * t.psi_inv_pows % p.q)


def pointwise_mul(a_hat: ModPoly, b_hat: ModPoly) -> ModPoly:
    p = _check_same(a_hat, b_hat)
    return ModPoly(p, a_hat.coeffs * b_hat.coeffs % p.q)


def negacyclic_mul(a: ModPoly, b: ModPoly) -> ModPoly:
    """Ring product, through the NTT when the modulus allows it."""
    p = _check_same(a, b)
    if p.supports_ntt:
        return ntt_inverse(pointwise_mul(ntt_forward(a), ntt_forward(b)))
    return negacyclic_mul_schoolbook(a, b)


# -- XOF and samplers ----------------------------------------------------------


class Xof:
    """Streaming reader over SHAKE128/SHAKE256 output.

    hashlib only exposes fixed-length digests, so output is regenerated into a
    growing buffer; reads are sequential and fully determined by the seed.
    """

    def __init__(self, seed: bytes, algorithm: str = "shake256"):
        if algorithm not in ("shake128", "shake256"):
            raise ValueError(f"unsupported XOF {algorithm!r}")
        self._hash = hashlib.new(algorithm, bytes(seed))
        self._buf = b""
        self._pos = 0

    def read(self, nbytes: int) -> bytes:
        end = self._pos + nbytes
        if end > len(self._buf):
            self._buf = self._hash.digest(max(end, 2 * len(self._buf), 1024))
        out = self._buf[self._pos:end]
        self._pos = end
        return out


def _bits_le(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")


def sample_binomial(xof: Xof, params: ParamSet) -> ModPoly:
    """Centered binomial psi_k: coefficient i uses stream bits [2ki, 2k(i+1)).

    The first k bits are added, the next k subtracted; bits are consumed
    little-endian within each byte.
    """
    n, k = params.n, params.k
    if k == 0:
        return ModPoly.zero(params)
    nbits = 2 * k * n
    bits = _bits_le(xof.read((nbits + 7) // 8))[:nbits].reshape(n, 2 * k).astype(np.int64)
    vals = bits[:, :k].sum(axis=1) - bits[:, k:].sum(axis=1)
    return ModPoly.reduce(params, vals)


def sample_uniform(xof: Xof, params: ParamSet) -> ModPoly:
    """Uniform coefficients by rejection.

    The stream is read as one little-endian bit string cut into consecutive
    ceil(log2 q)-bit chunks; chunks >= q are rejected.  Bytes are pulled in
    blocks of 168 (the SHAKE128 rate); leftover bits of the final block are
    discarded.
    """
    n, q = params.n, params.q
    width = params.coeff_bits
    weights = 1 << np.arange(width, dtype=np.int64)
    out = np.empty(0, dtype=np.int64)
    pending = np.empty(0, dtype=np.uint8)
    while out.size < n:
        pending = np.concatenate([pending, _bits_le(xof.read(168))])
        usable = pending.size // width
        chunks = pending[: usable * width].reshape(usable, width) @ weights
        pending = pending[usable * width:]
        out = np.concatenate([out, chunks[chunks < q]])
    return ModPoly(params, out[:n])
