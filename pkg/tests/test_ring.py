import hashlib
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlwelab.errors import ParameterError, UnsupportedModulusError
from rlwelab.ring import (
    ModPoly,
    ParamSet,
    Xof,
    negacyclic_mul,
    negacyclic_mul_schoolbook,
    ntt_forward,
    ntt_inverse,
    poly_add,
    poly_sub,
    primitive_root_2n,
    sample_binomial,
    sample_uniform,
)

TOY = ParamSet(16, 257, 2)
NH1024 = ParamSet(1024, 12289, 8)


def naive_negacyclic(a, b, q):
    # textbook double loop, x^n = -1
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            if i + j < n:
                out[i + j] += a[i] * b[j]
            else:
                out[i + j - n] -= a[i] * b[j]
    return [x % q for x in out]


def test_paramset_validation():
    assert NH1024.supports_ntt and NH1024.coeff_bits == 14 and NH1024.half_q == 6144
    for bad in [(1000, 12289, 8), (1, 12289, 8), (1024, 12288, 8), (1024, 12289, -1),
                (16, 17, 3)]:
        with pytest.raises(ParameterError):
            ParamSet(*bad)
    assert not ParamSet(1024, 7681, 4).supports_ntt


def test_modpoly_reduces_and_is_immutable():
    p = ModPoly.reduce(TOY, range(-8, 8))
    assert p.tolist()[0] == 257 - 8
    assert p.centered().tolist() == list(range(-8, 8))
    with pytest.raises(ValueError):
        p.coeffs[0] = 1
    with pytest.raises(ParameterError):
        ModPoly(TOY, [300] * 16)
    with pytest.raises(ParameterError):
        ModPoly(TOY, [0] * 15)


def test_add_sub_and_mismatch():
    a = ModPoly.reduce(TOY, range(16))
    b = ModPoly.reduce(TOY, range(100, 116))
    assert poly_sub(poly_add(a, b), b) == a
    with pytest.raises(ParameterError):
        poly_add(a, ModPoly.zero(ParamSet(16, 257, 1)))


@pytest.mark.parametrize("n,q,psi", [(16, 257, 15), (256, 7681, 62), (512, 12289, 49), (1024, 12289, 7)])
def test_primitive_root_is_smallest(n, q, psi):
    # expected values from brute force over 2..q-1
    r = primitive_root_2n(n, q)
    assert pow(r, n, q) == q - 1
    smallest = next(x for x in range(2, q) if pow(x, n, q) == q - 1)
    assert r == smallest == psi


def test_unsupported_modulus():
    with pytest.raises(UnsupportedModulusError):
        ntt_forward(ModPoly.zero(ParamSet(1024, 7681, 4)))


def test_schoolbook_matches_textbook_loop():
    rng = np.random.default_rng(3)
    a, b = rng.integers(0, 257, 16), rng.integers(0, 257, 16)
    got = negacyclic_mul_schoolbook(ModPoly(TOY, a), ModPoly(TOY, b)).tolist()
    assert got == naive_negacyclic(a.tolist(), b.tolist(), 257)


def test_x_times_x_pow_n_minus_1_is_minus_one():
    x = ModPoly.reduce(TOY, [0, 1] + [0] * 14)
    top = ModPoly.reduce(TOY, [0] * 15 + [1])
    assert negacyclic_mul(x, top).centered().tolist() == [-1] + [0] * 15


@pytest.mark.parametrize("params", [TOY, ParamSet(256, 7681, 4), ParamSet(512, 12289, 8), NH1024])
def test_ntt_equals_schoolbook(params):
    rng = np.random.default_rng(params.n)
    for _ in range(100 if params.n <= 256 else 10):
        a = ModPoly(params, rng.integers(0, params.q, params.n))
        b = ModPoly(params, rng.integers(0, params.q, params.n))
        assert negacyclic_mul(a, b) == negacyclic_mul_schoolbook(a, b)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 12288), min_size=1024, max_size=1024))
def test_ntt_roundtrip(coeffs):
    a = ModPoly(NH1024, coeffs)
    assert ntt_inverse(ntt_forward(a)) == a


def test_ntt_evaluates_at_odd_powers():
    psi = primitive_root_2n(16, 257)
    a = ModPoly.reduce(TOY, range(1, 17))
    got = ntt_forward(a).tolist()
    want = [sum(c * pow(psi, (2 * i + 1) * j, 257) for j, c in enumerate(range(1, 17))) % 257
            for i in range(16)]
    assert got == want


def test_xof_is_a_stream():
    x = Xof(b"seed")
    joined = x.read(10) + x.read(3000) + x.read(1)
    assert joined == hashlib.shake_256(b"seed").digest(3011)
    with pytest.raises(ValueError):
        Xof(b"", "sha3_256")


def test_binomial_bit_layout():
    # k = 2: coefficient i uses bits 4i..4i+3, first two added, last two subtracted
    params = ParamSet(4, 257, 2)

    class Fixed:
        def read(self, nbytes):
            return bytes([0b00100011, 0b11001100])[:nbytes]

    got = sample_binomial(Fixed(), params).centered().tolist()
    # byte 0 low nibble 0011 -> bits (1,1,0,0) -> 2 ; high nibble 0010 -> (0,1,0,0) -> 1
    # byte 1 low nibble 1100 -> (0,0,1,1) -> -2 ; high nibble 1100 -> -2
    assert got == [2, 1, -2, -2]


def test_binomial_matches_enumeration():
    # exact psi_2 from the 16 bit patterns
    exact = Counter(a + b - c - d for a in (0, 1) for b in (0, 1) for c in (0, 1) for d in (0, 1))
    params = ParamSet(1024, 12289, 2)
    counts = Counter()
    for i in range(40):
        counts.update(sample_binomial(Xof(bytes([i])), params).centered().tolist())
    total = sum(counts.values())
    chi2 = sum((counts[x] - total * c / 16) ** 2 / (total * c / 16) for x, c in exact.items())
    assert set(counts) == set(exact)
    assert chi2 < 18.5  # 4 dof, p = 0.001


def test_binomial_k0_is_zero():
    assert sample_binomial(Xof(b"x"), ParamSet(16, 257, 0)) == ModPoly.zero(ParamSet(16, 257, 0))


def test_uniform_chi_square():
    params = ParamSet(1024, 257, 1)
    counts = np.zeros(257)
    for i in range(64):
        np.add.at(counts, sample_uniform(Xof(bytes([i]), "shake128"), params).coeffs, 1)
    expected = counts.sum() / 257
    chi2 = ((counts - expected) ** 2 / expected).sum()
    # 256 dof: mean 256, sd ~22.6; 5 sd bound
    assert chi2 < 256 + 5 * math.sqrt(512)


def test_uniform_rejection_layout():
    # q = 17 uses 5-bit chunks; values >= 17 are skipped
    params = ParamSet(2, 17, 0)

    class Fixed:
        def read(self, nbytes):
            # chunks (LSB first): 31, 3, 16 ... -> 31 rejected
            bits = [1, 1, 1, 1, 1] + [1, 1, 0, 0, 0] + [0, 0, 0, 0, 1] + [0] * (nbytes * 8 - 15)
            return np.packbits(np.array(bits, dtype=np.uint8), bitorder="little").tobytes()

    assert sample_uniform(Fixed(), params).tolist() == [3, 16]
