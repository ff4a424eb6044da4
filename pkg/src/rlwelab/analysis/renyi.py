"""Rényi divergence between the centered binomial psi_k and the rounded
Gaussian xi_k of the same variance k/2."""
from __future__ import annotations

import math

import mpmath


def _erf(z, prec: int):
    """erf(z) = 2/sqrt(pi) * exp(-z^2) * sum_n 2^n z^(2n+1) / (1*3*...*(2n+1)).

    Every term is positive for z > 0, so the sum has no cancellation; it is
    truncated once a term drops below 2^-(prec + 10) of the running sum.
    """
    if z == 0:
        return mpmath.mpf(0)
    if z < 0:
        return -_erf(-z, prec)
    with mpmath.workprec(prec + 20):
        z2 = z * z
        term = mpmath.mpf(z)
        total = term
        n = 0
        eps = mpmath.ldexp(1, -(prec + 10))
        while term > eps * total:
            n += 1
            term = term * 2 * z2 / (2 * n + 1)
            total += term
        return 2 / mpmath.sqrt(mpmath.pi) * mpmath.exp(-z2) * total


def rounded_gaussian_weight(k: int, x: int, digits: int = 50):
    """xi_k(x) = Phi((x + 1/2)/sigma) - Phi((x - 1/2)/sigma), sigma^2 = k/2."""
    prec = int(digits * 3.33) + 32
    with mpmath.workprec(prec):
        scale = mpmath.sqrt(k)  # sigma * sqrt(2)
        hi = _erf((mpmath.mpf(x) + mpmath.mpf(1) / 2) / scale, prec)
        lo = _erf((mpmath.mpf(x) - mpmath.mpf(1) / 2) / scale, prec)
        return (hi - lo) / 2


def renyi_divergence(k: int, a, digits: int = 50):
    """R_a(psi_k || xi_k) = (sum_{x in supp psi_k} psi_k(x)^a / xi_k(x)^(a-1))^(1/(a-1))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    prec = int(digits * 3.33) + 32
    with mpmath.workprec(prec):
        a = mpmath.mpf(a)
        if a <= 1:
            raise ValueError("Rényi order a must be > 1")
        total = mpmath.mpf(0)
        for x in range(-k, k + 1):
            p = mpmath.mpf(math.comb(2 * k, k + x)) / mpmath.mpf(4) ** k
            qx = rounded_gaussian_weight(k, x, digits)
            total += p**a / qx ** (a - 1)
        return total ** (1 / (a - 1))
