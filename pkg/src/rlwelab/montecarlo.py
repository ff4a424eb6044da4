"""Monte-Carlo checks of the analyzer against the real encryption pipeline.

Every trial draws a fresh key pair and fresh coins from ``SHAKE256(seed ||
trial index)``, so a run is reproducible from its seed alone and trials can
be split across processes without changing the result.
"""
from __future__ import annotations

import hashlib
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codec import CompressionRates
from .ecc import EccScheme, bytes_to_bits
from .errors import DecodeFailure
from .kem import (
    decrypt,
    encrypt_poly,
    kem_decapsulate,
    kem_encapsulate,
    keygen,
    noise_tap,
    shake256,
)
from .ring import ModPoly, ParamSet


def trial_seed(seed: bytes, index: int, nbytes: int = 96) -> bytes:
    return hashlib.shake_256(seed + index.to_bytes(8, "little")).digest(nbytes)


def _tap_chunk(args) -> Counter:
    params, rates, seed, start, stop, u_domain = args
    counts: Counter = Counter()
    half = params.q // 2
    for i in range(start, stop):
        s = trial_seed(seed, i, 64 + params.n // 8)
        kp = keygen(s[:32], params)
        bits = np.unpackbits(np.frombuffer(s[64:], dtype=np.uint8), bitorder="little")
        v = ModPoly(params, bits.astype(np.int64) * half)
        ct = encrypt_poly(kp.pk, v, s[32:64], rates, u_domain)
        values, c = np.unique(noise_tap(kp.sk, ct, v, rates, u_domain), return_counts=True)
        counts.update(dict(zip(values.tolist(), c.tolist())))
    return counts


def _split(total: int, workers: int) -> list[tuple[int, int]]:
    step = -(-total // max(workers, 1))
    return [(a, min(a + step, total)) for a in range(0, total, step)]


def tap_histogram(params: ParamSet, rates: CompressionRates, coefficients: int, seed: bytes,
                  u_domain: str = "normal", workers: int = 1) -> Counter:
    """Histogram of centered v'' - v over at least ``coefficients`` samples.

    Each trial encrypts a random polynomial with every coefficient at a pole,
    so all n coefficients of each ciphertext contribute.
    """
    trials = -(-coefficients // params.n)
    jobs = [(params, rates, seed, a, b, u_domain) for a, b in _split(trials, workers)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_tap_chunk, jobs))
    else:
        parts = [_tap_chunk(j) for j in jobs]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


@dataclass(frozen=True)
class HistogramRow:
    value: int
    empirical: int
    predicted: float
    z: float


def compare_histogram(hist: Counter, pmf) -> tuple[list[HistogramRow], float]:
    """Per-value z-scores against a folded pmf, and the total-variation distance."""
    n = sum(hist.values())
    pred = {x: float(p) for x, p in pmf.centered_items()}
    rows = []
    tv = 0.0
    for x in sorted(set(pred) | set(hist)):
        p = pred.get(x, 0.0)
        c = hist.get(x, 0)
        tv += abs(c / n - p)
        sd = math.sqrt(n * p * (1 - p))
        if sd > 0:
            z = (c - n * p) / sd
        else:
            z = 0.0 if c == 0 else math.inf
        rows.append(HistogramRow(x, c, p, z))
    return rows, tv / 2


@dataclass(frozen=True)
class RoundtripStats:
    trials: int
    bits_per_trial: int
    bit_errors: int
    block_failures: int
    key_mismatches: int

    @property
    def bit_error_rate(self) -> float:
        return self.bit_errors / (self.trials * self.bits_per_trial)

    @property
    def block_failure_rate(self) -> float:
        return self.block_failures / self.trials


def _roundtrip_chunk(args) -> tuple[int, int, int]:
    params, rates, scheme, seed, start, stop = args
    bit_errors = block_failures = mismatches = 0
    for i in range(start, stop):
        s = trial_seed(seed, i, 64)
        kp = keygen(s[:32], params)
        ct, key = kem_encapsulate(kp.pk, params, rates, scheme, coin=s[32:64])
        mu = shake256(s[32:64], scheme.secret_bits // 8)
        try:
            got = decrypt(kp.sk, ct, params, rates, scheme)
            wrong = int((bytes_to_bits(got) != bytes_to_bits(mu)).sum())
        except DecodeFailure:
            wrong = scheme.secret_bits // 2  # undecodable; counted as a block failure
        bit_errors += wrong
        block_failures += wrong > 0
        mismatches += kem_decapsulate(kp.sk, kp.pk, ct, params, rates, scheme) != key
    return bit_errors, block_failures, mismatches


def kem_roundtrips(params: ParamSet, rates: CompressionRates, scheme: EccScheme, trials: int,
                   seed: bytes, workers: int = 1) -> RoundtripStats:
    """Full keygen / encapsulate / decapsulate runs with per-bit bookkeeping.

    Bit errors compare the decrypted secret with the encapsulated one; block
    failures count trials with any wrong bit, and key mismatches count
    trials whose decapsulated key differs.
    """
    jobs = [(params, rates, scheme, seed, a, b) for a, b in _split(trials, workers)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_roundtrip_chunk, jobs))
    else:
        parts = [_roundtrip_chunk(j) for j in jobs]
    sums = [sum(col) for col in zip(*parts)] if parts else [0, 0, 0]
    return RoundtripStats(trials, scheme.secret_bits, *sums)


def binomial_z(count: int, trials: int, p: float) -> float:
    sd = math.sqrt(trials * p * (1 - p))
    return (count - trials * p) / sd if sd else (0.0 if count == trials * p else math.inf)
