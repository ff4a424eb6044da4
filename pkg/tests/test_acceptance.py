"""Acceptance criteria, one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-row
comparisons.  The published figures are literals here; the analyzer's own
numbers are recomputed from scratch at 512 bits and rechecked at 1024.
"""
import itertools
import json
import math
import time

import mpmath
import numpy as np
import pytest

from rlwelab import cli
from rlwelab.analysis.noise import pmf_total_noise
from rlwelab.analysis.renyi import renyi_divergence
from rlwelab.analysis.tables import SECURITY_NOTE, Config, config_rows, evaluate
from rlwelab.bch import bch_decode, bch_encode, build_bch
from rlwelab.codec import FULL, CompressionRates
from rlwelab.ecc import OPTIONS, ecc_decode, ecc_encode, scheme_for_option
from rlwelab.montecarlo import binomial_z, compare_histogram, kem_roundtrips, tap_histogram
from rlwelab.presets import PRESETS, get_preset
from rlwelab.ring import ModPoly, ParamSet, negacyclic_mul, negacyclic_mul_schoolbook

from test_renyi import oracle_renyi9

Q = 12289


def report(capsys, number, ok, headline, details=()):
    with capsys.disabled():
        print()
        for d in details:
            print(f"    {d}")
        print(f"CRITERION {number} {'PASS' if ok else 'FAIL'}: {headline}")
    assert ok, headline


def rate_key(v, u):
    return CompressionRates(v, FULL if u == "q" else u).label()


# published cross-over probabilities at rates (8, q): ATE repetition -> p
PUBLISHED_CROSSOVER = {4: 1.3277e-145, 3: 8.3884e-110, 2: 6.0045e-74, 1: 5.1119e-38}
PUBLISHED_CROSSOVER_OPT4 = 1.7993e-67

# DFR table at k = 8, ATE only: (n, r_v, r_u) -> (log2 DFR, bytes)
PUBLISHED_RATE_TABLE = {
    (1024, 8, "q"): (-474, 2176), (1024, 8, 512): (-75, 1536), (1024, 8, 256): (-20, 1408),
    (1024, 8, 128): (-1, 1280), (1024, 4, 512): (-99, 1408), (1024, 4, 256): (-11, 1280),
    (1024, 4, 128): (-1, 1152),
    (512, 8, "q"): (-431, 1088), (512, 8, 512): (-33, 768), (512, 8, 256): (-7, 704),
    (512, 4, 1024): (-43, 768), (512, 4, 512): (-15, 704),
}

# target rows of criterion 3 with their tolerance
CRITERION3 = {(1024, 4, "q"): -227, (1024, 8, 1024): -199, (512, 4, 2048): -155, (512, 8, 1024): -185}

# per-option tables: (r_v, r_u) -> ({scheme: log2 DFR}, bytes, reduction %)
PUBLISHED_OPTIONS_1024 = {
    (8, 512): ({"newhope": -75, "option1": -569, "option2": -1177, "option3": -2000}, 1536, 29.4),
    (8, 256): ({"newhope": -20, "option1": -151, "option2": -317, "option3": -467}, 1408, 35.3),
    (8, 128): ({"newhope": -1, "option1": -5, "option2": -8, "option3": -2}, 1280, 41.2),
    (4, 512): ({"newhope": -40, "option1": -302, "option2": -620, "option3": -1016}, 1408, 35.3),
    (4, 256): ({"newhope": -11, "option1": -85, "option2": -168, "option3": -222}, 1280, 41.2),
    (4, 128): ({"newhope": -1, "option1": -1, "option2": -1, "option3": 0}, 1152, 47.1),
}
PUBLISHED_OPTIONS_512 = {
    (8, 512): ({"newhope": -33, "option4": -1101}, 768, 29.4),
    (8, 256): ({"newhope": -7, "option4": -295}, 704, 35.3),
    (8, 128): ({"newhope": -1, "option4": -21}, 640, 41.2),
    (4, 1024): ({"newhope": -43, "option4": -2842}, 768, 29.4),
    (4, 512): ({"newhope": -15, "option4": -539}, 704, 35.3),
    (4, 256): ({"newhope": -8, "option4": -138}, 640, 41.2),
}


def _configs():
    """Every (n, rates) point any criterion needs, with the union of schemes."""
    want = {}

    def add(n, v, u, opts):
        want.setdefault((n, v, u), set()).update(opts)

    add(1024, 8, "q", {"newhope", 1, 2, 3})
    add(512, 8, "q", {"newhope", 4})
    for (n, v, u) in CRITERION3:
        add(n, v, u, {"newhope"})
    for (v, u) in PUBLISHED_OPTIONS_1024:
        add(1024, v, u, {"newhope", 1, 2, 3})
    for (v, u) in PUBLISHED_OPTIONS_512:
        add(512, v, u, {"newhope", 4})
    order = lambda o: -1 if o == "newhope" else o  # noqa: E731
    return {key: Config(key[0], CompressionRates(key[1], FULL if key[2] == "q" else key[2]),
                        tuple(sorted(opts, key=order)))
            for key, opts in want.items()}


@pytest.fixture(scope="module")
def analysis():
    """All analyzer rows keyed by (n, rates label, scheme), plus the crossover-table runtime."""
    configs = _configs()
    rows = {}
    start = time.perf_counter()
    for key in [(1024, 8, "q"), (512, 8, "q")]:
        for r in config_rows(configs.pop(key), 512, check=True):
            rows[(r["n"], r["rates"], r["scheme"])] = r
    crossover_seconds = time.perf_counter() - start
    for cfg in configs.values():
        for r in config_rows(cfg, 512, check=True):
            rows[(r["n"], r["rates"], r["scheme"])] = r
    return rows, crossover_seconds


def get(rows, n, v, u, scheme="newhope"):
    return rows[(n, rate_key(v, u), scheme)]


def test_criterion_1_crossover_probabilities(analysis, capsys):
    rows, seconds = analysis
    details, ok = [], seconds < 600
    for m, scheme in zip((4, 3, 2, 1), ("newhope", "option1", "option2", "option3")):
        r = get(rows, 1024, 8, "q", scheme)
        assert r["ate_m"] == m
        p = 2.0 ** r["log2_crossover"]
        rel = p / PUBLISHED_CROSSOVER[m] - 1
        ok &= abs(rel) <= 1e-3
        details.append(f"m={m}: {p:.5g} vs {PUBLISHED_CROSSOVER[m]:.5g}, relative error {rel:+.2e}")
    p4 = 2.0 ** get(rows, 512, 8, "q", "option4")["log2_crossover"]
    details.append(f"n=512 m=1 (not graded): {p4:.5g} vs {PUBLISHED_CROSSOVER_OPT4:.5g}, "
                   f"relative error {p4 / PUBLISHED_CROSSOVER_OPT4 - 1:+.2e}")
    details.append(f"runtime with precision recheck: {seconds:.0f} s")
    report(capsys, 1, ok, "cross-over probabilities within 1e-3 relative, runtime < 10 min", details)


def test_criterion_2_baseline_dfr(analysis, capsys):
    rows, _ = analysis
    a = get(rows, 1024, 8, "q")["log2_dfr"]
    b = get(rows, 512, 8, "q")["log2_dfr"]
    ok = abs(a + 474) <= 1 and abs(b + 431) <= 1
    report(capsys, 2, ok, f"baseline log2 DFR n=1024 {a:.3f} (-474 +- 1), n=512 {b:.3f} (-431 +- 1)")


def test_criterion_3_rate_table(analysis, capsys):
    rows, _ = analysis
    details, ok = [], True
    for (n, v, u), want in CRITERION3.items():
        got = get(rows, n, v, u)["log2_dfr"]
        hit = abs(got - want) <= 2
        ok &= hit
        details.append(f"n={n} ({v},{u}): {got:.3f} vs {want} -> {'ok' if hit else 'off by %.2f' % (got - want)}")
    # the published figures disagree with each other on the (4, .) and n=512
    # rows; report which one the analyzer lands on
    details.append("cross-table comparison (analyzer vs rate table vs option tables, +-2):")
    for (n, v, u), (want, nbytes) in PUBLISHED_RATE_TABLE.items():
        r = get(rows, n, v, u)
        other = (PUBLISHED_OPTIONS_1024 if n == 1024 else PUBLISHED_OPTIONS_512).get((v, u))
        alt = other[0]["newhope"] if other else None
        m1 = None
        if n == 512:
            # one-fold ATE on the same channel, the inner stage of option 4
            p1 = 2.0 ** get(rows, n, v, u, "option4")["log2_crossover"]
            m1 = math.log2(-math.expm1(256 * math.log1p(-p1)))
        matches = [name for name, val in (("rate table", want), ("option table", alt),)
                   if val is not None and abs(r["log2_dfr"] - val) <= 2]
        extra = f", m=1 ATE would give {m1:.2f}" if m1 is not None else ""
        details.append(f"  n={n} ({v},{u}): {r['log2_dfr']:.3f} vs {want} / {alt}; "
                       f"matches {', '.join(matches) or 'neither'}{extra}; bytes {r['ciphertext_bytes']} vs {nbytes}")
    report(capsys, 3, ok, "rate-table DFRs within +-2 of the listed values", details)


def _option_checks(rows, n, table):
    details, ok = [], True
    for (v, u), (dfrs, nbytes, reduction) in table.items():
        for scheme, want in dfrs.items():
            r = get(rows, n, v, u, scheme)
            diff = r["log2_dfr"] - want
            graded = scheme != "newhope"
            if graded:
                ok &= abs(diff) <= 3
            tag = ("ok" if abs(diff) <= 3 else "OFF") if graded else "info"
            details.append(f"n={n} ({v},{u}) {scheme}: {r['log2_dfr']:.3f} vs {want} [{tag}]")
        r = get(rows, n, v, u)
        size_ok = r["ciphertext_bytes"] == nbytes and r["reduction_pct"] == reduction
        ok &= size_ok
        details.append(f"n={n} ({v},{u}) bytes {r['ciphertext_bytes']} ({r['reduction_pct']}%) vs "
                       f"{nbytes} ({reduction}%) [{'ok' if size_ok else 'OFF'}]")
    return ok, details


def test_criterion_4_option_tables(analysis, capsys):
    rows, _ = analysis
    ok1, d1 = _option_checks(rows, 1024, PUBLISHED_OPTIONS_1024)
    ok2, d2 = _option_checks(rows, 512, PUBLISHED_OPTIONS_512)
    base_ok = (get(rows, 1024, 8, "q")["ciphertext_bytes"] == 2176
               and get(rows, 512, 8, "q")["ciphertext_bytes"] == 1088)
    report(capsys, 4, ok1 and ok2 and base_ok,
           "option DFRs within +-3 and exact ciphertext sizes", d1 + d2)


def test_criterion_5_precision_doubling(analysis, capsys):
    rows, _ = analysis
    worst = 0.0
    for r in rows.values():
        for lo, hi in (("log2_dfr", "log2_dfr_2p"), ("log2_crossover", "log2_crossover_2p")):
            a, b = r[lo], r[hi]
            if a != b:
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
    report(capsys, 5, worst <= 1e-6,
           f"{2 * len(rows)} log2 values at 512 vs 1024 bits, worst relative change {worst:.2e}")


def test_criterion_6_monte_carlo(capsys):
    weak = get_preset("toy-weak")
    scheme = weak.scheme()
    pred = evaluate(weak.params, weak.rates, [scheme], 512)[0]
    p_bit, p_block = float(pred["p"]), float(pred["dfr"])
    trials = 100_000
    stats = kem_roundtrips(weak.params, weak.rates, scheme, trials, b"acceptance-6")
    z_bit = binomial_z(stats.bit_errors, trials * scheme.secret_bits, p_bit)
    z_block = binomial_z(stats.block_failures, trials, p_block)

    toy = get_preset("toy")
    hist = tap_histogram(toy.params, toy.rates, 10**6, b"acceptance-6")
    _, tv = compare_histogram(hist, pmf_total_noise(toy.params, toy.rates, 128))

    ok = (1e-3 <= p_bit <= 1e-2 and abs(z_bit) <= 3 and abs(z_block) <= 3
          and stats.key_mismatches == stats.block_failures and tv < 5e-3)
    details = [
        f"toy-weak {weak.params} rates {weak.rates.label()} ATE m=1: predicted bit error {p_bit:.4e}, "
        f"block failure {p_block:.4f}",
        f"{trials} roundtrips: bit error {stats.bit_error_rate:.4e} (z={z_bit:+.2f}), "
        f"block failure {stats.block_failure_rate:.4f} (z={z_block:+.2f}), "
        f"key mismatches {stats.key_mismatches}",
        f"toy {toy.params} rates {toy.rates.label()}: {sum(hist.values())} coefficients, TV {tv:.4e}",
    ]
    report(capsys, 6, ok, "Monte-Carlo rates within 3 sigma and histogram TV < 5e-3", details)


def test_criterion_7_ecc_and_ntt(capsys):
    rng = np.random.default_rng(7)
    details, ok = [], True
    codes = {str(build_bch(*OPTIONS[o][1])): build_bch(*OPTIONS[o][1]) for o in (1, 2, 3, 4)}
    codes["BCH(511,430,9)"] = build_bch(9, 9)
    for label, spec in codes.items():
        good = 0
        for i in range(1000):
            msg = rng.integers(0, 2, spec.k).astype(np.uint8)
            w = spec.t if i % 4 == 0 else int(rng.integers(0, spec.t + 1))
            rx = bch_encode(spec, msg)
            rx[rng.choice(spec.n, w, replace=False)] ^= 1
            got, count = bch_decode(spec, rx)
            good += np.array_equal(got, msg) and count == w
        ok &= good == 1000
        details.append(f"{label}: {good}/1000 corrected")

    spec = build_bch(4, 2)
    patterns = good = 0
    for msg_int in range(128):
        msg = np.array([(msg_int >> i) & 1 for i in range(7)], dtype=np.uint8)
        cw = bch_encode(spec, msg)
        for w in range(3):
            for pos in itertools.combinations(range(15), w):
                rx = cw.copy()
                rx[list(pos)] ^= 1
                got, _ = bch_decode(spec, rx)
                patterns += 1
                good += np.array_equal(got, msg)
    ok &= good == patterns == 128 * 121
    details.append(f"BCH(15,7,2) exhaustive: {good}/{patterns}")

    for option in (1, 2, 3, 4):
        params = ParamSet(OPTIONS[option][0], Q, 8)
        scheme = scheme_for_option(option, params)
        good = 0
        for _ in range(1000):
            secret = rng.integers(0, 2, 256).astype(np.uint8)
            good += np.array_equal(ecc_decode(scheme, ecc_encode(scheme, secret, params)), secret)
        ok &= good == 1000
        details.append(f"option {option}: {good}/1000 noiseless roundtrips")

    rings = sorted({ParamSet(1024, Q, 8)} | {p.params for p in PRESETS.values()}, key=lambda p: (p.n, p.q))
    for params in rings:
        same = 0
        for _ in range(100):
            a = ModPoly(params, rng.integers(0, params.q, params.n))
            b = ModPoly(params, rng.integers(0, params.q, params.n))
            same += negacyclic_mul(a, b) == negacyclic_mul_schoolbook(a, b)
        ok &= same == 100
        details.append(f"NTT vs schoolbook n={params.n} q={params.q}: {same}/100 exact")
    report(capsys, 7, ok, "BCH correction, exhaustive BCH(15,7,2), option roundtrips, NTT equivalence", details)


def test_criterion_8_renyi(capsys):
    details, ok = [], True
    vals = []
    for k in range(2, 17):
        got = renyi_divergence(k, 9, digits=40)
        want = oracle_renyi9(k)
        with mpmath.workdps(60):
            rel = abs(got / want - 1)
        ok &= rel < mpmath.mpf(10) ** -10
        vals.append(got)
        details.append(f"k={k}: {mpmath.nstr(got, 15)} (oracle relative error {mpmath.nstr(rel, 3)})")
    ok &= all(a > b for a, b in zip(vals, vals[1:]))
    report(capsys, 8, ok, "R_9 strictly decreasing in k=2..16 and within 10 digits of the oracle", details)


def test_criterion_9_security_note(capsys, tmp_path):
    out = tmp_path / "t3.json"
    code = cli.main(["analyze", "table", "--id", "3", "--no-check", "--out", str(out)])
    doc = json.loads(out.read_text())
    code2 = cli.main(["analyze", "dfr", "--preset", "toy-weak", "--no-check", "--out", str(tmp_path / "d.json")])
    doc2 = json.loads((tmp_path / "d.json").read_text())
    ok = (code == 0 and code2 == 0 and doc["security_note"] == SECURITY_NOTE
          and doc2["security_note"] == SECURITY_NOTE and "not computed" in SECURITY_NOTE)
    report(capsys, 9, ok, f"table and DFR output state: {SECURITY_NOTE}")
