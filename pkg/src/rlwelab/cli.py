"""Command-line front end.

    rlwelab analyze table --id 3
    rlwelab analyze noise --n 1024 --k 8 --rv 8 --out noise.csv
    rlwelab analyze dfr --n 512 --k 8 --rv 8
    rlwelab kem keygen --seed 00..00 --preset newhope1024
    rlwelab kem roundtrip --preset toy-weak --trials 100000
    rlwelab montecarlo --preset toy --coefficients 1000000 --out hist.csv
    rlwelab renyi --a 9 --k 2..16

Every file written starts with a provenance record (JSON tables carry it as a
"provenance" key; CSV files as a leading ``# {json}`` line) holding the tool
version, the full argument vector and the resolved parameters.  Outputs
contain no timestamps, so identical arguments reproduce identical bytes.

Exit codes: 0 ok, 2 usage error, 3 precision check failed, 4 I/O error.
The default working precision is read from ``RLWELAB_PRECISION``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .analysis import noise as noise_mod
from .analysis.pmf import DEFAULT_PRECISION
from .analysis.renyi import renyi_divergence
from .analysis.tables import SECURITY_NOTE, TABLES, evaluate, generate_table
from .codec import FULL, CompressionRates, ciphertext_size, parse_rate
from .ecc import scheme_for_option
from .errors import ParameterError, PrecisionError
from .kem import kem_decapsulate, kem_encapsulate, keygen, save_key
from .montecarlo import binomial_z, compare_histogram, kem_roundtrips, tap_histogram
from .presets import PRESETS, Preset, get_preset
from .ring import ParamSet

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_IO = 0, 2, 3, 4
PRECISION_ENV = "RLWELAB_PRECISION"


class UsageError(Exception):
    pass


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def _k_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


# -- configuration ------------------------------------------------------------


def _add_setting_flags(p: argparse.ArgumentParser, default_preset: str | None) -> None:
    p.add_argument("--preset", default=default_preset, choices=sorted(PRESETS))
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--rv", help="compression rate of v' (power of two, or q)")
    p.add_argument("--ru", help="compression rate of u (power of two, or q)")
    p.add_argument("--option", help="newhope, 1, 2, 3 or 4")
    p.add_argument("--m", type=int, help="plain ATE with this repetition (overrides --option)")


def resolve_setting(args) -> Preset:
    """Preset values, overridden flag by flag, validated before any work."""
    base = get_preset(args.preset) if args.preset else PRESETS["newhope1024"]
    option = base.option
    if args.option is not None:
        option = args.option if args.option == "newhope" else int(args.option)
    if args.m is not None:
        option = f"ate{args.m}"
    n = args.n if args.n is not None else base.params.n
    if args.n is None and option == 4:
        n = 512
    params = ParamSet(n, args.q if args.q is not None else base.params.q,
                      args.k if args.k is not None else base.params.k)
    rates = CompressionRates(
        parse_rate(args.rv) if args.rv is not None else base.rates.r_v,
        parse_rate(args.ru) if args.ru is not None else base.rates.r_u)
    rates.validate(params.q)
    setting = Preset(args.preset or "custom", params, rates, option, base.note)
    setting.scheme()  # raises on an impossible option / ring combination
    return setting


def _provenance(args, setting: Preset | None = None, **extra) -> dict:
    rec = {"tool": "rlwelab", "version": __version__, "argv": getattr(args, "argv", [])}
    if setting is not None:
        rec.update({
            "n": setting.params.n, "q": setting.params.q, "k": setting.params.k,
            "r_v": _rate_json(setting.rates.r_v), "r_u": _rate_json(setting.rates.r_u),
            "scheme": None if setting.option is None else str(setting.option),
        })
    rec.update(extra)
    return rec


def _rate_json(r):
    return "q" if r == FULL else r


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv_text(provenance: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(provenance, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def cmd_analyze_table(args) -> int:
    rows = generate_table(args.id, args.precision, check=not args.no_check, workers=args.workers)
    prov = _provenance(args, table=args.id, precision_bits=args.precision,
                       precision_check=not args.no_check)
    if args.format == "json":
        doc = {"provenance": prov, "security_note": SECURITY_NOTE, "rows": rows}
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    else:
        cols = list(rows[0])
        prov["security_note"] = SECURITY_NOTE
        _emit(_csv_text(prov, cols, [[r.get(c) for c in cols] for r in rows]), args.out)
    return EXIT_OK


def cmd_analyze_noise(args) -> int:
    s = resolve_setting(args)
    total = noise_mod.pmf_total_noise(s.params, s.rates, args.precision)
    q = s.params.q
    rows = []
    for x, lw in total.log2_weights():
        rows.append([x - q if x > q // 2 else x, repr(lw)])
    rows.sort()
    _emit(_csv_text(_provenance(args, s, precision_bits=args.precision),
                    ["value", "log2_weight"], rows), args.out)
    return EXIT_OK


def _check_agree(a: float, b: float, what: str) -> None:
    if a != b and abs(a - b) > 1e-6 * max(abs(a), abs(b)):
        raise PrecisionError(f"{what}: {a!r} vs {b!r} after doubling precision")


def cmd_analyze_dfr(args) -> int:
    s = resolve_setting(args)
    scheme = s.scheme() or scheme_for_option("newhope", s.params)
    res = evaluate(s.params, s.rates, [scheme], args.precision)[0]
    if not args.no_check:
        hi = evaluate(s.params, s.rates, [scheme], 2 * args.precision)[0]
        _check_agree(res["log2_p"], hi["log2_p"], "log2 cross-over")
        _check_agree(res["log2_dfr"], hi["log2_dfr"], "log2 DFR")
    doc = {
        "provenance": _provenance(args, s, precision_bits=args.precision),
        "scheme": scheme.name, "ate_m": scheme.m,
        "bch": str(scheme.bch) if scheme.bch else None,
        "log2_crossover": res["log2_p"],
        "log2_dfr": res["log2_dfr"],
        "ciphertext_bytes": ciphertext_size(s.params, s.rates),
        "security_note": SECURITY_NOTE,
    }
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _seed_bytes(text: str) -> bytes:
    try:
        seed = bytes.fromhex(text)
    except ValueError:
        raise UsageError("seed must be hex") from None
    if len(seed) != 32:
        raise UsageError("seed must be 32 bytes (64 hex digits)")
    return seed


def _kem_setting(args) -> Preset:
    s = resolve_setting(args)
    if s.scheme() is None:
        raise UsageError(f"preset {s.name} cannot carry a 256-bit secret")
    return s


def cmd_kem_keygen(args) -> int:
    s = _kem_setting(args)
    kp = keygen(_seed_bytes(args.seed), s.params)
    pk, sk = kp.pk.to_bytes(), kp.sk.to_bytes()
    if args.pk_out:
        save_key(args.pk_out, "public", pk, s.params, s.rates, s.scheme())
    if args.sk_out:
        save_key(args.sk_out, "secret", sk, s.params, s.rates, s.scheme())
    print(f"pk {pk.hex()}")
    print(f"sk {sk.hex()}")
    if args.coin:
        ct, key = kem_encapsulate(kp.pk, s.params, s.rates, s.scheme(), coin=_seed_bytes(args.coin))
        key2 = kem_decapsulate(kp.sk, kp.pk, ct, s.params, s.rates, s.scheme())
        print(f"ct {ct.to_bytes().hex()}")
        print(f"key {key.hex()}")
        print(f"decapsulated {'match' if key2 == key else 'MISMATCH'}")
    return EXIT_OK


def cmd_kem_roundtrip(args) -> int:
    s = _kem_setting(args)
    scheme = s.scheme()
    stats = kem_roundtrips(s.params, s.rates, scheme, args.trials, args.seed.encode(), args.workers)
    res = evaluate(s.params, s.rates, [scheme], args.precision)[0]
    p_bit, p_block = float(res["p"]), float(res["dfr"])
    bits = stats.trials * stats.bits_per_trial
    report = {
        "provenance": _provenance(args, s, trials=args.trials, seed=args.seed),
        "trials": stats.trials,
        "failures": stats.key_mismatches,
        "block_failures": stats.block_failures,
        "bit_errors": stats.bit_errors,
        "bit_error_rate": stats.bit_error_rate,
        "block_failure_rate": stats.block_failure_rate,
        "predicted_log2_bit_error": res["log2_p"],
        "predicted_log2_block_failure": res["log2_dfr"],
        "z_bit": binomial_z(stats.bit_errors, bits, p_bit) if p_bit > 0 else None,
        "z_block": binomial_z(stats.block_failures, stats.trials, p_block) if p_block > 0 else None,
    }
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    s = resolve_setting(args)
    hist = tap_histogram(s.params, s.rates, args.coefficients, args.seed.encode(),
                         workers=args.workers)
    pmf = noise_mod.pmf_total_noise(s.params, s.rates, args.precision)
    rows, tv = compare_histogram(hist, pmf)
    prov = _provenance(args, s, coefficients=sum(hist.values()), seed=args.seed,
                       precision_bits=args.precision, total_variation=tv)
    _emit(_csv_text(prov, ["value", "empirical", "predicted", "z"],
                    [[r.value, r.empirical, repr(r.predicted), repr(r.z)] for r in rows]), args.out)
    return EXIT_OK


def cmd_renyi(args) -> int:
    if args.a <= 1:
        raise UsageError("--a must be > 1")
    ks = _k_range(args.k)
    if not ks or min(ks) < 1:
        raise UsageError("--k values must be >= 1")
    rows = []
    for k in ks:
        r = renyi_divergence(k, args.a, args.digits)
        rows.append([k, str(r)])
    _emit(_csv_text(_provenance(args, a=args.a, digits=args.digits), ["k", "renyi"], rows), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlwelab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"rlwelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="failure-rate analysis")
    asub = analyze.add_subparsers(dest="what", required=True)
    t = asub.add_parser("table", help="regenerate a DFR table")
    t.add_argument("--id", type=int, required=True, choices=sorted(TABLES))
    t.add_argument("--format", choices=("json", "csv"), default="json")
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--no-check", action="store_true", help="skip the doubled-precision recheck")
    t.add_argument("--out")
    t.set_defaults(func=cmd_analyze_table)
    nz = asub.add_parser("noise", help="total-noise pmf as CSV of log2 weights")
    _add_setting_flags(nz, None)
    nz.add_argument("--out")
    nz.set_defaults(func=cmd_analyze_noise)
    d = asub.add_parser("dfr", help="cross-over probability and DFR of one setting")
    _add_setting_flags(d, None)
    d.add_argument("--no-check", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_analyze_dfr)

    kem = sub.add_parser("kem", help="key encapsulation demos")
    ksub = kem.add_subparsers(dest="what", required=True)
    kg = ksub.add_parser("keygen", help="deterministic key pair from a hex seed")
    _add_setting_flags(kg, "newhope1024")
    kg.add_argument("--seed", required=True)
    kg.add_argument("--coin", help="also encapsulate with this hex coin")
    kg.add_argument("--pk-out")
    kg.add_argument("--sk-out")
    kg.set_defaults(func=cmd_kem_keygen)
    rt = ksub.add_parser("roundtrip", help="count failures over many encapsulations")
    _add_setting_flags(rt, "newhope1024")
    rt.add_argument("--trials", type=int, default=1000)
    rt.add_argument("--seed", default="rlwelab")
    rt.add_argument("--workers", type=int, default=1)
    rt.add_argument("--out")
    rt.set_defaults(func=cmd_kem_roundtrip)

    mc = sub.add_parser("montecarlo", help="noise histogram versus the analyzer")
    _add_setting_flags(mc, "toy")
    mc.add_argument("--coefficients", type=int, default=10**6)
    mc.add_argument("--seed", default="rlwelab")
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--out")
    mc.set_defaults(func=cmd_montecarlo)

    rn = sub.add_parser("renyi", help="Renyi divergence of psi_k from the rounded Gaussian")
    rn.add_argument("--a", type=float, required=True)
    rn.add_argument("--k", default="2..16", help="list (2,4,8) or range (2..16)")
    rn.add_argument("--digits", type=int, default=30)
    rn.add_argument("--out")
    rn.set_defaults(func=cmd_renyi)

    for leaf in (t, nz, d, kg, rt, mc, rn):
        leaf.add_argument("--precision", type=int, default=None,
                          help=f"working precision in bits (default ${PRECISION_ENV} or {DEFAULT_PRECISION})")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        if args.precision is None:
            args.precision = _default_precision()
        if args.precision < 64:
            raise UsageError("precision must be at least 64 bits")
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"rlwelab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"rlwelab: precision check failed: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except OSError as exc:
        print(f"rlwelab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
