"""DFR / bandwidth tables over grids of compression rates and ECC options.

Every number is computed twice, at ``precision`` and ``2 * precision`` bits,
and only emitted if the two log2 values agree to ``REL_TOL`` relative.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath

from ..codec import FULL, CompressionRates, ciphertext_size
from ..ecc import EccScheme, scheme_for_option
from ..errors import PrecisionError
from ..ring import ParamSet
from .noise import SuperChannel, crossover_probability, dfr_ate, dfr_bch, log2, pmf_total_noise
from .pmf import DEFAULT_PRECISION

REL_TOL = 1e-6
Q = 12289

SECURITY_NOTE = ("attack-cost (security bit) columns are not computed; "
                 "lattice attack estimation is outside the scope of this tool")


@dataclass(frozen=True)
class Config:
    n: int
    rates: CompressionRates
    options: tuple
    k: int = 8
    q: int = Q

    @property
    def params(self) -> ParamSet:
        return ParamSet(self.n, self.q, self.k)


def _r(v, u):
    return CompressionRates(v, u)


TABLES = {
    2: [
        Config(1024, _r(8, FULL), ("newhope",)),
        Config(1024, _r(4, FULL), ("newhope",)),
        Config(1024, _r(8, 1024), ("newhope",)),
        Config(512, _r(8, FULL), ("newhope",)),
        Config(512, _r(4, FULL), ("newhope",)),
        Config(512, _r(4, 2048), ("newhope",)),
        Config(512, _r(8, 1024), ("newhope",)),
    ],
    3: [
        Config(1024, _r(8, FULL), ("newhope", 1, 2, 3)),
        Config(512, _r(8, FULL), (4,)),
    ],
    4: [Config(1024, _r(v, u), ("newhope", 1, 2, 3))
        for v, u in [(8, FULL), (8, 512), (8, 256), (8, 128), (4, 512), (4, 256), (4, 128)]],
    5: [Config(512, _r(v, u), ("newhope", 4))
        for v, u in [(8, FULL), (8, 512), (8, 256), (8, 128), (4, 1024), (4, 512), (4, 256)]],
}


def scheme_dfr(scheme: EccScheme, channel: SuperChannel):
    if scheme.bch is None:
        return dfr_ate(channel, scheme.secret_bits)
    return dfr_bch(channel, scheme.channel_bits, scheme.bch.t)


def evaluate(params: ParamSet, rates: CompressionRates, schemes, precision: int) -> list[dict]:
    """Cross-over probability and DFR of every scheme at one (params, rates) point."""
    total = pmf_total_noise(params, rates, precision)
    channels: dict[int, SuperChannel] = {}
    out = []
    for scheme in schemes:
        if scheme.m not in channels:
            channels[scheme.m] = crossover_probability(total, scheme.m)
        ch = channels[scheme.m]
        dfr = scheme_dfr(scheme, ch)
        out.append({"scheme": scheme, "p": ch.p, "dfr": dfr,
                    "log2_p": ch.log2_p(), "log2_dfr": log2(dfr, precision)})
    return out


def _agree(a: float, b: float) -> bool:
    if a == b:
        return True
    return abs(a - b) <= REL_TOL * max(abs(a), abs(b))


def _fmt(x, precision):
    with mpmath.workprec(precision):
        return mpmath.nstr(x, 5)


def config_rows(cfg: Config, precision: int = DEFAULT_PRECISION, check: bool = True) -> list[dict]:
    params = cfg.params
    schemes = [scheme_for_option(o, params) for o in cfg.options]
    results = evaluate(params, cfg.rates, schemes, precision)
    recheck = evaluate(params, cfg.rates, schemes, 2 * precision) if check else None
    base_bytes = ciphertext_size(params, CompressionRates(8, FULL))
    size = ciphertext_size(params, cfg.rates)
    rows = []
    for i, res in enumerate(results):
        scheme = res["scheme"]
        row = {
            "n": cfg.n, "q": cfg.q, "k": cfg.k,
            "r_v": "q" if cfg.rates.r_v == FULL else cfg.rates.r_v,
            "r_u": "q" if cfg.rates.r_u == FULL else cfg.rates.r_u,
            "rates": cfg.rates.label(),
            "scheme": scheme.name,
            "ate_m": scheme.m,
            "bch": str(scheme.bch) if scheme.bch else None,
            "channel_bits": scheme.channel_bits,
            "crossover": _fmt(res["p"], precision),
            "log2_crossover": res["log2_p"],
            "dfr": _fmt(res["dfr"], precision),
            "log2_dfr": res["log2_dfr"],
            "ciphertext_bytes": size,
            "reduction_pct": round(100 * (base_bytes - size) / base_bytes, 1),
            "precision_bits": precision,
        }
        if recheck is not None:
            hi = recheck[i]
            for key in ("log2_p", "log2_dfr"):
                if not _agree(res[key], hi[key]):
                    raise PrecisionError(
                        f"{cfg.rates.label()} {scheme.name}: {key} {res[key]!r} at P={precision} "
                        f"vs {hi[key]!r} at P={2 * precision}")
            row["log2_dfr_2p"] = hi["log2_dfr"]
            row["log2_crossover_2p"] = hi["log2_p"]
        rows.append(row)
    return rows


def _config_rows_star(args):
    return config_rows(*args)


def generate_table(table_id: int, precision: int = DEFAULT_PRECISION, check: bool = True,
                   workers: int = 1) -> list[dict]:
    """Rows of table 2, 3, 4 or 5; raises PrecisionError on disagreement."""
    if table_id not in TABLES:
        raise ValueError(f"unknown table {table_id}; choose from {sorted(TABLES)}")
    jobs = [(cfg, precision, check) for cfg in TABLES[table_id]]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_config_rows_star, jobs))
    else:
        chunks = [config_rows(*j) for j in jobs]
    return [row for chunk in chunks for row in chunk]
