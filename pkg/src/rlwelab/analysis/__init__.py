"""Exact noise and decryption-failure analysis."""
from .noise import (
    SuperChannel,
    crossover_probability,
    dfr_ate,
    dfr_bch,
    pmf_compression_noise,
    pmf_difference_noise,
    pmf_total_noise,
)
from .pmf import (
    DEFAULT_PRECISION,
    Pmf,
    pmf_binomial,
    pmf_convolve,
    pmf_fold,
    pmf_negate,
    pmf_power,
    pmf_product,
)
from .renyi import renyi_divergence
from .tables import generate_table

__all__ = [
    "DEFAULT_PRECISION", "Pmf", "SuperChannel", "crossover_probability", "dfr_ate", "dfr_bch",
    "generate_table", "pmf_binomial", "pmf_compression_noise", "pmf_convolve",
    "pmf_difference_noise", "pmf_fold", "pmf_negate", "pmf_power", "pmf_product",
    "pmf_total_noise", "renyi_divergence",
]
