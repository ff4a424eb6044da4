"""Named parameter bundles for the CLI and the Monte-Carlo checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .codec import FULL, CompressionRates
from .ecc import EccScheme, ate_only, scheme_for_option
from .errors import ParameterError
from .ring import ParamSet


@dataclass(frozen=True)
class Preset:
    name: str
    params: ParamSet
    rates: CompressionRates
    option: object  # "newhope", 1..4, an int ATE repetition via ate_only, or None
    note: str = ""

    def scheme(self) -> Optional[EccScheme]:
        if self.option is None:
            return None
        if isinstance(self.option, str) and self.option.startswith("ate"):
            return ate_only(int(self.option[3:]))
        return scheme_for_option(self.option, self.params)


_BASE = CompressionRates(8, FULL)

PRESETS = {
    "newhope512": Preset("newhope512", ParamSet(512, 12289, 8), _BASE, "newhope"),
    "newhope1024": Preset("newhope1024", ParamSet(1024, 12289, 8), _BASE, "newhope"),
    "option1": Preset("option1", ParamSet(1024, 12289, 8), _BASE, 1),
    "option2": Preset("option2", ParamSet(1024, 12289, 8), _BASE, 2),
    "option3": Preset("option3", ParamSet(1024, 12289, 8), _BASE, 3),
    "option4": Preset("option4", ParamSet(512, 12289, 8), _BASE, 4),
    # Deliberately weak: v' is squeezed to one bit per coefficient and u is
    # sent in full, so per-coefficient noise is dominated by independent
    # rounding.  Predicted cross-over 2.94e-3, block failure 0.530.
    "toy-weak": Preset("toy-weak", ParamSet(256, 12289, 2), CompressionRates(2, FULL), "ate1",
                       note="weakened for Monte-Carlo: failures are common"),
    # Small noise support so a 10^6-sample histogram resolves the pmf.  u is
    # sent in full: a compressed u puts the tap on a comb of spacing q / r_u,
    # which the independent-coefficient model smears out.
    "toy": Preset("toy", ParamSet(16, 257, 2), CompressionRates(4, FULL), None,
                  note="noise-histogram checks only; too small to carry a 256-bit secret"),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ParameterError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
