"""Error-correction pipelines for the 256-bit shared secret.

Either plain ATE, or an outer BCH code concatenated with an inner ATE code:

    secret || msg_pad zeros -> BCH encode -> || cw_pad zeros -> ATE(m)

Pad bits are transmitted and decoded like any other bit; a nonzero pad after
decoding is reported as a decode failure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ate import AteParams, ate_decode, ate_encode
from .bch import BchSpec, bch_decode, bch_encode, build_bch
from .errors import CapacityError, DecodeFailure, ParameterError
from .ring import ModPoly, ParamSet

SECRET_BITS = 256


@dataclass(frozen=True)
class EccScheme:
    """``bch is None`` means ATE only."""

    name: str
    m: int
    bch: Optional[BchSpec] = None
    msg_pad: int = 0
    cw_pad: int = 0
    secret_bits: int = SECRET_BITS

    @property
    def channel_bits(self) -> int:
        """Bits crossing the ATE super channel."""
        if self.bch is None:
            return self.secret_bits
        return self.bch.n + self.cw_pad

    @property
    def ate(self) -> AteParams:
        return AteParams(self.m, self.channel_bits)

    def validate(self, params: ParamSet) -> None:
        if self.bch is not None and self.secret_bits + self.msg_pad != self.bch.k:
            raise ParameterError(f"{self.name}: secret + msg_pad != code dimension {self.bch.k}")
        if self.m * self.channel_bits > params.n:
            raise CapacityError(
                f"{self.name}: needs {self.m * self.channel_bits} coefficients, ring has {params.n}"
            )


def ate_only(m: int, secret_bits: int = SECRET_BITS) -> EccScheme:
    return EccScheme(f"ate{m}", m, secret_bits=secret_bits)


# option -> (required n, BCH (m, t, shorten), ATE repetition, msg_pad, cw_pad)
OPTIONS = {
    1: (1024, (9, 9, 170), 3, 4, 0),
    2: (1024, (9, 30, 0), 2, 3, 1),
    3: (1024, (10, 106, 0), 1, 2, 1),
    4: (512, (9, 30, 0), 1, 3, 1),
}


def scheme_for_option(option, params: ParamSet) -> EccScheme:
    """Option 1-4 concatenated schemes, or "newhope" (ATE with m = n/256)."""
    if option in ("newhope", "ate", 0):
        if params.n % SECRET_BITS:
            raise ParameterError(f"newhope scheme needs n divisible by 256, got {params.n}")
        scheme = EccScheme("newhope", params.n // SECRET_BITS)
        scheme.validate(params)
        return scheme
    try:
        option = int(option)
        need_n, code, m, msg_pad, cw_pad = OPTIONS[option]
    except (KeyError, ValueError, TypeError):
        raise ParameterError(f"unknown ECC option {option!r}") from None
    if params.n != need_n:
        raise ParameterError(f"option {option} requires n={need_n}, got n={params.n}")
    scheme = EccScheme(f"option{option}", m, build_bch(*code), msg_pad, cw_pad)
    scheme.validate(params)
    return scheme


def ecc_encode(scheme: EccScheme, secret, params: ParamSet) -> ModPoly:
    secret = np.asarray(secret, dtype=np.uint8)
    if secret.shape != (scheme.secret_bits,):
        raise ParameterError(f"secret must have {scheme.secret_bits} bits")
    scheme.validate(params)
    if scheme.bch is None:
        word = secret
    else:
        msg = np.concatenate([secret, np.zeros(scheme.msg_pad, dtype=np.uint8)])
        word = np.concatenate([bch_encode(scheme.bch, msg), np.zeros(scheme.cw_pad, dtype=np.uint8)])
    return ate_encode(word, scheme.ate, params)


def ecc_decode(scheme: EccScheme, v: ModPoly) -> np.ndarray:
    """Recover the secret bits; raises DecodeFailure if that is not possible."""
    scheme.validate(v.params)
    word = ate_decode(v, scheme.ate)
    if scheme.bch is None:
        return word
    if word[scheme.bch.n:].any():
        raise DecodeFailure("nonzero codeword padding")
    msg, _ = bch_decode(scheme.bch, word[: scheme.bch.n])
    if msg[scheme.secret_bits:].any():
        raise DecodeFailure("nonzero message padding")
    return msg[: scheme.secret_bits]


def bytes_to_bits(data: bytes) -> np.ndarray:
    """Little-endian bit order within each byte."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")


def bits_to_bytes(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()
