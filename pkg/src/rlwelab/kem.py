"""NewHope-style IND-CPA encryption with configurable compression and ECC,
plus a Fujisaki-Okamoto KEM with implicit rejection.

Seeds are expanded with SHAKE256; every noise polynomial gets its own XOF
stream ``SHAKE256(tag || seed)`` with a one-byte domain tag.  The public
matrix polynomial a_hat is expanded from the public seed with SHAKE128.

u is compressed either in the normal domain (``u_domain="normal"``, the
default: u = INTT(u_hat) is rounded, transmitted and transformed back) or
directly on the NTT-domain coefficients (``u_domain="ntt"``).  The second
choice turns the rounding error into pseudo-uniform noise after the inverse
transform and is only kept for experiments.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import (
    FULL,
    CompressionRates,
    PackedPoly,
    compress,
    decompress,
    pack,
    packed_len,
    rate_bits,
    unpack,
    unpack_values,
)
from .ecc import EccScheme, bits_to_bytes, bytes_to_bits, ecc_decode, ecc_encode
from .errors import DecodeFailure, MalformedInputError, ParameterError
from .ring import (
    ModPoly,
    ParamSet,
    Xof,
    negacyclic_mul,
    ntt_forward,
    ntt_inverse,
    pointwise_mul,
    poly_add,
    poly_sub,
    sample_binomial,
    sample_uniform,
)

TAG_A, TAG_S, TAG_E, TAG_S1, TAG_E1, TAG_E2, TAG_REJECT = range(7)
U_DOMAINS = ("normal", "ntt")


def shake256(data: bytes, nbytes: int) -> bytes:
    return hashlib.shake_256(data).digest(nbytes)


def _stream(tag: int, seed: bytes) -> Xof:
    return Xof(bytes([tag]) + seed, "shake256")


def expand_a(public_seed: bytes, params: ParamSet) -> ModPoly:
    return sample_uniform(Xof(bytes([TAG_A]) + public_seed, "shake128"), params)


@dataclass(frozen=True)
class PublicKey:
    b_hat: ModPoly
    seed: bytes

    def to_bytes(self) -> bytes:
        return pack(self.b_hat, self.b_hat.params.coeff_bits).data + self.seed

    @classmethod
    def from_bytes(cls, data: bytes, params: ParamSet) -> "PublicKey":
        size = packed_len(params.n, params.coeff_bits)
        if len(data) != size + 32:
            raise MalformedInputError(f"public key must be {size + 32} bytes")
        return cls(unpack(PackedPoly(params.coeff_bits, data[:size]), params), data[size:])


@dataclass(frozen=True)
class SecretKey:
    s_hat: ModPoly
    reject_seed: bytes

    def to_bytes(self) -> bytes:
        return pack(self.s_hat, self.s_hat.params.coeff_bits).data + self.reject_seed

    @classmethod
    def from_bytes(cls, data: bytes, params: ParamSet) -> "SecretKey":
        size = packed_len(params.n, params.coeff_bits)
        if len(data) != size + 32:
            raise MalformedInputError(f"secret key must be {size + 32} bytes")
        return cls(unpack(PackedPoly(params.coeff_bits, data[:size]), params), data[size:])


@dataclass(frozen=True)
class KeyPair:
    pk: PublicKey
    sk: SecretKey


@dataclass(frozen=True)
class Ciphertext:
    u_packed: PackedPoly
    h_packed: PackedPoly

    def to_bytes(self) -> bytes:
        return self.u_packed.data + self.h_packed.data

    def __len__(self):
        return len(self.u_packed.data) + len(self.h_packed.data)

    @classmethod
    def from_bytes(cls, data: bytes, params: ParamSet, rates: CompressionRates) -> "Ciphertext":
        bu, bv = rate_bits(rates.r_u, params.q), rate_bits(rates.r_v, params.q)
        lu, lv = packed_len(params.n, bu), packed_len(params.n, bv)
        if len(data) != lu + lv:
            raise MalformedInputError(f"ciphertext must be {lu + lv} bytes, got {len(data)}")
        return cls(PackedPoly(bu, bytes(data[:lu])), PackedPoly(bv, bytes(data[lu:])))


def keygen(seed: bytes, params: ParamSet) -> KeyPair:
    if len(seed) != 32:
        raise ParameterError("seed must be 32 bytes")
    z = shake256(seed, 64)
    public_seed, noise_seed = z[:32], z[32:]
    a_hat = expand_a(public_seed, params)
    s = sample_binomial(_stream(TAG_S, noise_seed), params)
    e = sample_binomial(_stream(TAG_E, noise_seed), params)
    s_hat = ntt_forward(s)
    b_hat = poly_add(pointwise_mul(a_hat, s_hat), ntt_forward(e))
    reject_seed = shake256(bytes([TAG_REJECT]) + noise_seed, 32)
    return KeyPair(PublicKey(b_hat, public_seed), SecretKey(s_hat, reject_seed))


def _check_domain(u_domain: str) -> None:
    if u_domain not in U_DOMAINS:
        raise ParameterError(f"u_domain must be one of {U_DOMAINS}")


def encrypt_poly(pk: PublicKey, v: ModPoly, coin: bytes, rates: CompressionRates,
                 u_domain: str = "normal") -> Ciphertext:
    """Encrypt an already-encoded message polynomial ``v``."""
    params = v.params
    rates.validate(params.q)
    _check_domain(u_domain)
    if len(coin) != 32:
        raise ParameterError("coin must be 32 bytes")
    a_hat = expand_a(pk.seed, params)
    s1 = sample_binomial(_stream(TAG_S1, coin), params)
    e1 = sample_binomial(_stream(TAG_E1, coin), params)
    e2 = sample_binomial(_stream(TAG_E2, coin), params)
    t_hat = ntt_forward(s1)
    u_hat = poly_add(pointwise_mul(a_hat, t_hat), ntt_forward(e1))
    v1 = poly_add(poly_add(ntt_inverse(pointwise_mul(pk.b_hat, t_hat)), e2), v)
    u_send = ntt_inverse(u_hat) if u_domain == "normal" else u_hat
    u_c = compress(u_send, rates.r_u)
    h = compress(v1, rates.r_v)
    return Ciphertext(pack(u_c, rate_bits(rates.r_u, params.q)),
                      pack(h, rate_bits(rates.r_v, params.q)))


def decrypt_poly(sk: SecretKey, ct: Ciphertext, rates: CompressionRates,
                 u_domain: str = "normal") -> ModPoly:
    """v'' = decompress(h) - u * s, the noisy message polynomial."""
    params = sk.s_hat.params
    _check_domain(u_domain)
    u = decompress(unpack_values(ct.u_packed, params.n), rates.r_u, params)
    u_hat = ntt_forward(u) if u_domain == "normal" else u
    v1 = decompress(unpack_values(ct.h_packed, params.n), rates.r_v, params)
    return poly_sub(v1, ntt_inverse(pointwise_mul(u_hat, sk.s_hat)))


def _secret_bits(secret, scheme: EccScheme) -> np.ndarray:
    if isinstance(secret, (bytes, bytearray)):
        if len(secret) * 8 != scheme.secret_bits:
            raise ParameterError(f"secret must be {scheme.secret_bits // 8} bytes")
        return bytes_to_bits(bytes(secret))
    return np.asarray(secret, dtype=np.uint8)


def encrypt(pk: PublicKey, secret, coin: bytes, params: ParamSet, rates: CompressionRates,
            scheme: EccScheme, u_domain: str = "normal") -> Ciphertext:
    v = ecc_encode(scheme, _secret_bits(secret, scheme), params)
    return encrypt_poly(pk, v, coin, rates, u_domain)


def decrypt(sk: SecretKey, ct: Ciphertext, params: ParamSet, rates: CompressionRates,
            scheme: EccScheme, u_domain: str = "normal") -> bytes:
    """Recovered secret bytes; raises DecodeFailure on a detected failure."""
    if sk.s_hat.params != params:
        raise ParameterError("secret key does not match the parameter set")
    try:
        v2 = decrypt_poly(sk, ct, rates, u_domain)
    except MalformedInputError as exc:
        raise DecodeFailure(f"malformed ciphertext: {exc}") from exc
    return bits_to_bytes(ecc_decode(scheme, v2))


def noise_tap(sk: SecretKey, ct: Ciphertext, v: ModPoly, rates: CompressionRates,
              u_domain: str = "normal") -> np.ndarray:
    """Centered per-coefficient noise v'' - v; test and validation use only."""
    return poly_sub(decrypt_poly(sk, ct, rates, u_domain), v).centered()


# -- KEM ----------------------------------------------------------------------


def _coins(mu: bytes, pk: PublicKey) -> tuple[bytes, bytes]:
    kc = shake256(mu + shake256(pk.to_bytes(), 32), 64)
    return kc[:32], kc[32:]


def kem_encapsulate(pk: PublicKey, params: ParamSet, rates: CompressionRates, scheme: EccScheme,
                    coin: bytes | None = None, u_domain: str = "normal") -> tuple[Ciphertext, bytes]:
    """Return (ciphertext, 32-byte shared key).  ``coin`` fixes the randomness."""
    coin = os.urandom(32) if coin is None else coin
    mu = shake256(coin, scheme.secret_bits // 8)
    kbar, coins = _coins(mu, pk)
    ct = encrypt(pk, mu, coins, params, rates, scheme, u_domain)
    return ct, shake256(kbar + shake256(ct.to_bytes(), 32), 32)


def kem_decapsulate(sk: SecretKey, pk: PublicKey, ct, params: ParamSet, rates: CompressionRates,
                    scheme: EccScheme, u_domain: str = "normal") -> bytes:
    """Shared key, or a pseudorandom rejection key when re-encryption does not match."""
    data = ct.to_bytes() if isinstance(ct, Ciphertext) else bytes(ct)
    digest = shake256(data, 32)
    reject = shake256(sk.reject_seed + digest, 32)
    try:
        parsed = Ciphertext.from_bytes(data, params, rates)
        mu = decrypt(sk, parsed, params, rates, scheme, u_domain)
    except (DecodeFailure, MalformedInputError):
        return reject
    kbar, coins = _coins(mu, pk)
    again = encrypt(pk, mu, coins, params, rates, scheme, u_domain)
    if again.to_bytes() != data:
        return reject
    return shake256(kbar + digest, 32)


# -- key files ----------------------------------------------------------------


def save_key(path, kind: str, payload: bytes, params: ParamSet, rates: CompressionRates,
             scheme: EccScheme) -> None:
    """One JSON header line describing the setting, then the raw key bytes."""
    header = {
        "kind": kind,
        "n": params.n, "q": params.q, "k": params.k,
        "r_v": rates.r_v, "r_u": rates.r_u,
        "scheme": scheme.name,
        "bytes": len(payload),
    }
    Path(path).write_bytes(json.dumps(header, sort_keys=True).encode() + b"\n" + payload)


def load_key(path) -> tuple[dict, bytes]:
    raw = Path(path).read_bytes()
    head, sep, payload = raw.partition(b"\n")
    if not sep:
        raise MalformedInputError("missing key header")
    header = json.loads(head)
    if header.get("bytes") != len(payload):
        raise MalformedInputError("key length does not match header")
    return header, payload


def rates_from_header(header: dict) -> CompressionRates:
    fix = lambda r: FULL if r == FULL else int(r)  # noqa: E731
    return CompressionRates(fix(header["r_v"]), fix(header["r_u"]))


__all__ = [
    "Ciphertext", "KeyPair", "PublicKey", "SecretKey", "decrypt", "decrypt_poly", "encrypt",
    "encrypt_poly", "expand_a", "kem_decapsulate", "kem_encapsulate", "keygen", "load_key",
    "negacyclic_mul", "noise_tap", "save_key",
]
