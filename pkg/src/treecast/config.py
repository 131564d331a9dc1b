"""Flat key=value run configuration.

One line per key, ``#`` comments and blank lines ignored. Unknown and
duplicate keys are rejected, and every value is validated against its
target type's invariants at parse time, before any work starts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .channel import AttackModel, ChannelModel, IIDLoss
from .digest import DigestSpec
from .errors import ConfigError, InvalidInput
from .model import ModelParams, OverheadParams
from .scheduling import Clustered, MessagePassing, Topology
from .signature import SignatureSpec
from .tree import is_power_of_two


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got '{raw}'") from None


def _parse_fraction(key: str, raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(key, f"expected a number, got '{raw}'") from None


def _parse_probability(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(key, f"expected a number, got '{raw}'") from None
    if not 0.0 <= value <= 1.0:
        raise ConfigError(key, f"must be in [0, 1], got {value}")
    return value


def _parse_hex(key: str, raw: str) -> bytes:
    try:
        return bytes.fromhex(raw)
    except ValueError:
        raise ConfigError(key, f"expected hex bytes, got '{raw}'") from None


@dataclass
class RunConfig:
    """Validated configuration mirroring the model, crypto and channel types."""

    len_pac_bits: int = 32 * 1024
    n: int = 1024
    inlen_umac_bits: int = 128
    outlen_umac_bits: int = 32
    th_umac_bps: Fraction = Fraction(79_200_000_000)
    th_sig_per_sec: Fraction = Fraction(4560)
    message_size_bits: int = 3 * 2**30
    sig_len_bits: int = 1256
    digest_key: bytes = b""
    sig_key: bytes = b""
    topology_kind: str = "mps"
    M: int = 1
    m: int = 1
    k: int = 1
    sync_coeff_s: Fraction = Fraction(0)
    c0: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)
    g0: Fraction = Fraction(0)
    g1: Fraction = Fraction(0)
    a0: Fraction = Fraction(0)
    p_loss: float = 0.0
    pollution_rate: float = 0.0
    seed: int = 0

    def digest_spec(self) -> DigestSpec:
        return DigestSpec(
            out_len_bits=self.outlen_umac_bits,
            key=self.digest_key,
            keyed=bool(self.digest_key),
        )

    def sig_spec(self) -> SignatureSpec:
        return SignatureSpec.test(self.sig_len_bits, self.sig_key)

    def topology(self) -> Topology:
        if self.topology_kind == "mps":
            return MessagePassing(self.M)
        return Clustered(self.m, self.k)

    def overhead(self) -> OverheadParams:
        return OverheadParams(c0=self.c0, c1=self.c1, g0=self.g0, g1=self.g1, a0=self.a0)

    def model_params(self) -> ModelParams:
        return ModelParams(
            len_pac_bits=self.len_pac_bits,
            n=self.n,
            inlen_umac_bits=self.inlen_umac_bits,
            outlen_umac_bits=self.outlen_umac_bits,
            th_umac_bps=self.th_umac_bps,
            th_sig_per_sec=self.th_sig_per_sec,
            message_size_bits=self.message_size_bits,
            overhead=self.overhead(),
        )

    def channel(self, seed: int | None = None) -> ChannelModel:
        return ChannelModel(loss=IIDLoss(self.p_loss), seed=self.seed if seed is None else seed)

    def attack(self) -> AttackModel:
        return AttackModel(pollution_rate=self.pollution_rate)

    def validate(self) -> None:
        """Construct every derived object so type invariants fire now."""
        checks = {
            "len_pac_bits": self.len_pac_bits > 0,
            "n": is_power_of_two(self.n),
            "inlen_umac_bits": self.inlen_umac_bits > 0,
            "message_size_bits": self.message_size_bits > 0,
            "M": self.M >= 1,
            "m": self.m >= 1,
            "k": is_power_of_two(self.k),
            "seed": 0 <= self.seed < 2**64,
            "sync_coeff_s": self.sync_coeff_s >= 0,
            "th_umac_bps": self.th_umac_bps > 0,
            "th_sig_per_sec": self.th_sig_per_sec > 0,
        }
        for key, ok in checks.items():
            if not ok:
                raise ConfigError(key, f"invalid value {getattr(self, key, None)}")
        if self.topology_kind not in ("mps", "cluster"):
            raise ConfigError("topology", f"expected 'mps' or 'cluster', got '{self.topology_kind}'")
        try:
            self.digest_spec()
            self.sig_spec()
            self.topology()
            self.overhead()
            self.model_params()
            self.channel()
            self.attack()
        except InvalidInput as exc:
            raise ConfigError("<derived>", str(exc)) from exc


_SETTERS = {
    "len_pac_bits": lambda cfg, k, v: setattr(cfg, "len_pac_bits", _parse_int(k, v)),
    "n": lambda cfg, k, v: setattr(cfg, "n", _parse_int(k, v)),
    "inlen_umac_bits": lambda cfg, k, v: setattr(cfg, "inlen_umac_bits", _parse_int(k, v)),
    "outlen_umac_bits": lambda cfg, k, v: setattr(cfg, "outlen_umac_bits", _parse_int(k, v)),
    "th_umac_bps": lambda cfg, k, v: setattr(cfg, "th_umac_bps", _parse_fraction(k, v)),
    "th_sig_per_sec": lambda cfg, k, v: setattr(cfg, "th_sig_per_sec", _parse_fraction(k, v)),
    "message_size_bits": lambda cfg, k, v: setattr(cfg, "message_size_bits", _parse_int(k, v)),
    "sig_len_bits": lambda cfg, k, v: setattr(cfg, "sig_len_bits", _parse_int(k, v)),
    "digest_key_hex": lambda cfg, k, v: setattr(cfg, "digest_key", _parse_hex(k, v)),
    "sig_key_hex": lambda cfg, k, v: setattr(cfg, "sig_key", _parse_hex(k, v)),
    "topology": lambda cfg, k, v: setattr(cfg, "topology_kind", v.strip()),
    "M": lambda cfg, k, v: setattr(cfg, "M", _parse_int(k, v)),
    "m": lambda cfg, k, v: setattr(cfg, "m", _parse_int(k, v)),
    "k": lambda cfg, k, v: setattr(cfg, "k", _parse_int(k, v)),
    "sync_coeff_s": lambda cfg, k, v: setattr(cfg, "sync_coeff_s", _parse_fraction(k, v)),
    "c0": lambda cfg, k, v: setattr(cfg, "c0", _parse_fraction(k, v)),
    "c1": lambda cfg, k, v: setattr(cfg, "c1", _parse_fraction(k, v)),
    "g0": lambda cfg, k, v: setattr(cfg, "g0", _parse_fraction(k, v)),
    "g1": lambda cfg, k, v: setattr(cfg, "g1", _parse_fraction(k, v)),
    "a0": lambda cfg, k, v: setattr(cfg, "a0", _parse_fraction(k, v)),
    "p_loss": lambda cfg, k, v: setattr(cfg, "p_loss", _parse_probability(k, v)),
    "pollution_rate": lambda cfg, k, v: setattr(cfg, "pollution_rate", _parse_probability(k, v)),
    "seed": lambda cfg, k, v: setattr(cfg, "seed", _parse_int(k, v)),
}

KNOWN_KEYS = frozenset(_SETTERS)


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(stripped, f"line {lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SETTERS:
            raise ConfigError(key, f"line {lineno}: unknown key")
        if key in seen:
            raise ConfigError(key, f"line {lineno}: duplicate key")
        seen.add(key)
        _SETTERS[key](cfg, key, value)
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
