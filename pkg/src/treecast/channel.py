"""Lossy and adversarial channel simulation.

Exercises the protocol's core robustness property: because each packet
verifies on its own, any surviving unmodified packet authenticates no
matter which other packets were dropped, and any modified packet is
rejected (up to the digest truncation's false-accept probability).

Two loss processes are available: independent per-packet loss, and a
two-state good/bad Markov channel for bursty loss (lossless in the good
state, lossy in the bad state; loss is sampled before the state
transition, and the channel starts in the good state). All randomness
comes from ``random.Random`` (MT19937) seeded from the channel model,
so a run is a pure function of (packets, channel, attack, seed). The
generator identity is recorded in the report header.

Ground truth about which packets were polluted stays inside the
simulator for scoring; the verifier only ever sees packet bytes.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass
from enum import Enum

from .digest import DigestSpec
from .errors import InvalidInput
from .packet import AuthenticatedPacket, verify_packet
from .signature import SignatureSpec
from .tree import AuthPath

RNG_NAME = "mt19937"


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidInput(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class IIDLoss:
    """Each packet is lost independently with probability p_loss."""

    p_loss: float

    def __post_init__(self):
        _check_probability("p_loss", self.p_loss)

    def describe(self) -> str:
        return f"p_loss={self.p_loss:g}"

    kind = "iid"


@dataclass(frozen=True)
class BurstLoss:
    """Two-state Markov channel: good state delivers, bad state drops
    with probability loss_in_bad."""

    p_enter_bad: float
    p_exit_bad: float
    loss_in_bad: float = 1.0

    def __post_init__(self):
        _check_probability("p_enter_bad", self.p_enter_bad)
        _check_probability("p_exit_bad", self.p_exit_bad)
        _check_probability("loss_in_bad", self.loss_in_bad)

    def describe(self) -> str:
        return f"p_enter={self.p_enter_bad:g};p_exit={self.p_exit_bad:g};loss_in_bad={self.loss_in_bad:g}"

    kind = "burst"


@dataclass(frozen=True)
class ChannelModel:
    loss: IIDLoss | BurstLoss
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must fit in 64 bits, got {self.seed}")


class AttackMode(Enum):
    FLIP_RANDOM_BIT = "flip_random_bit"
    REPLACE_PAYLOAD = "replace_payload"
    REPLACE_SIGNATURE = "replace_signature"


@dataclass(frozen=True)
class AttackModel:
    pollution_rate: float = 0.0
    mode: AttackMode = AttackMode.FLIP_RANDOM_BIT

    def __post_init__(self):
        _check_probability("pollution_rate", self.pollution_rate)


@dataclass
class DeliveryReport:
    sent: int = 0
    delivered: int = 0
    lost: int = 0
    polluted: int = 0
    accepted: int = 0
    rejected: int = 0
    false_accepts: int = 0
    false_rejects: int = 0

    CSV_HEADER = ("seed,channel_kind,p_params,pollution_rate,sent,delivered,lost,"
                  "polluted,accepted,rejected,false_accepts,false_rejects")

    def to_csv(self, channel: ChannelModel, attack: AttackModel) -> str:
        row = (f"{channel.seed},{channel.loss.kind},{channel.loss.describe()},"
               f"{attack.pollution_rate:g},{self.sent},{self.delivered},{self.lost},"
               f"{self.polluted},{self.accepted},{self.rejected},"
               f"{self.false_accepts},{self.false_rejects}")
        return f"# rng={RNG_NAME}\n{self.CSV_HEADER}\n{row}\n"


@dataclass
class Transmission:
    """Channel output: surviving packets plus scoring-only ground truth."""

    delivered: list[AuthenticatedPacket]
    polluted_flags: list[bool]
    sent: int
    lost: int
    channel: ChannelModel
    attack: AttackModel

    @property
    def report(self) -> DeliveryReport:
        return DeliveryReport(
            sent=self.sent,
            delivered=len(self.delivered),
            lost=self.lost,
            polluted=sum(self.polluted_flags),
        )


def _flip_bit(data: bytes, bit: int) -> bytes:
    out = bytearray(data)
    out[bit // 8] ^= 1 << (bit % 8)
    return bytes(out)


def _pollute(pkt: AuthenticatedPacket, mode: AttackMode, rng: random.Random) -> AuthenticatedPacket:
    if mode is AttackMode.REPLACE_PAYLOAD:
        return dataclasses.replace(pkt, payload=rng.randbytes(len(pkt.payload)))
    if mode is AttackMode.REPLACE_SIGNATURE:
        return dataclasses.replace(pkt, signature=rng.randbytes(len(pkt.signature)))

    # Flip one random bit across payload || siblings || signature.
    payload_bits = len(pkt.payload) * 8
    sibling_bits = sum(len(s) * 8 for s in pkt.path.siblings)
    sig_bits = len(pkt.signature) * 8
    bit = rng.randrange(payload_bits + sibling_bits + sig_bits)
    if bit < payload_bits:
        return dataclasses.replace(pkt, payload=_flip_bit(pkt.payload, bit))
    bit -= payload_bits
    if bit < sibling_bits:
        siblings = list(pkt.path.siblings)
        which, bit = divmod(bit, len(siblings[0]) * 8)
        siblings[which] = _flip_bit(siblings[which], bit)
        path = AuthPath(packet_index=pkt.path.packet_index, siblings=tuple(siblings))
        return dataclasses.replace(pkt, path=path)
    bit -= sibling_bits
    return dataclasses.replace(pkt, signature=_flip_bit(pkt.signature, bit))


def transmit(packets: list[AuthenticatedPacket], channel: ChannelModel,
             attack: AttackModel) -> Transmission:
    """Push packets through the channel; deterministic for a given seed.

    Per packet, the loss decision is sampled first; survivors are then
    polluted with probability ``attack.pollution_rate``.
    """
    rng = random.Random(channel.seed)
    loss = channel.loss
    bad_state = False

    delivered: list[AuthenticatedPacket] = []
    polluted_flags: list[bool] = []
    lost = 0
    for pkt in packets:
        if isinstance(loss, IIDLoss):
            dropped = rng.random() < loss.p_loss
        else:
            dropped = bad_state and rng.random() < loss.loss_in_bad
            if bad_state:
                if rng.random() < loss.p_exit_bad:
                    bad_state = False
            elif rng.random() < loss.p_enter_bad:
                bad_state = True
        if dropped:
            lost += 1
            continue
        if attack.pollution_rate > 0 and rng.random() < attack.pollution_rate:
            delivered.append(_pollute(pkt, attack.mode, rng))
            polluted_flags.append(True)
        else:
            delivered.append(pkt)
            polluted_flags.append(False)

    return Transmission(
        delivered=delivered,
        polluted_flags=polluted_flags,
        sent=len(packets),
        lost=lost,
        channel=channel,
        attack=attack,
    )


def receiver_verify_all(transmission: Transmission, digest_spec: DigestSpec,
                        sig_spec: SignatureSpec) -> DeliveryReport:
    """Verify every delivered packet in isolation and score the verdicts."""
    report = transmission.report
    for pkt, was_polluted in zip(transmission.delivered, transmission.polluted_flags):
        verdict = verify_packet(pkt, digest_spec, sig_spec)
        if verdict.is_accept:
            report.accepted += 1
            if was_polluted:
                report.false_accepts += 1
        else:
            report.rejected += 1
            if not was_polluted:
                report.false_rejects += 1
    return report
