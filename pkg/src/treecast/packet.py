"""Self-contained authenticated packets and their wire format.

Every packet carries everything a receiver needs to verify it in
isolation: the payload, its index and block id, the sibling digests up
to the root, and the block signature. Verification recomputes the root
from the payload and path, then checks the signature over
``block_id || n || root``. No other packet from the block is required.

Wire layout (all integers big-endian)::

    magic 0x574C4D41 (4B) | version 0x01 (1B) | flags (1B, bit0 = keyed digest)
    | digest_len_bits u16 | block_id u64 | packet_index u32 | n u32
    | payload_len_bytes u32 | payload
    | path_len u8 (= log2 n) | siblings (path_len * digest_len_bits/8 bytes, leaf level first)
    | sig_scheme_id u8 | sig_len_bytes u16 | signature

The 4-byte digest-spec fingerprint is not on the wire; it is an
in-memory tag recomputed from the spec a parser or verifier supplies,
which is why deserialization takes a ``DigestSpec``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

from .digest import DigestSpec, leaf_digest
from .errors import SpecMismatch, WireFormatError
from .signature import SignatureKind, SignatureSpec, verify_message
from .tree import AuthPath, AuthTree, auth_path, fold_path, is_power_of_two, require_signed

MAGIC = 0x574C4D41
VERSION = 0x01
_FLAG_KEYED = 0x01

_HEAD = struct.Struct(">IBBHQIII")  # magic, version, flags, digest_len, block_id, index, n, payload_len

# Bytes of framing per packet beyond payload, siblings and signature.
FIXED_OVERHEAD_BYTES = _HEAD.size + 1 + 1 + 2


class Verdict(Enum):
    ACCEPT = "accept"
    REJECT_BAD_SIGNATURE = "reject_bad_signature"
    REJECT_BAD_PATH = "reject_bad_path"

    @property
    def is_accept(self) -> bool:
        return self is Verdict.ACCEPT


@dataclass(frozen=True)
class AuthenticatedPacket:
    """One independently verifiable unit of the authenticated stream."""

    block_id: int
    packet_index: int
    n: int
    payload: bytes
    path: AuthPath
    signature: bytes
    digest_spec_fingerprint: bytes
    digest_len_bits: int
    keyed: bool
    sig_scheme_id: int

    @property
    def auth_overhead_bits(self) -> int:
        """Authentication bits added on top of the payload and fixed framing."""
        return len(self.path.siblings) * self.digest_len_bits + len(self.signature) * 8


def make_auth_packet(tree: AuthTree, index: int) -> AuthenticatedPacket:
    """Emit the authenticated packet for leaf ``index`` of a signed tree."""
    require_signed(tree)
    path = auth_path(tree, index)
    spec = tree.digest_spec
    assert tree.root_signature is not None and tree.sig_scheme_id is not None
    return AuthenticatedPacket(
        block_id=tree.block_id,
        packet_index=index,
        n=tree.n,
        payload=tree.packets[index].payload,
        path=path,
        signature=tree.root_signature,
        digest_spec_fingerprint=spec.fingerprint(),
        digest_len_bits=spec.out_len_bits,
        keyed=spec.keyed,
        sig_scheme_id=tree.sig_scheme_id,
    )


def verify_packet(pkt: AuthenticatedPacket, digest_spec: DigestSpec, sig_spec: SignatureSpec) -> Verdict:
    """Verify one packet using only its own fields plus the shared specs.

    ``REJECT_BAD_PATH`` flags a structurally unusable authentication path
    (bad index, wrong sibling count or width, empty payload);
    ``REJECT_BAD_SIGNATURE`` flags a failed cryptographic check, which a
    root signature cannot attribute to path bytes versus signature bytes.
    """
    if pkt.digest_spec_fingerprint != digest_spec.fingerprint():
        raise SpecMismatch("packet was built under a different digest spec")
    if pkt.digest_len_bits != digest_spec.out_len_bits or pkt.keyed != digest_spec.keyed:
        raise SpecMismatch("packet digest parameters disagree with the digest spec")
    if pkt.sig_scheme_id != int(sig_spec.kind):
        raise SpecMismatch("packet was signed under a different signature scheme")

    if not is_power_of_two(pkt.n):
        return Verdict.REJECT_BAD_PATH
    if not 0 <= pkt.packet_index < pkt.n:
        return Verdict.REJECT_BAD_PATH
    depth = pkt.n.bit_length() - 1
    size = digest_spec.out_len_bytes
    if len(pkt.path.siblings) != depth or any(len(s) != size for s in pkt.path.siblings):
        return Verdict.REJECT_BAD_PATH
    if not pkt.payload:
        return Verdict.REJECT_BAD_PATH

    root = fold_path(leaf_digest(pkt.payload, digest_spec), pkt.packet_index, pkt.path, digest_spec)
    message = pkt.block_id.to_bytes(8, "big") + pkt.n.to_bytes(4, "big") + root
    if verify_message(message, pkt.signature, sig_spec):
        return Verdict.ACCEPT
    return Verdict.REJECT_BAD_SIGNATURE


def serialize_packet(pkt: AuthenticatedPacket) -> bytes:
    flags = _FLAG_KEYED if pkt.keyed else 0
    head = _HEAD.pack(
        MAGIC,
        VERSION,
        flags,
        pkt.digest_len_bits,
        pkt.block_id,
        pkt.packet_index,
        pkt.n,
        len(pkt.payload),
    )
    parts = [
        head,
        pkt.payload,
        bytes([len(pkt.path.siblings)]),
        b"".join(pkt.path.siblings),
        bytes([pkt.sig_scheme_id]),
        struct.pack(">H", len(pkt.signature)),
        pkt.signature,
    ]
    return b"".join(parts)


def read_packet(data: bytes, offset: int, digest_spec: DigestSpec) -> tuple[AuthenticatedPacket, int]:
    """Parse one packet starting at ``offset``; returns (packet, next offset).

    Raises ``WireFormatError`` (with the failing byte offset) on malformed
    bytes and ``SpecMismatch`` when the wire digest parameters disagree
    with the supplied spec.
    """
    start = offset

    def need(count: int, what: str) -> None:
        if offset + count > len(data):
            raise WireFormatError(f"truncated while reading {what}", offset)

    need(_HEAD.size, "packet header")
    magic, version, flags, digest_len_bits, block_id, index, n, payload_len = _HEAD.unpack_from(data, offset)
    if magic != MAGIC:
        raise WireFormatError(f"bad magic 0x{magic:08X}", start)
    if version != VERSION:
        raise WireFormatError(f"unsupported version {version}", start + 4)
    if flags & ~_FLAG_KEYED:
        raise WireFormatError(f"reserved flag bits set: 0x{flags:02X}", start + 5)
    if digest_len_bits == 0 or digest_len_bits % 8 != 0:
        raise WireFormatError(f"digest_len_bits {digest_len_bits} not a positive multiple of 8", start + 6)
    if payload_len == 0:
        raise WireFormatError("empty payload", start + 24)
    if not is_power_of_two(n):
        raise WireFormatError(f"n={n} is not a power of two", start + 20)
    keyed = bool(flags & _FLAG_KEYED)
    if digest_len_bits != digest_spec.out_len_bits or keyed != digest_spec.keyed:
        raise SpecMismatch(
            f"wire digest parameters ({digest_len_bits} bits, keyed={keyed}) "
            f"disagree with the configured spec ({digest_spec.out_len_bits} bits, keyed={digest_spec.keyed})"
        )
    offset += _HEAD.size

    need(payload_len, "payload")
    payload = data[offset : offset + payload_len]
    offset += payload_len

    need(1, "path length")
    path_len = data[offset]
    if path_len != n.bit_length() - 1:
        raise WireFormatError(f"path_len {path_len} does not match log2(n)={n.bit_length() - 1}", offset)
    offset += 1

    sibling_bytes = digest_len_bits // 8
    need(path_len * sibling_bytes, "sibling digests")
    siblings = tuple(
        data[offset + i * sibling_bytes : offset + (i + 1) * sibling_bytes] for i in range(path_len)
    )
    offset += path_len * sibling_bytes

    need(1 + 2, "signature header")
    scheme_id = data[offset]
    (sig_len,) = struct.unpack_from(">H", data, offset + 1)
    offset += 3
    need(sig_len, "signature")
    signature = data[offset : offset + sig_len]
    offset += sig_len

    pkt = AuthenticatedPacket(
        block_id=block_id,
        packet_index=index,
        n=n,
        payload=payload,
        path=AuthPath(packet_index=index, siblings=siblings),
        signature=signature,
        digest_spec_fingerprint=digest_spec.fingerprint(),
        digest_len_bits=digest_len_bits,
        keyed=keyed,
        sig_scheme_id=scheme_id,
    )
    return pkt, offset


def deserialize_packet(data: bytes, digest_spec: DigestSpec) -> AuthenticatedPacket:
    """Parse exactly one packet occupying the whole buffer."""
    pkt, end = read_packet(data, 0, digest_spec)
    if end != len(data):
        raise WireFormatError(f"{len(data) - end} trailing bytes after packet", end)
    return pkt


def iter_packets(data: bytes, digest_spec: DigestSpec):
    """Yield packets from a concatenated archive until the buffer ends."""
    offset = 0
    while offset < len(data):
        pkt, offset = read_packet(data, offset, digest_spec)
        yield pkt
