"""Short keyed digests used for tree leaves and internal nodes.

The digest is a truncation of SHA-256 over ``key || separator || data``.
A one-byte domain separator keeps leaf digests (0x00) and node digests
(0x01) in disjoint input spaces, so a leaf value can never be replayed
as an internal node. Truncation lengths are byte-aligned, between 8 and
256 bits; 32 bits is the usual operating point for low per-packet
overhead.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import InvalidInput

_LEAF_SEP = b"\x00"
_NODE_SEP = b"\x01"

MIN_OUT_LEN_BITS = 8
MAX_OUT_LEN_BITS = 256


@dataclass(frozen=True)
class DigestSpec:
    """Parameters of the short digest: output length and optional key.

    ``keyed=False`` requires an empty key; receivers then need no shared
    digest secret to recompute the tree.
    """

    out_len_bits: int
    key: bytes = b""
    keyed: bool = False

    def __post_init__(self):
        if self.out_len_bits % 8 != 0:
            raise InvalidInput(f"out_len_bits must be a multiple of 8, got {self.out_len_bits}")
        if not MIN_OUT_LEN_BITS <= self.out_len_bits <= MAX_OUT_LEN_BITS:
            raise InvalidInput(
                f"out_len_bits must be in [{MIN_OUT_LEN_BITS}, {MAX_OUT_LEN_BITS}], got {self.out_len_bits}"
            )
        if not self.keyed and self.key:
            raise InvalidInput("unkeyed digest spec must have an empty key")

    @property
    def out_len_bytes(self) -> int:
        return self.out_len_bits // 8

    def fingerprint(self) -> bytes:
        """4-byte tag identifying this spec: unkeyed SHA-256 of key || out_len_bits (u16 BE)."""
        return hashlib.sha256(self.key + self.out_len_bits.to_bytes(2, "big")).digest()[:4]


def leaf_digest(payload: bytes, spec: DigestSpec) -> bytes:
    """Digest of a packet payload, used at tree level 0."""
    if not payload:
        raise InvalidInput("payload must be non-empty")
    # two updates: hashing the payload in place (no concatenation copy)
    # lets the C hash loop run outside the GIL for large packets
    h = hashlib.sha256(spec.key + _LEAF_SEP)
    h.update(payload)
    return h.digest()[: spec.out_len_bytes]


def node_digest(left: bytes, right: bytes, spec: DigestSpec) -> bytes:
    """Digest of an internal node over its two children, order-sensitive."""
    size = spec.out_len_bytes
    if len(left) != size or len(right) != size:
        raise InvalidInput(
            f"child digests must each be {size} bytes, got {len(left)} and {len(right)}"
        )
    return hashlib.sha256(spec.key + _NODE_SEP + left + right).digest()[:size]
