"""Degree-2 digest tree over one block of packets.

A block of ``n`` packets (``n`` a power of two) is authenticated by
hashing each payload to a leaf digest, hashing pairs upward until a
single root remains, and signing only the root. Level 0 holds the ``n``
leaf digests; level ``log2(n)`` holds the root. Each packet can then be
verified on its own from its ``log2(n)`` sibling digests plus the block
signature, so losing any subset of the block never prevents verifying
the packets that did arrive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .digest import DigestSpec, leaf_digest, node_digest
from .errors import (
    IndexOutOfRange,
    InvalidBlockSize,
    InvalidInput,
    TreeNotSigned,
)
from .signature import SignatureSpec, sign_message


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Packet:
    """A stream packet: payload bytes plus its declared bit length."""

    payload: bytes
    declared_len_bits: int = -1  # -1: derive from payload

    def __post_init__(self):
        if self.declared_len_bits == -1:
            object.__setattr__(self, "declared_len_bits", len(self.payload) * 8)
        if not self.payload:
            raise InvalidInput("packet payload must be non-empty")
        if len(self.payload) * 8 != self.declared_len_bits:
            raise InvalidInput(
                f"payload is {len(self.payload) * 8} bits but declared_len_bits={self.declared_len_bits}"
            )


@dataclass(frozen=True)
class AuthPath:
    """Sibling digests linking one leaf to the root, leaf level first.

    ``siblings[l]`` is the sibling of the ancestor of the leaf at tree
    level ``l``; there are exactly ``log2(n)`` of them.
    """

    packet_index: int
    siblings: tuple[bytes, ...]


@dataclass
class AuthTree:
    """Built digest tree for one block, optionally with a signed root.

    ``levels[0]`` are the n leaf digests in packet order and
    ``levels[log2(n)][0]`` is the root. The source packets and digest
    spec are kept so authenticated packets can be emitted directly.
    """

    block_id: int
    n: int
    levels: list[list[bytes]]
    packets: tuple[Packet, ...]
    digest_spec: DigestSpec
    root_signature: bytes | None = None
    sig_scheme_id: int | None = None

    @property
    def depth(self) -> int:
        """log2(n): number of levels above the leaves."""
        return self.n.bit_length() - 1

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    def signing_message(self) -> bytes:
        """Bytes covered by the root signature: block_id (u64) || n (u32) || root."""
        return self.block_id.to_bytes(8, "big") + self.n.to_bytes(4, "big") + self.root


def build_tree(block_id: int, packets: list[Packet] | tuple[Packet, ...], spec: DigestSpec) -> AuthTree:
    """Hash a block of n packets into a complete degree-2 digest tree.

    n must be a power of two; partial blocks are rejected rather than
    padded.
    """
    n = len(packets)
    if not is_power_of_two(n):
        raise InvalidBlockSize(f"block must hold a power-of-two packet count, got {n}")
    levels = [[leaf_digest(p.payload, spec) for p in packets]]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([node_digest(prev[i], prev[i + 1], spec) for i in range(0, len(prev), 2)])
    return AuthTree(block_id=block_id, n=n, levels=levels, packets=tuple(packets), digest_spec=spec)


def auth_path(tree: AuthTree, index: int) -> AuthPath:
    """Extract the sibling path for the leaf at ``index``."""
    if not 0 <= index < tree.n:
        raise IndexOutOfRange(f"index {index} outside [0, {tree.n})")
    siblings = tuple(tree.levels[level][(index >> level) ^ 1] for level in range(tree.depth))
    return AuthPath(packet_index=index, siblings=siblings)


def fold_path(leaf: bytes, index: int, path: AuthPath, spec: DigestSpec) -> bytes:
    """Recompute the root from a leaf digest and its sibling path.

    At each level the bit of ``index`` decides whether the running
    digest is the left or the right child.
    """
    acc = leaf
    for level, sibling in enumerate(path.siblings):
        if (index >> level) & 1:
            acc = node_digest(sibling, acc, spec)
        else:
            acc = node_digest(acc, sibling, spec)
    return acc


def sign_root(tree: AuthTree, spec: SignatureSpec) -> bytes:
    """Sign the tree root; stores the signature on the tree and returns it."""
    signature = sign_message(tree.signing_message(), spec)
    tree.root_signature = signature
    tree.sig_scheme_id = int(spec.kind)
    return signature


def require_signed(tree: AuthTree) -> None:
    if tree.root_signature is None:
        raise TreeNotSigned(f"block {tree.block_id}: root has not been signed")
