"""Work distribution rules for the two levels of parallelism.

Coarse grain: whole groups (blocks) are spread over the processors of a
message-passing system, or over the clusters of a multi-cluster system,
as evenly as the integer counts allow -- the first units absorb the
remainder. Medium grain: inside a cluster, groups that cannot be owned
whole by a single processor are executed cooperatively by all k cluster
processors, each hashing a contiguous subtree, with one coordinator
folding the subtree roots and signing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput, InvalidSplit
from .tree import is_power_of_two


@dataclass(frozen=True)
class MessagePassing:
    """M independent processors with private memories."""

    processors: int

    def __post_init__(self):
        if self.processors < 1:
            raise InvalidInput(f"processor count must be >= 1, got {self.processors}")

    @property
    def processor_count(self) -> int:
        return self.processors

    def describe(self) -> str:
        return f"mps({self.processors})"


@dataclass(frozen=True)
class Clustered:
    """m clusters of k shared-memory processors each.

    k must be a power of two so a cooperative group can be split into k
    equal subtrees.
    """

    clusters: int
    cluster_size: int

    def __post_init__(self):
        if self.clusters < 1:
            raise InvalidInput(f"cluster count must be >= 1, got {self.clusters}")
        if not is_power_of_two(self.cluster_size):
            raise InvalidInput(f"cluster size must be a power of two >= 1, got {self.cluster_size}")

    @property
    def processor_count(self) -> int:
        return self.clusters * self.cluster_size

    def describe(self) -> str:
        return f"cluster({self.clusters}x{self.cluster_size})"


Topology = MessagePassing | Clustered


@dataclass(frozen=True)
class Assignment:
    """Group counts per execution unit.

    For message passing, ``per_unit_counts[i]`` is the number of groups
    processor i executes and ``cooperative_counts`` is None. For
    clusters, ``per_unit_counts[c]`` is the total group count of cluster
    c, of which ``cooperative_counts[c]`` are executed cooperatively by
    all k processors; the rest are owned whole, (total - coop) / k per
    processor.
    """

    per_unit_counts: tuple[int, ...]
    cooperative_counts: tuple[int, ...] | None = None

    @property
    def total(self) -> int:
        return sum(self.per_unit_counts)

    @property
    def max_count(self) -> int:
        return max(self.per_unit_counts)

    def owned_per_processor(self, cluster: int, cluster_size: int) -> int:
        assert self.cooperative_counts is not None
        return (self.per_unit_counts[cluster] - self.cooperative_counts[cluster]) // cluster_size


def assign_groups(G: int, M: int) -> Assignment:
    """Spread G groups over M processors, first processors taking the remainder.

    M > G leaves M - G processors idle; otherwise each processor gets
    floor(G/M) groups and the first G mod M get one extra.
    """
    if G < 1 or M < 1:
        raise InvalidInput(f"need G >= 1 and M >= 1, got G={G}, M={M}")
    if M >= G:
        counts = (1,) * G + (0,) * (M - G)
    else:
        base, extra = divmod(G, M)
        counts = (base + 1,) * extra + (base,) * (M - extra)
    return Assignment(per_unit_counts=counts)


def assign_groups_clustered(G: int, m: int, k: int) -> Assignment:
    """Spread G groups over m clusters of k processors.

    Cluster totals follow the same remainder rule as processors; within
    a cluster holding N groups, each processor owns floor(N/k) whole
    groups and the remaining N mod k run cooperatively on all k.
    """
    if k < 1:
        raise InvalidInput(f"cluster size must be >= 1, got {k}")
    cluster_counts = assign_groups(G, m).per_unit_counts
    cooperative = tuple(count % k for count in cluster_counts)
    return Assignment(per_unit_counts=cluster_counts, cooperative_counts=cooperative)


@dataclass(frozen=True)
class TreeSplit:
    """Plan for k workers to build one n-leaf tree cooperatively.

    Each worker hashes a contiguous range of n/k leaves up to its
    subtree root (``subtree_levels`` levels above the leaves); a single
    coordinator then computes the ``combine_node_count`` = k - 1 node
    digests of the top ``combine_levels`` levels and signs the root.
    """

    n: int
    k: int
    ranges: tuple[tuple[int, int], ...]
    subtree_levels: int
    combine_levels: int
    combine_node_count: int


def split_tree_work(n: int, k: int) -> TreeSplit:
    if not is_power_of_two(k) or k > n:
        raise InvalidSplit(f"cannot split {n} leaves over k={k} workers (k must be a power of two <= n)")
    if not is_power_of_two(n):
        raise InvalidSplit(f"leaf count must be a power of two, got {n}")
    chunk = n // k
    ranges = tuple((i * chunk, (i + 1) * chunk) for i in range(k))
    return TreeSplit(
        n=n,
        k=k,
        ranges=ranges,
        subtree_levels=chunk.bit_length() - 1,
        combine_levels=k.bit_length() - 1,
        combine_node_count=k - 1,
    )
