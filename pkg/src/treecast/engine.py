"""Parallel block authentication.

Executes a stream of groups (blocks) under a logical topology: every
whole group is built and signed independently by the processor that
owns it, and a cluster's leftover groups are built cooperatively, each
processor hashing one contiguous subtree with the cluster's first
processor folding the subtree roots, signing, and emitting packets.

Logical processors are backed by one thread each; when the host has
fewer cores the OS multiplexes them. Output is assembled per group
index, so the packet bytes are identical to a sequential run no matter
how the work was scheduled. CPython's hash primitives release the GIL
on multi-kilobyte inputs, which is where the real concurrency comes
from.
"""

from __future__ import annotations

import queue
import threading
import time
from concurrent.futures import Future
from dataclasses import dataclass

from .digest import DigestSpec
from .errors import InvalidBlockSize
from .packet import AuthenticatedPacket, make_auth_packet
from .scheduling import (
    Clustered,
    MessagePassing,
    Topology,
    assign_groups,
    assign_groups_clustered,
    split_tree_work,
)
from .signature import SignatureSpec
from .tree import AuthTree, Packet, build_tree, is_power_of_two, leaf_digest, node_digest, sign_root


@dataclass
class WorkerStats:
    worker_id: int
    groups_owned: int = 0
    cooperative_groups_participated: int = 0
    busy_s: float = 0.0


@dataclass
class EngineReport:
    """Per-worker accounting for one parallel run."""

    workers: list[WorkerStats]
    wall_s: float
    reference_s: float | None = None

    CSV_HEADER = "worker_id,groups_owned,cooperative_groups_participated,busy_ms,wall_ms_total,measured_speedup"

    @property
    def measured_speedup(self) -> float | None:
        if self.reference_s is None or self.wall_s <= 0:
            return None
        return self.reference_s / self.wall_s

    def to_csv(self) -> str:
        speedup = self.measured_speedup
        speedup_cell = "" if speedup is None else f"{speedup:.4f}"
        lines = [self.CSV_HEADER]
        for w in self.workers:
            lines.append(
                f"{w.worker_id},{w.groups_owned},{w.cooperative_groups_participated},"
                f"{w.busy_s * 1e3:.3f},{self.wall_s * 1e3:.3f},{speedup_cell}"
            )
        return "\n".join(lines) + "\n"


def build_group(block_id: int, packets: list[Packet] | tuple[Packet, ...],
                digest_spec: DigestSpec, sig_spec: SignatureSpec) -> list[AuthenticatedPacket]:
    """Build, sign and emit one whole group: the sequential unit of work."""
    tree = build_tree(block_id, packets, digest_spec)
    sign_root(tree, sig_spec)
    return [make_auth_packet(tree, i) for i in range(tree.n)]


def build_subtree(packets, lo: int, hi: int, spec: DigestSpec) -> list[list[bytes]]:
    """Hash leaves [lo, hi) up to their subtree root; returns the local levels."""
    levels = [[leaf_digest(packets[i].payload, spec) for i in range(lo, hi)]]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([node_digest(prev[i], prev[i + 1], spec) for i in range(0, len(prev), 2)])
    return levels


def combine_subtrees(block_id: int, packets, locals_: list[list[list[bytes]]],
                     spec: DigestSpec) -> AuthTree:
    """Fold k subtree level-stacks into the full tree; the k - 1 top node
    digests are computed here by the coordinator."""
    subtree_levels = len(locals_[0])
    levels = [sum((loc[lvl] for loc in locals_), []) for lvl in range(subtree_levels)]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([node_digest(prev[i], prev[i + 1], spec) for i in range(0, len(prev), 2)])
    return AuthTree(block_id=block_id, n=len(packets), levels=levels,
                    packets=tuple(packets), digest_spec=spec)


def process_stream_sequential(stream, digest_spec: DigestSpec, sig_spec: SignatureSpec,
                              block_ids=None) -> list[AuthenticatedPacket]:
    """Authenticate every group in order on the calling thread."""
    block_ids = block_ids if block_ids is not None else range(len(stream))
    out: list[AuthenticatedPacket] = []
    for bid, block in zip(block_ids, stream):
        out.extend(build_group(bid, block, digest_spec, sig_spec))
    return out


class _Worker(threading.Thread):
    """One logical processor: runs submitted callables in FIFO order."""

    def __init__(self, worker_id: int):
        super().__init__(name=f"treecast-worker-{worker_id}", daemon=True)
        self.stats = WorkerStats(worker_id)
        self._tasks: queue.SimpleQueue = queue.SimpleQueue()

    def submit(self, fn) -> Future:
        future: Future = Future()
        self._tasks.put((fn, future))
        return future

    def stop(self) -> None:
        self._tasks.put(None)

    def run(self) -> None:
        while True:
            item = self._tasks.get()
            if item is None:
                return
            fn, future = item
            start = time.perf_counter()
            try:
                result = fn()
            except BaseException as exc:  # propagated through the future
                self.stats.busy_s += time.perf_counter() - start
                future.set_exception(exc)
            else:
                self.stats.busy_s += time.perf_counter() - start
                future.set_result(result)


def _validate_stream(stream) -> int:
    if not stream:
        raise InvalidBlockSize("stream must contain at least one block")
    n = len(stream[0])
    if not is_power_of_two(n):
        raise InvalidBlockSize(f"block size must be a power of two, got {n}")
    for i, block in enumerate(stream):
        if len(block) != n:
            raise InvalidBlockSize(f"block {i} has {len(block)} packets, expected {n}")
    return n


def process_stream_parallel(stream, topology: Topology, digest_spec: DigestSpec,
                            sig_spec: SignatureSpec, block_ids=None,
                            measure_reference: bool = True,
                            ) -> tuple[list[AuthenticatedPacket], EngineReport]:
    """Authenticate a stream of G blocks under the given topology.

    Returns the packets in stream order (bit-identical to the sequential
    result) and an EngineReport. With ``measure_reference`` a sequential
    run is timed first so the report carries a measured speedup; skip it
    when only the packets are wanted.
    """
    n = _validate_stream(stream)
    G = len(stream)
    ids = list(block_ids) if block_ids is not None else list(range(G))
    if len(ids) != G:
        raise InvalidBlockSize(f"{len(ids)} block ids for {G} blocks")

    reference_s = None
    if measure_reference:
        t0 = time.perf_counter()
        process_stream_sequential(stream, digest_spec, sig_spec, ids)
        reference_s = time.perf_counter() - t0

    results: list[list[AuthenticatedPacket] | None] = [None] * G
    workers = [_Worker(i) for i in range(topology.processor_count)]

    def owned_task(g: int):
        def run():
            results[g] = build_group(ids[g], stream[g], digest_spec, sig_spec)
        return run

    t0 = time.perf_counter()
    for w in workers:
        w.start()
    try:
        if isinstance(topology, MessagePassing):
            assignment = assign_groups(G, topology.processors)
            futures = []
            g = 0
            for p, count in enumerate(assignment.per_unit_counts):
                workers[p].stats.groups_owned = count
                for _ in range(count):
                    futures.append(workers[p].submit(owned_task(g)))
                    g += 1
            for f in futures:
                f.result()
        else:
            _run_clustered(stream, ids, topology, digest_spec, sig_spec, workers, results)
    finally:
        for w in workers:
            w.stop()
        for w in workers:
            w.join()
    wall_s = time.perf_counter() - t0

    packets = [pkt for group in results for pkt in group]  # type: ignore[union-attr]
    report = EngineReport(workers=[w.stats for w in workers], wall_s=wall_s, reference_s=reference_s)
    return packets, report


def _run_clustered(stream, ids, topology: Clustered, digest_spec, sig_spec, workers, results):
    m, k = topology.clusters, topology.cluster_size
    G = len(stream)
    n = len(stream[0])
    assignment = assign_groups_clustered(G, m, k)
    if any(assignment.cooperative_counts) and k > 1:
        split_tree_work(n, k)  # fail fast before any thread holds work

    owned_futures = []
    controllers: list[threading.Thread] = []
    controller_errors: list[BaseException] = []
    errors_lock = threading.Lock()

    g = 0
    for c in range(m):
        total = assignment.per_unit_counts[c]
        coop = assignment.cooperative_counts[c]
        owned_each = (total - coop) // k
        cluster_workers = workers[c * k : (c + 1) * k]

        for w in cluster_workers:
            w.stats.groups_owned = owned_each
            w.stats.cooperative_groups_participated = coop
        for w in cluster_workers:
            for _ in range(owned_each):
                owned_futures.append(w.submit(_owned(stream, ids, g, digest_spec, sig_spec, results)))
                g += 1
        coop_groups = list(range(g, g + coop))
        g += coop

        if coop_groups:
            controller = threading.Thread(
                target=_run_cooperative,
                args=(stream, ids, coop_groups, cluster_workers, digest_spec, sig_spec,
                      results, controller_errors, errors_lock),
                name=f"treecast-cluster-{c}",
                daemon=True,
            )
            controllers.append(controller)
            controller.start()

    for f in owned_futures:
        f.result()
    for controller in controllers:
        controller.join()
    if controller_errors:
        raise controller_errors[0]


def _owned(stream, ids, g, digest_spec, sig_spec, results):
    def run():
        results[g] = build_group(ids[g], stream[g], digest_spec, sig_spec)
    return run


def _run_cooperative(stream, ids, coop_groups, cluster_workers, digest_spec, sig_spec,
                     results, errors, errors_lock):
    """Drive one cluster's cooperative groups, one tree at a time.

    Worker queues are FIFO, so subtree tasks queued here run after the
    owned groups already submitted to the same workers. The single
    synchronization point per tree is the wait for all k subtree roots
    before the coordinator (first processor of the cluster) combines and
    signs.
    """
    k = len(cluster_workers)
    n = len(stream[0])
    try:
        split = split_tree_work(n, k)
        for g in coop_groups:
            block = stream[g]
            subtree_futures = [
                worker.submit(_subtree(block, lo, hi, digest_spec))
                for worker, (lo, hi) in zip(cluster_workers, split.ranges)
            ]
            locals_ = [f.result() for f in subtree_futures]
            coordinator = cluster_workers[0]
            done = coordinator.submit(
                _combine(ids[g], block, locals_, digest_spec, sig_spec, results, g)
            )
            done.result()
    except BaseException as exc:
        with errors_lock:
            errors.append(exc)


def _subtree(block, lo, hi, digest_spec):
    def run():
        return build_subtree(block, lo, hi, digest_spec)
    return run


def _combine(block_id, block, locals_, digest_spec, sig_spec, results, g):
    def run():
        tree = combine_subtrees(block_id, block, locals_, digest_spec)
        sign_root(tree, sig_spec)
        results[g] = [make_auth_packet(tree, i) for i in range(tree.n)]
    return run
