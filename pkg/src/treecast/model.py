"""Closed-form timing model for tree-chained stream authentication.

One group of n packets costs three terms: hashing the n payloads into
leaf digests (n * Len_pac / Th_UMAC), hashing the n - 1 internal nodes
((n - 1) * InLen_UMAC / Th_UMAC), and one root signature (1 / Th_sig).
A stream of G groups therefore costs G times that sequentially. Under a
topology the computation time is the makespan implied by the group
assignment, plus configurable linear overhead terms for local
contention, global communication and application bookkeeping.

All arithmetic is exact (``fractions.Fraction``); values become floats
only when rendered for output. That lets callers assert identities like
"speedup equals M exactly when M divides G at zero overhead".
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence, Union

from .errors import InvalidInput, InvalidSplit, InvalidTiming, PartialBlockUnsupported
from .scheduling import Clustered, MessagePassing, Topology, assign_groups, assign_groups_clustered
from .tree import is_power_of_two

Rational = Union[int, Fraction, str]

# An improvement degree at or above this mark counts the configuration
# as done: adding processors past it mostly burns efficiency.
IMPROVEMENT_TARGET = Fraction(95, 100)


def as_fraction(value: Rational | float) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class OverheadParams:
    """Linear overhead coefficients, all in seconds, default zero.

    c0 + c1 * processors models local memory/contention cost, g0 + g1 *
    groups models global communication for dispatching work, and a0 is a
    flat application cost.
    """

    c0: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)
    g0: Fraction = Fraction(0)
    g1: Fraction = Fraction(0)
    a0: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("c0", "c1", "g0", "g1", "a0"):
            value = as_fraction(getattr(self, name))
            if value < 0:
                raise InvalidInput(f"overhead coefficient {name} must be >= 0, got {value}")
            object.__setattr__(self, name, value)

    def total(self, processors: int, groups: int) -> Fraction:
        return self.c0 + self.c1 * processors + self.g0 + self.g1 * groups + self.a0


@dataclass(frozen=True)
class ModelParams:
    """Workload and hardware constants the timing formulas consume."""

    len_pac_bits: int = 32 * 1024
    n: int = 1024
    inlen_umac_bits: int = 128
    outlen_umac_bits: int = 32
    th_umac_bps: Fraction = Fraction(79_200_000_000)
    th_sig_per_sec: Fraction = Fraction(4560)
    message_size_bits: int = 3 * 2**30
    overhead: OverheadParams = field(default_factory=OverheadParams)

    def __post_init__(self):
        object.__setattr__(self, "th_umac_bps", as_fraction(self.th_umac_bps))
        object.__setattr__(self, "th_sig_per_sec", as_fraction(self.th_sig_per_sec))
        for name in ("len_pac_bits", "n", "inlen_umac_bits", "outlen_umac_bits", "message_size_bits"):
            if getattr(self, name) <= 0:
                raise InvalidInput(f"{name} must be positive")
        if self.th_umac_bps <= 0 or self.th_sig_per_sec <= 0:
            raise InvalidInput("throughputs must be positive")
        if not is_power_of_two(self.n):
            raise InvalidInput(f"n must be a power of two, got {self.n}")

    def with_message_size(self, bits: int) -> "ModelParams":
        return replace(self, message_size_bits=bits)


@dataclass(frozen=True)
class TimingBreakdown:
    """Per-group cost split: leaf hashing, node hashing, signing. Seconds."""

    t1_s: Fraction
    t2_s: Fraction
    t3_s: Fraction
    t_g_s: Fraction

    def __post_init__(self):
        assert self.t_g_s == self.t1_s + self.t2_s + self.t3_s

    @property
    def tree_to_signature_ratio(self) -> Fraction:
        """(hashing time) / (signing time); drives the natural cluster size."""
        return (self.t1_s + self.t2_s) / self.t3_s


def group_time(params: ModelParams) -> TimingBreakdown:
    t1 = Fraction(params.n * params.len_pac_bits) / params.th_umac_bps
    t2 = Fraction((params.n - 1) * params.inlen_umac_bits) / params.th_umac_bps
    t3 = 1 / params.th_sig_per_sec
    return TimingBreakdown(t1_s=t1, t2_s=t2, t3_s=t3, t_g_s=t1 + t2 + t3)


def derive_group_count(message_size_bits: int, n: int, len_pac_bits: int) -> int:
    """Number of whole groups in a message; partial groups are rejected."""
    block_bits = n * len_pac_bits
    if message_size_bits % block_bits != 0:
        raise PartialBlockUnsupported(
            f"message of {message_size_bits} bits is not a whole number of "
            f"{block_bits}-bit groups (n={n} x {len_pac_bits} bits)"
        )
    return message_size_bits // block_bits


def sequential_time(params: ModelParams, G: int) -> Fraction:
    if G < 1:
        raise InvalidInput(f"G must be >= 1, got {G}")
    return G * group_time(params).t_g_s


def metrics(t_s: Fraction, t_par: Fraction, processor_count: int) -> tuple[Fraction, Fraction, Fraction]:
    """(speedup, efficiency, improvement degree) for one configuration."""
    if t_par <= 0:
        raise InvalidTiming(f"parallel time must be positive, got {t_par}")
    speedup = t_s / t_par
    efficiency = speedup / processor_count
    improvement = (t_s - t_par) / t_s
    return speedup, efficiency, improvement


@dataclass(frozen=True)
class ScenarioResult:
    """Model output for one (G, topology) configuration. Times in seconds."""

    G: int
    topology: Topology
    processor_count: int
    t_s_seconds: Fraction
    t_comp_seconds: Fraction
    t_ov_seconds: Fraction
    t_par_seconds: Fraction
    speedup: Fraction
    efficiency: Fraction
    improvement_degree: Fraction

    def __post_init__(self):
        assert self.t_par_seconds == self.t_comp_seconds + self.t_ov_seconds

    @property
    def meets_improvement_target(self) -> bool:
        return self.improvement_degree >= IMPROVEMENT_TARGET


def _scenario(params: ModelParams, G: int, topology: Topology, t_comp: Fraction) -> ScenarioResult:
    processors = topology.processor_count
    t_ov = params.overhead.total(processors, G)
    t_par = t_comp + t_ov
    t_s = sequential_time(params, G)
    speedup, efficiency, improvement = metrics(t_s, t_par, processors)
    return ScenarioResult(
        G=G,
        topology=topology,
        processor_count=processors,
        t_s_seconds=t_s,
        t_comp_seconds=t_comp,
        t_ov_seconds=t_ov,
        t_par_seconds=t_par,
        speedup=speedup,
        efficiency=efficiency,
        improvement_degree=improvement,
    )


def parallel_time_mps(params: ModelParams, G: int, M: int) -> ScenarioResult:
    """Makespan and metrics on an M-processor message-passing system."""
    assignment = assign_groups(G, M)
    t_comp = assignment.max_count * group_time(params).t_g_s
    return _scenario(params, G, MessagePassing(M), t_comp)


def cooperative_group_time(params: ModelParams, k: int, sync_coeff: Rational = 0) -> Fraction:
    """Cost of one group built by k processors together.

    Each processor hashes n/k payloads and the n/k - 1 nodes of its
    subtree in parallel; the coordinator then folds the k subtree roots
    (k - 1 node hashes) and signs. ``sync_coeff`` charges a flat cost
    per combine level for the single barrier.
    """
    if not is_power_of_two(k) or params.n % k != 0:
        raise InvalidSplit(f"k={k} must be a power of two dividing n={params.n}")
    chunk = params.n // k
    th = params.th_umac_bps
    subtree = Fraction(chunk * params.len_pac_bits) / th + Fraction((chunk - 1) * params.inlen_umac_bits) / th
    combine = Fraction((k - 1) * params.inlen_umac_bits) / th
    sign = 1 / params.th_sig_per_sec
    sync = as_fraction(sync_coeff) * (k.bit_length() - 1)
    return subtree + combine + sign + sync


def parallel_time_cluster(params: ModelParams, G: int, m: int, k: int,
                          sync_coeff: Rational = 0) -> ScenarioResult:
    """Makespan and metrics on m clusters of k processors.

    Every processor of a cluster owns the same number of whole groups,
    so a cluster's finish time is owned-per-processor group costs plus
    its cooperative groups' costs; the system computation time is the
    slowest cluster.
    """
    assignment = assign_groups_clustered(G, m, k)
    t_g = group_time(params).t_g_s
    t_coop = cooperative_group_time(params, k, sync_coeff)
    t_comp = Fraction(0)
    for c, total in enumerate(assignment.per_unit_counts):
        coop = assignment.cooperative_counts[c]
        owned_each = (total - coop) // k
        t_comp = max(t_comp, owned_each * t_g + coop * t_coop)
    return _scenario(params, G, Clustered(m, k), t_comp)


# --- configuration sweeps -------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    scenario_id: int
    message_bits: int
    n: int
    G: int
    sig_name: str
    result: ScenarioResult


def _point_key(topology: Topology):
    if isinstance(topology, MessagePassing):
        return (0, topology.processors, 0)
    return (1, topology.clusters, topology.cluster_size)


def sweep(params: ModelParams, points: Sequence[Topology],
          message_sizes_bits: Sequence[int] | None = None,
          sync_coeff: Rational = 0, sig_name: str = "test") -> list[SweepRow]:
    """Evaluate the model over every (message size, topology) pair.

    Rows are ordered by message size (as given), then message-passing
    points by M, then cluster points by (m, k).
    """
    sizes = list(message_sizes_bits) if message_sizes_bits is not None else [params.message_size_bits]
    ordered = sorted(points, key=_point_key)
    rows: list[SweepRow] = []
    for size in sizes:
        p = params.with_message_size(size)
        G = derive_group_count(size, p.n, p.len_pac_bits)
        for topology in ordered:
            if isinstance(topology, MessagePassing):
                result = parallel_time_mps(p, G, topology.processors)
            else:
                result = parallel_time_cluster(p, G, topology.clusters, topology.cluster_size, sync_coeff)
            rows.append(SweepRow(
                scenario_id=len(rows),
                message_bits=size,
                n=p.n,
                G=G,
                sig_name=sig_name,
                result=result,
            ))
    return rows


SWEEP_CSV_HEADER = ("scenario_id,message_bits,n,G,topology,M,m,k,sig_scheme,"
                    "t_s_ms,t_comp_ms,t_ov_ms,t_par_ms,speedup,efficiency,improvement")


def format_sig_figs(value: Fraction | float) -> str:
    """Render with 6 significant digits, keeping trailing zeros."""
    return f"{float(value):#.6g}"


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        r = row.result
        if isinstance(r.topology, MessagePassing):
            kind, M, m, k = "mps", str(r.topology.processors), "", ""
        else:
            kind, M, m, k = "cluster", "", str(r.topology.clusters), str(r.topology.cluster_size)
        cells = [
            str(row.scenario_id), str(row.message_bits), str(row.n), str(row.G),
            kind, M, m, k, row.sig_name,
            format_sig_figs(r.t_s_seconds * 1000),
            format_sig_figs(r.t_comp_seconds * 1000),
            format_sig_figs(r.t_ov_seconds * 1000),
            format_sig_figs(r.t_par_seconds * 1000),
            format_sig_figs(r.speedup),
            format_sig_figs(r.efficiency),
            format_sig_figs(r.improvement_degree),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
