"""Tree-chained multicast stream authentication toolkit.

Builds a degree-2 digest tree over each block of n packets, signs only
the root, and attaches to every packet the sibling digests it needs to
verify on its own -- one signature amortized over a whole block, loss
tolerance by construction. On top of the protocol sit a parallel
execution engine (group dispatch plus cooperative intra-group tree
building), an exact analytical timing model with speedup/efficiency
sweeps, and a lossy/adversarial channel simulator.
"""

from .channel import (
    AttackMode,
    AttackModel,
    BurstLoss,
    ChannelModel,
    DeliveryReport,
    IIDLoss,
    Transmission,
    receiver_verify_all,
    transmit,
)
from .digest import DigestSpec, leaf_digest, node_digest
from .engine import (
    EngineReport,
    WorkerStats,
    build_group,
    build_subtree,
    combine_subtrees,
    process_stream_parallel,
    process_stream_sequential,
)
from .errors import (
    ConfigError,
    IndexOutOfRange,
    InvalidBlockSize,
    InvalidInput,
    InvalidSplit,
    InvalidTiming,
    PartialBlockUnsupported,
    SpecMismatch,
    TreecastError,
    TreeNotSigned,
    UnsupportedScheme,
    WireFormatError,
)
from .model import (
    IMPROVEMENT_TARGET,
    ModelParams,
    OverheadParams,
    ScenarioResult,
    SweepRow,
    TimingBreakdown,
    cooperative_group_time,
    derive_group_count,
    group_time,
    metrics,
    parallel_time_cluster,
    parallel_time_mps,
    sequential_time,
    sweep,
    sweep_to_csv,
)
from .packet import (
    AuthenticatedPacket,
    Verdict,
    deserialize_packet,
    iter_packets,
    make_auth_packet,
    read_packet,
    serialize_packet,
    verify_packet,
)
from .scheduling import (
    Assignment,
    Clustered,
    MessagePassing,
    Topology,
    TreeSplit,
    assign_groups,
    assign_groups_clustered,
    split_tree_work,
)
from .signature import SignatureKind, SignatureSpec, sign_message, verify_message
from .tree import (
    AuthPath,
    AuthTree,
    Packet,
    auth_path,
    build_tree,
    fold_path,
    sign_root,
)

__version__ = "0.1.0"
