"""Command-line front end.

Subcommands::

    treecast sign     --in FILE --out FILE --config FILE
    treecast verify   --in FILE --config FILE
    treecast model    --config FILE --sweep "M=1..32"
                      [--topology cluster --m RANGE --k RANGE]
    treecast simulate --in FILE --config FILE [--seed N]
    treecast bench    --config FILE

``sign`` splits a raw stream file into groups of n packets of
len_pac_bits each, authenticates them under the configured topology and
writes the concatenated wire-format packets; the archive bytes do not
depend on the topology. ``verify`` re-checks an archive packet by
packet (exit 0 all accepted, 1 any rejected, 2 parse failure). ``model``
prints analytical sweep rows as CSV, ``simulate`` pushes an archive
through a lossy/polluting channel, and ``bench`` times a synthetic
workload against the model's prediction.

Ranges are written ``1..8``, a single value ``4``, or a comma list
``1,2,4``.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from .config import RunConfig, load_config
from .engine import process_stream_parallel
from .errors import ConfigError, PartialBlockUnsupported, SpecMismatch, TreecastError, WireFormatError
from .channel import receiver_verify_all, transmit
from .model import (
    derive_group_count,
    format_sig_figs,
    parallel_time_cluster,
    parallel_time_mps,
    sweep,
    sweep_to_csv,
)
from .packet import read_packet, serialize_packet, verify_packet
from .scheduling import Clustered, MessagePassing
from .tree import Packet

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2


def parse_range(text: str) -> list[int]:
    """'1..8' | '4' | '1,2,4' | '' -> sorted list of ints."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, _, hi = part.partition("..")
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(part))
    return values


def _packet_len_bytes(cfg: RunConfig) -> int:
    if cfg.len_pac_bits % 8 != 0:
        raise ConfigError("len_pac_bits", "must be a multiple of 8 to frame file bytes")
    return cfg.len_pac_bits // 8


def _split_stream(data: bytes, cfg: RunConfig) -> list[list[Packet]]:
    pac_bytes = _packet_len_bytes(cfg)
    block_bytes = cfg.n * pac_bytes
    if len(data) == 0 or len(data) % block_bytes != 0:
        raise PartialBlockUnsupported(
            f"input is {len(data)} bytes; expected a positive multiple of "
            f"{block_bytes} bytes (n={cfg.n} packets of {pac_bytes} bytes)"
        )
    blocks = []
    for start in range(0, len(data), block_bytes):
        block = [
            Packet(data[start + i * pac_bytes : start + (i + 1) * pac_bytes])
            for i in range(cfg.n)
        ]
        blocks.append(block)
    return blocks


def cmd_sign(args) -> int:
    cfg = load_config(args.config)
    with open(args.infile, "rb") as fh:
        data = fh.read()
    blocks = _split_stream(data, cfg)
    packets, _ = process_stream_parallel(
        blocks, cfg.topology(), cfg.digest_spec(), cfg.sig_spec(), measure_reference=False
    )
    with open(args.outfile, "wb") as fh:
        for pkt in packets:
            fh.write(serialize_packet(pkt))
    print(f"signed {len(blocks)} groups ({len(packets)} packets) -> {args.outfile}", file=sys.stderr)
    return EXIT_OK


def _read_archive(path: str, cfg: RunConfig):
    with open(path, "rb") as fh:
        data = fh.read()
    digest_spec = cfg.digest_spec()
    packets = []
    offset = 0
    while offset < len(data):
        pkt, offset = read_packet(data, offset, digest_spec)
        packets.append(pkt)
    return packets


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    try:
        packets = _read_archive(args.infile, cfg)
    except WireFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    digest_spec, sig_spec = cfg.digest_spec(), cfg.sig_spec()
    print("seq,block_id,packet_index,verdict")
    all_ok = True
    for seq, pkt in enumerate(packets):
        verdict = verify_packet(pkt, digest_spec, sig_spec)
        all_ok &= verdict.is_accept
        print(f"{seq},{pkt.block_id},{pkt.packet_index},{verdict.value}")
    return EXIT_OK if all_ok else EXIT_REJECTED


def cmd_model(args) -> int:
    cfg = load_config(args.config)
    params = cfg.model_params()
    if args.topology == "cluster":
        ms = parse_range(args.m or "")
        ks = parse_range(args.k or "")
        points = [Clustered(m, k) for m in ms for k in ks]
    else:
        name, _, values = (args.sweep or "").partition("=")
        if name.strip() not in ("", "M"):
            raise ConfigError("sweep", f"expected 'M=RANGE', got '{args.sweep}'")
        points = [MessagePassing(M) for M in parse_range(values)]
    rows = sweep(params, points, sync_coeff=cfg.sync_coeff_s, sig_name="test")
    sys.stdout.write(sweep_to_csv(rows))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    try:
        packets = _read_archive(args.infile, cfg)
    except WireFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    channel = cfg.channel(seed=args.seed)
    attack = cfg.attack()
    transmission = transmit(packets, channel, attack)
    report = receiver_verify_all(transmission, cfg.digest_spec(), cfg.sig_spec())
    sys.stdout.write(report.to_csv(channel, attack))
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = load_config(args.config)
    params = cfg.model_params()
    G = derive_group_count(cfg.message_size_bits, cfg.n, cfg.len_pac_bits)
    pac_bytes = _packet_len_bytes(cfg)
    rng = random.Random(cfg.seed)
    blocks = [[Packet(rng.randbytes(pac_bytes)) for _ in range(cfg.n)] for _ in range(G)]

    topology = cfg.topology()
    t0 = time.perf_counter()
    _, report = process_stream_parallel(
        blocks, topology, cfg.digest_spec(), cfg.sig_spec(), measure_reference=True
    )
    elapsed = time.perf_counter() - t0

    zero_overhead = params.with_message_size(cfg.message_size_bits)
    if isinstance(topology, MessagePassing):
        predicted = parallel_time_mps(zero_overhead, G, topology.processors).speedup
    else:
        predicted = parallel_time_cluster(
            zero_overhead, G, topology.clusters, topology.cluster_size, cfg.sync_coeff_s
        ).speedup

    model_cell = format_sig_figs(predicted)
    lines = report.to_csv().splitlines()
    print(lines[0] + ",model_speedup")
    for line in lines[1:]:
        print(line + f",{model_cell}")
    print(
        f"bench: G={G} n={cfg.n} topology={topology.describe()} "
        f"measured_speedup={report.measured_speedup:.3f} model_speedup={model_cell} "
        f"(total {elapsed:.3f}s)",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecast",
        description="Tree-chained multicast stream authentication toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sign = sub.add_parser("sign", help="authenticate a stream file into a packet archive")
    p_sign.add_argument("--in", dest="infile", required=True)
    p_sign.add_argument("--out", dest="outfile", required=True)
    p_sign.add_argument("--config", required=True)
    p_sign.set_defaults(handler=cmd_sign)

    p_verify = sub.add_parser("verify", help="verify every packet of an archive")
    p_verify.add_argument("--in", dest="infile", required=True)
    p_verify.add_argument("--config", required=True)
    p_verify.set_defaults(handler=cmd_verify)

    p_model = sub.add_parser("model", help="print analytical sweep rows as CSV")
    p_model.add_argument("--config", required=True)
    p_model.add_argument("--sweep", default="", help='message-passing range, e.g. "M=1..32"')
    p_model.add_argument("--topology", choices=("mps", "cluster"), default="mps")
    p_model.add_argument("--m", default="", help="cluster-count range (cluster topology)")
    p_model.add_argument("--k", default="", help="cluster-size range (cluster topology)")
    p_model.set_defaults(handler=cmd_model)

    p_sim = sub.add_parser("simulate", help="push an archive through a lossy channel")
    p_sim.add_argument("--in", dest="infile", required=True)
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.set_defaults(handler=cmd_simulate)

    p_bench = sub.add_parser("bench", help="time a synthetic workload vs the model")
    p_bench.add_argument("--config", required=True)
    p_bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, PartialBlockUnsupported, SpecMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except TreecastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
