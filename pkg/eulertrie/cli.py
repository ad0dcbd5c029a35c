"""Command line interface for eulertrie."""
from __future__ import annotations

import argparse
import logging
import os
import sqlite3
import sys
import time
from dataclasses import dataclass
from typing import Iterable, Optional

from dotenv import load_dotenv

from .counting import DEFAULT_BRUTE_CAP, brute_force_trails, count_best
from .db import get_connection, initialize_db, list_recent_bench_runs, record_bench_run
from .exploration import Enumerator, StateTree, decode_trails, enumerate_trails
from .graph import (
    EulerianInputError,
    GraphFormatError,
    InfeasibleGraphError,
    check_eulerian,
    parse_edge_list,
    subdivide,
    write_edge_list,
)
from .models import BenchReport, EnumerationMode, EulerInfo, GenSpec, Multigraph, NodeRef
from .output import TrieFormat, format_trail_edges, format_trail_nodes, trie_emit, trie_to_dot
from .testkit import GenerationError, gen_random_eulerian

logger = logging.getLogger(__name__)

FORMATS = ("trails-edges", "trails-nodes", "trie", "trie-shared", "count", "dot")
COUNTERS = ("best", "enumerate", "brute")
BENCH_DEFAULT_MAX_TRAILS = 10_000


class UsageError(ValueError):
    """Raised when command line flags contradict each other."""


@dataclass
class RunConfig:
    """Validated settings of one CLI invocation."""

    command: str
    input_path: Optional[str] = None
    mode: EnumerationMode = EnumerationMode.SIMPLE
    start: Optional[str] = None
    max_trails: Optional[int] = None
    output_format: str = "trails-edges"
    counter: str = "best"
    seed: int = 0
    validate: bool = False
    gen_n: int = 1000
    gen_cycles: int = 200
    cap: int = 1
    db_path: Optional[str] = None
    limit: int = 10
    brute_cap: int = DEFAULT_BRUTE_CAP

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "RunConfig":
        config = cls(
            command=args.command,
            input_path=getattr(args, "input", None),
            mode=EnumerationMode(getattr(args, "mode", EnumerationMode.SIMPLE.value)),
            start=getattr(args, "start", None),
            max_trails=getattr(args, "max_trails", None),
            output_format=getattr(args, "format", "trails-edges"),
            counter=getattr(args, "counter", "best"),
            seed=getattr(args, "seed", 0),
            validate=getattr(args, "validate", False),
            gen_n=getattr(args, "gen_n", 1000),
            gen_cycles=getattr(args, "gen_cycles", 200),
            cap=getattr(args, "cap", 1),
            db_path=args.db_path,
            limit=getattr(args, "limit", 10),
            brute_cap=int(os.getenv("EULERTRIE_BRUTE_CAP", str(DEFAULT_BRUTE_CAP))),
        )
        if config.command == "bench" and config.max_trails is None:
            config.max_trails = BENCH_DEFAULT_MAX_TRAILS
        config.check()
        return config

    def check(self) -> None:
        if self.max_trails is not None and self.max_trails < 1:
            raise UsageError("--max-trails must be at least 1")
        if self.command == "count" and self.counter == "best" and self.mode is EnumerationMode.NODE_DISTINCT:
            raise UsageError(
                "--counter best counts edge-distinct trails; use --counter enumerate or brute "
                "with --mode node-distinct"
            )
        if self.command == "bench":
            if self.gen_n < 1 or self.gen_cycles < 1:
                raise UsageError("--gen-n and --gen-cycles must be at least 1")
            if self.cap < 1:
                raise UsageError("--cap must be at least 1")
            if self.cap > 1 and self.mode is EnumerationMode.SIMPLE:
                raise UsageError("--cap above 1 needs --mode edge-distinct or node-distinct")
        if self.limit < 1:
            raise UsageError("--limit must be at least 1")


def _read_input(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _load_graph(config: RunConfig) -> Multigraph:
    return parse_edge_list(_read_input(config.input_path), simple=config.mode is EnumerationMode.SIMPLE)


def _resolve_start(g: Multigraph, name: Optional[str]) -> Optional[NodeRef]:
    if name is None:
        return None
    try:
        return g.node(name)
    except LookupError:
        raise EulerianInputError(f"start node {name} is not in the graph") from None


def _describe(info: EulerInfo) -> str:
    assert info.kind is not None and info.source is not None and info.target is not None
    if info.source == info.target:
        return f"feasible {info.kind.value}, start {info.source.name}"
    return f"feasible {info.kind.value} from {info.source.name} to {info.target.name}"


def _cap_note(tree: StateTree) -> str:
    return "" if tree.exhausted else " (cap reached)"


def cmd_check(config: RunConfig) -> int:
    g = _load_graph(config)
    info = check_eulerian(g, _resolve_start(g, config.start))
    if not info.feasible:
        print(f"infeasible: {info.reason}")
        return 1
    print(_describe(info))
    print(f"{g.n} nodes, {len(g.edges)} edge records, {g.m_total} edge copies")
    return 0


def _count_best(config: RunConfig, g: Multigraph) -> int:
    counted = g if config.mode is EnumerationMode.SIMPLE else subdivide(g)[0]
    start = _resolve_start(g, config.start)
    info = check_eulerian(counted, counted.node(start.name) if start is not None else None)
    if not info.feasible:
        print(f"infeasible: {info.reason}")
        return 1
    print(count_best(counted, info))
    return 0


def cmd_count(config: RunConfig) -> int:
    g = _load_graph(config)
    if config.counter == "best":
        return _count_best(config, g)

    start = _resolve_start(g, config.start)
    if config.counter == "brute":
        info = check_eulerian(g, start)
        if not info.feasible or info.source is None:
            print(f"infeasible: {info.reason}")
            return 1
        print(len(brute_force_trails(g, info.source, config.mode, cap=config.brute_cap)))
        return 0

    tree = enumerate_trails(g, config.mode, z=config.max_trails, start=start, validate=config.validate)
    print(f"{tree.leaf_count}{_cap_note(tree)}")
    return 0


def _emit_tree(tree: StateTree, output_format: str) -> None:
    if output_format == "count":
        print(f"{tree.leaf_count}{_cap_note(tree)}")
    elif output_format == "trails-edges":
        for trail in decode_trails(tree):
            print(format_trail_edges(trail))
    elif output_format == "trails-nodes":
        for trail in decode_trails(tree):
            print(format_trail_nodes(trail))
    elif output_format == "trie":
        for line in trie_emit(tree, TrieFormat.EXPANDED):
            print(line)
    elif output_format == "trie-shared":
        for line in trie_emit(tree, TrieFormat.SHARED):
            print(line)
    elif output_format == "dot":
        print(trie_to_dot(tree))
    else:
        raise UsageError(f"unknown format {output_format}")


def cmd_enumerate(config: RunConfig) -> int:
    g = _load_graph(config)
    start = _resolve_start(g, config.start)
    tree = enumerate_trails(g, config.mode, z=config.max_trails, start=start, validate=config.validate)
    _emit_tree(tree, config.output_format)
    if not tree.exhausted and config.output_format != "count":
        print(f"stopped after {tree.leaf_count} trails (cap reached)", file=sys.stderr)
    return 0


def _run_bench(config: RunConfig) -> BenchReport:
    spec = GenSpec(
        n=config.gen_n,
        cycles=config.gen_cycles,
        multiplicity_cap=config.cap,
        seed=config.seed,
        mode=config.mode,
    )
    logger.debug("Bench spec %s", spec)
    started = time.perf_counter()
    text = write_edge_list(gen_random_eulerian(spec))
    generated = time.perf_counter()

    g = parse_edge_list(text, simple=spec.simple)
    enumerator = Enumerator(g, config.mode, validate=config.validate)
    built = time.perf_counter()

    tree = enumerator.run(config.max_trails)
    finished = time.perf_counter()
    return BenchReport(
        spec=spec,
        max_trails=config.max_trails,
        m_total=tree.engine_graph.m_total,
        counters=tree.counters,
        generate_seconds=generated - started,
        parse_build_seconds=built - generated,
        enumerate_seconds=finished - built,
    )


def _print_bench_report(report: BenchReport) -> None:
    counters = report.counters
    print(f"Generated {report.spec.n} nodes / {report.spec.cycles} cycles in {report.generate_seconds:.3f}s")
    print(f"m_total (engine graph): {report.m_total}")
    print(f"Parse + build: {report.parse_build_seconds:.3f}s")
    print(f"Enumerate: {report.enumerate_seconds:.3f}s for {counters.leaves} trails")
    print(
        f"Walker steps: {counters.walker_steps} | journal entries: {counters.compression_entries} "
        f"| transitions: {counters.transitions}"
    )
    print(f"Work per (m_total + trails): {report.ratio:.2f}")


def _open_connection(db_path: Optional[str]) -> sqlite3.Connection:
    connection = get_connection(db_path)
    initialize_db(connection)
    return connection


def cmd_bench(config: RunConfig) -> int:
    report = _run_bench(config)
    _print_bench_report(report)
    if config.db_path is None and not os.getenv("EULERTRIE_DB"):
        return 0
    connection = _open_connection(config.db_path)
    try:
        run_id = record_bench_run(connection, report)
        print(f"Recorded bench run #{run_id}.")
    finally:
        connection.close()
    return 0


def cmd_bench_history(config: RunConfig) -> int:
    connection = _open_connection(config.db_path)
    try:
        rows = list_recent_bench_runs(connection, limit=config.limit)
        if not rows:
            print("No bench runs have been recorded yet.")
            return 0
        header = f"{'ID':<4} {'Run At':<21} {'Mode':<14} {'m_total':<9} {'Trails':<8} {'Build s':<9} {'Enum s':<9} {'Ratio'}"
        print(header)
        print("-" * len(header))
        for row in rows:
            print(
                f"{row['id']:<4} {row['run_at']:<21} {row['mode']:<14} {row['m_total']:<9} {row['leaves']:<8} "
                f"{row['parse_build_seconds']:<9.3f} {row['enumerate_seconds']:<9.3f} {row['ratio']:.2f}"
            )
    finally:
        connection.close()
    return 0


def _graph_input_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("input", help="Edge list file ('<tail> <head> [multiplicity]' per line) or '-' for stdin")
    parent.add_argument(
        "--mode",
        choices=[mode.value for mode in EnumerationMode],
        default=EnumerationMode.SIMPLE.value,
        help="simple (default) rejects self-loops and parallel edges; the multigraph modes accept them",
    )
    parent.add_argument("--start", help="Start node name (only for circuits; open trails start at the source)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Enumerate Eulerian trails as a compressed trie")
    parser.add_argument(
        "--db",
        dest="db_path",
        default=None,
        help="Path to the SQLite bench history (defaults to $EULERTRIE_DB, else eulertrie_bench.db in the project root).",
    )
    subparsers = parser.add_subparsers(dest="command")
    graph_input = _graph_input_parser()

    subparsers.add_parser("check", parents=[graph_input], help="Check whether the graph has an Eulerian trail")

    count_parser = subparsers.add_parser("count", parents=[graph_input], help="Count Eulerian trails")
    count_parser.add_argument("--counter", choices=COUNTERS, default="best")
    count_parser.add_argument("--max-trails", type=int, help="Stop the enumerate counter after this many trails")
    count_parser.add_argument("--validate", action="store_true", help="Cross-check every walk against SCC oracles")

    enumerate_parser = subparsers.add_parser("enumerate", parents=[graph_input], help="Enumerate Eulerian trails")
    enumerate_parser.add_argument("--format", choices=FORMATS, default="trails-edges")
    enumerate_parser.add_argument("--max-trails", type=int, help="Stop after this many trails")
    enumerate_parser.add_argument("--validate", action="store_true")

    bench_parser = subparsers.add_parser("bench", help="Time enumeration on a generated Eulerian graph")
    bench_parser.add_argument("--gen-n", type=int, default=1000, help="Number of nodes")
    bench_parser.add_argument("--gen-cycles", type=int, default=200, help="Number of cycles in the union")
    bench_parser.add_argument("--cap", type=int, default=1, help="Multiplicity cap in multigraph modes")
    bench_parser.add_argument("--seed", type=int, default=0)
    bench_parser.add_argument(
        "--mode", choices=[mode.value for mode in EnumerationMode], default=EnumerationMode.SIMPLE.value
    )
    bench_parser.add_argument("--max-trails", type=int, help=f"Trail cap (default {BENCH_DEFAULT_MAX_TRAILS})")
    bench_parser.add_argument("--validate", action="store_true")

    history_parser = subparsers.add_parser("bench-history", help="Show recently recorded bench runs")
    history_parser.add_argument("--limit", type=int, default=10)

    return parser


def dispatch_command(config: RunConfig) -> int:
    command = config.command
    if command == "check":
        return cmd_check(config)
    elif command == "count":
        return cmd_count(config)
    elif command == "enumerate":
        return cmd_enumerate(config)
    elif command == "bench":
        return cmd_bench(config)
    elif command == "bench-history":
        return cmd_bench_history(config)
    raise UsageError("No command specified. Use --help for usage information.")


def _configure_logging() -> None:
    level = os.getenv("EULERTRIE_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: Optional[Iterable[str]] = None) -> int:
    load_dotenv()
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(None if argv is None else list(argv))
    if not args.command:
        parser.print_help()
        return 0
    try:
        return dispatch_command(RunConfig.from_namespace(args))
    except InfeasibleGraphError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except (GraphFormatError, EulerianInputError, UsageError, OSError, ValueError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
