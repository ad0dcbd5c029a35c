"""Dataclasses representing the library's core domain objects."""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple


class EnumerationMode(str, Enum):
    """How two Eulerian trails are told apart."""

    SIMPLE = "simple"
    EDGE_DISTINCT = "edge-distinct"
    NODE_DISTINCT = "node-distinct"


class EulerKind(str, Enum):
    CIRCUIT = "circuit"
    OPEN_TRAIL = "open trail"


@dataclass(frozen=True)
class NodeRef:
    """A graph node: dense id plus the token it was read from."""

    id: int
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class EdgeRecord:
    """A directed edge together with the number of parallel copies it stands for."""

    id: int
    tail: NodeRef
    head: NodeRef
    multiplicity: int = 1

    @property
    def is_loop(self) -> bool:
        return self.tail.id == self.head.id


@dataclass(frozen=True)
class Multigraph:
    """The immutable input graph.

    Adjacency lists hold edge ids sorted ascending. Copies of an edge record
    are numbered consecutively in record order, so on a simple graph the copy
    id of an edge equals its record id.
    """

    nodes: Tuple[NodeRef, ...]
    edges: Tuple[EdgeRecord, ...]
    out_adj: Tuple[Tuple[int, ...], ...]
    in_adj: Tuple[Tuple[int, ...], ...]
    m_total: int
    _by_name: Dict[str, NodeRef] = field(default_factory=dict, repr=False, compare=False)
    _copy_offsets: Tuple[int, ...] = field(default=(), repr=False, compare=False)

    @classmethod
    def build(cls, names: Sequence[str], triples: Sequence[Tuple[int, int, int]]) -> "Multigraph":
        """Create a graph from node names and ``(tail id, head id, multiplicity)`` triples."""
        nodes = tuple(NodeRef(index, name) for index, name in enumerate(names))
        out_adj: List[List[int]] = [[] for _ in nodes]
        in_adj: List[List[int]] = [[] for _ in nodes]
        edges: List[EdgeRecord] = []
        offsets: List[int] = []
        total = 0
        for edge_id, (tail, head, multiplicity) in enumerate(triples):
            if multiplicity < 1:
                raise ValueError(f"edge {edge_id} has multiplicity {multiplicity}")
            edges.append(EdgeRecord(edge_id, nodes[tail], nodes[head], multiplicity))
            out_adj[tail].append(edge_id)
            in_adj[head].append(edge_id)
            offsets.append(total)
            total += multiplicity
        return cls(
            nodes=nodes,
            edges=tuple(edges),
            out_adj=tuple(tuple(ids) for ids in out_adj),
            in_adj=tuple(tuple(ids) for ids in in_adj),
            m_total=total,
            _by_name={node.name: node for node in nodes},
            _copy_offsets=tuple(offsets),
        )

    @property
    def n(self) -> int:
        return len(self.nodes)

    def node(self, name: str) -> NodeRef:
        """Return the node called ``name``."""
        try:
            return self._by_name[name]
        except KeyError:
            raise LookupError(f"No node named {name!r} in the graph") from None

    def out_weight(self, node_id: int) -> int:
        return sum(self.edges[edge_id].multiplicity for edge_id in self.out_adj[node_id])

    def in_weight(self, node_id: int) -> int:
        return sum(self.edges[edge_id].multiplicity for edge_id in self.in_adj[node_id])

    def is_isolated(self, node_id: int) -> bool:
        return not self.out_adj[node_id] and not self.in_adj[node_id]

    def is_simple(self) -> bool:
        seen = set()
        for edge in self.edges:
            pair = (edge.tail.id, edge.head.id)
            if edge.multiplicity != 1 or edge.is_loop or pair in seen:
                return False
            seen.add(pair)
        return True

    def copy_ids(self, edge_id: int) -> range:
        start = self._copy_offsets[edge_id]
        return range(start, start + self.edges[edge_id].multiplicity)

    def copy_owner(self, copy_id: int) -> EdgeRecord:
        """Return the edge record a copy id belongs to."""
        if not 0 <= copy_id < self.m_total:
            raise LookupError(f"No edge copy with id {copy_id}")
        return self.edges[bisect.bisect_right(self._copy_offsets, copy_id) - 1]


@dataclass(frozen=True)
class EulerInfo:
    """Outcome of the Euler feasibility check."""

    feasible: bool
    kind: Optional[EulerKind] = None
    source: Optional[NodeRef] = None
    target: Optional[NodeRef] = None
    reason: str = ""


@dataclass(frozen=True)
class SccPartition:
    component_of: Tuple[int, ...]
    component_count: int

    def same_component(self, u: int, v: int) -> bool:
        return self.component_of[u] == self.component_of[v]


@dataclass(frozen=True)
class GenSpec:
    """Parameters of the random Eulerian generator; same seed, same graph."""

    n: int
    cycles: int = 1
    min_cycle_length: int = 2
    max_cycle_length: Optional[int] = None
    multiplicity_cap: int = 1
    seed: int = 0
    mode: EnumerationMode = EnumerationMode.SIMPLE

    @property
    def simple(self) -> bool:
        return self.mode is EnumerationMode.SIMPLE


@dataclass
class StepCounters:
    """Work counters of one enumeration run."""

    walker_steps: int = 0
    compression_entries: int = 0
    transitions: int = 0
    leaves: int = 0

    def work(self) -> int:
        return self.walker_steps + self.compression_entries

    def ratio(self, m_total: int) -> float:
        """Work per unit of ``m_total + leaves``."""
        return self.work() / max(1, m_total + self.leaves)


@dataclass(frozen=True)
class BenchReport:
    """One timed enumeration run on a generated instance."""

    spec: GenSpec
    max_trails: Optional[int]
    m_total: int
    counters: StepCounters
    generate_seconds: float
    parse_build_seconds: float
    enumerate_seconds: float

    @property
    def ratio(self) -> float:
        return self.counters.ratio(self.m_total)
