"""Edge-list parsing, Euler feasibility and graph transforms."""
from __future__ import annotations

import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from .models import EulerInfo, EulerKind, Multigraph, NodeRef, SccPartition

logger = logging.getLogger(__name__)

EdgeSpec = Union[Tuple[str, str], Tuple[str, str, int]]


class GraphFormatError(ValueError):
    """Raised when an edge list cannot be parsed."""

    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(message)
        self.line_number = line_number


class EulerianInputError(ValueError):
    """Raised when a graph or start node cannot be used for Euler trail work."""


class InfeasibleGraphError(RuntimeError):
    """Raised when a graph has no Eulerian trail."""


class MultigraphBuilder:
    """Accumulates named nodes and edges into a :class:`Multigraph`.

    With ``merge_parallel`` set, repeated ``(tail, head)`` pairs fold into one
    record whose multiplicity is the sum of theirs.
    """

    def __init__(self, merge_parallel: bool = True) -> None:
        self.merge_parallel = merge_parallel
        self._names: List[str] = []
        self._ids: Dict[str, int] = {}
        self._triples: List[List[int]] = []
        self._pairs: Dict[Tuple[int, int], int] = {}

    def add_node(self, name: str) -> int:
        node_id = self._ids.get(name)
        if node_id is None:
            node_id = len(self._names)
            self._ids[name] = node_id
            self._names.append(name)
        return node_id

    def has_node(self, name: str) -> bool:
        return name in self._ids

    def has_pair(self, tail: str, head: str) -> bool:
        tail_id, head_id = self._ids.get(tail), self._ids.get(head)
        return tail_id is not None and head_id is not None and (tail_id, head_id) in self._pairs

    def add_edge(self, tail: str, head: str, multiplicity: int = 1) -> int:
        tail_id = self.add_node(tail)
        head_id = self.add_node(head)
        pair = (tail_id, head_id)
        if self.merge_parallel and pair in self._pairs:
            edge_id = self._pairs[pair]
            self._triples[edge_id][2] += multiplicity
            return edge_id
        edge_id = len(self._triples)
        self._pairs.setdefault(pair, edge_id)
        self._triples.append([tail_id, head_id, multiplicity])
        return edge_id

    def build(self) -> Multigraph:
        return Multigraph.build(self._names, [tuple(triple) for triple in self._triples])


def _parse_multiplicity(token: str, line_number: int) -> int:
    if not (token.isascii() and token.isdigit()):
        raise GraphFormatError(f"bad multiplicity {token!r} at line {line_number}", line_number)
    multiplicity = int(token)
    if multiplicity <= 0:
        raise GraphFormatError(f"multiplicity must be positive at line {line_number}", line_number)
    return multiplicity


def parse_edge_list(text: Union[str, bytes], *, simple: bool = False) -> Multigraph:
    """Parse ``<tail> <head> [multiplicity]`` lines into a multigraph.

    Blank lines and ``#`` comments are skipped. Node ids follow first
    appearance; repeated pairs are merged into one record unless ``simple``
    is set, in which case self-loops and parallel edges are rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    builder = MultigraphBuilder(merge_parallel=True)
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise GraphFormatError(
                f"expected '<tail> <head> [multiplicity]' at line {line_number}", line_number
            )
        tail, head = tokens[0], tokens[1]
        multiplicity = _parse_multiplicity(tokens[2], line_number) if len(tokens) == 3 else 1
        if simple:
            if tail == head:
                raise GraphFormatError(f"self-loop {tail} -> {head} at line {line_number}", line_number)
            if multiplicity > 1 or builder.has_pair(tail, head):
                raise GraphFormatError(f"parallel edge {tail} -> {head} at line {line_number}", line_number)
        builder.add_edge(tail, head, multiplicity)

    graph = builder.build()
    logger.debug("Parsed %s nodes, %s records, %s edge copies", graph.n, len(graph.edges), graph.m_total)
    return graph


def write_edge_list(g: Multigraph) -> str:
    lines = []
    for edge in g.edges:
        line = f"{edge.tail.name} {edge.head.name}"
        if edge.multiplicity > 1:
            line += f" {edge.multiplicity}"
        lines.append(line)
    return "\n".join(lines) + "\n" if lines else ""


def compact_multiplicities(edges: Iterable[EdgeSpec]) -> Multigraph:
    """Build a multigraph from named pairs, merging parallel pairs into multiplicities."""
    builder = MultigraphBuilder(merge_parallel=True)
    for item in edges:
        multiplicity = item[2] if len(item) == 3 else 1  # type: ignore[misc]
        builder.add_edge(item[0], item[1], multiplicity)
    return builder.build()


def weakly_connected(g: Multigraph) -> bool:
    """True when all non-isolated nodes lie in one weakly connected component."""
    parent = list(range(g.n))

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for edge in g.edges:
        root_a, root_b = find(edge.tail.id), find(edge.head.id)
        if root_a != root_b:
            parent[root_a] = root_b

    roots = {find(node.id) for node in g.nodes if not g.is_isolated(node.id)}
    return len(roots) <= 1


def check_eulerian(g: Multigraph, requested_start: Optional[NodeRef] = None) -> EulerInfo:
    """Decide whether ``g`` has an Eulerian trail and where it must start and end.

    Raises :class:`EulerianInputError` for an edgeless graph, an isolated or
    foreign start node, and a start node that contradicts the degree pattern.
    Any other obstruction is reported through ``EulerInfo.reason``.
    """
    if g.m_total == 0:
        raise EulerianInputError("graph has no edges")
    if requested_start is not None:
        if not 0 <= requested_start.id < g.n or g.nodes[requested_start.id] != requested_start:
            raise EulerianInputError(f"start node {requested_start.name} is not in the graph")
        if g.is_isolated(requested_start.id):
            raise EulerianInputError(f"start node {requested_start.name} has no edges")

    sources: List[NodeRef] = []
    sinks: List[NodeRef] = []
    for node in g.nodes:
        surplus = g.out_weight(node.id) - g.in_weight(node.id)
        if surplus > 1 or surplus < -1:
            return EulerInfo(False, reason=f"node {node.name} has degree imbalance {surplus:+d}")
        if surplus == 1:
            sources.append(node)
        elif surplus == -1:
            sinks.append(node)

    if len(sources) > 1 or len(sinks) > 1:
        names = ", ".join(node.name for node in sources + sinks)
        return EulerInfo(False, reason=f"too many unbalanced nodes: {names}")
    if not weakly_connected(g):
        return EulerInfo(False, reason="graph is not weakly connected")

    if sources:
        source, target = sources[0], sinks[0]
        if requested_start is not None and requested_start != source:
            raise EulerianInputError(
                f"an Eulerian trail must start at {source.name}, not {requested_start.name}"
            )
        return EulerInfo(True, EulerKind.OPEN_TRAIL, source, target)

    if requested_start is not None:
        start = requested_start
    else:
        start = next(node for node in g.nodes if not g.is_isolated(node.id))
    return EulerInfo(True, EulerKind.CIRCUIT, start, start)


def tarjan_scc(g: Multigraph) -> SccPartition:
    """Strongly connected components with an explicit stack instead of recursion."""
    index = [-1] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    component_of = [-1] * g.n
    stack: List[int] = []
    counter = 0
    component_count = 0

    for root in range(g.n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            node, position = work[-1]
            if position == 0 and index[node] == -1:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            out = g.out_adj[node]
            if position < len(out):
                work[-1] = (node, position + 1)
                successor = g.edges[out[position]].head.id
                if index[successor] == -1:
                    work.append((successor, 0))
                elif on_stack[successor]:
                    low[node] = min(low[node], index[successor])
                continue

            work.pop()
            if work:
                caller = work[-1][0]
                low[caller] = min(low[caller], low[node])
            if low[node] == index[node]:
                while True:
                    member = stack.pop()
                    on_stack[member] = False
                    component_of[member] = component_count
                    if member == node:
                        break
                component_count += 1

    return SccPartition(tuple(component_of), component_count)


def crossings_static(g: Multigraph) -> FrozenSet[int]:
    """Ids of edge records whose endpoints lie in different strongly connected components."""
    partition = tarjan_scc(g)
    return frozenset(
        edge.id for edge in g.edges if not partition.same_component(edge.tail.id, edge.head.id)
    )


def _midpoint_name(builder: MultigraphBuilder, tail: str, head: str, copy_id: int) -> str:
    name = f"{tail}~{head}#{copy_id}"
    while builder.has_node(name):
        name += "'"
    return name


def subdivide(g: Multigraph) -> Tuple[Multigraph, Dict[int, int]]:
    """Replace every edge copy ``u -> v`` with ``u -> x -> v`` through a fresh node.

    The result is simple. Copy ``c`` becomes edges ``2c`` and ``2c + 1``; the
    returned map sends each new edge id back to its copy id in ``g``.
    """
    builder = MultigraphBuilder(merge_parallel=False)
    for node in g.nodes:
        builder.add_node(node.name)
    back_map: Dict[int, int] = {}
    for edge in g.edges:
        for copy_id in g.copy_ids(edge.id):
            midpoint = _midpoint_name(builder, edge.tail.name, edge.head.name, copy_id)
            first = builder.add_edge(edge.tail.name, midpoint)
            second = builder.add_edge(midpoint, edge.head.name)
            assert (first, second) == (2 * copy_id, 2 * copy_id + 1)
            back_map[first] = copy_id
            back_map[second] = copy_id

    subdivided = builder.build()
    logger.debug("Subdivided %s copies into %s edges", g.m_total, subdivided.m_total)
    return subdivided, back_map
