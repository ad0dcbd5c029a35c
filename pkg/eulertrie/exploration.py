"""Output-linear exploration of the Eulerian trail state tree.

The driver keeps one :class:`CompressedGraph` and a LIFO stack of branching
states. Each step rewinds the graph to a branching state, forces one
untried non-crossing edge, completes the trail greedily and splices the
new path into the :class:`StateTree` with forced runs fused into single
labelled transitions.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Counter as CounterType
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

from .compression import Checkpoint, CompressedEdge, CompressedGraph, CompressionMode, build_compressed
from .graph import InfeasibleGraphError, check_eulerian, compact_multiplicities, subdivide
from .labels import Label, concat_all, expand_label
from .models import EnumerationMode, Multigraph, NodeRef, StepCounters

logger = logging.getLogger(__name__)

# Walker steps plus journal entries per unit of (m_total + leaves).
WORK_BOUND = 50


class TrailIntegrityError(RuntimeError):
    """Raised when a decoded trail or an internal cross-check fails verification."""


@dataclass
class WalkStep:
    """One edge of a walk; ``label`` and ``checkpoint`` are set once the step is executed."""

    edge: int
    tail: int
    head: int
    position: int
    label: Optional[Label] = None
    checkpoint: Optional[Checkpoint] = None

    @property
    def executed(self) -> bool:
        return self.label is not None


@dataclass
class WalkResult:
    steps: List[WalkStep]
    nodes: List[int]

    @property
    def is_closed(self) -> bool:
        return self.nodes[0] == self.nodes[-1]

    @property
    def end(self) -> int:
        return self.nodes[-1]

    def edge_ids(self) -> List[int]:
        return [step.edge for step in self.steps]


def walk_from_edge_ids(g: Multigraph, edge_ids: Iterable[int]) -> WalkResult:
    """Wrap a sequence of edge record ids of ``g`` as a walk; raises ValueError if it is not contiguous."""
    steps: List[WalkStep] = []
    nodes: List[int] = []
    for position, edge_id in enumerate(edge_ids):
        record = g.edges[edge_id]
        if nodes and nodes[-1] != record.tail.id:
            raise ValueError(f"edge {edge_id} does not continue the walk at position {position}")
        if not nodes:
            nodes.append(record.tail.id)
        steps.append(WalkStep(edge_id, record.tail.id, record.head.id, position))
        nodes.append(record.head.id)
    if not steps:
        raise ValueError("a walk needs at least one edge")
    return WalkResult(steps, nodes)


def snapshot_trail(cg: CompressedGraph, forced_first: Optional[int] = None) -> WalkResult:
    """A complete trail of the remaining compressed graph, computed without mutating it.

    Hierholzer's algorithm over the current adjacency order; ``forced_first``
    (an edge object leaving the current node) is taken up front.
    """
    remaining: Dict[int, int] = {}
    cursor: Dict[int, Optional[CompressedEdge]] = {}

    def next_edge(node: int) -> Optional[CompressedEdge]:
        edge = cursor[node] if node in cursor else cg.out_first[node]
        while edge is not None and remaining.get(edge.id, edge.multiplicity) == 0:
            edge = edge.out_next
        cursor[node] = edge
        return edge

    prefix: List[CompressedEdge] = []
    origin = cg.current
    if forced_first is not None:
        first = cg.edges[forced_first]
        assert first.alive and first.tail == cg.current, f"{first!r} cannot start the walk"
        remaining[first.id] = first.multiplicity - 1
        prefix.append(first)
        origin = first.head

    stack: List[Tuple[int, Optional[CompressedEdge]]] = [(origin, None)]
    circuit: List[CompressedEdge] = []
    while stack:
        node, via = stack[-1]
        edge = next_edge(node)
        if edge is None:
            stack.pop()
            if via is not None:
                circuit.append(via)
            continue
        remaining[edge.id] = remaining.get(edge.id, edge.multiplicity) - 1
        stack.append((edge.head, edge))
    circuit.reverse()

    order = prefix + circuit
    assert len(order) == cg.live_copies, "remaining graph has no Eulerian trail from the current node"
    nodes = [cg.current]
    steps: List[WalkStep] = []
    for position, edge in enumerate(order):
        assert edge.tail == nodes[-1], "snapshot trail is not contiguous"
        steps.append(WalkStep(edge.id, edge.tail, edge.head, position))
        nodes.append(edge.head)
    return WalkResult(steps, nodes)


def hierholzer_complete(cg: CompressedGraph, forced_first: Optional[int] = None) -> WalkResult:
    """Complete the trail from the current state and execute it on ``cg``.

    Steps whose edge object was absorbed by a compression while replaying
    stay unexecuted; their label already travels on a neighbouring step.
    """
    walk = snapshot_trail(cg, forced_first)
    for step in walk.steps:
        edge = cg.edges[step.edge]
        if edge.alive:
            step.checkpoint, step.label = cg.take_edge(edge)
    assert cg.live_copies == 0
    logger.debug("Walk of %s steps from node %s", len(walk.steps), walk.nodes[0])
    return walk


def mark_crossings(walk: WalkResult) -> List[bool]:
    """Flag each step that is a crossing in the remaining graph at its own time.

    A step is a crossing exactly when it is the last departure from its tail
    and that tail is not where the walk ends.
    """
    last_departure: Dict[int, int] = {}
    for step in walk.steps:
        last_departure[step.tail] = step.position
    flags = [False] * len(walk.steps)
    end = walk.end
    for node, position in last_departure.items():
        if node != end:
            flags[position] = True
    return flags


def reentry_anchors(walk: WalkResult) -> List[int]:
    """For each position q, the largest r <= q whose node is visited again after q, else -1.

    The last departure q from a node is a non-crossing at an earlier state p
    exactly when its anchor is at least p.
    """
    nodes = walk.nodes
    last_visit: Dict[int, int] = {}
    for index, node in enumerate(nodes):
        last_visit[node] = index

    anchors = [-1] * len(walk.steps)
    stack: List[int] = []
    for q in range(len(walk.steps)):
        stack.append(q)
        while stack and last_visit[nodes[stack[-1]]] <= q:
            stack.pop()
        anchors[q] = stack[-1] if stack else -1
    return anchors


class BranchRecord:
    """A branching state on a walk and a lazy cursor over its untried alternatives.

    Alternatives are the distinct edge objects that leave the branching node
    later in the same walk, minus the one taken and the crossing one.
    """

    __slots__ = ("position", "node", "checkpoint", "state_id", "_steps", "_departures", "_cursor", "_excluded", "_next")

    def __init__(
        self,
        position: int,
        node: int,
        checkpoint: Optional[Checkpoint],
        steps: List[WalkStep],
        departures: List[int],
        cursor: int,
        excluded: Set[int],
    ) -> None:
        self.position = position
        self.node = node
        self.checkpoint = checkpoint
        self.state_id = -1
        self._steps = steps
        self._departures = departures
        self._cursor = cursor
        self._excluded = excluded
        self._next = self._advance()

    def _advance(self) -> Optional[int]:
        while self._cursor < len(self._departures):
            edge = self._steps[self._departures[self._cursor]].edge
            self._cursor += 1
            if edge not in self._excluded:
                self._excluded.add(edge)
                return edge
        return None

    @property
    def pending(self) -> bool:
        return self._next is not None

    def take_alternative(self) -> int:
        alternative = self._next
        assert alternative is not None, "branch record has no alternative left"
        self._next = self._advance()
        return alternative

    def remaining_alternatives(self) -> List[int]:
        """Untried alternatives in the order they will be taken, without consuming them."""
        if self._next is None:
            return []
        result = [self._next]
        seen = set(self._excluded)
        for position in self._departures[self._cursor :]:
            edge = self._steps[position].edge
            if edge not in seen:
                seen.add(edge)
                result.append(edge)
        return result

    def __repr__(self) -> str:
        return f"BranchRecord(position={self.position}, node={self.node}, state={self.state_id})"


def detect_branchings(walk: WalkResult, flags: List[bool], *, include_origin: bool = True) -> List[BranchRecord]:
    """Branching positions of ``walk`` in increasing order.

    Position p at node v branches when at least two distinct edge objects
    leave v from p onwards that are not crossings at p. Only the object of
    v's last departure can be a crossing there. ``include_origin`` is off for
    walks whose first edge was forced, since that state is already recorded.
    """
    steps = walk.steps
    anchors = reentry_anchors(walk)
    departures: Dict[int, List[int]] = {}
    for step in steps:
        departures.setdefault(step.tail, []).append(step.position)

    branch_at: List[Optional[BranchRecord]] = [None] * len(steps)
    for node, positions in departures.items():
        last = positions[-1]
        last_edge = steps[last].edge
        seen: Set[int] = set()
        distinct = 0
        earlier_copy = -1
        for index in range(len(positions) - 1, -1, -1):
            position = positions[index]
            edge = steps[position].edge
            if edge not in seen:
                seen.add(edge)
                distinct += 1
            if position < last and edge == last_edge and earlier_copy < 0:
                earlier_copy = position
            last_is_crossing = flags[last] and earlier_copy < 0 and anchors[last] < position
            if distinct - int(last_is_crossing) < 2:
                continue
            if position == 0 and not include_origin:
                continue
            excluded = {edge, last_edge} if last_is_crossing else {edge}
            branch_at[position] = BranchRecord(
                position, node, steps[position].checkpoint, steps, positions, index + 1, excluded
            )
    return [record for record in branch_at if record is not None]


@dataclass
class TreeState:
    """A stored state; the transition into it carries ``label`` and starts with edge object ``choice``."""

    id: int
    parent: Optional[int]
    choice: Optional[int]
    label: Optional[Label]
    order_key: int = -1
    is_leaf: bool = False
    children: List[int] = field(default_factory=list)


class StateTree:
    """Compressed trie of Eulerian trails.

    Each root-to-leaf path spells one trail once its transition labels are
    expanded. Transition labels hold edge ids of the engine graph; the
    ``output_ids`` mapping turns them into the ids the user sees.
    """

    def __init__(
        self,
        mode: EnumerationMode,
        start: NodeRef,
        source_graph: Multigraph,
        engine_graph: Multigraph,
        back_map: Optional[Dict[int, int]] = None,
    ) -> None:
        self.mode = mode
        self.start = start
        self.source_graph = source_graph
        self.engine_graph = engine_graph
        self.back_map = back_map
        self.states: List[TreeState] = [TreeState(0, None, None, None)]
        self.exhausted = False
        self.counters = StepCounters()

    @property
    def root(self) -> TreeState:
        return self.states[0]

    @property
    def leaf_count(self) -> int:
        return self.counters.leaves

    @property
    def preamble(self) -> Optional[Label]:
        """Label of the forced run out of the root, when the start node does not branch."""
        children = self.root.children
        return self.states[children[0]].label if len(children) == 1 else None

    def output_id(self, engine_edge: int) -> int:
        return self.back_map[engine_edge] if self.back_map is not None else engine_edge

    def output_ids(self, engine_edges: List[int]) -> List[int]:
        """Engine edge ids to user-facing ids; subdivision halves collapse to one copy id."""
        if self.back_map is None:
            return list(engine_edges)
        return [self.back_map[edge] for edge in engine_edges[::2]]

    def add_state(self, parent: int, choice: int, label: Label, is_leaf: bool = False) -> TreeState:
        state = TreeState(
            id=len(self.states),
            parent=parent,
            choice=choice,
            label=label,
            order_key=self.output_id(label.first),
            is_leaf=is_leaf,
        )
        self.states.append(state)
        self.states[parent].children.append(state.id)
        self.counters.transitions += 1
        if is_leaf:
            self.counters.leaves += 1
        return state

    def children(self, state: TreeState) -> List[TreeState]:
        """Children in emission order."""
        return sorted((self.states[child] for child in state.children), key=lambda child: child.order_key)


def prepare_engine_graph(
    g: Multigraph, mode: EnumerationMode
) -> Tuple[Multigraph, Optional[Dict[int, int]], CompressionMode]:
    """The graph the engine actually runs on for ``mode``, with its id back-map."""
    if mode is EnumerationMode.SIMPLE:
        if not g.is_simple():
            raise ValueError("simple mode needs a graph without self-loops or parallel edges")
        return g, None, CompressionMode.SIMPLE
    if mode is EnumerationMode.EDGE_DISTINCT:
        subdivided, back_map = subdivide(g)
        return subdivided, back_map, CompressionMode.SIMPLE
    compacted = compact_multiplicities((edge.tail.name, edge.head.name, edge.multiplicity) for edge in g.edges)
    return compacted, None, CompressionMode.NODE_DISTINCT


class Enumerator:
    """One enumeration run: the compressed graph, the state tree and the branch stack."""

    def __init__(
        self,
        g: Multigraph,
        mode: EnumerationMode = EnumerationMode.SIMPLE,
        start: Optional[NodeRef] = None,
        validate: bool = False,
    ) -> None:
        info = check_eulerian(g, start)
        if not info.feasible:
            raise InfeasibleGraphError(info.reason)
        assert info.source is not None

        self.mode = mode
        self.validate = validate
        engine_graph, back_map, compression_mode = prepare_engine_graph(g, mode)
        engine_info = check_eulerian(engine_graph, engine_graph.node(info.source.name))
        self.cg, journal = build_compressed(engine_graph, engine_info, compression_mode)
        self.build_checkpoint = self.cg.checkpoint()
        self.tree = StateTree(mode, info.source, g, engine_graph, back_map)
        self.tree.counters.compression_entries = len(journal)
        self._stack: List[BranchRecord] = []
        self._build_fingerprint = self.cg.fingerprint() if validate else None
        self._ran = False

    def fingerprint(self) -> Tuple:
        return self.cg.fingerprint()

    def rewind_to_build(self) -> None:
        self.cg.rewind_to(self.build_checkpoint)

    def run(self, z: Optional[int] = None) -> StateTree:
        """Explore until ``z`` trails are stored or the tree is complete."""
        if z is not None and z < 1:
            raise ValueError("the trail cap must be at least 1")
        if self._ran:
            raise RuntimeError("an Enumerator runs once")
        self._ran = True

        walk = self._walk(None)
        records = detect_branchings(walk, mark_crossings(walk), include_origin=True)
        self._splice(self.tree.root.id, walk, records)
        self._stack.extend(records)

        while self._stack and (z is None or self.tree.leaf_count < z):
            record = self._stack[-1]
            alternative = record.take_alternative()
            if not record.pending:
                self._stack.pop()
            assert record.checkpoint is not None, "branching step was never executed"
            self.cg.rewind_to(record.checkpoint)
            walk = self._walk(alternative)
            records = detect_branchings(walk, mark_crossings(walk), include_origin=False)
            self._splice(record.state_id, walk, records)
            self._stack.extend(records)

        self.tree.exhausted = not self._stack
        self.rewind_to_build()
        counters = self.tree.counters
        logger.debug(
            "Enumerated %s trails with %s walker steps and %s journal entries",
            counters.leaves,
            counters.walker_steps,
            counters.compression_entries,
        )
        if self.validate:
            self._check_run()
        return self.tree

    def _walk(self, forced_first: Optional[int]) -> WalkResult:
        before = len(self.cg.journal)
        view = self.cg.to_multigraph() if self.validate else None
        walk = hierholzer_complete(self.cg, forced_first)
        self.tree.counters.walker_steps += len(walk.steps)
        self.tree.counters.compression_entries += len(self.cg.journal) - before
        if view is not None:
            self._check_walk(*view, walk, include_origin=forced_first is None)
        return walk

    def _check_walk(
        self, remaining: Multigraph, record_to_edge: Dict[int, int], walk: WalkResult, include_origin: bool
    ) -> None:
        from .testkit import oracle_branching_check, oracle_crossings_check

        edge_to_record = {edge: record for record, edge in record_to_edge.items()}
        record_walk = [edge_to_record[step.edge] for step in walk.steps]
        if not oracle_crossings_check(remaining, record_walk):
            raise TrailIntegrityError("crossing marks disagree with the SCC oracle")
        if not oracle_branching_check(remaining, record_walk, include_origin=include_origin):
            raise TrailIntegrityError("branching states disagree with the SCC oracle")

    def _check_run(self) -> None:
        if self.cg.fingerprint() != self._build_fingerprint:
            raise TrailIntegrityError("journal rewind did not restore the compressed graph")
        counters = self.tree.counters
        if counters.work() > WORK_BOUND * (self.cg.m_total + counters.leaves):
            logger.warning(
                "Work %s exceeds %s x (m_total + leaves) = %s",
                counters.work(),
                WORK_BOUND,
                WORK_BOUND * (self.cg.m_total + counters.leaves),
            )

    def _splice(self, origin: int, walk: WalkResult, records: List[BranchRecord]) -> None:
        steps = walk.steps
        parent = origin
        start = 0
        for record in records:
            if record.position == 0:
                record.state_id = origin
                continue
            parent = self._add_transition(parent, steps, start, record.position, is_leaf=False)
            record.state_id = parent
            start = record.position
        self._add_transition(parent, steps, start, len(steps), is_leaf=True)

    def _add_transition(self, parent: int, steps: List[WalkStep], start: int, end: int, is_leaf: bool) -> int:
        label = concat_all(steps[index].label for index in range(start, end) if steps[index].label is not None)
        assert label is not None, "transition without an executed step"
        return self.tree.add_state(parent, steps[start].edge, label, is_leaf=is_leaf).id


def enumerate_trails(
    g: Multigraph,
    mode: EnumerationMode = EnumerationMode.SIMPLE,
    z: Optional[int] = None,
    start: Optional[NodeRef] = None,
    validate: bool = False,
) -> StateTree:
    """Build the compressed trie of the Eulerian trails of ``g``, stopping after ``z`` leaves."""
    if z is not None and z < 1:
        raise ValueError("the trail cap must be at least 1")
    return Enumerator(g, mode, start, validate).run(z)


@dataclass(frozen=True)
class DecodedTrail:
    """One trail: edge copy ids (record ids in node-distinct mode) and node names."""

    edges: Tuple[int, ...]
    nodes: Tuple[str, ...]


def _engine_paths(tree: StateTree) -> Iterator[List[int]]:
    prefix: List[int] = []
    stack: List[Tuple[TreeState, int]] = [(child, 0) for child in reversed(tree.children(tree.root))]
    while stack:
        state, depth = stack.pop()
        del prefix[depth:]
        assert state.label is not None
        prefix.extend(expand_label(state.label))
        if state.is_leaf:
            yield prefix
            continue
        for child in reversed(tree.children(state)):
            stack.append((child, len(prefix)))


def _verify_copies(g: Multigraph, start: NodeRef, copies: List[int]) -> Tuple[str, ...]:
    if len(copies) != g.m_total or len(set(copies)) != g.m_total:
        raise TrailIntegrityError("trail does not use every edge copy exactly once")
    nodes = [start.name]
    at = start.id
    for copy_id in copies:
        record = g.copy_owner(copy_id)
        if record.tail.id != at:
            raise TrailIntegrityError(f"trail breaks before edge copy {copy_id}")
        at = record.head.id
        nodes.append(record.head.name)
    return tuple(nodes)


def _verify_records(g: Multigraph, start: NodeRef, records: List[int]) -> Tuple[str, ...]:
    used: CounterType[int] = Counter(records)
    if any(used[edge.id] != edge.multiplicity for edge in g.edges) or len(records) != g.m_total:
        raise TrailIntegrityError("trail does not use every edge with its multiplicity")
    nodes = [start.name]
    at = g.node(start.name).id
    for record_id in records:
        record = g.edges[record_id]
        if record.tail.id != at:
            raise TrailIntegrityError(f"trail breaks before edge {record_id}")
        at = record.head.id
        nodes.append(record.head.name)
    return tuple(nodes)


def decode_trails(
    tree: StateTree, g: Optional[Multigraph] = None, mode: Optional[EnumerationMode] = None
) -> Iterator[DecodedTrail]:
    """Yield every stored trail, children ordered by their first edge id, verifying each one."""
    if mode is not None and mode is not tree.mode:
        raise ValueError(f"tree was built in {tree.mode.value} mode, not {mode.value}")
    if g is not None and g is not tree.source_graph and g != tree.source_graph:
        raise ValueError("tree was built from a different graph")

    for path in _engine_paths(tree):
        ids = tree.output_ids(path)
        if tree.mode is EnumerationMode.NODE_DISTINCT:
            nodes = _verify_records(tree.engine_graph, tree.start, ids)
        else:
            if tree.back_map is not None and (
                len(path) % 2
                or any(tree.back_map[path[i]] != tree.back_map[path[i + 1]] for i in range(0, len(path), 2))
            ):
                raise TrailIntegrityError("subdivided edge halves are not adjacent")
            nodes = _verify_copies(tree.source_graph, tree.start, ids)
        yield DecodedTrail(tuple(ids), nodes)
