"""The compressed remaining graph, its reduction rules and the undo journal.

A :class:`CompressedGraph` holds what is left of the input after a prefix of
an Eulerian trail has been consumed, with every forced move folded away:

* contraction: a node other than the current node and the trail's target
  with a single outgoing edge is merged into that edge's head, and its only
  incoming edge inherits the outgoing edge's label;
* loop elimination: a self-loop at a node with exactly one other
  outgoing and one other incoming edge (or only the loop coming in, at the
  current node) must be taken before the other outgoing edge, so it is
  glued onto the front of that edge's label.

Every mutation appends an entry to the journal, and :meth:`rewind_to`
undoes entries newest first. Adjacency lists are doubly linked so that an
unlinked edge still knows its neighbours and relinks in O(1).
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple, Union

from .graph import MultigraphBuilder
from .labels import Label, concat, leaf
from .models import EulerInfo, Multigraph

logger = logging.getLogger(__name__)

Checkpoint = int

# A take_edge call journals the step itself plus at most four rule firings.
MAX_ENTRIES_PER_TAKE = 6


class CompressionMode(str, Enum):
    SIMPLE = "simple"
    NODE_DISTINCT = "node-distinct"


class CompressedEdge:
    """An edge object of the compressed graph.

    ``id`` is the index in :attr:`CompressedGraph.edges` and equals the id of
    the input record the object started from. ``head`` moves when a
    contraction reroutes the edge; ``tail`` never changes.
    """

    __slots__ = (
        "id",
        "tail",
        "head",
        "label",
        "multiplicity",
        "alive",
        "out_prev",
        "out_next",
        "in_prev",
        "in_next",
    )

    def __init__(self, edge_id: int, tail: int, head: int, label: Label, multiplicity: int) -> None:
        self.id = edge_id
        self.tail = tail
        self.head = head
        self.label = label
        self.multiplicity = multiplicity
        self.alive = True
        self.out_prev: Optional[CompressedEdge] = None
        self.out_next: Optional[CompressedEdge] = None
        self.in_prev: Optional[CompressedEdge] = None
        self.in_next: Optional[CompressedEdge] = None

    def __repr__(self) -> str:
        return (
            f"CompressedEdge({self.id}: {self.tail}->{self.head}, "
            f"len={self.label.length}, x{self.multiplicity}{'' if self.alive else ', dead'})"
        )


@dataclass(frozen=True)
class MultiplicityDecrement:
    edge: CompressedEdge
    previous_current: int


@dataclass(frozen=True)
class EdgeUnlinked:
    edge: CompressedEdge
    previous_current: int


@dataclass(frozen=True)
class Contracted:
    """Node ``node`` merged into ``survivor``; ``rerouted`` took the place of ``removed``."""

    node: int
    survivor: int
    removed: CompressedEdge
    rerouted: CompressedEdge
    previous_label: Label
    previous_in_prev: Optional[CompressedEdge]
    previous_in_next: Optional[CompressedEdge]
    became_loop: bool


@dataclass(frozen=True)
class SelfLoopRemoved:
    node: int
    loop: CompressedEdge
    other_out: CompressedEdge
    previous_label: Label


JournalEntry = Union[MultiplicityDecrement, EdgeUnlinked, Contracted, SelfLoopRemoved]


class Journal:
    """Append-only undo log; a checkpoint is simply its length."""

    def __init__(self) -> None:
        self._entries: List[JournalEntry] = []

    def append(self, entry: JournalEntry) -> None:
        self._entries.append(entry)

    def pop(self) -> JournalEntry:
        return self._entries.pop()

    def checkpoint(self) -> Checkpoint:
        return len(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[JournalEntry]:
        return iter(self._entries)


class CompressedGraph:
    """Remaining graph plus the walk position, kept fully compressed."""

    def __init__(self, g: Multigraph, info: EulerInfo, mode: CompressionMode = CompressionMode.SIMPLE) -> None:
        if not info.feasible or info.source is None or info.target is None:
            raise ValueError("compressed graphs are only built for Eulerian inputs")
        if mode is CompressionMode.SIMPLE and not g.is_simple():
            raise ValueError("simple compression needs a simple graph")

        self.mode = mode
        self.names = tuple(node.name for node in g.nodes)
        self.n = g.n
        self.m_total = g.m_total
        self.edges: List[CompressedEdge] = [
            CompressedEdge(edge.id, edge.tail.id, edge.head.id, leaf(edge.id), edge.multiplicity)
            for edge in g.edges
        ]
        self.out_first: List[Optional[CompressedEdge]] = [None] * g.n
        self.in_first: List[Optional[CompressedEdge]] = [None] * g.n
        self.out_count = [0] * g.n
        self.in_count = [0] * g.n
        self.out_weight = [0] * g.n
        self.in_weight = [0] * g.n
        self.loop_count = [0] * g.n
        self.alias = list(range(g.n))
        self.current = info.source.id
        self.target = info.target.id
        self.consumed = 0
        self.live_copies = g.m_total
        self.journal = Journal()

        for node in g.nodes:
            self._link_chain(node.id, [self.edges[edge_id] for edge_id in g.out_adj[node.id]], outgoing=True)
            self._link_chain(node.id, [self.edges[edge_id] for edge_id in g.in_adj[node.id]], outgoing=False)
        for edge in self.edges:
            self.out_count[edge.tail] += 1
            self.in_count[edge.head] += 1
            self.out_weight[edge.tail] += edge.multiplicity
            self.in_weight[edge.head] += edge.multiplicity
            if edge.tail == edge.head:
                self.loop_count[edge.tail] += 1

    def _link_chain(self, node: int, chain: List[CompressedEdge], outgoing: bool) -> None:
        previous: Optional[CompressedEdge] = None
        for edge in chain:
            if outgoing:
                edge.out_prev = previous
                if previous is None:
                    self.out_first[node] = edge
                else:
                    previous.out_next = edge
            else:
                edge.in_prev = previous
                if previous is None:
                    self.in_first[node] = edge
                else:
                    previous.in_next = edge
            previous = edge

    # -- adjacency -------------------------------------------------------

    def out_edges(self, node: int) -> Iterator[CompressedEdge]:
        edge = self.out_first[node]
        while edge is not None:
            yield edge
            edge = edge.out_next

    def in_edges(self, node: int) -> Iterator[CompressedEdge]:
        edge = self.in_first[node]
        while edge is not None:
            yield edge
            edge = edge.in_next

    def live_edges(self) -> Iterator[CompressedEdge]:
        for node in range(self.n):
            yield from self.out_edges(node)

    def find(self, node: int) -> int:
        while self.alias[node] != node:
            node = self.alias[node]
        return node

    def _unlink_out(self, edge: CompressedEdge) -> None:
        previous, following = edge.out_prev, edge.out_next
        if previous is None:
            self.out_first[edge.tail] = following
        else:
            previous.out_next = following
        if following is not None:
            following.out_prev = previous

    def _relink_out(self, edge: CompressedEdge) -> None:
        previous, following = edge.out_prev, edge.out_next
        if previous is None:
            self.out_first[edge.tail] = edge
        else:
            previous.out_next = edge
        if following is not None:
            following.out_prev = edge

    def _unlink_in(self, edge: CompressedEdge) -> None:
        previous, following = edge.in_prev, edge.in_next
        if previous is None:
            self.in_first[edge.head] = following
        else:
            previous.in_next = following
        if following is not None:
            following.in_prev = previous

    def _relink_in(self, edge: CompressedEdge) -> None:
        previous, following = edge.in_prev, edge.in_next
        if previous is None:
            self.in_first[edge.head] = edge
        else:
            previous.in_next = edge
        if following is not None:
            following.in_prev = edge

    # -- reduction rules -------------------------------------------------

    def contraction_candidate(self, node: int) -> Optional[CompressedEdge]:
        """The single out-edge of ``node`` if the node can be contracted into its head."""
        if node == self.current or node == self.target or self.out_count[node] != 1:
            return None
        edge = self.out_first[node]
        assert edge is not None
        if edge.multiplicity != 1 or edge.head == node:
            return None
        return edge

    def contract(self, node: int, edge: CompressedEdge) -> None:
        survivor = edge.head
        incoming = self.in_first[node]
        assert incoming is not None and incoming.in_next is None, "contracted node must have one in-edge"
        assert incoming.multiplicity == 1 and self.in_count[node] == 1

        became_loop = incoming.tail == survivor
        self.journal.append(
            Contracted(
                node=node,
                survivor=survivor,
                removed=edge,
                rerouted=incoming,
                previous_label=incoming.label,
                previous_in_prev=incoming.in_prev,
                previous_in_next=incoming.in_next,
                became_loop=became_loop,
            )
        )

        self._unlink_out(edge)
        edge.alive = False
        self.in_first[node] = None
        incoming.head = survivor
        incoming.in_prev, incoming.in_next = edge.in_prev, edge.in_next
        self._relink_in(incoming)
        incoming.label = concat(incoming.label, edge.label)

        self.out_count[node] = self.in_count[node] = 0
        self.out_weight[node] = self.in_weight[node] = 0
        if became_loop:
            self.loop_count[survivor] += 1
        self.alias[node] = survivor
        self.live_copies -= 1

    def _undo_contracted(self, entry: Contracted) -> None:
        node, survivor = entry.node, entry.survivor
        edge, incoming = entry.removed, entry.rerouted

        self.live_copies += 1
        self.alias[node] = node
        if entry.became_loop:
            self.loop_count[survivor] -= 1
        self.out_count[node] = self.in_count[node] = 1
        self.out_weight[node] = self.in_weight[node] = 1

        incoming.label = entry.previous_label
        self._relink_in(edge)
        incoming.head = node
        incoming.in_prev, incoming.in_next = entry.previous_in_prev, entry.previous_in_next
        self.in_first[node] = incoming
        self._relink_out(edge)
        edge.alive = True

    def loop_candidate(self, node: int) -> Optional[Tuple[CompressedEdge, CompressedEdge]]:
        """``(loop, other out-edge)`` when the loop at ``node`` is forced to come first."""
        if self.loop_count[node] != 1 or self.out_count[node] != 2:
            return None
        at_current = node == self.current
        if self.in_count[node] != (1 if at_current else 2):
            return None

        loop: Optional[CompressedEdge] = None
        other: Optional[CompressedEdge] = None
        for edge in self.out_edges(node):
            if edge.head == node:
                loop = edge
            else:
                other = edge
        assert loop is not None and other is not None
        if loop.multiplicity != 1 or other.multiplicity != 1:
            return None
        if not at_current:
            entering = next(edge for edge in self.in_edges(node) if edge is not loop)
            if entering.multiplicity != 1:
                return None
        return loop, other

    def drop_loop(self, node: int, loop: CompressedEdge, other: CompressedEdge) -> None:
        self.journal.append(SelfLoopRemoved(node, loop, other, other.label))
        self._unlink_out(loop)
        self._unlink_in(loop)
        loop.alive = False
        self.out_count[node] -= 1
        self.in_count[node] -= 1
        self.out_weight[node] -= 1
        self.in_weight[node] -= 1
        self.loop_count[node] -= 1
        self.live_copies -= 1
        other.label = concat(loop.label, other.label)

    def _undo_self_loop_removed(self, entry: SelfLoopRemoved) -> None:
        node, loop = entry.node, entry.loop
        entry.other_out.label = entry.previous_label
        self.live_copies += 1
        self.loop_count[node] += 1
        self.in_weight[node] += 1
        self.out_weight[node] += 1
        self.in_count[node] += 1
        self.out_count[node] += 1
        self._relink_in(loop)
        self._relink_out(loop)
        loop.alive = True

    def _try_contract(self, node: int) -> bool:
        edge = self.contraction_candidate(node)
        if edge is None:
            return False
        self.contract(node, edge)
        return True

    def _try_drop_loop(self, node: int) -> bool:
        pair = self.loop_candidate(node)
        if pair is None:
            return False
        self.drop_loop(node, *pair)
        return True

    def compress_exhaustively(self) -> None:
        """Apply both rules until neither fires anywhere."""
        pending = deque(range(self.n))
        queued = [True] * self.n
        while pending:
            node = pending.popleft()
            queued[node] = False
            if self.alias[node] != node:
                continue
            touched: Optional[int] = None
            edge = self.contraction_candidate(node)
            if edge is not None:
                touched = edge.head
                self.contract(node, edge)
            elif self._try_drop_loop(node):
                touched = node
            if touched is not None and not queued[touched]:
                queued[touched] = True
                pending.append(touched)

    # -- walking ---------------------------------------------------------

    def take_edge(self, edge: CompressedEdge) -> Tuple[Checkpoint, Label]:
        """Consume one copy of ``edge`` from the current node and recompress locally.

        Returns the checkpoint taken before the step and the label that was
        consumed.
        """
        assert edge.alive and edge.multiplicity >= 1, f"{edge!r} is not available"
        assert edge.tail == self.current, f"{edge!r} does not leave the current node {self.current}"

        checkpoint = self.journal.checkpoint()
        label = edge.label
        tail, head = edge.tail, edge.head

        if edge.multiplicity > 1:
            self.journal.append(MultiplicityDecrement(edge, self.current))
            edge.multiplicity -= 1
        else:
            self.journal.append(EdgeUnlinked(edge, self.current))
            self._unlink_out(edge)
            self._unlink_in(edge)
            edge.alive = False
            self.out_count[tail] -= 1
            self.in_count[head] -= 1
            if tail == head:
                self.loop_count[tail] -= 1
        self.out_weight[tail] -= 1
        self.in_weight[head] -= 1
        self.live_copies -= 1
        self.current = head
        self.consumed += label.length

        if tail != head:
            self._try_contract(tail)
        sites = [self.find(tail)]
        if head != sites[0]:
            sites.append(head)
        for site in sites:
            if self._try_drop_loop(site) and site != self.current:
                self._try_contract(site)

        assert len(self.journal) - checkpoint <= MAX_ENTRIES_PER_TAKE
        return checkpoint, label

    def _undo_take(self, entry: Union[MultiplicityDecrement, EdgeUnlinked]) -> None:
        edge = entry.edge
        tail, head = edge.tail, edge.head
        if isinstance(entry, MultiplicityDecrement):
            edge.multiplicity += 1
        else:
            self._relink_in(edge)
            self._relink_out(edge)
            edge.alive = True
            self.out_count[tail] += 1
            self.in_count[head] += 1
            if tail == head:
                self.loop_count[tail] += 1
        self.out_weight[tail] += 1
        self.in_weight[head] += 1
        self.live_copies += 1
        self.current = entry.previous_current
        self.consumed -= edge.label.length

    def checkpoint(self) -> Checkpoint:
        return self.journal.checkpoint()

    def rewind_to(self, checkpoint: Checkpoint) -> None:
        """Undo journal entries newest first until the journal is ``checkpoint`` long."""
        assert 0 <= checkpoint <= len(self.journal), f"stale checkpoint {checkpoint}"
        while len(self.journal) > checkpoint:
            entry = self.journal.pop()
            if isinstance(entry, Contracted):
                self._undo_contracted(entry)
            elif isinstance(entry, SelfLoopRemoved):
                self._undo_self_loop_removed(entry)
            else:
                self._undo_take(entry)

    # -- inspection ------------------------------------------------------

    def fingerprint(self) -> Tuple:
        """Hashable snapshot of the whole state, for journal-integrity checks."""
        return (
            self.current,
            self.target,
            self.consumed,
            self.live_copies,
            tuple(self.alias),
            tuple(
                tuple((edge.id, edge.head, edge.multiplicity, id(edge.label)) for edge in self.out_edges(node))
                for node in range(self.n)
            ),
            tuple(tuple(edge.id for edge in self.in_edges(node)) for node in range(self.n)),
            tuple(self.out_count),
            tuple(self.in_count),
            tuple(self.out_weight),
            tuple(self.in_weight),
            tuple(self.loop_count),
            tuple(edge.alive for edge in self.edges),
        )

    def is_fully_compressed(self) -> bool:
        return all(
            self.alias[node] != node
            or (self.contraction_candidate(node) is None and self.loop_candidate(node) is None)
            for node in range(self.n)
        )

    def to_multigraph(self) -> Tuple[Multigraph, Dict[int, int]]:
        """The remaining graph as a Multigraph over the same node ids.

        Each live edge object becomes one record, in adjacency order; the
        returned map sends record ids to compressed edge ids.
        """
        builder = MultigraphBuilder(merge_parallel=False)
        for name in self.names:
            builder.add_node(name)
        record_to_edge: Dict[int, int] = {}
        for edge in self.live_edges():
            record_id = builder.add_edge(self.names[edge.tail], self.names[edge.head], edge.multiplicity)
            record_to_edge[record_id] = edge.id
        return builder.build(), record_to_edge


def build_compressed(
    g: Multigraph, info: EulerInfo, mode: CompressionMode = CompressionMode.SIMPLE
) -> Tuple[CompressedGraph, Journal]:
    """Build the compressed graph of ``g`` with the walk positioned at ``info.source``."""
    cg = CompressedGraph(g, info, mode)
    cg.compress_exhaustively()
    live = sum(1 for _ in cg.live_edges())
    logger.debug(
        "Compressed %s edge objects to %s with %s journal entries", len(cg.edges), live, len(cg.journal)
    )
    return cg, cg.journal
