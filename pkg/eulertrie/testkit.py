"""Instance generators and independent oracles for testing the enumerator."""
from __future__ import annotations

import logging
import random
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .compression import CompressedGraph
from .exploration import detect_branchings, mark_crossings, walk_from_edge_ids
from .graph import InfeasibleGraphError, MultigraphBuilder, check_eulerian, compact_multiplicities, tarjan_scc
from .labels import expand_label
from .models import GenSpec, Multigraph, NodeRef

logger = logging.getLogger(__name__)

# Placement attempts allowed per requested cycle before giving up.
ATTEMPTS_PER_CYCLE = 200


class GenerationError(RuntimeError):
    """Raised when the generator cannot place the requested cycles."""


def gen_random_eulerian(spec: GenSpec) -> Multigraph:
    """A random weakly connected Eulerian circuit graph built as a union of cycles.

    The first cycle runs through every node, so the result is connected; the
    remaining ``spec.cycles - 1`` cycles are drawn on random distinct nodes.
    In simple mode no pair is used twice; otherwise multiplicities stay at
    or below ``spec.multiplicity_cap``.
    """
    if spec.n < 2 and spec.simple:
        raise ValueError("a simple Eulerian graph needs at least two nodes")
    if spec.n < 1 or spec.cycles < 1:
        raise ValueError("need at least one node and one cycle")
    low = max(1 if not spec.simple else 2, spec.min_cycle_length)
    high = min(spec.n, spec.max_cycle_length if spec.max_cycle_length is not None else spec.n)
    if low > high:
        raise ValueError(f"cycle lengths {low}..{high} do not fit {spec.n} nodes")

    rng = random.Random(spec.seed)
    names = [f"v{index}" for index in range(spec.n)]
    counts: Dict[Tuple[int, int], int] = {}

    def cycle_pairs(order: Sequence[int]) -> List[Tuple[int, int]]:
        return [(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]

    def fits(pairs: List[Tuple[int, int]]) -> bool:
        if spec.simple:
            return all(pair not in counts for pair in pairs)
        return all(counts.get(pair, 0) < spec.multiplicity_cap for pair in pairs)

    spanning = list(range(spec.n))
    rng.shuffle(spanning)
    for pair in cycle_pairs(spanning):
        counts[pair] = counts.get(pair, 0) + 1

    placed, attempts = 1, 0
    budget = ATTEMPTS_PER_CYCLE * spec.cycles
    while placed < spec.cycles:
        attempts += 1
        if attempts > budget:
            raise GenerationError(f"placed {placed} of {spec.cycles} cycles in {budget} attempts")
        length = rng.randint(low, high)
        pairs = cycle_pairs(rng.sample(range(spec.n), length))
        if not fits(pairs):
            continue
        for pair in pairs:
            counts[pair] = counts.get(pair, 0) + 1
        placed += 1

    logger.debug("Generated %s cycles on %s nodes after %s extra attempts", placed, spec.n, attempts)
    return compact_multiplicities((names[tail], names[head], count) for (tail, head), count in counts.items())


def gen_debruijn(text: str, k: int) -> Multigraph:
    """Order-k de Bruijn multigraph of ``text``: one edge per k-mer between its (k-1)-mers."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(text) < k:
        raise ValueError(f"text of length {len(text)} has no {k}-mers")
    return compact_multiplicities((text[i : i + k - 1], text[i + 1 : i + k]) for i in range(len(text) - k + 1))


def random_eulerian_trail(g: Multigraph, rng: random.Random, start: Optional[NodeRef] = None) -> List[int]:
    """A uniformly shuffled Hierholzer trail, as edge record ids (one entry per copy)."""
    info = check_eulerian(g, start)
    if not info.feasible or info.source is None:
        raise InfeasibleGraphError(info.reason)

    pending: List[List[int]] = []
    for node in g.nodes:
        copies = [edge_id for edge_id in g.out_adj[node.id] for _ in range(g.edges[edge_id].multiplicity)]
        rng.shuffle(copies)
        pending.append(copies)

    stack: List[Tuple[int, Optional[int]]] = [(info.source.id, None)]
    trail: List[int] = []
    while stack:
        node, via = stack[-1]
        if pending[node]:
            edge_id = pending[node].pop()
            stack.append((g.edges[edge_id].head.id, edge_id))
            continue
        stack.pop()
        if via is not None:
            trail.append(via)
    trail.reverse()
    return trail


def _remaining_components(g: Multigraph, walk: Sequence[int], position: int) -> Tuple[int, ...]:
    """SCC ids of all nodes in the graph left over once ``walk[:position]`` is consumed."""
    left: Dict[int, int] = {}
    for edge_id in walk[position:]:
        left[edge_id] = left.get(edge_id, 0) + 1
    builder = MultigraphBuilder(merge_parallel=False)
    for node in g.nodes:
        builder.add_node(node.name)
    for edge_id, count in left.items():
        builder.add_edge(g.edges[edge_id].tail.name, g.edges[edge_id].head.name, count)
    return tarjan_scc(builder.build()).component_of


def oracle_crossings_check(g: Multigraph, walk: Sequence[int]) -> bool:
    """Compare the walk-based crossing marks with a fresh SCC computation at every step."""
    result = walk_from_edge_ids(g, walk)
    flags = mark_crossings(result)
    for position, edge_id in enumerate(walk):
        components = _remaining_components(g, walk, position)
        edge = g.edges[edge_id]
        crossing = components[edge.tail.id] != components[edge.head.id]
        if crossing != flags[position]:
            logger.debug("Crossing mismatch at position %s on edge %s", position, edge_id)
            return False
    return True


def oracle_branching_check(g: Multigraph, walk: Sequence[int], include_origin: bool = True) -> bool:
    """Compare detected branching states and their alternatives with an SCC-based recount."""
    result = walk_from_edge_ids(g, walk)
    detected = {
        record.position: record
        for record in detect_branchings(result, mark_crossings(result), include_origin=include_origin)
    }
    for position, edge_id in enumerate(walk):
        components = _remaining_components(g, walk, position)
        tail = g.edges[edge_id].tail.id
        candidates: Set[int] = set()
        for later in walk[position:]:
            record = g.edges[later]
            if record.tail.id == tail and components[record.head.id] == components[tail]:
                candidates.add(later)
        branching = len(candidates) >= 2 and (position > 0 or include_origin)
        if branching != (position in detected):
            logger.debug("Branching mismatch at position %s", position)
            return False
        if branching and set(detected[position].remaining_alternatives()) != candidates - {edge_id}:
            logger.debug("Alternative mismatch at position %s", position)
            return False
    return True


def compressed_trails(cg: CompressedGraph) -> List[Tuple[int, ...]]:
    """All ways to finish the trail from ``cg``'s current state, expanded to engine edge ids.

    Parallel copies of one edge object are not told apart, so on a graph
    with multiplicities this lists node-distinct completions.
    """
    objects = [(edge.id, edge.tail, edge.head, edge.multiplicity, expand_label(edge.label)) for edge in cg.live_edges()]
    leaving: Dict[int, List[int]] = {}
    for index, (_, tail, _, _, _) in enumerate(objects):
        leaving.setdefault(tail, []).append(index)
    remaining = [multiplicity for _, _, _, multiplicity, _ in objects]
    total = sum(remaining)

    trails: List[Tuple[int, ...]] = []
    path: List[int] = []

    def visit(at: int, used: int) -> None:
        if used == total:
            trails.append(tuple(path))
            return
        for index in leaving.get(at, ()):
            if remaining[index] == 0:
                continue
            _, _, head, _, expansion = objects[index]
            remaining[index] -= 1
            path.extend(expansion)
            visit(head, used + 1)
            del path[len(path) - len(expansion) :]
            remaining[index] += 1

    visit(cg.current, 0)
    return trails
