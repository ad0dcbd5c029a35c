"""Exact Eulerian circuit counts and brute-force reference enumerations."""
from __future__ import annotations

import logging
import math
from itertools import product
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from .graph import InfeasibleGraphError
from .models import EnumerationMode, EulerInfo, Multigraph, NodeRef

logger = logging.getLogger(__name__)

DEFAULT_BRUTE_CAP = 14
DEFAULT_ARBORESCENCE_CAP = 8

Trail = Union[Tuple[int, ...], Tuple[str, ...]]


class OracleLimitError(ValueError):
    """Raised when a brute-force oracle is asked for an instance above its size cap."""


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination with row pivoting."""
    size = len(matrix)
    if size == 0:
        return 1
    rows = [list(row) for row in matrix]
    if any(len(row) != size for row in rows):
        raise ValueError("determinant needs a square matrix")

    sign = 1
    previous_pivot = 1
    for k in range(size - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if rows[i][k] != 0), None)
            if swap is None:
                return 0
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // previous_pivot
        previous_pivot = pivot
    return sign * rows[size - 1][size - 1]


def _laplacian_minor(g: Multigraph, root: NodeRef, nodes: Sequence[int]) -> List[List[int]]:
    """In-degree Laplacian restricted to ``nodes`` with the root's row and column removed."""
    others = [node for node in nodes if node != root.id]
    position = {node: index for index, node in enumerate(others)}
    matrix = [[0] * len(others) for _ in others]
    for edge in g.edges:
        head = position.get(edge.head.id)
        if head is None or edge.tail.id == edge.head.id:
            continue
        matrix[head][head] += edge.multiplicity
        tail = position.get(edge.tail.id)
        if tail is not None:
            matrix[tail][head] -= edge.multiplicity
    return matrix


def count_arborescences(g: Multigraph, root: NodeRef, nodes: Optional[Sequence[int]] = None) -> int:
    """Spanning out-arborescences rooted at ``root`` by the matrix-tree theorem.

    ``nodes`` restricts the count to a node subset (all nodes by default);
    parallel copies count as different arborescences.
    """
    node_ids = list(range(g.n)) if nodes is None else list(nodes)
    if root.id not in node_ids:
        raise ValueError(f"root {root.name} is not among the counted nodes")
    return bareiss_determinant(_laplacian_minor(g, root, node_ids))


def count_best(g: Multigraph, info: EulerInfo) -> int:
    """Number of Eulerian trails from ``info.source`` on a simple graph.

    Trails are counted as circuits of the graph closed by a virtual edge
    from the target back to the source that is always taken first, which
    adds one to the target's out-degree.
    """
    if not info.feasible or info.source is None or info.target is None:
        raise InfeasibleGraphError(info.reason or "graph has no Eulerian trail")
    if not g.is_simple():
        raise ValueError("count_best needs a simple graph; subdivide multigraphs first")

    source, target = info.source, info.target
    active = [node.id for node in g.nodes if not g.is_isolated(node.id)]
    # The closing edge ends at the root, so it never enters the Laplacian minor.
    arborescences = count_arborescences(g, source, active)
    total = arborescences
    for node in active:
        out_degree = g.out_weight(node) + (1 if node == target.id else 0)
        total *= math.factorial(out_degree - 1)
    logger.debug("BEST count: %s arborescences over %s active nodes, %s trails", arborescences, len(active), total)
    return total


def brute_force_arborescences(g: Multigraph, root: NodeRef, cap_nodes: int = DEFAULT_ARBORESCENCE_CAP) -> int:
    """Count out-arborescences by trying every choice of one in-edge per non-root node."""
    if g.n > cap_nodes:
        raise OracleLimitError(f"{g.n} nodes exceed the arborescence oracle cap of {cap_nodes}")

    others = [node.id for node in g.nodes if node.id != root.id]
    choices: List[List[Tuple[int, int]]] = []
    for node in others:
        entering = [
            (g.edges[edge_id].tail.id, g.edges[edge_id].multiplicity)
            for edge_id in g.in_adj[node]
            if g.edges[edge_id].tail.id != node
        ]
        if not entering:
            return 0
        choices.append(entering)

    total = 0
    for picked in product(*choices):
        parent = {node: tail for node, (tail, _) in zip(others, picked)}
        if all(_reaches_root(node, parent, root.id) for node in others):
            weight = 1
            for _, multiplicity in picked:
                weight *= multiplicity
            total += weight
    return total


def _reaches_root(node: int, parent: Dict[int, int], root: int) -> bool:
    seen: Set[int] = set()
    while node != root:
        if node in seen:
            return False
        seen.add(node)
        node = parent[node]
    return True


def brute_force_trails(
    g: Multigraph,
    v0: NodeRef,
    mode: EnumerationMode = EnumerationMode.SIMPLE,
    cap: int = DEFAULT_BRUTE_CAP,
) -> List[Trail]:
    """Every Eulerian trail from ``v0``, by exhaustive search, sorted.

    Simple and edge-distinct trails are tuples of edge copy ids; node-distinct
    trails are tuples of node names.
    """
    if g.m_total > cap:
        raise OracleLimitError(f"{g.m_total} edge copies exceed the brute-force cap of {cap}")

    if mode is EnumerationMode.NODE_DISTINCT:
        found: Set[Trail] = set()
        remaining = [edge.multiplicity for edge in g.edges]
        path = [v0.name]

        def visit_nodes(at: int, used: int) -> None:
            if used == g.m_total:
                found.add(tuple(path))
                return
            for edge_id in g.out_adj[at]:
                if remaining[edge_id] == 0:
                    continue
                remaining[edge_id] -= 1
                path.append(g.edges[edge_id].head.name)
                visit_nodes(g.edges[edge_id].head.id, used + 1)
                path.pop()
                remaining[edge_id] += 1

        visit_nodes(v0.id, 0)
        return sorted(found)

    trails: List[Trail] = []
    taken = [False] * g.m_total
    copies: List[int] = []

    def visit_copies(at: int) -> None:
        if len(copies) == g.m_total:
            trails.append(tuple(copies))
            return
        for edge_id in g.out_adj[at]:
            for copy_id in g.copy_ids(edge_id):
                if taken[copy_id]:
                    continue
                taken[copy_id] = True
                copies.append(copy_id)
                visit_copies(g.edges[edge_id].head.id)
                copies.pop()
                taken[copy_id] = False

    visit_copies(v0.id)
    return sorted(trails)
