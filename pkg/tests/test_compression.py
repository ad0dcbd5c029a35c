from __future__ import annotations

from typing import List, Set, Tuple

import pytest

from conftest import open_trail_instances, random_instances
from eulertrie.compression import (
    MAX_ENTRIES_PER_TAKE,
    CompressedGraph,
    CompressionMode,
    Contracted,
    EdgeUnlinked,
    MultiplicityDecrement,
    SelfLoopRemoved,
    build_compressed,
)
from eulertrie.counting import brute_force_trails
from eulertrie.graph import check_eulerian, parse_edge_list, subdivide
from eulertrie.labels import expand_label
from eulertrie.models import EnumerationMode, Multigraph
from eulertrie.testkit import compressed_trails


def _build(g: Multigraph, mode: CompressionMode = CompressionMode.SIMPLE) -> CompressedGraph:
    cg, _ = build_compressed(g, check_eulerian(g), mode)
    return cg


def _live(cg: CompressedGraph) -> List[Tuple[int, int, int, List[int]]]:
    return [(edge.id, edge.tail, edge.head, expand_label(edge.label)) for edge in cg.live_edges()]


def test_cycle_compresses_to_one_loop(cycle3: Multigraph) -> None:
    cg = _build(cycle3)

    assert _live(cg) == [(0, 0, 0, [0, 1, 2])]
    assert cg.live_copies == 1
    assert len(cg.journal) == 2
    assert all(isinstance(entry, Contracted) for entry in cg.journal)
    assert cg.is_fully_compressed()


def test_path_compresses_to_one_edge(path_abc: Multigraph) -> None:
    cg = _build(path_abc)

    assert _live(cg) == [(0, 0, 2, [0, 1])]
    assert cg.find(1) == 2
    assert compressed_trails(cg) == [(0, 1)]


def test_two_triangles_leave_two_loops(two_triangles: Multigraph) -> None:
    cg = _build(two_triangles)

    assert _live(cg) == [(0, 0, 0, [0, 1, 2]), (3, 0, 0, [3, 4, 5])]
    assert cg.loop_count[0] == 2
    assert len(cg.journal) == 4


def test_target_is_never_contracted() -> None:
    g = parse_edge_list("a b\nb c\nc b\n", simple=True)
    cg = _build(g)

    target = g.node("b").id
    assert cg.target == target
    assert cg.alias[target] == target
    assert compressed_trails(cg) == [(0, 1, 2)]


def test_simple_mode_rejects_multigraph(double_edge: Multigraph) -> None:
    with pytest.raises(ValueError, match="simple"):
        CompressedGraph(double_edge, check_eulerian(double_edge), CompressionMode.SIMPLE)


def test_infeasible_graph_is_rejected() -> None:
    g = parse_edge_list("a b\nc d\n")

    with pytest.raises(ValueError, match="Eulerian"):
        CompressedGraph(g, check_eulerian(g))


def test_rewind_restores_the_initial_graph(two_triangles: Multigraph) -> None:
    cg = CompressedGraph(two_triangles, check_eulerian(two_triangles))
    before = cg.fingerprint()
    cg.compress_exhaustively()

    assert cg.fingerprint() != before
    cg.rewind_to(0)
    assert cg.fingerprint() == before


def test_take_edge_contracts_the_left_node(double_edge: Multigraph) -> None:
    subdivided, _ = subdivide(double_edge)
    cg = _build(subdivided)
    a, b = subdivided.node("a").id, subdivided.node("b").id
    assert _live(cg) == [(0, a, b, [0, 1]), (2, a, b, [2, 3]), (4, b, a, [4, 5])]
    after_build = cg.fingerprint()

    checkpoint, label = cg.take_edge(cg.edges[0])

    assert checkpoint == 3
    assert expand_label(label) == [0, 1]
    assert cg.current == b
    assert not cg.edges[2].alive
    assert cg.edges[4].head == b
    assert expand_label(cg.edges[4].label) == [4, 5, 2, 3]
    assert cg.loop_count[b] == 1
    assert [type(entry) for entry in list(cg.journal)[checkpoint:]] == [EdgeUnlinked, Contracted]

    cg.rewind_to(checkpoint)
    assert cg.fingerprint() == after_build


def test_take_edge_decrements_multiplicity_first(double_edge: Multigraph) -> None:
    cg = _build(double_edge, CompressionMode.NODE_DISTINCT)
    a, b = double_edge.node("a").id, double_edge.node("b").id
    assert cg.current == a and cg.target == b

    checkpoint, _ = cg.take_edge(cg.edges[0])

    entries = list(cg.journal)[checkpoint:]
    assert isinstance(entries[0], MultiplicityDecrement)
    assert isinstance(entries[1], Contracted)
    assert expand_label(cg.edges[1].label) == [1, 0]
    assert cg.edges[1].head == b
    assert compressed_trails(cg) == [(1, 0)]


def test_loop_is_glued_onto_the_other_out_edge() -> None:
    g = parse_edge_list("a a\na b\n")
    cg = _build(g, CompressionMode.NODE_DISTINCT)

    assert isinstance(list(cg.journal)[0], SelfLoopRemoved)
    assert _live(cg) == [(1, 0, 1, [0, 1])]
    cg.rewind_to(0)
    assert cg.loop_count[0] == 1
    assert cg.edges[0].alive


def test_loop_is_not_forced_when_the_node_is_reentered() -> None:
    g = parse_edge_list("a b\nb b\nb c\nc b\nb a\n")
    cg = _build(g, CompressionMode.NODE_DISTINCT)

    assert not any(isinstance(entry, SelfLoopRemoved) for entry in cg.journal)
    assert sorted(compressed_trails(cg)) == sorted(brute_force_trails(g, g.node("a")))


def _check_every_take(cg: CompressedGraph, trails: List[Tuple[int, ...]], prefix: List[int], seen: Set[Tuple[int, ...]]) -> int:
    """Walk the whole choice tree, comparing completions with brute force at each state."""
    depth = len(prefix)
    expected = {trail[depth:] for trail in trails if list(trail[:depth]) == prefix}
    assert set(compressed_trails(cg)) == expected
    if not expected:
        return 0
    if cg.live_copies == 0:
        seen.add(tuple(prefix))
        return 1

    found = 0
    before = cg.fingerprint()
    for edge in list(cg.out_edges(cg.current)):
        checkpoint, label = cg.take_edge(edge)
        assert len(cg.journal) - checkpoint <= MAX_ENTRIES_PER_TAKE
        found += _check_every_take(cg, trails, prefix + expand_label(label), seen)
        cg.rewind_to(checkpoint)
        assert cg.fingerprint() == before
    return found


def test_every_rule_firing_preserves_the_trail_set() -> None:
    for g in random_instances(120, max_copies=9, seed=17):
        info = check_eulerian(g)
        expected = brute_force_trails(g, info.source)
        cg = CompressedGraph(g, info)
        cg.compress_exhaustively()
        assert cg.is_fully_compressed()
        for checkpoint in range(len(cg.journal), -1, -1):
            cg.rewind_to(checkpoint)
            assert sorted(compressed_trails(cg)) == expected


def test_choice_tree_completions_match_brute_force() -> None:
    for g in random_instances(60, max_copies=8, seed=23):
        info = check_eulerian(g)
        trails = brute_force_trails(g, info.source)
        seen: Set[Tuple[int, ...]] = set()
        assert _check_every_take(_build(g), trails, [], seen) == len(seen) == len(trails)


def test_open_trail_compression_is_sound() -> None:
    for g in open_trail_instances(60, seed=29):
        info = check_eulerian(g)
        cg, _ = build_compressed(g, info)
        assert cg.is_fully_compressed()
        assert sorted(compressed_trails(cg)) == brute_force_trails(g, info.source)


def test_node_distinct_compression_is_sound() -> None:
    for g in random_instances(80, EnumerationMode.NODE_DISTINCT, max_copies=10, seed=31):
        info = check_eulerian(g)
        cg, _ = build_compressed(g, info, CompressionMode.NODE_DISTINCT)
        decoded = set()
        for trail in compressed_trails(cg):
            decoded.add(tuple([info.source.name] + [g.edges[edge].head.name for edge in trail]))
        assert sorted(decoded) == brute_force_trails(g, info.source, EnumerationMode.NODE_DISTINCT)
