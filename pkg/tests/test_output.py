from __future__ import annotations

from typing import Dict, List

from conftest import random_instances
from eulertrie.exploration import decode_trails, enumerate_trails
from eulertrie.graph import parse_edge_list
from eulertrie.models import EnumerationMode, Multigraph
from eulertrie.output import TrieFormat, format_trail_edges, format_trail_nodes, trie_emit, trie_to_dot


def test_trail_lines(two_triangles: Multigraph) -> None:
    trails = list(decode_trails(enumerate_trails(two_triangles)))

    assert [format_trail_edges(trail) for trail in trails] == ["e0 e1 e2 e3 e4 e5", "e3 e4 e5 e0 e1 e2"]
    assert [format_trail_nodes(trail) for trail in trails] == ["a b c a d e a", "a d e a b c a"]


def test_expanded_trie(two_triangles: Multigraph) -> None:
    lines = list(trie_emit(enumerate_trails(two_triangles), TrieFormat.EXPANDED))

    assert lines == [
        "root a",
        "  -> [e0 e1 e2 e3 e4 e5] leaf",
        "  -> [e3 e4 e5 e0 e1 e2] leaf",
    ]


def test_shared_trie_of_a_cycle(cycle3: Multigraph) -> None:
    lines = list(trie_emit(enumerate_trails(cycle3), TrieFormat.SHARED))

    assert lines == ["L 0 0", "L 1 1", "C 2 0 1", "L 3 2", "C 4 2 3", "T 0 1 4 leaf"]


def test_shared_trie_prints_copy_ids_for_subdivided_edges(double_edge: Multigraph) -> None:
    lines = list(trie_emit(enumerate_trails(double_edge, EnumerationMode.EDGE_DISTINCT), TrieFormat.SHARED))

    leaves = [line for line in lines if line.startswith("L ")]
    assert {int(line.split()[2]) for line in leaves} == {0, 1, 2}
    assert sum(1 for line in lines if line.startswith("T ")) == 2


def _expand_shared(lines: List[str]) -> List[List[int]]:
    labels: Dict[int, List[int]] = {}
    paths: Dict[int, List[int]] = {0: []}
    found: List[List[int]] = []
    for line in lines:
        fields = line.split()
        if fields[0] == "L":
            labels[int(fields[1])] = [int(fields[2])]
        elif fields[0] == "C":
            labels[int(fields[1])] = labels[int(fields[2])] + labels[int(fields[3])]
        else:
            child = int(fields[2])
            paths[child] = paths[int(fields[1])] + labels[int(fields[3])]
            if fields[-1] == "leaf":
                found.append(paths[child])
    return found


def test_shared_trie_lists_each_copy_once(double_edge: Multigraph, cycle3: Multigraph) -> None:
    cases = [(double_edge, EnumerationMode.EDGE_DISTINCT), (cycle3, EnumerationMode.SIMPLE)]
    multigraphs = random_instances(25, EnumerationMode.EDGE_DISTINCT, max_copies=9, seed=67)
    cases.extend((g, EnumerationMode.EDGE_DISTINCT) for g in multigraphs)
    for g, mode in cases:
        tree = enumerate_trails(g, mode)
        expected = sorted(list(trail.edges) for trail in decode_trails(tree))
        assert sorted(_expand_shared(list(trie_emit(tree, TrieFormat.SHARED)))) == expected


def test_shared_trie_stays_linear() -> None:
    for g in random_instances(20, EnumerationMode.NODE_DISTINCT, max_copies=12, seed=61):
        tree = enumerate_trails(g, EnumerationMode.NODE_DISTINCT)
        lines = list(trie_emit(tree, TrieFormat.SHARED))
        assert sum(1 for line in lines if line.startswith("T ")) == tree.counters.transitions
        assert len(lines) <= 50 * (g.m_total + tree.leaf_count)


def test_dot_export(two_triangles: Multigraph) -> None:
    source = trie_to_dot(enumerate_trails(two_triangles))

    assert source.startswith("digraph trail_trie {")
    assert source.count("->") == 2
    assert "doublecircle" in source
    assert "e3 e4 e5 e0 e1 e2" in source


def test_dot_labels_are_elided() -> None:
    ring = parse_edge_list("".join(f"n{i} n{(i + 1) % 20}\n" for i in range(20)), simple=True)
    source = trie_to_dot(enumerate_trails(ring), name="ring")

    assert source.startswith("digraph ring {")
    assert "e11 ..." in source
    assert "e12" not in source
