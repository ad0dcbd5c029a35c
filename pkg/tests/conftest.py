from __future__ import annotations

import random
from itertools import combinations, permutations
from typing import Iterator, List, Optional

import pytest

from eulertrie.graph import MultigraphBuilder, check_eulerian, parse_edge_list
from eulertrie.models import EnumerationMode, GenSpec, Multigraph
from eulertrie.testkit import GenerationError, gen_random_eulerian

TWO_TRIANGLES = "a b\nb c\nc a\na d\nd e\ne a\n"
DOUBLE_EDGE = "a b 2\nb a 1\n"


@pytest.fixture
def cycle3() -> Multigraph:
    return parse_edge_list("a b\nb c\nc a\n", simple=True)


@pytest.fixture
def path_abc() -> Multigraph:
    return parse_edge_list("a b\nb c\n", simple=True)


@pytest.fixture
def two_triangles() -> Multigraph:
    return parse_edge_list(TWO_TRIANGLES, simple=True)


@pytest.fixture
def double_edge() -> Multigraph:
    return parse_edge_list(DOUBLE_EDGE)


@pytest.fixture
def complete3() -> Multigraph:
    return parse_edge_list("a b\nb a\nb c\nc b\na c\nc a\n", simple=True)


def random_instances(
    count: int,
    mode: EnumerationMode = EnumerationMode.SIMPLE,
    max_nodes: int = 5,
    max_copies: int = 10,
    seed: int = 0,
) -> Iterator[Multigraph]:
    """Seeded small Eulerian instances, skipping specs the generator cannot place."""
    rng = random.Random(seed)
    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        assert attempts < count * 50, "generator keeps failing on small specs"
        n = rng.randint(2, max_nodes)
        spec = GenSpec(
            n=n,
            cycles=rng.randint(1, 3),
            min_cycle_length=1 if mode is not EnumerationMode.SIMPLE else 2,
            max_cycle_length=rng.randint(2, n) if n > 2 else 2,
            multiplicity_cap=1 if mode is EnumerationMode.SIMPLE else 3,
            seed=rng.randrange(2**32),
            mode=mode,
        )
        try:
            g = gen_random_eulerian(spec)
        except GenerationError:
            continue
        if g.m_total > max_copies:
            continue
        produced += 1
        yield g


def drop_one_copy(g: Multigraph, rng: random.Random) -> Optional[Multigraph]:
    """Remove one edge copy from a circuit graph, if the rest still has an open trail."""
    records = list(g.edges)
    rng.shuffle(records)
    for removed in records:
        if removed.is_loop:
            continue
        builder = MultigraphBuilder()
        for edge in g.edges:
            multiplicity = edge.multiplicity - (1 if edge.id == removed.id else 0)
            if multiplicity:
                builder.add_edge(edge.tail.name, edge.head.name, multiplicity)
        smaller = builder.build()
        if smaller.m_total and check_eulerian(smaller).feasible:
            return smaller
    return None


def small_eulerian_digraphs(node_count: int) -> Iterator[Multigraph]:
    """Every simple Eulerian digraph whose arcs lie on ``node_count`` labelled nodes."""
    names = [chr(ord("a") + index) for index in range(node_count)]
    arcs = list(permutations(names, 2))
    for size in range(2, len(arcs) + 1):
        for chosen in combinations(arcs, size):
            builder = MultigraphBuilder()
            for tail, head in chosen:
                builder.add_edge(tail, head)
            g = builder.build()
            if check_eulerian(g).feasible:
                yield g


def open_trail_instances(count: int, seed: int = 0) -> List[Multigraph]:
    rng = random.Random(seed)
    found: List[Multigraph] = []
    for g in random_instances(count * 3, seed=seed, max_copies=11):
        smaller = drop_one_copy(g, rng)
        if smaller is not None and smaller.is_simple():
            found.append(smaller)
        if len(found) == count:
            break
    return found
