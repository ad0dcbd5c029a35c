"""Text and DOT renderings of trails and of the compressed trail trie."""
from __future__ import annotations

from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

from graphviz import Digraph

from .exploration import DecodedTrail, StateTree, TreeState
from .labels import Concat, Label, Leaf, expand_label

# Longest expanded label drawn on a DOT edge before it is elided.
DOT_LABEL_EDGES = 12


class TrieFormat(str, Enum):
    EXPANDED = "expanded"
    SHARED = "shared"


def format_trail_edges(trail: DecodedTrail) -> str:
    return " ".join(f"e{edge}" for edge in trail.edges)


def format_trail_nodes(trail: DecodedTrail) -> str:
    return " ".join(trail.nodes)


def _format_ids(ids: List[int]) -> str:
    return " ".join(f"e{edge}" for edge in ids)


def _emit_expanded(tree: StateTree) -> Iterator[str]:
    yield f"root {tree.start.name}"
    stack: List[Tuple[TreeState, int]] = [(child, 1) for child in reversed(tree.children(tree.root))]
    while stack:
        state, depth = stack.pop()
        assert state.label is not None
        line = f"{'  ' * depth}-> [{_format_ids(tree.output_ids(expand_label(state.label)))}]"
        yield line + " leaf" if state.is_leaf else line
        for child in reversed(tree.children(state)):
            stack.append((child, depth + 1))


def _is_second_half(tree: StateTree, node: Label) -> bool:
    # Subdivision gives copy c the edges 2c and 2c + 1; the second half adds no copy.
    return tree.back_map is not None and isinstance(node, Leaf) and node.edge % 2 == 1


def _emit_shared(tree: StateTree) -> Iterator[str]:
    """Label table in post-order, then one line per transition referring to it.

    In edge-distinct mode each edge copy gets a single ``L`` entry: the second
    half of a subdivided copy has no entry, and a concat node with such a half
    as a child reuses the index of its other child.
    """
    index: Dict[int, int] = {}
    entries = 0
    for state in tree.states[1:]:
        assert state.label is not None
        stack: List[Tuple[Label, bool]] = [(state.label, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in index or _is_second_half(tree, node):
                continue
            if isinstance(node, Leaf):
                index[id(node)] = entries
                entries += 1
                yield f"L {index[id(node)]} {tree.output_id(node.edge)}"
            elif expanded:
                assert isinstance(node, Concat)
                kept = [child for child in (node.left, node.right) if id(child) in index]
                if len(kept) == 1:
                    index[id(node)] = index[id(kept[0])]
                    continue
                index[id(node)] = entries
                entries += 1
                yield f"C {index[id(node)]} {index[id(node.left)]} {index[id(node.right)]}"
            else:
                assert isinstance(node, Concat)
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))

    for state in tree.states[1:]:
        assert state.parent is not None and state.label is not None
        line = f"T {state.parent} {state.id} {index[id(state.label)]}"
        yield line + " leaf" if state.is_leaf else line


def trie_emit(tree: StateTree, fmt: TrieFormat = TrieFormat.EXPANDED) -> Iterator[str]:
    """Lines of the trie; the shared form stays linear in the number of stored transitions."""
    if fmt is TrieFormat.SHARED:
        return _emit_shared(tree)
    return _emit_expanded(tree)


def _dot_label(tree: StateTree, label: Label) -> str:
    ids = tree.output_ids(expand_label(label))
    if len(ids) > DOT_LABEL_EDGES:
        return _format_ids(ids[:DOT_LABEL_EDGES]) + " ..."
    return _format_ids(ids)


def trie_to_dot(tree: StateTree, name: Optional[str] = None) -> str:
    dot = Digraph(name=name or "trail_trie")
    dot.attr(rankdir="LR")
    dot.node("0", label=tree.start.name, shape="doublecircle")
    for state in tree.states[1:]:
        assert state.parent is not None and state.label is not None
        dot.node(str(state.id), label="", shape="box" if state.is_leaf else "circle")
        dot.edge(str(state.parent), str(state.id), label=_dot_label(tree, state.label))
    return dot.source
