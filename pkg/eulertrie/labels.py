"""Persistent edge-sequence labels shared between compressed edges and trie transitions."""
from __future__ import annotations

from typing import Iterable, List, Optional


class Label:
    """Immutable binary tree whose leaves, read left to right, spell an edge sequence.

    ``length`` and ``first`` are cached so they cost O(1); nothing ever
    mutates a label once built, so subtrees are freely shared.
    """

    __slots__ = ("length", "first")

    length: int
    first: int

    def expand(self) -> List[int]:
        return expand_label(self)

    def __len__(self) -> int:
        return self.length


class Leaf(Label):
    __slots__ = ("edge",)

    def __init__(self, edge: int) -> None:
        self.edge = edge
        self.length = 1
        self.first = edge

    def __repr__(self) -> str:
        return f"Leaf({self.edge})"


class Concat(Label):
    __slots__ = ("left", "right")

    def __init__(self, left: Label, right: Label) -> None:
        self.left = left
        self.right = right
        self.length = left.length + right.length
        self.first = left.first

    def __repr__(self) -> str:
        return f"Concat(len={self.length}, first={self.first})"


def leaf(edge: int) -> Leaf:
    return Leaf(edge)


def concat(left: Label, right: Label) -> Concat:
    return Concat(left, right)


def concat_all(labels: Iterable[Label]) -> Optional[Label]:
    """Left fold of :func:`concat`; a single label comes back unchanged."""
    result: Optional[Label] = None
    for label in labels:
        result = label if result is None else Concat(result, label)
    return result


def expand_label(label: Label) -> List[int]:
    """Edge ids of ``label`` in order, in time proportional to its length."""
    edges: List[int] = []
    stack: List[Label] = [label]
    while stack:
        node = stack.pop()
        if isinstance(node, Concat):
            stack.append(node.right)
            stack.append(node.left)
        else:
            edges.append(node.edge)  # type: ignore[attr-defined]
    return edges
