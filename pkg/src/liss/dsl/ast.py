"""Immutable derivation trees.

Internal nodes record the production that expanded them; leaves are the
terminal strings themselves. ``size`` counts every node, leaves included.
"""

from __future__ import annotations

import hashlib
from typing import Iterator, Union

from .grammar import NONTERMINALS, PRODUCTIONS


class Node:
    __slots__ = ("rule", "children", "size", "_hash")

    def __init__(self, rule: int, children: tuple):
        prod = PRODUCTIONS[rule]
        if len(children) != len(prod.rhs):
            raise ValueError(f"{prod}: expected {len(prod.rhs)} children, got {len(children)}")
        size = 1
        for sym, child in zip(prod.rhs, children):
            if sym in NONTERMINALS:
                if not isinstance(child, Node) or PRODUCTIONS[child.rule].lhs != sym:
                    raise ValueError(f"{prod}: child for {sym} must be a {sym} node, got {child!r}")
                size += child.size
            else:
                if child != sym:
                    raise ValueError(f"{prod}: expected terminal {sym!r}, got {child!r}")
                size += 1
        self.rule = rule
        self.children = children
        self.size = size
        self._hash = hash((rule, children))

    @property
    def symbol(self) -> str:
        return PRODUCTIONS[self.rule].lhs

    @property
    def production(self):
        return PRODUCTIONS[self.rule]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Node):
            return NotImplemented
        return self._hash == other._hash and self.rule == other.rule and self.children == other.children

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = " ".join(repr(c) if isinstance(c, str) else repr(c) for c in self.children)
        return f"({self.symbol} {inner})"

    def __reduce__(self):
        return (Node, (self.rule, self.children))


Tree = Union[Node, str]
Path = tuple


def leaf(nonterminal: str, token: str) -> Node:
    """A value node such as (T Worker) or (N 25)."""
    for p in PRODUCTIONS:
        if p.lhs == nonterminal and p.rhs == (token,):
            return Node(p.rule_id, (token,))
    raise KeyError(f"{nonterminal} has no terminal {token!r}")


def iter_nonterminals(tree: Node, path: Path = ()) -> Iterator[tuple[Path, Node]]:
    """Pre-order walk over internal nodes, yielding (path, node)."""
    yield path, tree
    for i, child in enumerate(tree.children):
        if isinstance(child, Node):
            yield from iter_nonterminals(child, path + (i,))


def nonterminal_nodes(tree: Node) -> list[tuple[Path, Node]]:
    return list(iter_nonterminals(tree))


def get_at(tree: Node, path: Path) -> Node:
    for i in path:
        tree = tree.children[i]
    return tree


def replace_at(tree: Node, path: Path, new: Node) -> Node:
    if not path:
        if new.symbol != tree.symbol:
            raise ValueError(f"cannot replace a {tree.symbol} node with a {new.symbol} node")
        return new
    i = path[0]
    children = list(tree.children)
    children[i] = replace_at(children[i], path[1:], new)
    return Node(tree.rule, tuple(children))


def depth_of(path: Path) -> int:
    return len(path)


def digest(tree: Node) -> str:
    """Stable 128-bit hex digest of a tree's structure."""
    return hashlib.blake2b(_canon(tree).encode(), digest_size=16).hexdigest()


def _canon(tree: Tree) -> str:
    if isinstance(tree, str):
        return tree
    return "(" + str(tree.rule) + " " + " ".join(_canon(c) for c in tree.children) + ")"
