"""Search spaces: an initial-candidate generator plus a neighbourhood function.

Both spaces draw initial candidates the same way; they differ only in how
neighbours are produced. The syntax space regrows a random subtree from the
grammar. The semantic space mostly swaps a subtree for a library program of
the same root class and falls back to a regrowth with probability epsilon.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .dsl.ast import Node, nonterminal_nodes, replace_at
from .dsl.grammar import DEFAULT_GRAMMAR, Grammar
from .dsl.sampler import DEFAULT_CAP, regrow_subtree, sample_program
from .library import LIBRARY_CLASSES, Library

LIBRARY_MOVE_TRIES = 50


@dataclass
class SyntaxSpace:
    grammar: Grammar = DEFAULT_GRAMMAR
    z: int = 4
    cap: int = DEFAULT_CAP
    k: int = 1000
    name: str = "syntax"

    def initial(self, rng: random.Random) -> Node:
        return sample_program(self.grammar, self.z, self.cap, rng)

    def syntax_move(self, current: Node, rng: random.Random) -> Node:
        return regrow_subtree(current, rng, self.cap, self.grammar)

    def neighbor(self, current: Node, rng: random.Random) -> Node:
        return self.syntax_move(current, rng)

    def neighbors(self, current: Node, k: Optional[int] = None, rng: Optional[random.Random] = None) -> list:
        k = self.k if k is None else k
        if k < 1:
            raise ValueError("k must be >= 1")
        rng = rng if rng is not None else random.Random()
        return [self.neighbor(current, rng) for _ in range(k)]

    def record_candidate(self, evaluated: Node) -> None:
        pass


@dataclass
class SemanticSpace(SyntaxSpace):
    library: Optional[Library] = None
    epsilon: float = 0.20
    continual_growth: bool = True
    name: str = "liss"
    stats: dict = field(default_factory=lambda: {"syntax": 0, "library": 0, "fallback": 0})

    def __post_init__(self):
        if self.library is None:
            raise ValueError("a semantic space needs a library")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")

    def library_move(self, current: Node, rng: random.Random) -> Optional[Node]:
        lib = self.library
        nodes = [(p, n) for p, n in nonterminal_nodes(current) if n.symbol in LIBRARY_CLASSES and lib.count(n.symbol)]
        if not nodes:
            return None
        for _ in range(LIBRARY_MOVE_TRIES):
            path, old = nodes[rng.randrange(len(nodes))]
            new = lib.sample(old.symbol, rng)
            if current.size - old.size + new.size <= self.cap:
                return replace_at(current, path, new)
        return None

    def neighbor(self, current: Node, rng: random.Random) -> Node:
        if rng.random() < self.epsilon:
            self.stats["syntax"] += 1
            return self.syntax_move(current, rng)
        out = self.library_move(current, rng)
        if out is None:
            self.stats["fallback"] += 1
            return self.syntax_move(current, rng)
        self.stats["library"] += 1
        return out

    def record_candidate(self, evaluated: Node) -> None:
        if self.continual_growth:
            self.library.add_subtrees(evaluated)


def initial(space: SyntaxSpace, rng: random.Random) -> Node:
    return space.initial(rng)


def neighbors(space: SyntaxSpace, current: Node, k: int, rng: random.Random) -> list:
    return space.neighbors(current, k, rng)


def record_candidate(space: SyntaxSpace, evaluated: Node) -> None:
    space.record_candidate(evaluated)
