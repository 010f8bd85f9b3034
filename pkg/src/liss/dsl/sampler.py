"""Uniform random derivations, subtree regrowth and exhaustive enumeration."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product

from .ast import Node, get_at, nonterminal_nodes, replace_at
from .grammar import DEFAULT_GRAMMAR, NONTERMINALS, Grammar

DEFAULT_CAP = 100
DEFAULT_MAX_REJECTIONS = 10_000


class SamplingBudgetExhausted(RuntimeError):
    pass


class _TooBig(Exception):
    pass


def _derive(grammar: Grammar, symbol: str, rng: random.Random, budget: list) -> Node:
    # budget[0] is the number of nodes still allowed; abort as soon as it goes negative
    rules = grammar.rules(symbol)
    prod = rules[rng.randrange(len(rules))] if len(rules) > 1 else rules[0]
    budget[0] -= 1
    if budget[0] < 0:
        raise _TooBig
    children = []
    for sym in prod.rhs:
        if sym in NONTERMINALS:
            children.append(_derive(grammar, sym, rng, budget))
        else:
            budget[0] -= 1
            if budget[0] < 0:
                raise _TooBig
            children.append(sym)
    return Node(prod.rule_id, tuple(children))


def derive(grammar: Grammar, symbol: str, rng: random.Random, max_size: int,
           max_rejections: int = DEFAULT_MAX_REJECTIONS) -> Node:
    """A uniform derivation of ``symbol`` with at most ``max_size`` nodes (rejection)."""
    for _ in range(max_rejections):
        try:
            return _derive(grammar, symbol, rng, [max_size])
        except _TooBig:
            continue
    raise SamplingBudgetExhausted(f"no derivation of {symbol} within {max_size} nodes after {max_rejections} tries")


class SamplerStats:
    """Counts draws and rejections; handy for checking the rejection scheme."""

    def __init__(self):
        self.draws = 0
        self.too_small = 0
        self.too_big = 0


def sample_program(grammar: Grammar = DEFAULT_GRAMMAR, min_size: int = 4, max_size: int = DEFAULT_CAP,
                   rng: random.Random | None = None, max_rejections: int = DEFAULT_MAX_REJECTIONS,
                   stats: SamplerStats | None = None, symbol: str | None = None) -> Node:
    """Random complete derivation from the start symbol with ``min_size <= size <= max_size``.

    Each nonterminal is expanded with a production chosen uniformly at random;
    any draw outside the size window is thrown away and sampling starts over.
    """
    if min_size < 1 or max_size < min_size:
        raise ValueError("need 1 <= min_size <= max_size")
    rng = rng if rng is not None else random.Random()
    symbol = symbol or grammar.start
    for _ in range(max_rejections):
        if stats is not None:
            stats.draws += 1
        try:
            tree = _derive(grammar, symbol, rng, [max_size])
        except _TooBig:
            if stats is not None:
                stats.too_big += 1
            continue
        if tree.size >= min_size:
            return tree
        if stats is not None:
            stats.too_small += 1
    raise SamplingBudgetExhausted(f"no program with {min_size} <= size <= {max_size} after {max_rejections} draws")


def regrow_subtree(program: Node, rng: random.Random, max_size: int = DEFAULT_CAP,
                   grammar: Grammar = DEFAULT_GRAMMAR, max_rejections: int = DEFAULT_MAX_REJECTIONS,
                   return_path: bool = False):
    """Replace a uniformly chosen nonterminal node's subtree by a fresh derivation of the same symbol."""
    nodes = nonterminal_nodes(program)
    path, old = nodes[rng.randrange(len(nodes))]
    room = max_size - (program.size - old.size)
    if room < 1:
        raise SamplingBudgetExhausted("program already exceeds the size cap")
    new = derive(grammar, old.symbol, rng, room, max_rejections)
    out = replace_at(program, path, new)
    return (out, path) if return_path else out


def enumerate_programs(grammar: Grammar = DEFAULT_GRAMMAR, max_size: int = 4, symbol: str | None = None) -> list[Node]:
    """Every complete derivation of size <= ``max_size``, ordered by size, then production order."""
    symbol = symbol or grammar.start
    out = []
    for s in range(1, max_size + 1):
        out.extend(_exact(grammar, symbol, s))
    return out


def _exact(grammar: Grammar, symbol: str, size: int) -> list[Node]:
    return _exact_cached(grammar, symbol, size)


@lru_cache(maxsize=None)
def _exact_cached(grammar: Grammar, symbol: str, size: int) -> tuple:
    if size < 2:
        return ()
    out = []
    for prod in grammar.rules(symbol):
        slots = [sym for sym in prod.rhs if sym in NONTERMINALS]
        fixed = 1 + (len(prod.rhs) - len(slots))
        remaining = size - fixed
        if remaining < 2 * len(slots) or (not slots and remaining != 0):
            continue
        for sizes in _compositions(remaining, len(slots)):
            options = [_exact_cached(grammar, sym, s) for sym, s in zip(slots, sizes)]
            if any(not o for o in options):
                continue
            for combo in product(*options):
                it = iter(combo)
                children = tuple(next(it) if sym in NONTERMINALS else sym for sym in prod.rhs)
                out.append(Node(prod.rule_id, children))
    return tuple(out)


def _compositions(total: int, parts: int):
    """Ordered ways to write ``total`` as ``parts`` integers, each >= 2."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 2:
            yield (total,)
        return
    for first in range(2, total - 2 * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


__all__ = [
    "SamplingBudgetExhausted",
    "SamplerStats",
    "derive",
    "sample_program",
    "regrow_subtree",
    "enumerate_programs",
    "get_at",
]
