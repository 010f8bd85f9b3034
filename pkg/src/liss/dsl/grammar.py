"""The Microlanguage grammar.

Productions are numbered globally and stably in the order listed in
``_TABLE``; an AST node stores the id of the production that expanded it.
Terminal symbols on a right-hand side become leaf nodes of the AST.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

NONTERMINALS = ("S", "B", "C", "T", "N", "D", "Op", "Tp")
START = "S"

UNIT_TYPES = ("Base", "Barracks", "Ranged", "Heavy", "Light", "Worker")
NUMBERS = ("0", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "15", "20", "25", "50", "100")
DIRECTION_NAMES = ("EnemyDir", "Up", "Down", "Right", "Left")
CRITERIA = ("Strongest", "Weakest", "Closest", "Farthest", "LessHealthy", "MostHealthy", "Random")
PLAYERS = ("Ally", "Enemy")

_TABLE: tuple = (
    ("S", ("S", "S")),
    ("S", ("for", "S")),
    ("S", ("if", "B", "then", "S")),
    ("S", ("if", "B", "then", "S", "else", "S")),
    ("S", ("C",)),
    ("S", ("empty",)),
    ("B", ("b1", "T", "N")),
    ("B", ("b2", "T", "N")),
    ("B", ("b3", "T", "N")),
    ("B", ("b4", "N")),
    ("B", ("b5", "N")),
    ("B", ("b6", "N")),
    ("B", ("b7", "T")),
    ("B", ("b8",)),
    ("B", ("b9",)),
    ("B", ("b10",)),
    ("B", ("b11",)),
    ("B", ("b12",)),
    ("B", ("b13",)),
    ("B", ("b14",)),
    ("C", ("c1", "T", "D", "N")),
    ("C", ("c2", "T", "D", "N")),
    ("C", ("c3", "Tp", "Op")),
    ("C", ("c4", "Op")),
    ("C", ("c5", "N")),
    ("C", ("c6",)),
    ("C", ("c7",)),
    *(("T", (t,)) for t in UNIT_TYPES),
    *(("N", (n,)) for n in NUMBERS),
    *(("D", (d,)) for d in DIRECTION_NAMES),
    *(("Op", (o,)) for o in CRITERIA),
    *(("Tp", (p,)) for p in PLAYERS),
)


@dataclass(frozen=True)
class Production:
    rule_id: int
    lhs: str
    rhs: tuple

    @property
    def head(self) -> str:
        """First terminal of the right-hand side ('for', 'b3', 'c6', 'Worker'...), or '' for S -> S S / S -> C."""
        first = self.rhs[0]
        return "" if first in NONTERMINALS else first

    def __str__(self):
        return f"{self.lhs} -> {' '.join(self.rhs)}"


PRODUCTIONS = tuple(Production(i, lhs, rhs) for i, (lhs, rhs) in enumerate(_TABLE))
RULE_BY_ID = PRODUCTIONS


S_NAMES = ("seq", "for", "if", "ifelse", "cmd", "empty")


def rule_named(lhs: str, name: str) -> Production:
    """Look up a production: ``rule_named('S', 'ifelse')``, ``rule_named('C', 'c6')``, ``rule_named('N', '25')``."""
    if lhs == "S":
        if name in S_NAMES:
            return PRODUCTIONS[S_NAMES.index(name)]
    else:
        for p in PRODUCTIONS:
            if p.lhs == lhs and p.head == name:
                return p
    raise KeyError(f"no production {lhs} -> {name}")


def rule_label(p: Production) -> str:
    return S_NAMES[p.rule_id] if p.lhs == "S" else p.head


# named S productions
SEQ, FOR, IF, IFELSE, CMD, EMPTY = range(6)


class Grammar:
    """An immutable set of productions grouped by left-hand side."""

    def __init__(self, productions: Iterable[Production] = PRODUCTIONS, start: str = START):
        grouped: dict[str, list] = {}
        for p in productions:
            grouped.setdefault(p.lhs, []).append(p)
        self.start = start
        self._rules: Mapping[str, tuple] = MappingProxyType({k: tuple(v) for k, v in grouped.items()})
        for lhs, rules in self._rules.items():
            for p in rules:
                for sym in p.rhs:
                    if sym in NONTERMINALS and sym not in self._rules:
                        raise ValueError(f"{p}: nonterminal {sym} has no productions")
        if start not in self._rules:
            raise ValueError(f"start symbol {start} has no productions")

    def rules(self, nonterminal: str) -> tuple:
        return self._rules[nonterminal]

    @property
    def nonterminals(self) -> tuple:
        return tuple(self._rules)

    def productions(self) -> tuple:
        return tuple(p for rules in self._rules.values() for p in rules)

    def restricted(self, keep: Mapping[str, Iterable[str]]) -> "Grammar":
        """Sub-grammar keeping, for each listed nonterminal, only productions with the given heads.

        Heads are first terminals ('c6', 'Worker', '1'); S productions are named
        'seq', 'for', 'if', 'ifelse', 'cmd', 'empty'.
        """
        kept = []
        for p in self.productions():
            allowed = keep.get(p.lhs)
            if allowed is None:
                kept.append(p)
                continue
            if rule_label(p) in set(allowed):
                kept.append(p)
        return Grammar(kept, self.start)

    def __repr__(self):
        return f"Grammar({sum(len(v) for v in self._rules.values())} productions)"


DEFAULT_GRAMMAR = Grammar()
