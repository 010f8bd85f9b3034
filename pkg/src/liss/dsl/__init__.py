"""The scripting language: grammar, trees, text form and random derivations."""

from .ast import Node, digest, get_at, iter_nonterminals, leaf, nonterminal_nodes, replace_at
from .grammar import DEFAULT_GRAMMAR, NONTERMINALS, PRODUCTIONS, Grammar, Production, rule_named
from .sampler import (
    SamplerStats,
    SamplingBudgetExhausted,
    enumerate_programs,
    regrow_subtree,
    sample_program,
)
from .syntax import ParseError, parse, pretty

__all__ = [
    "DEFAULT_GRAMMAR", "NONTERMINALS", "PRODUCTIONS", "Grammar", "Node", "ParseError", "Production",
    "SamplerStats", "SamplingBudgetExhausted", "digest", "enumerate_programs", "get_at",
    "iter_nonterminals", "leaf", "nonterminal_nodes", "parse", "pretty", "regrow_subtree",
    "replace_at", "rule_named", "sample_program",
]
