import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from liss.dsl.ast import Node, digest, get_at, leaf, nonterminal_nodes, replace_at
from liss.dsl.grammar import DEFAULT_GRAMMAR, NONTERMINALS, NUMBERS, PRODUCTIONS, rule_named
from liss.dsl.sampler import (
    SamplerStats,
    SamplingBudgetExhausted,
    enumerate_programs,
    regrow_subtree,
    sample_program,
)
from liss.dsl.syntax import parse, pretty


def test_rule_set_matches_the_grammar():
    by_lhs = Counter(p.lhs for p in PRODUCTIONS)
    assert set(by_lhs) == set(NONTERMINALS)
    assert by_lhs == {"S": 6, "B": 14, "C": 7, "T": 6, "N": 16, "D": 5, "Op": 7, "Tp": 2}
    assert NUMBERS == tuple(str(n) for n in [*range(11), 15, 20, 25, 50, 100])
    assert [p.rule_id for p in PRODUCTIONS] == list(range(len(PRODUCTIONS)))


def test_every_nonterminal_has_a_rule():
    for nt in NONTERMINALS:
        assert DEFAULT_GRAMMAR.rules(nt)


def test_node_rejects_wrong_children():
    with pytest.raises(ValueError):
        Node(rule_named("C", "c5").rule_id, ("c5",))
    with pytest.raises(ValueError):
        Node(rule_named("C", "c5").rule_id, ("c5", leaf("T", "Worker")))


def test_size_counts_leaves_and_internal_nodes():
    # S -> C -> c6 : three nodes, the terminal included
    assert parse("u.idle()").size == 3
    assert parse("empty").size == 2
    assert parse("for(Unit u) u.harvest(1)").size == 7


def test_forced_derivation_of_a_restricted_grammar():
    g = DEFAULT_GRAMMAR.restricted({"C": ["c6"]})
    tree = sample_program(g, min_size=1, max_size=10, rng=random.Random(0), symbol="C")
    assert tree == Node(rule_named("C", "c6").rule_id, ("c6",))
    assert tree.size == 2


def test_sampling_is_deterministic_per_seed():
    a = sample_program(rng=random.Random(7))
    b = sample_program(rng=random.Random(7))
    assert a == b and a.size >= 4


def test_rejection_is_observable_in_stats():
    stats = SamplerStats()
    for seed in range(50):
        sample_program(min_size=10, max_size=30, rng=random.Random(seed), stats=stats)
    assert stats.draws == 50 + stats.too_small + stats.too_big
    assert stats.too_small > 0 and stats.too_big > 0


def test_sampling_budget_exhausted():
    with pytest.raises(SamplingBudgetExhausted):
        sample_program(min_size=90, max_size=91, rng=random.Random(0), max_rejections=5)


def test_b_productions_drawn_uniformly():
    rng = random.Random(3)
    counts = Counter()
    n = 10_000
    for _ in range(n):
        counts[sample_program(min_size=1, max_size=100, rng=rng, symbol="B").production.head] += 1
    assert len(counts) == 14
    for head, c in counts.items():
        assert abs(c / n - 1 / 14) <= 0.02, head
    assert chisquare(list(counts.values())).pvalue > 0.001


def test_regrow_replaces_only_the_chosen_subtree():
    prog = parse("if(u.IsBuilder()) then u.idle()")
    rng = random.Random(0)
    seen_c = False
    for _ in range(200):
        out, path = regrow_subtree(prog, rng, return_path=True)
        if path == (3, 0):  # the C node under the then-branch
            seen_c = True
            assert get_at(out, (1,)) == get_at(prog, (1,))
            assert get_at(out, path).symbol == "C"
    assert seen_c


def test_regrow_node_choice_is_uniform():
    rng = random.Random(11)
    counts = Counter()
    trials = 1000
    big = parse("if(u.IsBuilder()) then for(Unit u) u.train(Worker,Up,5)")
    nodes = nonterminal_nodes(big)
    assert len(nodes) == 8  # S S S B C T D N
    for _ in range(trials):
        _, path = regrow_subtree(big, rng, return_path=True)
        counts[path] += 1
    for path, _ in nodes:
        assert abs(counts[path] / trials - 1 / 8) <= 0.04


def test_regrowing_the_root_gives_a_fresh_program():
    prog = parse("u.idle()")
    out = replace_at(prog, (), sample_program(rng=random.Random(5)))
    assert out.symbol == "S"


def test_enumerate_small_sizes():
    assert enumerate_programs(max_size=0) == []
    two = enumerate_programs(max_size=2)
    assert [pretty(p) for p in two] == ["empty\n"]
    three = {pretty(p) for p in enumerate_programs(max_size=3)}
    assert three == {"empty\n", "u.idle()\n", "u.moveAway()\n"}


def test_enumerate_is_duplicate_free_and_sorted():
    progs = enumerate_programs(max_size=7)
    assert len(set(progs)) == len(progs)
    sizes = [p.size for p in progs]
    assert sizes == sorted(sizes)


def test_samples_appear_in_the_enumeration():
    table = set(enumerate_programs(max_size=7))
    rng = random.Random(2)
    hits = 0
    for _ in range(3000):
        p = sample_program(min_size=1, max_size=7, rng=rng)
        assert p in table
        hits += 1
    assert hits == 3000


@given(st.integers(0, 2**32 - 1))
def test_digest_is_stable_and_discriminating(seed):
    rng = random.Random(seed)
    a = sample_program(rng=rng, max_size=40)
    b = sample_program(rng=rng, max_size=40)
    assert digest(a) == digest(parse(pretty(a)))
    assert (digest(a) == digest(b)) == (a == b)
