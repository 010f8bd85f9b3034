import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from liss.dsl.ast import iter_nonterminals
from liss.dsl.sampler import enumerate_programs, sample_program
from liss.dsl.syntax import parse
from liss.engine.match import run_match
from liss.interp import NON_EXECUTABLE, signature
from liss.library import (
    LIBRARY_CLASSES,
    EmptyPool,
    InsertResult,
    Library,
    LibraryFormatError,
    NoneAvailable,
    StatePool,
    build_library,
    harvest_pool,
    load_library,
    sample_replacement,
    try_insert,
)


@pytest.fixture(scope="module")
def logs(nwr, aggressive):
    rng = random.Random(9)
    out = []
    for i in range(6):
        opp = sample_program(rng=rng, max_size=25)
        out.append(run_match(aggressive, opp, nwr, i % 2).log)
    return out


@pytest.fixture(scope="module")
def pool(logs):
    return harvest_pool(logs, cap=60, rng=random.Random(0))


def test_pool_respects_cap(logs):
    total = sum(len(l) for l in logs)
    assert total > 60
    assert len(harvest_pool(logs, cap=60, rng=random.Random(1))) == 60
    assert len(harvest_pool(logs, cap=total + 50, rng=random.Random(1))) == total


def test_pool_is_deterministic(logs):
    a = harvest_pool(logs, cap=60, rng=random.Random(4))
    b = harvest_pool(logs, cap=60, rng=random.Random(4))
    assert a.states == b.states and a.fingerprint() == b.fingerprint()


def test_pool_keeps_whole_logs_in_order(logs):
    p = harvest_pool(logs, cap=10_000, rng=random.Random(2))
    ticks = {}
    for tag, s in zip(p.tags, p.states):
        assert s.tick >= ticks.get(tag, -1)
        ticks[tag] = s.tick


def test_empty_logs_raise():
    with pytest.raises(EmptyPool):
        harvest_pool([], cap=10)


def test_pool_round_trip(pool):
    again = StatePool.from_text(pool.to_text())
    assert again.states == pool.states
    assert again.fingerprint() == pool.fingerprint()


def test_idle_and_equal_branches_collapse(pool):
    lib = build_library([parse("u.idle()"), parse("if(u.IsBuilder()) then u.idle() else u.idle()")], pool)
    idle_like = [e for e in lib.entries["C"] if e.signature == signature(parse("u.idle()", symbol="C"), pool)]
    assert len(idle_like) == 1
    assert [e.program for e in lib.entries["B"]] == [parse("u.IsBuilder()", symbol="B")]
    # S-level: "u.idle()" and the if-statement behave the same
    assert lib.count("S") == 1


def test_empty_corpus_and_idempotence(pool):
    assert len(build_library([], pool)) == 0
    p = parse("for(Unit u)\n    u.harvest(2)\n    u.attack(Weakest)")
    once = build_library([p], pool)
    twice = build_library([p, p], pool)
    assert [e.program for e in once.all_entries()] == [e.program for e in twice.all_entries()]


def test_library_needs_states():
    with pytest.raises(EmptyPool):
        Library(StatePool([]))


DEEP = "for(Unit u) " * 10 + "u.idle()"


def test_try_insert_outcomes(pool):
    lib = Library(pool)
    p = parse("for(Unit u) u.attack(Closest)")
    assert try_insert(lib, p) is InsertResult.INSERTED
    assert try_insert(lib, p) is InsertResult.DUPLICATE
    assert try_insert(lib, parse("for(Unit u) u.attack(Closest)\nu.attack(Closest)")) is InsertResult.DUPLICATE
    # every pool state has at least four units, so ten nested loops blow the step budget
    assert try_insert(lib, parse(DEEP)) is InsertResult.NON_EXECUTABLE
    assert len(lib) == 1


def test_sample_replacement_frequencies(pool):
    lib = Library(pool)
    rng = random.Random(0)
    while lib.count("B") < 3:
        lib.try_insert(sample_program(rng=rng, symbol="B"))
    counts = Counter(sample_replacement(lib, "B", rng) for _ in range(2000))
    assert len(counts) == 3
    assert all(abs(c / 2000 - 1 / 3) <= 0.05 for c in counts.values())
    with pytest.raises(NoneAvailable):
        sample_replacement(lib, "C", rng)
    lib.try_insert(parse("u.idle()", symbol="C"))
    assert {sample_replacement(lib, "C", rng) for _ in range(20)} == {parse("u.idle()", symbol="C")}
    with pytest.raises(ValueError):
        sample_replacement(lib, "T", rng)


def _brute_force(corpus, states):
    seen = {}
    for program in corpus:
        for _, sub in iter_nonterminals(program):
            if sub.symbol not in LIBRARY_CLASSES:
                continue
            sig = signature(sub, states)
            if sig is NON_EXECUTABLE:
                continue
            seen.setdefault((sub.symbol, sig), sub)
    return {c: [p for (root, _), p in seen.items() if root == c] for c in LIBRARY_CLASSES}


def test_oracle_equivalence_small_programs(pool):
    corpus = enumerate_programs(max_size=5)
    lib = build_library(corpus, pool)
    expected = _brute_force(corpus, pool.states)
    for c in LIBRARY_CLASSES:
        assert [e.program for e in lib.entries[c]] == expected[c]


def test_dedup_invariant(pool):
    lib = build_library([sample_program(rng=random.Random(i), max_size=40) for i in range(40)], pool)
    for c in LIBRARY_CLASSES:
        sigs = [e.signature for e in lib.entries[c]]
        assert len(sigs) == len(set(sigs))
        for e in lib.entries[c]:
            assert signature(e.program, pool.states) == e.signature


def test_growth_is_monotone(pool):
    lib = Library(pool)
    sizes = []
    rng = random.Random(3)
    for _ in range(30):
        lib.try_insert(sample_program(rng=rng, max_size=30))
        sizes.append(len(lib))
    assert sizes == sorted(sizes)


def test_library_file_round_trip(pool):
    lib = build_library([sample_program(rng=random.Random(i), max_size=30) for i in range(15)], pool)
    text = lib.to_text()
    back = load_library(text, pool)
    assert [e.program for e in back.all_entries()] == [e.program for e in lib.all_entries()]
    assert back.to_text() == text


def test_library_file_is_checked(pool, logs):
    lib = build_library([parse("u.idle()")], pool)
    other = harvest_pool(logs, cap=30, rng=random.Random(8))
    with pytest.raises(LibraryFormatError):
        load_library(lib.to_text(), other)
    with pytest.raises(LibraryFormatError):
        load_library(lib.to_text().replace("format: 1", "format: 2"), pool)
    tampered = lib.to_text().replace("signature: ", "signature: 0", 1)
    with pytest.raises(LibraryFormatError):
        load_library(tampered, pool)
