import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from liss.dsl.sampler import enumerate_programs, sample_program
from liss.dsl.syntax import parse
from liss.engine.match import run_match
from liss.engine.state import IDLE, Attack, Harvest, initial_state, manhattan
from liss.interp import (
    NON_EXECUTABLE,
    ExecContext,
    StepBudgetExceeded,
    canonical_assignment,
    eval_bool,
    interpret,
    signature,
    signature_digest,
)


@pytest.fixture(scope="module")
def start(nwr):
    return initial_state(nwr)


@pytest.fixture(scope="module")
def visited(nwr, aggressive):
    """A few hundred distinct mid-game states from assorted matches."""
    rng = random.Random(5)
    seen, states = set(), []
    for i in range(12):
        opp = sample_program(rng=rng, max_size=30) if i % 3 else parse("empty")
        log = run_match(aggressive, opp, nwr, i % 2).log
        for s in log:
            key = s.decision_key()
            if key not in seen:
                seen.add(key)
                states.append(s)
    rng.shuffle(states)
    return states


def _units(state, player, kind):
    return [u for u in state.units_of(player) if u.kind == kind]


def test_harvest_one(start):
    out = interpret(parse("for(Unit u) u.harvest(1)"), start, 0)
    (worker,) = _units(start, 0, "Worker")
    (base,) = _units(start, 0, "Base")
    cmd = out[worker.id]
    assert isinstance(cmd, Harvest)
    nearest = min(manhattan(worker.pos, c) for c, _ in start.piles)
    assert manhattan(worker.pos, cmd.target) == nearest
    assert out[base.id] == IDLE


def test_empty_assigns_idle(start):
    out = interpret(parse("empty"), start, 1)
    assert set(out) == {u.id for u in start.units_of(1)}
    assert set(out.values()) == {IDLE}


def test_first_writer_wins(visited):
    prog = parse("for(Unit u) u.attack(Closest)\nfor(Unit u) u.idle()")
    attack_only = parse("for(Unit u) u.attack(Closest)")
    checked = 0
    for s in visited[:100]:
        a = interpret(attack_only, s, 0)
        b = interpret(prog, s, 0)
        for uid, cmd in a.items():
            if isinstance(cmd, Attack):
                assert b[uid] == cmd
                checked += 1
    assert checked > 0


@given(st.integers(0, 2**32 - 1))
def test_priority_law(seed):
    from liss.engine.maps import shipped_map

    rng = random.Random(seed)
    a = sample_program(rng=rng, symbol="S", max_size=20)
    b = sample_program(rng=rng, symbol="S", max_size=20)
    state = initial_state(shipped_map("nwr_9x8"))
    first = parse("for(Unit u)\n" + "\n".join("    " + ln for ln in _text(a).splitlines()))
    combined = parse(_text(first) + "for(Unit u)\n" + "\n".join("    " + ln for ln in _text(b).splitlines()))
    alone = interpret(first, state, 0)
    together = interpret(combined, state, 0)
    for uid, cmd in alone.items():
        if cmd != IDLE:
            assert together[uid] == cmd


def _text(p):
    from liss.dsl.syntax import pretty

    return pretty(p)


def test_booleans_on_the_start_state(start):
    ctx = ExecContext(start, 0)
    assert eval_bool(parse("HasNumberOfUnits(Worker,1)", symbol="B"), ctx)
    assert eval_bool(parse("HasLessNumberOfUnits(Barracks,25)", symbol="B"), ctx)
    (base,) = _units(start, 0, "Base")
    assert not eval_bool(parse("u.canAttack()", symbol="B"), ExecContext(start, 0, current_unit=base))


def test_unit_booleans_without_binding_are_false(start):
    for text in ("u.IsBuilder()", "u.canAttack()", "u.canHarvest()", "u.is_Type(Worker)"):
        node = parse(text, symbol="B")
        assert eval_bool(node, ExecContext(start, 0)) is False


def test_equal_branches_give_equal_signatures(visited):
    pool = visited[:30]
    a = signature(parse("if(u.canAttack()) then u.idle() else u.idle()"), pool)
    b = signature(parse("u.idle()"), pool)
    assert a == b


def test_unsatisfiable_guard_equals_empty(visited):
    pool = visited[:30]
    guarded = parse("if(u.IsBuilder()) then u.train(Worker,Up,5)")  # no binding outside for
    assert signature(guarded, pool) == signature(parse("empty"), pool)


def test_step_budget_makes_programs_nonexecutable(start):
    deep = parse("for(Unit u) for(Unit u) for(Unit u) u.idle()")
    with pytest.raises(StepBudgetExceeded):
        interpret(deep, start, 0, step_budget=20)
    assert signature(deep, [start], step_budget=20) is NON_EXECUTABLE
    assert signature(deep, [start]) is not NON_EXECUTABLE


def test_interpret_is_pure(visited):
    prog = parse("for(Unit u) u.train(Worker,EnemyDir,20)\nu.attack(Random)")
    for s in visited[:20]:
        before = (s.units, s.resources, s.piles)
        assert interpret(prog, s, 1) == interpret(prog, s, 1)
        assert (s.units, s.resources, s.piles) == before


def test_boolean_signature_and_digest(visited):
    pool = visited[:10]
    sig = signature(parse("HasNumberOfUnits(Worker,1)", symbol="B"), pool)
    assert all(isinstance(x, bool) for x in sig)
    assert len(signature_digest(sig)) == 32
    assert signature_digest(NON_EXECUTABLE) == "nonexecutable"


def test_signatures_generalise_to_held_out_states(visited):
    programs = enumerate_programs(max_size=6)
    pool, held = visited[:50], visited[50:70]
    assert len(held) == 20
    groups = {}
    for p in programs:
        sig = signature(p, pool)
        if sig is not NON_EXECUTABLE:
            groups.setdefault(sig, []).append(p)
    pairs = agree = 0
    for members in groups.values():
        for a, b in combinations(members, 2):
            pairs += 1
            ok = all(
                canonical_assignment(interpret(a, s, 0)) == canonical_assignment(interpret(b, s, 0))
                if a.symbol != "B" else True
                for s in held
            )
            agree += ok
    assert pairs > 0
    assert agree / pairs >= 0.99
