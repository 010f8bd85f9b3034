import random

import pytest
from hypothesis import given, settings, strategies as st

from liss.dsl.grammar import DEFAULT_GRAMMAR
from liss.dsl.syntax import parse
from liss.search import (
    BudgetTooSmall,
    Evaluation,
    GameEvaluator,
    SearchTrace,
    ShcConfig,
    evaluate_policy,
    shc,
    tiebreak,
)
from liss.space import SyntaxSpace


def by_size(program):
    return Evaluation(float(program.size), 2)


def constant(program):
    return Evaluation(1.0, 2)


class CountingSpace(SyntaxSpace):
    batches: int = 0

    def neighbors(self, current, k=None, rng=None):
        self.batches += 1
        return super().neighbors(current, k, rng)


def test_config_needs_exactly_one_budget():
    with pytest.raises(ValueError):
        ShcConfig(k=5)
    with pytest.raises(ValueError):
        ShcConfig(k=5, max_games=10, max_seconds=1.0)
    with pytest.raises(ValueError):
        ShcConfig(k=0, max_games=10)
    with pytest.raises(ValueError):
        ShcConfig(k=1, max_games=10, games_per_eval=3)


def test_size_evaluator_climbs_to_the_cap():
    space = SyntaxSpace(cap=20, k=30)
    best, trace = shc(space, by_size, ShcConfig(k=30, max_games=6000, seed=1))
    evals = [c.best_eval for c in trace.checkpoints]
    assert evals == sorted(evals)
    assert best.size >= 18
    assert by_size(best).score == max(evals)


def test_flat_evaluator_restarts_every_iteration():
    space = CountingSpace(k=4)
    _, trace = shc(space, constant, ShcConfig(k=4, max_games=2 * 101, seed=0))
    assert trace.candidates == 101
    assert trace.restarts == 101 // 5
    assert space.batches in (trace.restarts, trace.restarts + 1)


def test_budget_too_small():
    with pytest.raises(BudgetTooSmall):
        shc(SyntaxSpace(k=2), constant, ShcConfig(k=2, max_games=1))


@given(st.integers(0, 1000), st.integers(3, 400))
@settings(max_examples=30)
def test_budget_law(seed, budget):
    _, trace = shc(SyntaxSpace(cap=30, k=7), by_size, ShcConfig(k=7, max_games=budget, seed=seed))
    assert trace.games <= budget
    assert budget - trace.games < 2
    games = [c.games for c in trace.checkpoints]
    assert games == sorted(set(games))
    assert trace.checkpoints[-1].games == trace.games


def test_shc_is_deterministic():
    cfg = ShcConfig(k=10, max_games=400, seed=7)
    a = shc(SyntaxSpace(cap=40, k=10), by_size, cfg)
    b = shc(SyntaxSpace(cap=40, k=10), by_size, cfg)
    assert a[0] == b[0]
    assert a[1].to_csv() == b[1].to_csv()


def test_accepted_moves_strictly_improve():
    seen = []
    shc(SyntaxSpace(cap=30, k=5), by_size, ShcConfig(k=5, max_games=600, seed=3),
        on_evaluated=lambda p, ev: seen.append(ev.score))
    assert len(seen) == 300


def test_trace_csv_columns():
    _, trace = shc(SyntaxSpace(k=3), by_size, ShcConfig(k=3, max_games=20, seed=0))
    lines = trace.to_csv().splitlines()
    assert lines[0] == "games,best_eval,restarts,candidates"
    assert len(lines) == len(trace.checkpoints) + 1
    assert SearchTrace().to_csv(with_iteration=True) == "games,best_eval,restarts,candidates,iteration\n"


def test_seeded_start_is_evaluated_first():
    start = parse("for(Unit u) u.harvest(1)")
    first = []
    shc(SyntaxSpace(k=2), by_size, ShcConfig(k=2, max_games=10),
        initial=start, on_evaluated=lambda p, ev: first.append(p))
    assert first[0] == start


TINY = DEFAULT_GRAMMAR.restricted({"S": ["seq", "for", "cmd", "empty"], "C": ["c5", "c6", "c7"], "N": ["1", "2"]})
TARGET = parse("for(Unit u) u.harvest(2)\nu.moveAway()")


def test_finds_a_target_program():
    def oracle(p):
        # one game per evaluation; a hit spends the rest of the budget so the run stops
        return Evaluation(1.0, 50_000) if p == TARGET else Evaluation(0.0, 1)

    found = 0
    for seed in range(20):
        space = SyntaxSpace(grammar=TINY, z=2, cap=12, k=25)
        best, trace = shc(space, oracle, ShcConfig(k=25, max_games=50_000, games_per_eval=2, seed=seed))
        found += best == TARGET
    assert found >= 18


def test_tiebreak_range():
    assert tiebreak(0, 0) == 0
    assert tiebreak(10, 0) == pytest.approx(10 / 11)
    assert -1 < tiebreak(0, 500) < 0


def test_identical_policies_score_fifty(nwr, aggressive):
    ev = evaluate_policy(aggressive, aggressive, nwr, 2)
    assert ev.score == 50.0 and ev.games == 2


def test_empty_against_aggressive_scores_zero(nwr, empty_program, aggressive):
    ev = evaluate_policy(empty_program, aggressive, nwr, 4, keep_logs=True)
    assert ev.score == 0.0
    assert ev.games == 4 and len(ev.logs) == 4


def test_tiebreak_never_outweighs_a_result(nwr, lmo, empty_program, aggressive):
    ev = evaluate_policy(aggressive, empty_program, [nwr, lmo], 2)
    assert ev.score == 100.0


def test_game_evaluator_caches(nwr, aggressive, empty_program):
    ge = GameEvaluator(aggressive, nwr, 2)
    first = ge(empty_program)
    again = ge(parse("empty"))
    assert (first.games, again.games) == (2, 0)
    assert first.score == again.score
    assert ge.cost == 2
