import random
import statistics

import pytest

from liss.bench import (
    BetaConfig,
    BetaReport,
    FixedSpace,
    _Recorder,
    _rollout,
    emit_report,
    estimate_beta,
    mean_ci,
    run_sample_efficiency,
    same_trajectory,
    sign_test,
)
from liss.config import preset
from liss.dsl.syntax import parse
from liss.engine.match import run_match
from liss.engine.units import DEFAULT_TABLE
from liss.search import SearchTrace
from liss.selfplay import TransferResult
from liss.space import SyntaxSpace


def test_degenerate_space_is_fully_identical(nwr):
    rep = estimate_beta(BetaConfig(FixedSpace(SyntaxSpace()), [nwr], n_programs=4, n_neighbors=5, seed=0))
    assert rep.p_beta_mean == 1.0 and rep.fractions == [1.0] * 4


def test_report_shape(nwr):
    rep = estimate_beta(BetaConfig(SyntaxSpace(), [nwr], n_programs=6, n_neighbors=10, seed=1))
    assert len(rep.fractions) == 6
    assert all(0 <= f <= 1 for f in rep.fractions)
    assert rep.p_beta_mean == pytest.approx(statistics.fmean(rep.fractions))
    assert len(rep.to_csv().splitlines()) == 7


def test_beta_is_deterministic(nwr, lmo):
    cfg = BetaConfig(SyntaxSpace(), [nwr, lmo], n_programs=3, n_neighbors=10, seed=4)
    assert estimate_beta(cfg).to_csv() == estimate_beta(cfg).to_csv()


def _full_decisions(program, opponent, game_map):
    rec = _Recorder(program)
    run_match(rec, opponent, game_map, 0, keep_log=False)
    return [(s, a) for s, a, _ in rec.seen], rec.fault_state is not None


def test_trajectory_check_agrees_with_full_rollouts(nwr):
    space = SyntaxSpace(k=15)
    rng = random.Random(2)
    checked = identical = 0
    for _ in range(8):
        p = space.initial(rng)
        opp = space.neighbors(p, 1, rng)[0]
        ref = _rollout(p, opp, nwr, DEFAULT_TABLE)
        expected = _full_decisions(p, opp, nwr)
        for nb in space.neighbors(p, 15, rng):
            got = same_trajectory(nb, ref)
            assert got == (_full_decisions(nb, opp, nwr) == expected)
            checked += 1
            identical += got
    assert checked == 120 and 0 < identical < checked


def _transfer(mode, policies):
    return TransferResult(mode, SearchTrace(), policies, [10 * (i + 1) for i in range(len(policies))])


def test_self_comparison_is_fifty(nwr, aggressive):
    pols = [parse("for(Unit u) u.harvest(1)"), aggressive]
    runs = {(m, s): _transfer(m, pols) for m in ("syntax", "liss") for s in (0, 1)}
    res = run_sample_efficiency(runs, nwr, 20, pairs=(("liss", "syntax"),))
    assert [row[-1] for row in res.curves] == [50.0] * 4
    assert res.final_rates[("liss", "syntax")] == [50.0, 50.0]


def test_winner_is_detected(nwr, aggressive, empty_program):
    runs = {("liss", 0): _transfer("liss", [aggressive]), ("syntax", 0): _transfer("syntax", [empty_program])}
    res = run_sample_efficiency(runs, nwr, 10, pairs=(("liss", "syntax"),))
    assert res.final_games[("liss", "syntax")] == {"win": 2, "draw": 0, "loss": 0}
    assert res.p_values[("liss", "syntax")] == pytest.approx(0.25)


def test_sign_test_and_intervals():
    assert sign_test(0, 0) == 1.0
    assert sign_test(9, 1) < 0.05
    assert sign_test(1, 9) > 0.95
    assert mean_ci([5.0]) == (5.0, 5.0, 5.0)
    m, lo, hi = mean_ci([40, 60])
    assert m == 50 and lo < 50 < hi


def test_reports_are_byte_identical(tmp_path, nwr):
    cfg = preset("desk").snapshot()
    rep = estimate_beta(BetaConfig(SyntaxSpace(), [nwr], n_programs=3, n_neighbors=5, seed=0))
    a = emit_report({"beta_syntax": rep}, tmp_path / "a", config=cfg, inputs={"x": "1"})
    b = emit_report({"beta_syntax": rep}, tmp_path / "b", config=cfg, inputs={"x": "1"})
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a" / "beta_syntax.csv").read_bytes() == (tmp_path / "b" / "beta_syntax.csv").read_bytes()
    text = a.read_text()
    for needle in ('"epsilon": 0.2', '"z": 4', '"k": 50'):
        assert needle in text
    with pytest.raises(ValueError):
        emit_report({}, tmp_path / "c")
    with pytest.raises(TypeError):
        emit_report({"x": 3}, tmp_path / "c")
