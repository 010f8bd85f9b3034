import random
from statistics import mean

import pytest

from liss.dsl.ast import digest
from liss.dsl.syntax import parse, pretty
from liss.engine.maps import shipped_map
from liss.search import ShcConfig, evaluate_policy
from liss.selfplay import (
    EMPTY_PROGRAM,
    IbrConfig,
    MissingLibrary,
    load_corpus,
    load_policy,
    load_training_library,
    run_dir,
    run_ibr,
    save_training,
    train_then_transfer,
)
from liss.space import SyntaxSpace


def small_ibr(game_map, seed, iterations=2, games=120, k=12):
    cfg = IbrConfig(map=game_map, shc=ShcConfig(k=k, max_games=games, seed=seed), iterations=iterations)
    return run_ibr(SyntaxSpace(k=k), cfg)


@pytest.fixture(scope="module")
def trained(tmp_path_factory, nwr):
    art = small_ibr(nwr, seed=3, iterations=3)
    directory = run_dir(tmp_path_factory.mktemp("train"), 3)
    pool, lib = save_training(art, directory, pool_cap=80, seed=3)
    return art, directory, pool, lib


def test_iterations_must_be_positive(nwr):
    with pytest.raises(ValueError):
        IbrConfig(map=nwr, shc=ShcConfig(k=1, max_games=10), iterations=0)


def test_one_iteration_beats_empty():
    bw = shipped_map("basesworkers_24x24")
    rates = []
    for seed in range(5):
        art = small_ibr(bw, seed, iterations=1, games=100, k=10)
        rates.append(evaluate_policy(art.final_policy, EMPTY_PROGRAM, bw, 2).score)
    assert mean(rates) >= 90


def test_ibr_is_deterministic(nwr):
    a = small_ibr(nwr, seed=5)
    b = small_ibr(nwr, seed=5)
    assert pretty(a.final_policy) == pretty(b.final_policy)
    assert a.merged_trace().to_csv() == b.merged_trace().to_csv()


def test_corpus_accounting(trained):
    art = trained[0]
    keys = [digest(p) for p in art.corpus]
    assert len(keys) == len(set(keys))
    evaluated = sum(t.candidates for t in art.traces)
    assert 0 < len(art.corpus) <= evaluated
    for t in art.traces:
        for c in t.checkpoints:
            if c.best_program != EMPTY_PROGRAM:
                assert digest(c.best_program) in set(keys)


def test_each_policy_holds_its_own_against_the_previous(trained, nwr):
    art = trained[0]
    previous = EMPTY_PROGRAM
    for policy in art.policies:
        assert evaluate_policy(policy, previous, nwr, 2).score >= 50
        previous = policy
    assert art.final_policy == art.policies[-1]


def test_logs_come_from_best_response_matches(trained, nwr):
    art = trained[0]
    assert [tag for tag, _ in art.state_logs] == [f"iter{i}-slot{s}" for i in range(3) for s in (0, 1)]
    assert all(s.map == nwr for _, log in art.state_logs for s in log)


def test_artifacts_on_disk(trained):
    art, directory, pool, lib = trained
    for name in ("policy.mrl", "pool.states", "library.lib", "trace.csv"):
        assert (directory / name).is_file()
    assert load_policy(directory) == art.final_policy
    assert load_corpus(directory) == art.corpus
    again = load_training_library(directory)
    assert [e.program for e in again.all_entries()] == [e.program for e in lib.all_entries()]
    assert len(lib) > 0


def test_transfer_syntax_ignores_train_dir(trained, lmo):
    cfg = ShcConfig(k=8, max_games=40, seed=1)
    a = train_then_transfer(lmo, "syntax", cfg, iterations=2)
    b = train_then_transfer(lmo, "syntax", cfg, iterations=2, train_dir=trained[1])
    assert a.policies == b.policies
    assert a.checkpoints == b.checkpoints == [40, 80]
    assert a.library_size == 0


def test_transfer_syntax_init_starts_from_the_train_policy(trained, lmo):
    from liss import search

    seen = []
    original = search.shc

    def spy(space, evaluate, config, **kw):
        seen.append(kw.get("initial"))
        return original(space, evaluate, config, **kw)

    import liss.selfplay as sp

    sp.shc = spy
    try:
        train_then_transfer(lmo, "syntax_init", ShcConfig(k=8, max_games=40, seed=1),
                            iterations=2, train_dir=trained[1])
    finally:
        sp.shc = original
    assert seen == [trained[0].final_policy] * 2


def test_transfer_liss_grows_the_library(trained, lmo):
    res = train_then_transfer(lmo, "liss", ShcConfig(k=8, max_games=60, seed=2), iterations=2, train_dir=trained[1])
    assert res.library_size >= len(trained[3])
    assert len(res.policies) == 2


def test_transfer_needs_training_for_other_modes(lmo, tmp_path):
    cfg = ShcConfig(k=4, max_games=20)
    with pytest.raises(MissingLibrary):
        train_then_transfer(lmo, "liss", cfg, iterations=1)
    with pytest.raises(MissingLibrary):
        train_then_transfer(lmo, "liss", cfg, iterations=1, train_dir=tmp_path)
    with pytest.raises(ValueError):
        train_then_transfer(lmo, "bogus", cfg, iterations=1, train_dir=tmp_path)


def test_frozen_library_transfer(trained, lmo):
    res = train_then_transfer(lmo, "liss", ShcConfig(k=8, max_games=40, seed=2), iterations=1,
                              train_dir=trained[1], continual_growth=False)
    assert res.library_size == len(trained[3])
