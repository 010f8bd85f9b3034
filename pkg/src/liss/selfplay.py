"""Iterated best response, training artifacts and transfer runs."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .dsl.ast import Node, digest
from .dsl.syntax import parse, pretty
from .engine.match import run_match
from .engine.state import GameMap
from .engine.units import DEFAULT_TABLE, StatsTable
from .library import DEFAULT_POOL_CAP, Library, StatePool, build_library, harvest_pool, load_library
from .search import GameEvaluator, SearchTrace, ShcConfig, shc
from .space import SemanticSpace, SyntaxSpace

EMPTY_PROGRAM = parse("empty")
MODES = ("syntax", "syntax_init", "liss")


class MissingLibrary(FileNotFoundError):
    pass


@dataclass
class IbrConfig:
    map: GameMap
    shc: ShcConfig
    iterations: int = 5
    initial_opponent: Node = EMPTY_PROGRAM
    stats: StatsTable = DEFAULT_TABLE
    collect_logs: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class TrainingArtifacts:
    final_policy: Node
    corpus: list
    state_logs: list  # (tag, [GameState]) pairs
    traces: list
    policies: list = field(default_factory=list)  # best response of each iteration

    def merged_trace(self) -> SearchTrace:
        out = SearchTrace()
        for t in self.traces:
            out.checkpoints.extend(t.checkpoints)
            out.restarts += t.restarts
            out.candidates += t.candidates
            out.games += t.games
        return out


def run_ibr(space, config: IbrConfig, *, first_candidate: Optional[Node] = None,
            rng: Optional[random.Random] = None) -> TrainingArtifacts:
    """Alternate best responses, starting against ``config.initial_opponent``.

    Iteration i searches for a best response to iteration i-1's policy. If the
    search finds nothing scoring at least 50, the opponent itself is kept (it
    draws against itself), so each policy does at least as well as a tie
    against its predecessor. ``first_candidate`` seeds every search.
    """
    rng = rng if rng is not None else random.Random(config.shc.seed)
    opponent = config.initial_opponent
    corpus: dict = {}
    logs, traces, policies = [], [], []
    games = 0

    def seen(program: Node, ev) -> None:
        if ev.games == 0 or ev.faulted:
            return  # cache hit or a program that cannot run
        key = digest(program)
        if key not in corpus:
            corpus[key] = program
            space.record_candidate(program)

    for i in range(config.iterations):
        evaluator = GameEvaluator(opponent, config.map, config.shc.games_per_eval, config.stats)
        best, trace = shc(space, evaluator, config.shc, initial=first_candidate, on_evaluated=seen,
                          rng=rng, iteration=i, games_offset=games)
        games += trace.games
        if trace.checkpoints[-1].best_eval < 50.0:
            best = opponent
        traces.append(trace)
        policies.append(best)
        if config.collect_logs:
            for slot in (0, 1):
                run = run_match(best, opponent, config.map, slot, stats=config.stats)
                logs.append((f"iter{i}-slot{slot}", run.log))
        opponent = best
    return TrainingArtifacts(opponent, list(corpus.values()), logs, traces, policies)


# --- artifacts on disk --------------------------------------------------------


def run_dir(out: Path, seed: int) -> Path:
    return Path(out) / "run" / str(seed)


def save_training(art: TrainingArtifacts, directory: Path, *, pool_cap: int = DEFAULT_POOL_CAP,
                  seed: int = 0, player: int = 0) -> tuple[StatePool, Library]:
    """Write policy, corpus, pool, library and trace; return the pool and library."""
    directory = Path(directory)
    (directory / "corpus").mkdir(parents=True, exist_ok=True)
    (directory / "policy.mrl").write_text(pretty(art.final_policy))
    for i, program in enumerate(art.corpus):
        (directory / "corpus" / f"{i:06d}.mrl").write_text(pretty(program))
    for i, program in enumerate(art.policies):
        (directory / f"policy_iter{i}.mrl").write_text(pretty(program))
    pool = harvest_pool(art.state_logs, pool_cap, random.Random(seed))
    (directory / "pool.states").write_text(pool.to_text())
    library = build_library(art.corpus, pool, player)
    (directory / "library.lib").write_text(library.to_text())
    (directory / "trace.csv").write_text(art.merged_trace().to_csv(with_iteration=True))
    return pool, library


def load_policy(directory: Path) -> Node:
    return parse((Path(directory) / "policy.mrl").read_text())


def load_corpus(directory: Path) -> list:
    return [parse(p.read_text()) for p in sorted((Path(directory) / "corpus").glob("*.mrl"))]


def load_training_library(directory: Path) -> Library:
    directory = Path(directory)
    lib_path, pool_path = directory / "library.lib", directory / "pool.states"
    if not lib_path.exists() or not pool_path.exists():
        raise MissingLibrary(f"no library/pool under {directory}")
    pool = StatePool.from_text(pool_path.read_text())
    return load_library(lib_path.read_text(), pool)


# --- transfer -----------------------------------------------------------------


@dataclass
class TransferResult:
    mode: str
    trace: SearchTrace
    policies: list  # policy after each iteration
    checkpoints: list  # games consumed when each policy was fixed
    library_size: int = 0


def make_space(mode: str, *, z: int, cap: int, k: int, epsilon: float,
               train_dir: Optional[Path] = None, continual_growth: bool = True):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "liss":
        if train_dir is None:
            raise MissingLibrary("liss mode needs a completed training run")
        lib = load_training_library(train_dir)
        return SemanticSpace(z=z, cap=cap, k=k, library=lib, epsilon=epsilon, continual_growth=continual_growth)
    return SyntaxSpace(z=z, cap=cap, k=k)


def train_then_transfer(test_map: GameMap, mode: str, shc_config: ShcConfig, *, iterations: int,
                        train_dir: Optional[Path] = None, z: int = 4, cap: int = 100,
                        epsilon: float = 0.20, stats: StatsTable = DEFAULT_TABLE,
                        continual_growth: bool = True) -> TransferResult:
    """Self-play on the test map in one of three modes.

    ``syntax`` searches the syntax space from scratch and never opens
    ``train_dir``. ``syntax_init`` starts every best-response search from the
    trained policy. ``liss`` searches the semantic space induced by the
    trained library, which keeps growing during the run unless
    ``continual_growth`` is off.
    """
    if mode == "syntax":
        train_dir = None
    elif train_dir is None:
        raise MissingLibrary(f"{mode} mode needs a completed training run")
    space = make_space(mode, z=z, cap=cap, k=shc_config.k, epsilon=epsilon, train_dir=train_dir,
                       continual_growth=continual_growth)
    first = load_policy(train_dir) if mode == "syntax_init" else None
    config = IbrConfig(map=test_map, shc=shc_config, iterations=iterations, stats=stats, collect_logs=False)
    art = run_ibr(space, config, first_candidate=first)
    marks, total = [], 0
    for t in art.traces:
        total += t.games
        marks.append(total)
    size = len(space.library) if isinstance(space, SemanticSpace) else 0
    return TransferResult(mode, art.merged_trace(), art.policies, marks, size)
