"""Stochastic hill climbing with restarts, with game-budget accounting."""

from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .dsl.ast import Node, digest
from .engine.match import run_match, winning_rate
from .engine.state import GameMap
from .engine.units import DEFAULT_TABLE, StatsTable
from .interp import ProgramPolicy


class BudgetTooSmall(RuntimeError):
    pass


@dataclass
class ShcConfig:
    k: int = 1000
    max_games: Optional[int] = None
    max_seconds: Optional[float] = None
    games_per_eval: int = 2
    seed: int = 0
    restart_on_local_optimum: bool = True
    max_candidates: int = 1_000_000  # guard for evaluators that stop charging (cache hits)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if (self.max_games is None) == (self.max_seconds is None):
            raise ValueError("set exactly one of max_games and max_seconds")
        if self.games_per_eval < 2 or self.games_per_eval % 2:
            raise ValueError("games_per_eval must be a positive even number")


@dataclass(frozen=True)
class Evaluation:
    score: float
    games: int
    logs: tuple = ()
    faulted: bool = False


@dataclass(frozen=True)
class Checkpoint:
    games: int
    best_eval: float
    best_program: Node
    restarts: int
    candidates: int
    iteration: int = 0


@dataclass
class SearchTrace:
    checkpoints: list = field(default_factory=list)
    restarts: int = 0
    candidates: int = 0
    games: int = 0

    COLUMNS = ("games", "best_eval", "restarts", "candidates")

    def to_csv(self, with_iteration: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS + (("iteration",) if with_iteration else ()))
        for c in self.checkpoints:
            row = [c.games, f"{c.best_eval:.6f}", c.restarts, c.candidates]
            if with_iteration:
                row.append(c.iteration)
            w.writerow(row)
        return buf.getvalue()


# --- evaluation ---------------------------------------------------------------


def tiebreak(score_self: int, score_other: int) -> float:
    """Score margin squeezed into (-1, 1)."""
    return (score_self - score_other) / (score_self + score_other + 1)


def evaluate_policy(candidate, opponent, maps, games_per_eval: int = 2, *,
                    stats: StatsTable = DEFAULT_TABLE, keep_logs: bool = False) -> Evaluation:
    """Play ``games_per_eval`` matches per map, alternating start slots.

    The score is the winning rate plus a tiebreak below half a point: the
    average over games of half the normalized margin of each drawn game.
    Identical policies get exactly 50, a policy that loses everything gets 0,
    and the tiebreak can never outweigh a change in wins, draws or losses.
    """
    if games_per_eval < 2 or games_per_eval % 2:
        raise ValueError("games_per_eval must be a positive even number")
    maps = [maps] if isinstance(maps, GameMap) else list(maps)
    results, logs = [], []
    margin = 0.0
    faulted = False
    for game_map in maps:
        for g in range(games_per_eval):
            run = run_match(candidate, opponent, game_map, g % 2, stats=stats, keep_log=keep_logs)
            r = run.result
            results.append(r)
            faulted = faulted or r.faults[0]
            if r.winner is None and not any(r.faults):
                margin += tiebreak(r.scores[0], r.scores[1])
            if keep_logs:
                logs.append(run.log)
    n = len(results)
    value = winning_rate(results, 0) + 0.5 * margin / n
    return Evaluation(value, n, tuple(logs), faulted)


class GameEvaluator:
    """Scores programs against a fixed opponent; repeated programs are answered from a cache at no cost."""

    def __init__(self, opponent, maps, games_per_eval: int = 2, stats: StatsTable = DEFAULT_TABLE):
        self.opponent = ProgramPolicy(opponent) if isinstance(opponent, Node) else opponent
        self.maps = [maps] if isinstance(maps, GameMap) else list(maps)
        self.games_per_eval = games_per_eval
        self.stats = stats
        self.cache: dict = {}
        self.faulty: set = set()

    @property
    def cost(self) -> int:
        return self.games_per_eval * len(self.maps)

    def __call__(self, program: Node) -> Evaluation:
        key = digest(program)
        hit = self.cache.get(key)
        if hit is not None:
            return Evaluation(hit.score, 0, (), hit.faulted)
        ev = evaluate_policy(program, self.opponent, self.maps, self.games_per_eval, stats=self.stats)
        self.cache[key] = ev
        if ev.faulted:
            self.faulty.add(key)
        return ev


# --- hill climbing ------------------------------------------------------------


class _Stop(Exception):
    pass


def shc(space, evaluate: Callable[[Node], Evaluation], config: ShcConfig, *,
        initial: Optional[Node] = None, on_evaluated: Optional[Callable] = None,
        rng: Optional[random.Random] = None, iteration: int = 0, games_offset: int = 0):
    """Hill climbing with restarts. Returns (best program, trace).

    Each iteration scores ``config.k`` neighbours of the current program and
    moves to the best one only if it is strictly better; otherwise the search
    restarts from a fresh initial program. ``evaluate.cost`` (default
    ``config.games_per_eval``) is the price checked against the budget before
    every evaluation. ``on_evaluated(program, evaluation)`` sees every scored
    candidate.
    """
    rng = rng if rng is not None else random.Random(config.seed)
    cost = getattr(evaluate, "cost", config.games_per_eval)
    trace = SearchTrace()
    started = time.monotonic()
    best: list = [None, float("-inf")]

    def exhausted() -> bool:
        if trace.candidates >= config.max_candidates:
            return True
        if config.max_games is not None:
            return trace.games + cost > config.max_games
        return time.monotonic() - started >= config.max_seconds

    def score(program: Node) -> float:
        if exhausted():
            raise _Stop
        ev = evaluate(program)
        trace.games += ev.games
        trace.candidates += 1
        if on_evaluated is not None:
            on_evaluated(program, ev)
        if ev.score > best[1]:
            best[0], best[1] = program, ev.score
            trace.checkpoints.append(Checkpoint(games_offset + trace.games, ev.score, program,
                                                trace.restarts, trace.candidates, iteration))
        return ev.score

    current = initial if initial is not None else space.initial(rng)
    try:
        current_score = score(current)
    except _Stop:
        raise BudgetTooSmall("the budget does not cover a single evaluation") from None

    try:
        while True:
            top, top_score = None, float("-inf")
            for nb in space.neighbors(current, config.k, rng):
                s = score(nb)
                if s > top_score:  # ties keep the earliest neighbour
                    top, top_score = nb, s
            if top_score > current_score:
                current, current_score = top, top_score
            else:
                trace.restarts += 1
                current = space.initial(rng)
                current_score = score(current)
    except _Stop:
        pass

    last = trace.checkpoints[-1]
    if games_offset + trace.games > last.games:
        trace.checkpoints.append(Checkpoint(games_offset + trace.games, best[1], best[0],
                                            trace.restarts, trace.candidates, iteration))
    return best[0], trace
