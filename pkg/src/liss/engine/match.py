"""Running matches between two policies.

A policy is anything with ``decide(state, player) -> (assignment, volatile)``:
``assignment`` maps the player's free unit ids to commands and ``volatile``
says the decision depended on the clock (so ticks cannot be skipped). DSL
programs are wrapped automatically.

Policies only observe units, resources and piles, never countdowns, so a tick
in which nothing starts and nothing completes is followed by identical
decisions until the next completion. The runner jumps over such stretches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .rules import advance, min_remaining, score, step
from .state import GameMap, GameState, initial_state
from .units import DEFAULT_TABLE, StatsTable


class PolicyRuntimeFault(RuntimeError):
    """A policy could not produce an assignment (the faulting side loses)."""


class EmptyResults(ValueError):
    pass


@dataclass(frozen=True)
class MatchResult:
    """Outcome from the point of view of the two policies.

    ``winner`` is 0 for ``policy_a``, 1 for ``policy_b`` and None for a draw.
    ``scores`` is indexed the same way. ``start_slot`` is the player index
    ``policy_a`` controlled.
    """

    winner: Optional[int]
    ticks: int
    scores: tuple
    start_slot: int
    faults: tuple = (False, False)

    def outcome_for(self, side: int) -> str:
        if self.winner is None:
            return "draw"
        return "win" if self.winner == side else "loss"


@dataclass
class MatchRun:
    result: MatchResult
    log: list = field(default_factory=list)  # decision states, in order
    decisions: list = field(default_factory=list)  # (state, assignment per player) when recorded
    final: Optional[GameState] = None


def as_policy(policy):
    if hasattr(policy, "decide"):
        return policy
    from ..interp import ProgramPolicy  # engine stays importable without the DSL

    return ProgramPolicy(policy)


_NO_ORDERS: dict = {}


def run_match(policy_a, policy_b, game_map: GameMap, start_slot: int = 0, *,
              stats: StatsTable = DEFAULT_TABLE, rng_stream_id: str = "",
              keep_log: bool = True, record: bool = False, max_ticks: Optional[int] = None) -> MatchRun:
    if start_slot not in (0, 1):
        raise ValueError("start_slot must be 0 or 1")
    a, b = as_policy(policy_a), as_policy(policy_b)
    by_player = (a, b) if start_slot == 0 else (b, a)
    limit = game_map.max_ticks if max_ticks is None else max_ticks
    state = initial_state(game_map, stats, rng_stream_id)
    log = []
    decisions = []
    faults = [False, False]  # per player

    while True:
        alive = (bool(state.units_of(0)), bool(state.units_of(1)))
        if not (alive[0] and alive[1]) or state.tick >= limit:
            break
        orders = [_NO_ORDERS, _NO_ORDERS]
        volatile = False
        consulted = False
        for player in (0, 1):
            if not state.has_free_unit(player):
                continue
            consulted = True
            try:
                orders[player], vol = by_player[player].decide(state, player)
            except PolicyRuntimeFault:
                faults[player] = True
                continue
            volatile = volatile or vol
        if faults[0] or faults[1]:
            break
        if consulted:
            if keep_log:
                log.append(state)
            if record:
                decisions.append((state, tuple(orders)))
        nxt, started, completed = step(state, orders)
        if started == 0 and completed == 0 and not volatile:
            rem = min_remaining(nxt)
            if rem is None:
                # nothing in progress and nothing will ever start: the game is frozen
                state = GameState(limit, nxt.map, nxt.units, nxt.resources, nxt.piles,
                                  nxt.next_id, nxt.stats, nxt.rng_stream_id)
                break
            hop = min(rem - 1, limit - nxt.tick)
            if hop > 0:
                nxt = advance(nxt, hop)
        state = nxt

    players_alive = (bool(state.units_of(0)), bool(state.units_of(1)))
    if faults[0] or faults[1]:
        if faults[0] and faults[1]:
            winner_player = None
        else:
            winner_player = 1 if faults[0] else 0
    elif players_alive[0] and not players_alive[1]:
        winner_player = 0
    elif players_alive[1] and not players_alive[0]:
        winner_player = 1
    else:
        winner_player = None

    side_of_player = (0, 1) if start_slot == 0 else (1, 0)
    winner = None if winner_player is None else side_of_player[winner_player]
    player_of_side = (start_slot, 1 - start_slot)
    result = MatchResult(
        winner=winner,
        ticks=state.tick,
        scores=(score(state, player_of_side[0]), score(state, player_of_side[1])),
        start_slot=start_slot,
        faults=(faults[player_of_side[0]], faults[player_of_side[1]]),
    )
    return MatchRun(result, log, decisions, state)


def play_match(policy_a, policy_b, game_map: GameMap, start_slot: int = 0, **kwargs) -> tuple[MatchResult, list]:
    """Play one match; ``policy_a`` controls player ``start_slot``. Returns (result, state log)."""
    run = run_match(policy_a, policy_b, game_map, start_slot, **kwargs)
    return run.result, run.log


def winning_rate(results, for_side: int = 0) -> float:
    """(wins + draws / 2) / games * 100 from one side's point of view.

    ``results`` holds MatchResult objects or the strings 'win'/'draw'/'loss'.
    """
    results = list(results)
    if not results:
        raise EmptyResults("winning rate of an empty result list")
    wins = draws = 0
    for r in results:
        outcome = r if isinstance(r, str) else r.outcome_for(for_side)
        if outcome == "win":
            wins += 1
        elif outcome == "draw":
            draws += 1
        elif outcome != "loss":
            raise ValueError(f"unknown outcome {outcome!r}")
    return (wins + draws / 2) / len(results) * 100
