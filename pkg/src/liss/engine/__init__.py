"""A small deterministic two-player real-time strategy simulator."""

from .maps import MapParseError, dump_map, load_map, resolve_map, shipped_map
from .match import EmptyResults, MatchResult, PolicyRuntimeFault, play_match, run_match, winning_rate
from .rules import apply_tick
from .state import GameMap, GameState, MapInvariantError, initial_state
from .units import DEFAULT_TABLE, StatsTable, load_stats

__all__ = [
    "DEFAULT_TABLE", "EmptyResults", "GameMap", "GameState", "MapInvariantError", "MapParseError",
    "MatchResult", "PolicyRuntimeFault", "StatsTable", "apply_tick", "dump_map", "initial_state",
    "load_map", "load_stats", "play_match", "resolve_map", "run_match", "shipped_map", "winning_rate",
]
