"""Game values: commands, units, maps and states.

Everything here is immutable. A ``GameState`` is a plain value that can be
copied, hashed, compared and shipped between processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .units import DEFAULT_TABLE, MOBILE, StatsTable

Cell = tuple[int, int]

UP, RIGHT, DOWN, LEFT = "Up", "Right", "Down", "Left"
# fixed tie-break order for anything direction-related
DIRECTIONS = (UP, RIGHT, DOWN, LEFT)
DELTAS = {UP: (0, -1), RIGHT: (1, 0), DOWN: (0, 1), LEFT: (-1, 0)}


def step_cell(cell: Cell, direction: str) -> Cell:
    dx, dy = DELTAS[direction]
    return (cell[0] + dx, cell[1] + dy)


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


# --- commands -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Idle:
    pass


@dataclass(frozen=True, slots=True)
class Move:
    direction: str


@dataclass(frozen=True, slots=True)
class MoveToward:
    target: Cell


@dataclass(frozen=True, slots=True)
class Harvest:
    target: Cell


@dataclass(frozen=True, slots=True)
class ReturnResources:
    base_id: int


@dataclass(frozen=True, slots=True)
class Produce:
    kind: str
    direction: str


@dataclass(frozen=True, slots=True)
class Attack:
    target_id: int


UnitCommand = Idle | Move | MoveToward | Harvest | ReturnResources | Produce | Attack
IDLE = Idle()


# --- units --------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Action:
    """An in-progress durative action.

    ``kind`` is one of move/attack/harvest/return/produce; ``origin`` names the
    command that started it (a Harvest command may start a move).
    """

    kind: str
    remaining: int
    origin: str
    cell: Optional[Cell] = None
    target_id: Optional[int] = None
    produce: Optional[str] = None


@dataclass(frozen=True, slots=True)
class Unit:
    id: int
    owner: int
    kind: str
    pos: Cell
    hp: int
    carrying: int = 0
    action: Optional[Action] = None

    @property
    def busy(self) -> bool:
        return self.action is not None

    @property
    def mobile(self) -> bool:
        return self.kind in MOBILE


# --- maps ---------------------------------------------------------------------


class MapInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class GameMap:
    name: str
    width: int
    height: int
    walls: frozenset
    resource_piles: tuple  # ((x, y), amount), row-major
    start_units: tuple  # (owner, kind, (x, y)), row-major
    start_resources: tuple = (5, 5)
    max_ticks: int = 3000

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def validate(self, strict: bool = True) -> None:
        if self.width <= 0 or self.height <= 0:
            raise MapInvariantError("map dimensions must be positive")
        if self.max_ticks <= 0:
            raise MapInvariantError("max_ticks must be positive")
        if len(self.start_resources) != 2 or min(self.start_resources) < 0:
            raise MapInvariantError("start_resources must be two nonnegative integers")
        piles = set()
        for cell, amount in self.resource_piles:
            if not self.in_bounds(cell):
                raise MapInvariantError(f"resource pile {cell} out of bounds")
            if cell in self.walls:
                raise MapInvariantError(f"resource pile {cell} on a wall")
            if amount <= 0:
                raise MapInvariantError(f"resource pile {cell} must hold a positive amount")
            piles.add(cell)
        seen = set()
        for owner, kind, cell in self.start_units:
            if owner not in (0, 1):
                raise MapInvariantError(f"unit owner {owner} not in {{0,1}}")
            if not self.in_bounds(cell):
                raise MapInvariantError(f"unit at {cell} out of bounds")
            if cell in self.walls:
                raise MapInvariantError(f"unit placed on a wall at {cell}")
            if cell in piles:
                raise MapInvariantError(f"unit placed on a resource pile at {cell}")
            if cell in seen:
                raise MapInvariantError(f"two units share cell {cell}")
            seen.add(cell)
        if strict:
            for player in (0, 1):
                kinds = [k for o, k, _ in self.start_units if o == player]
                if "Base" not in kinds or "Worker" not in kinds:
                    raise MapInvariantError(f"player {player} must start with a Base and a Worker")


# --- states -------------------------------------------------------------------


@dataclass(frozen=True)
class GameState:
    tick: int
    map: GameMap
    units: tuple  # Unit, ascending id
    resources: tuple  # per-player stockpile
    piles: tuple  # ((x, y), remaining), only nonempty piles
    next_id: int
    stats: StatsTable = DEFAULT_TABLE
    rng_stream_id: str = ""
    cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def units_of(self, player: int) -> list:
        key = ("units", player)
        got = self.cache.get(key)
        if got is None:
            got = self.cache[key] = [u for u in self.units if u.owner == player]
        return got

    def unit_by_id(self) -> dict:
        got = self.cache.get("by_id")
        if got is None:
            got = self.cache["by_id"] = {u.id: u for u in self.units}
        return got

    def occupancy(self) -> dict:
        got = self.cache.get("occ")
        if got is None:
            got = self.cache["occ"] = {u.pos: u for u in self.units}
        return got

    def pile_map(self) -> dict:
        got = self.cache.get("piles")
        if got is None:
            got = self.cache["piles"] = dict(self.piles)
        return got

    def reserved_cells(self) -> set:
        """Cells claimed by in-progress moves and productions."""
        got = self.cache.get("reserved")
        if got is None:
            got = set()
            for u in self.units:
                a = u.action
                if a is not None and a.kind in ("move", "produce"):
                    got.add(a.cell)
            self.cache["reserved"] = got
        return got

    def has_free_unit(self, player: int) -> bool:
        return any(u.action is None for u in self.units_of(player))

    def is_free_cell(self, cell: Cell) -> bool:
        return (
            self.map.in_bounds(cell)
            and cell not in self.map.walls
            and cell not in self.pile_map()
            and cell not in self.occupancy()
            and cell not in self.reserved_cells()
        )

    def decision_key(self) -> tuple:
        """State content a policy may observe (everything but the clock and countdowns)."""
        units = tuple(
            (u.id, u.owner, u.kind, u.pos, u.hp, u.carrying,
             None if u.action is None else (u.action.kind, u.action.origin, u.action.cell,
                                            u.action.target_id, u.action.produce))
            for u in self.units
        )
        return (units, self.resources, self.piles)


def initial_state(game_map: GameMap, stats: StatsTable = DEFAULT_TABLE, rng_stream_id: str = "") -> GameState:
    units = []
    for i, (owner, kind, cell) in enumerate(game_map.start_units):
        units.append(Unit(id=i, owner=owner, kind=kind, pos=cell, hp=stats[kind].hit_points))
    return GameState(
        tick=0,
        map=game_map,
        units=tuple(units),
        resources=tuple(game_map.start_resources),
        piles=tuple(game_map.resource_piles),
        next_id=len(units),
        stats=stats,
        rng_stream_id=rng_stream_id,
    )


def state_to_dict(state: GameState) -> dict:
    units = []
    for u in state.units:
        d = {"id": u.id, "owner": u.owner, "kind": u.kind, "pos": list(u.pos), "hp": u.hp, "carrying": u.carrying}
        if u.action is not None:
            a = u.action
            d["action"] = {
                "kind": a.kind,
                "remaining": a.remaining,
                "origin": a.origin,
                "cell": None if a.cell is None else list(a.cell),
                "target_id": a.target_id,
                "produce": a.produce,
            }
        units.append(d)
    return {
        "map": state.map.name,
        "tick": state.tick,
        "units": units,
        "resources": list(state.resources),
        "piles": [[list(c), n] for c, n in state.piles],
        "next_id": state.next_id,
        "rng_stream_id": state.rng_stream_id,
    }


def state_from_dict(d: dict, game_map: GameMap, stats: StatsTable = DEFAULT_TABLE) -> GameState:
    units = []
    for ud in d["units"]:
        action = None
        if "action" in ud:
            ad = ud["action"]
            action = Action(
                kind=ad["kind"],
                remaining=ad["remaining"],
                origin=ad["origin"],
                cell=None if ad["cell"] is None else tuple(ad["cell"]),
                target_id=ad["target_id"],
                produce=ad["produce"],
            )
        units.append(Unit(ud["id"], ud["owner"], ud["kind"], tuple(ud["pos"]), ud["hp"], ud["carrying"], action))
    return GameState(
        tick=d["tick"],
        map=game_map,
        units=tuple(units),
        resources=tuple(d["resources"]),
        piles=tuple((tuple(c), n) for c, n in d["piles"]),
        next_id=d["next_id"],
        stats=stats,
        rng_stream_id=d.get("rng_stream_id", ""),
    )
