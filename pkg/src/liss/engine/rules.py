"""The transition function.

A tick runs in three phases:

1. free units adopt their assigned command, in ascending unit id (so id order
   settles who gets a contested cell or the last resources);
2. every in-progress action counts down by one; actions reaching zero complete,
   again in ascending id;
3. attack damage, computed against the pre-tick units, is applied at once and
   dead units are removed. Mutual kills are therefore possible.

Commands that are illegal for a unit are dropped without error.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping, Optional

from .state import (
    DIRECTIONS,
    Action,
    Attack,
    Cell,
    GameState,
    Harvest,
    Idle,
    Move,
    MoveToward,
    Produce,
    ReturnResources,
    Unit,
    manhattan,
    step_cell,
)
from .units import BASE, PRODUCERS, STRUCTURES, WORKER

Assignment = Mapping[int, object]

_FIELD_CACHE: dict = {}
_FIELD_CACHE_MAX = 20000


def _static_blocked(state: GameState) -> frozenset:
    got = state.cache.get("static_blocked")
    if got is None:
        cells = set(state.map.walls)
        cells.update(c for c, _ in state.piles)
        cells.update(u.pos for u in state.units if u.kind in STRUCTURES)
        got = state.cache["static_blocked"] = frozenset(cells)
    return got


def distance_field(state: GameState, source: Cell) -> dict:
    """BFS distances from ``source`` over cells not blocked by walls, piles or structures.

    The source itself is always included, so the field also works for targets
    standing on blocked cells (a pile, an enemy base).
    """
    blocked = _static_blocked(state)
    key = (state.map.name, state.map.width, state.map.height, blocked, source)
    got = _FIELD_CACHE.get(key)
    if got is not None:
        return got
    w, h = state.map.width, state.map.height
    dist = {source: 0}
    queue = deque([source])
    while queue:
        cell = queue.popleft()
        d = dist[cell] + 1
        x, y = cell
        for nxt in ((x, y - 1), (x + 1, y), (x, y + 1), (x - 1, y)):
            if nxt in dist or nxt in blocked:
                continue
            if 0 <= nxt[0] < w and 0 <= nxt[1] < h:
                dist[nxt] = d
                queue.append(nxt)
    if len(_FIELD_CACHE) >= _FIELD_CACHE_MAX:
        _FIELD_CACHE.clear()
    _FIELD_CACHE[key] = dist
    return dist


def _cell_open(state: GameState, cell: Cell, occupied: set, reserved: set, piles: dict) -> bool:
    return (
        state.map.in_bounds(cell)
        and cell not in state.map.walls
        and cell not in piles
        and cell not in occupied
        and cell not in reserved
    )


def next_step(state: GameState, pos: Cell, target: Cell, occupied: set, reserved: set, piles: dict) -> Optional[Cell]:
    """First cell of a shortest static path from ``pos`` toward ``target``, if that cell is open."""
    field = distance_field(state, target)
    here = field.get(pos)
    if here is None:
        return None
    best, best_d = None, here
    for direction in DIRECTIONS:
        cell = step_cell(pos, direction)
        d = field.get(cell)
        if d is None or d >= best_d:
            continue
        if _cell_open(state, cell, occupied, reserved, piles):
            best, best_d = cell, d
    return best


def _with_action(u: Unit, action: Optional[Action]) -> Unit:
    return Unit(u.id, u.owner, u.kind, u.pos, u.hp, u.carrying, action)


def _move(state, u, target, origin, occupied, reserved, piles) -> Optional[Action]:
    cell = next_step(state, u.pos, target, occupied, reserved, piles)
    if cell is None:
        return None
    reserved.add(cell)
    return Action("move", state.stats[u.kind].move_period, origin, cell=cell)


def _start(state: GameState, u: Unit, cmd, occupied: set, reserved: set, resources: list, piles: dict) -> Optional[Action]:
    stats = state.stats
    st = stats[u.kind]
    if isinstance(cmd, Attack):
        if st.attack_damage <= 0:
            return None
        target = state.unit_by_id().get(cmd.target_id)
        if target is None or target.owner == u.owner:
            return None
        if manhattan(u.pos, target.pos) <= st.attack_range:
            return Action("attack", st.attack_period, "attack", target_id=target.id)
        if not u.mobile:
            return None
        return _move(state, u, target.pos, "attack", occupied, reserved, piles)
    if isinstance(cmd, Move):
        if not u.mobile:
            return None
        cell = step_cell(u.pos, cmd.direction)
        if not _cell_open(state, cell, occupied, reserved, piles):
            return None
        reserved.add(cell)
        return Action("move", st.move_period, "move", cell=cell)
    if isinstance(cmd, MoveToward):
        if not u.mobile or cmd.target == u.pos:
            return None
        return _move(state, u, cmd.target, "move", occupied, reserved, piles)
    if isinstance(cmd, Harvest):
        if u.kind != WORKER or u.carrying > 0 or piles.get(cmd.target, 0) <= 0:
            return None
        if manhattan(u.pos, cmd.target) == 1:
            return Action("harvest", st.harvest_period, "harvest", cell=cmd.target)
        return _move(state, u, cmd.target, "harvest", occupied, reserved, piles)
    if isinstance(cmd, ReturnResources):
        if u.kind != WORKER or u.carrying <= 0:
            return None
        base = state.unit_by_id().get(cmd.base_id)
        if base is None or base.owner != u.owner or base.kind != BASE:
            return None
        if manhattan(u.pos, base.pos) == 1:
            return Action("return", st.return_period, "harvest", target_id=base.id)
        return _move(state, u, base.pos, "harvest", occupied, reserved, piles)
    if isinstance(cmd, Produce):
        if PRODUCERS.get(cmd.kind) != u.kind:
            return None
        cost = stats[cmd.kind].cost
        if resources[u.owner] < cost:
            return None
        cell = step_cell(u.pos, cmd.direction)
        if not _cell_open(state, cell, occupied, reserved, piles):
            return None
        resources[u.owner] -= cost
        reserved.add(cell)
        return Action("produce", stats[cmd.kind].produce_period, "produce", cell=cell, produce=cmd.kind)
    return None


def step(state: GameState, assignments) -> tuple[GameState, int, int]:
    """Advance one tick; also report how many actions started and completed."""
    stats = state.stats
    units = list(state.units)
    occupied = set(state.occupancy())
    reserved = set(state.reserved_cells())
    resources = list(state.resources)
    piles = dict(state.pile_map())

    started = 0
    for i, u in enumerate(units):
        if u.action is not None:
            continue
        orders = assignments[u.owner]
        if not orders:
            continue
        cmd = orders.get(u.id)
        if cmd is None or isinstance(cmd, Idle):
            continue
        action = _start(state, u, cmd, occupied, reserved, resources, piles)
        if action is not None:
            units[i] = _with_action(u, action)
            started += 1

    completions = []
    for i, u in enumerate(units):
        a = u.action
        if a is None:
            continue
        if a.remaining <= 1:
            completions.append(i)
        else:
            units[i] = _with_action(u, Action(a.kind, a.remaining - 1, a.origin, a.cell, a.target_id, a.produce))

    by_id = state.unit_by_id()
    damage: dict[int, int] = {}
    next_id = state.next_id
    born = []
    for i in completions:
        u = units[i]
        a = u.action
        if a.kind == "move":
            units[i] = Unit(u.id, u.owner, u.kind, a.cell, u.hp, u.carrying, None)
        elif a.kind == "attack":
            if a.target_id in by_id:
                damage[a.target_id] = damage.get(a.target_id, 0) + stats[u.kind].attack_damage
            units[i] = _with_action(u, None)
        elif a.kind == "harvest":
            left = piles.get(a.cell, 0)
            take = min(stats[u.kind].harvest_amount, left)
            if take:
                if left - take > 0:
                    piles[a.cell] = left - take
                else:
                    del piles[a.cell]
            units[i] = Unit(u.id, u.owner, u.kind, u.pos, u.hp, u.carrying + take, None)
        elif a.kind == "return":
            carrying = u.carrying
            if a.target_id in by_id:
                resources[u.owner] += carrying
                carrying = 0
            units[i] = Unit(u.id, u.owner, u.kind, u.pos, u.hp, carrying, None)
        elif a.kind == "produce":
            born.append(Unit(next_id, u.owner, a.produce, a.cell, stats[a.produce].hit_points))
            next_id += 1
            units[i] = _with_action(u, None)

    if damage:
        survivors = []
        for u in units:
            d = damage.get(u.id)
            if d is None:
                survivors.append(u)
            elif d < u.hp:
                survivors.append(Unit(u.id, u.owner, u.kind, u.pos, u.hp - d, u.carrying, u.action))
        units = survivors
    units.extend(born)

    nxt = GameState(
        tick=state.tick + 1,
        map=state.map,
        units=tuple(units),
        resources=tuple(resources),
        piles=tuple(sorted(piles.items(), key=lambda kv: (kv[0][1], kv[0][0]))),
        next_id=next_id,
        stats=stats,
        rng_stream_id=state.rng_stream_id,
    )
    return nxt, started, len(completions)


def apply_tick(state: GameState, assignments) -> GameState:
    """Successor of ``state`` given one assignment per player (unit id -> command)."""
    return step(state, assignments)[0]


def min_remaining(state: GameState) -> Optional[int]:
    rem = [u.action.remaining for u in state.units if u.action is not None]
    return min(rem) if rem else None


def advance(state: GameState, ticks: int) -> GameState:
    """Skip ``ticks`` ticks in which nothing starts and nothing completes.

    Equivalent to ``ticks`` calls of ``apply_tick`` with assignments that start
    nothing; requires ``ticks`` < the smallest remaining countdown.
    """
    if ticks <= 0:
        return state
    rem = min_remaining(state)
    if rem is not None and ticks >= rem:
        raise ValueError("cannot skip past an action completion")
    units = tuple(
        u if u.action is None else _with_action(
            u, Action(u.action.kind, u.action.remaining - ticks, u.action.origin,
                      u.action.cell, u.action.target_id, u.action.produce))
        for u in state.units
    )
    return GameState(state.tick + ticks, state.map, units, state.resources, state.piles,
                     state.next_id, state.stats, state.rng_stream_id)


def world_value(state: GameState) -> int:
    """Resources in the world: piles, carried, stockpiled, embodied in units or in production."""
    stats = state.stats
    total = sum(n for _, n in state.piles) + sum(state.resources)
    for u in state.units:
        total += stats[u.kind].cost + u.carrying
        if u.action is not None and u.action.kind == "produce":
            total += stats[u.action.produce].cost
    return total


def unit_value(state: GameState, u: Unit) -> int:
    v = state.stats[u.kind].cost + u.carrying
    if u.action is not None and u.action.kind == "produce":
        v += state.stats[u.action.produce].cost
    return v


def score(state: GameState, player: int) -> int:
    """Tiebreak score: cost of live units plus stockpiled resources."""
    return sum(state.stats[u.kind].cost for u in state.units_of(player)) + state.resources[player]
