"""Executing DSL programs.

``interpret`` turns a program plus a state into commands for one player's free
units. The first command written for a unit sticks; free units nobody wrote
to end up Idle. A command outside any ``for`` applies to every eligible unit,
inside a ``for`` only to the bound unit.

The interpreter never looks at the clock or at action countdowns, except for
the ``Random`` criterion, which hashes (stream id, tick, unit id).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

from .dsl.ast import Node
from .dsl.grammar import CMD, EMPTY, FOR, IF, IFELSE, PRODUCTIONS, SEQ, rule_named
from .engine.match import PolicyRuntimeFault
from .engine.state import (
    DIRECTIONS,
    IDLE,
    Attack,
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
from .engine.units import BASE, PRODUCERS, WORKER

DEFAULT_STEP_BUDGET = 100_000


class StepBudgetExceeded(PolicyRuntimeFault):
    pass


class NonExecutable:
    """Marker returned by ``signature`` when a program faults on some pool state."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NonExecutable"

    def __reduce__(self):
        return (NonExecutable, ())


NON_EXECUTABLE = NonExecutable()


@dataclass
class ExecContext:
    state: GameState
    player: int
    current_unit: Optional[Unit] = None
    assignment: dict = field(default_factory=dict)
    step_budget: int = DEFAULT_STEP_BUDGET
    used_random: bool = False
    # bookkeeping for commands issued earlier in the same pass
    spent: int = 0
    producing: dict = field(default_factory=dict)
    harvesters: int = 0
    claimed: set = field(default_factory=set)

    def charge(self):
        self.step_budget -= 1
        if self.step_budget < 0:
            raise StepBudgetExceeded("interpreter step budget exhausted")


# --- values -------------------------------------------------------------------


def _label(node: Node) -> str:
    return node.children[0]


def _int(node: Node) -> int:
    return int(node.children[0])


def _enemy(ctx: ExecContext) -> list:
    return ctx.state.units_of(1 - ctx.player)


def _own(ctx: ExecContext) -> list:
    return ctx.state.units_of(ctx.player)


def _harvesting(units) -> int:
    return sum(1 for u in units if u.kind == WORKER and u.action is not None and u.action.origin == "harvest")


# --- booleans -----------------------------------------------------------------


def _in_range(state: GameState, attacker: Unit, target: Unit) -> bool:
    st = state.stats[attacker.kind]
    return st.attack_damage > 0 and manhattan(attacker.pos, target.pos) <= st.attack_range


def _one_shot(state: GameState, attackers, targets) -> bool:
    stats = state.stats
    best = max((stats[a.kind].attack_damage for a in attackers), default=0)
    return best > 0 and any(best >= t.hp for t in targets)


def _any_in_range(state: GameState, attackers, targets) -> bool:
    return any(_in_range(state, a, t) for a in attackers for t in targets)


def _global_bool(head: str, node: Node, ctx: ExecContext) -> bool:
    state = ctx.state
    own, enemy = _own(ctx), _enemy(ctx)
    ch = node.children
    if head == "b1":
        kind, n = _label(ch[1]), _int(ch[2])
        return sum(1 for u in own if u.kind == kind) >= n
    if head == "b2":
        kind, n = _label(ch[1]), _int(ch[2])
        return sum(1 for u in enemy if u.kind == kind) >= n
    if head == "b3":
        kind, n = _label(ch[1]), _int(ch[2])
        return sum(1 for u in own if u.kind == kind) < n
    if head == "b4":
        n = _int(ch[1])
        return sum(1 for u in own if u.action is not None and u.action.kind == "attack") >= n
    if head == "b5":
        n = _int(ch[1])
        return any(manhattan(a.pos, e.pos) <= n for a in own for e in enemy)
    if head == "b6":
        return _harvesting(own) >= _int(ch[1])
    if head == "b10":
        return _one_shot(state, own, enemy)
    if head == "b11":
        return _one_shot(state, enemy, own)
    if head == "b12":
        return _any_in_range(state, enemy, own)
    if head == "b13":
        return _any_in_range(state, own, enemy)
    raise AssertionError(head)


_UNIT_SCOPED = frozenset({"b7", "b8", "b9", "b14"})


def eval_bool(node: Node, ctx: ExecContext) -> bool:
    """Value of a B-rooted tree in ``ctx``; unit-scoped predicates are false with no unit bound."""
    ctx.charge()
    head = PRODUCTIONS[node.rule].head
    if head in _UNIT_SCOPED:
        u = ctx.current_unit
        if u is None:
            return False
        if head == "b7":
            return u.kind == _label(node.children[1])
        if head == "b8":
            return u.kind == WORKER
        if head == "b9":
            return ctx.state.stats.can_attack(u.kind)
        return u.kind == WORKER and u.carrying == 0
    # state-level predicates do not depend on the binding: memoize on the state
    key = ("bool", ctx.player, node)
    cache = ctx.state.cache
    got = cache.get(key)
    if got is None:
        got = cache[key] = _global_bool(head, node, ctx)
    return got


# --- unit selection -----------------------------------------------------------


def _random_key(state: GameState, unit: Unit, candidate: Unit) -> bytes:
    text = f"{state.rng_stream_id}|{state.tick}|{unit.id}|{candidate.id}"
    return hashlib.blake2b(text.encode(), digest_size=8).digest()


def choose(criterion: str, unit: Unit, candidates: list, ctx: ExecContext) -> Optional[Unit]:
    """Pick one candidate by criterion; ties go to the lowest id (candidates are id-ordered)."""
    if not candidates:
        return None
    stats = ctx.state.stats
    if criterion == "Strongest":
        key = lambda c: -stats[c.kind].attack_damage
    elif criterion == "Weakest":
        key = lambda c: stats[c.kind].attack_damage
    elif criterion == "Closest":
        key = lambda c: manhattan(unit.pos, c.pos)
    elif criterion == "Farthest":
        key = lambda c: -manhattan(unit.pos, c.pos)
    elif criterion == "LessHealthy":
        key = lambda c: c.hp
    elif criterion == "MostHealthy":
        key = lambda c: -c.hp
    elif criterion == "Random":
        ctx.used_random = True
        key = lambda c: _random_key(ctx.state, unit, c)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    return min(candidates, key=key)  # min is stable: first (lowest id) wins ties


def _free_cell(ctx: ExecContext, cell) -> bool:
    return cell not in ctx.claimed and ctx.state.is_free_cell(cell)


def _nearest(units, pos):
    best, best_d = None, None
    for u in units:
        d = manhattan(u.pos, pos)
        if best_d is None or d < best_d:
            best, best_d = u, d
    return best


def resolve_direction(ctx: ExecContext, unit: Unit, name: str) -> Optional[str]:
    """A free neighbouring direction for ``name``, preferring it and falling back in Up/Right/Down/Left order."""
    if name == "EnemyDir":
        enemy = _enemy(ctx)
        bases = [e for e in enemy if e.kind == BASE] or enemy
        target = _nearest(bases, unit.pos)
        if target is None:
            order = DIRECTIONS
        else:
            order = sorted(DIRECTIONS, key=lambda d: manhattan(step_cell(unit.pos, d), target.pos))
    else:
        order = (name,) + tuple(d for d in DIRECTIONS if d != name)
    for d in order:
        if _free_cell(ctx, step_cell(unit.pos, d)):
            return d
    return None


# --- commands -----------------------------------------------------------------


def _produce(ctx: ExecContext, u: Unit, node: Node):
    kind, dname, n = _label(node.children[1]), _label(node.children[2]), _int(node.children[3])
    if PRODUCERS.get(kind) != u.kind:
        return None
    own = _own(ctx)
    count = sum(1 for o in own if o.kind == kind)
    count += sum(1 for o in own if o.action is not None and o.action.kind == "produce" and o.action.produce == kind)
    count += ctx.producing.get(kind, 0)
    if count >= n:
        return None
    cost = ctx.state.stats[kind].cost
    if ctx.state.resources[ctx.player] - ctx.spent < cost:
        return None
    direction = resolve_direction(ctx, u, dname)
    if direction is None:
        return None
    ctx.spent += cost
    ctx.producing[kind] = ctx.producing.get(kind, 0) + 1
    ctx.claimed.add(step_cell(u.pos, direction))
    return Produce(kind, direction)


def _harvest(ctx: ExecContext, u: Unit, node: Node):
    if u.kind != WORKER:
        return None
    if _harvesting(_own(ctx)) + ctx.harvesters >= _int(node.children[1]):
        return None
    if u.carrying > 0:
        base = _nearest([o for o in _own(ctx) if o.kind == BASE], u.pos)
        if base is None:
            return None
        cmd = ReturnResources(base.id)
    else:
        best, best_d = None, None
        for cell, _ in ctx.state.piles:  # row-major, so ties go to the first row
            d = manhattan(cell, u.pos)
            if best_d is None or d < best_d:
                best, best_d = cell, d
        if best is None:
            return None
        cmd = Harvest(best)
    ctx.harvesters += 1
    return cmd


def _command_for(node: Node, u: Unit, ctx: ExecContext):
    """The command ``node`` gives unit ``u``, or None when it does not apply."""
    head = PRODUCTIONS[node.rule].head
    state = ctx.state
    if head in ("c1", "c2"):
        wants_worker = head == "c1"
        if (u.kind == WORKER) != wants_worker:
            return None
        return _produce(ctx, u, node)
    if head == "c3":
        if not u.mobile:
            return None
        side = ctx.player if _label(node.children[1]) == "Ally" else 1 - ctx.player
        pool = [o for o in state.units_of(side) if o.id != u.id]
        target = choose(_label(node.children[2]), u, pool, ctx)
        if target is None or manhattan(u.pos, target.pos) <= 1:
            return None
        return MoveToward(target.pos)
    if head == "c4":
        if not state.stats.can_attack(u.kind):
            return None
        target = choose(_label(node.children[1]), u, _enemy(ctx), ctx)
        return None if target is None else Attack(target.id)
    if head == "c5":
        return _harvest(ctx, u, node)
    if head == "c6":
        near = [e for e in _enemy(ctx) if _in_range(state, u, e)]
        if near:
            return Attack(min(near, key=lambda e: manhattan(u.pos, e.pos)).id)
        return IDLE
    if head == "c7":
        if not u.mobile:
            return None
        base = _nearest([o for o in _own(ctx) if o.kind == BASE], u.pos)
        if base is None:
            return None
        best, best_d = None, manhattan(u.pos, base.pos)
        for d in DIRECTIONS:
            cell = step_cell(u.pos, d)
            dist = manhattan(cell, base.pos)
            if dist > best_d and _free_cell(ctx, cell):
                best, best_d = d, dist
        if best is None:
            return None
        ctx.claimed.add(step_cell(u.pos, best))
        return Move(best)
    raise AssertionError(head)


def _run_command(node: Node, ctx: ExecContext) -> None:
    ctx.charge()
    bound = ctx.current_unit
    targets = _own(ctx) if bound is None else (bound,)
    assignment = ctx.assignment
    for u in targets:
        if u.action is not None or u.id in assignment:
            continue
        cmd = _command_for(node, u, ctx)
        if cmd is not None:
            assignment[u.id] = cmd


def _exec(node: Node, ctx: ExecContext) -> None:
    ctx.charge()
    rule = node.rule
    ch = node.children
    if rule == SEQ:
        _exec(ch[0], ctx)
        _exec(ch[1], ctx)
    elif rule == FOR:
        saved = ctx.current_unit
        for u in _own(ctx):
            ctx.current_unit = u
            _exec(ch[1], ctx)
        ctx.current_unit = saved
    elif rule == IF:
        if eval_bool(ch[1], ctx):
            _exec(ch[3], ctx)
    elif rule == IFELSE:
        _exec(ch[3] if eval_bool(ch[1], ctx) else ch[5], ctx)
    elif rule == CMD:
        _run_command(ch[0], ctx)
    elif rule == EMPTY:
        pass
    else:
        raise ValueError(f"not a statement: {node!r}")


_S_CMD = rule_named("S", "cmd").rule_id


def as_statement(program: Node) -> Node:
    """S-rooted view of a program (C roots are wrapped as S -> C)."""
    if program.symbol == "S":
        return program
    if program.symbol == "C":
        return Node(_S_CMD, (program,))
    raise ValueError(f"cannot execute a {program.symbol}-rooted tree")


def run(program: Node, state: GameState, player: int, step_budget: int = DEFAULT_STEP_BUDGET) -> ExecContext:
    ctx = ExecContext(state=state, player=player, step_budget=step_budget)
    _exec(as_statement(program), ctx)
    for u in state.units_of(player):
        if u.action is None and u.id not in ctx.assignment:
            ctx.assignment[u.id] = IDLE
    return ctx


def interpret(program: Node, state: GameState, player: int, step_budget: int = DEFAULT_STEP_BUDGET) -> dict:
    """Commands for ``player``'s free units, keyed by unit id."""
    return run(program, state, player, step_budget).assignment


def canonical_assignment(assignment: dict) -> tuple:
    return tuple(sorted(assignment.items()))


def _signature_entry(program: Node, state: GameState, player: int, step_budget: int):
    if program.symbol == "B":
        ctx = ExecContext(state=state, player=player, step_budget=step_budget)
        return eval_bool(program, ctx)
    return canonical_assignment(interpret(program, state, player, step_budget))


def signature(program: Node, pool, player: int = 0, step_budget: int = DEFAULT_STEP_BUDGET):
    """Behaviour vector over the pool states, or NON_EXECUTABLE if any state faults."""
    states = getattr(pool, "states", pool)
    out = []
    try:
        for state in states:
            out.append(_signature_entry(program, state, player, step_budget))
    except PolicyRuntimeFault:
        return NON_EXECUTABLE
    return tuple(out)


def signature_digest(sig) -> str:
    """Stable 128-bit hex digest of a signature vector."""
    if sig is NON_EXECUTABLE:
        return "nonexecutable"
    h = hashlib.blake2b(digest_size=16)
    for entry in sig:
        h.update(_entry_text(entry).encode())
        h.update(b";")
    return h.hexdigest()


def _entry_text(entry) -> str:
    if isinstance(entry, bool):
        return "T" if entry else "F"
    return ",".join(f"{uid}:{command_text(cmd)}" for uid, cmd in entry)


def command_text(cmd) -> str:
    if isinstance(cmd, Idle):
        return "idle"
    if isinstance(cmd, Move):
        return f"move({cmd.direction})"
    if isinstance(cmd, MoveToward):
        return f"toward({cmd.target[0]},{cmd.target[1]})"
    if isinstance(cmd, Harvest):
        return f"harvest({cmd.target[0]},{cmd.target[1]})"
    if isinstance(cmd, ReturnResources):
        return f"return({cmd.base_id})"
    if isinstance(cmd, Produce):
        return f"produce({cmd.kind},{cmd.direction})"
    if isinstance(cmd, Attack):
        return f"attack({cmd.target_id})"
    raise TypeError(cmd)


class ProgramPolicy:
    """Adapter letting a DSL program play matches."""

    def __init__(self, program: Node, step_budget: int = DEFAULT_STEP_BUDGET):
        self.program = as_statement(program)
        self.step_budget = step_budget

    def decide(self, state: GameState, player: int):
        ctx = run(self.program, state, player, self.step_budget)
        return ctx.assignment, ctx.used_random

    def __repr__(self):
        return f"ProgramPolicy({self.program!r})"
