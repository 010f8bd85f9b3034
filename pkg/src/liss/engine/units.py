"""Unit kinds and the configurable stats table."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

import yaml

BASE = "Base"
BARRACKS = "Barracks"
WORKER = "Worker"
LIGHT = "Light"
HEAVY = "Heavy"
RANGED = "Ranged"

UNIT_KINDS = (BASE, BARRACKS, WORKER, LIGHT, HEAVY, RANGED)
STRUCTURES = frozenset({BASE, BARRACKS})
MOBILE = frozenset({WORKER, LIGHT, HEAVY, RANGED})

# which kind of unit may produce which
PRODUCERS = {
    WORKER: BASE,
    LIGHT: BARRACKS,
    HEAVY: BARRACKS,
    RANGED: BARRACKS,
    BASE: WORKER,
    BARRACKS: WORKER,
}


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class UnitStats:
    hit_points: int
    cost: int
    attack_damage: int = 0
    attack_range: int = 1
    move_period: int = 8
    attack_period: int = 5
    produce_period: int = 100
    harvest_period: int = 20
    return_period: int = 10
    harvest_amount: int = 0

    def validate(self, kind: str) -> None:
        if self.hit_points <= 0:
            raise StatsError(f"{kind}: hit_points must be positive")
        if self.cost < 0 or self.attack_damage < 0 or self.harvest_amount < 0:
            raise StatsError(f"{kind}: cost, attack_damage and harvest_amount must be >= 0")
        if self.attack_range < 1:
            raise StatsError(f"{kind}: attack_range must be positive")
        for name in ("move_period", "attack_period", "produce_period", "harvest_period", "return_period"):
            if getattr(self, name) < 1:
                raise StatsError(f"{kind}: {name} must be >= 1")
        if kind == RANGED and self.attack_range <= 1:
            raise StatsError("Ranged: attack_range must exceed 1")
        if kind in (WORKER, LIGHT, HEAVY) and self.attack_range != 1:
            raise StatsError(f"{kind}: melee units have attack_range 1")


DEFAULT_STATS: dict[str, UnitStats] = {
    BASE: UnitStats(hit_points=10, cost=10, produce_period=250),
    BARRACKS: UnitStats(hit_points=4, cost=5, produce_period=200),
    WORKER: UnitStats(hit_points=1, cost=1, attack_damage=1, produce_period=50, harvest_amount=1),
    LIGHT: UnitStats(hit_points=4, cost=2, attack_damage=2, produce_period=100),
    HEAVY: UnitStats(hit_points=8, cost=3, attack_damage=4, produce_period=120),
    RANGED: UnitStats(hit_points=1, cost=2, attack_damage=1, attack_range=3, produce_period=100),
}


class StatsTable:
    """Immutable mapping from unit kind to its stats."""

    __slots__ = ("_stats", "_key")

    def __init__(self, stats: Mapping[str, UnitStats] | None = None):
        merged = dict(DEFAULT_STATS)
        if stats:
            merged.update(stats)
        for kind in UNIT_KINDS:
            merged[kind].validate(kind)
        self._stats = merged
        self._key = tuple((k, merged[k]) for k in UNIT_KINDS)

    def __getitem__(self, kind: str) -> UnitStats:
        return self._stats[kind]

    def __eq__(self, other):
        return isinstance(other, StatsTable) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"StatsTable({self._stats!r})"

    def can_attack(self, kind: str) -> bool:
        return self._stats[kind].attack_damage > 0

    def to_text(self) -> str:
        lines = ["format: 1"]
        for kind in UNIT_KINDS:
            st = self._stats[kind]
            for f in fields(UnitStats):
                lines.append(f"{kind}.{f.name}: {getattr(st, f.name)}")
        return "\n".join(lines) + "\n"


def parse_stats(text: str) -> StatsTable:
    """Parse a ``format: 1`` key-value stats document; keys look like ``Worker.cost``."""
    doc = yaml.safe_load(text) or {}
    if not isinstance(doc, dict) or doc.get("format") != 1:
        raise StatsError("stats document must start with 'format: 1'")
    known = {f.name for f in fields(UnitStats)}
    overrides: dict[str, dict[str, int]] = {}
    for key, value in doc.items():
        if key == "format":
            continue
        kind, _, attr = str(key).partition(".")
        if kind not in UNIT_KINDS or attr not in known:
            raise StatsError(f"unknown stats key {key!r}")
        if not isinstance(value, int) or isinstance(value, bool):
            raise StatsError(f"{key}: expected integer, got {value!r}")
        overrides.setdefault(kind, {})[attr] = value
    return StatsTable({k: replace(DEFAULT_STATS[k], **v) for k, v in overrides.items()})


def load_stats(path: str | Path) -> StatsTable:
    return parse_stats(Path(path).read_text())


DEFAULT_TABLE = StatsTable()
