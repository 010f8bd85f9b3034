"""State pools and libraries of behaviourally distinct sub-programs."""

from __future__ import annotations

import enum
import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .dsl.ast import Node, iter_nonterminals
from .dsl.syntax import parse, pretty
from .engine.maps import dump_map, load_map
from .engine.state import GameState, state_from_dict, state_to_dict
from .engine.units import DEFAULT_TABLE, parse_stats
from .interp import NON_EXECUTABLE, signature, signature_digest

LIBRARY_CLASSES = ("S", "C", "B")
DEFAULT_POOL_CAP = 400


class EmptyPool(ValueError):
    pass


class NoneAvailable(LookupError):
    pass


class LibraryFormatError(ValueError):
    pass


# --- state pools --------------------------------------------------------------


@dataclass
class StatePool:
    states: list
    tags: list = field(default_factory=list)
    cap: int = DEFAULT_POOL_CAP

    def __post_init__(self):
        if len(self.states) > self.cap:
            raise ValueError(f"pool holds {len(self.states)} states, cap is {self.cap}")
        if not self.tags:
            self.tags = [""] * len(self.states)

    def __len__(self):
        return len(self.states)

    def fingerprint(self) -> str:
        h = hashlib.blake2b(digest_size=16)
        for s in self.states:
            h.update(json.dumps(state_to_dict(s), sort_keys=True).encode())
        return h.hexdigest()

    def to_text(self) -> str:
        maps, stats = {}, {}
        for s in self.states:
            maps.setdefault(s.map.name, dump_map(s.map))
            stats.setdefault("table", s.stats.to_text())
        doc = {
            "format": 1,
            "cap": self.cap,
            "maps": maps,
            "stats": stats.get("table", DEFAULT_TABLE.to_text()),
            "states": [dict(state_to_dict(s), tag=t) for s, t in zip(self.states, self.tags)],
        }
        return json.dumps(doc, sort_keys=True, indent=None, separators=(",", ":")) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StatePool":
        doc = json.loads(text)
        if doc.get("format") != 1:
            raise LibraryFormatError("pool document must have format 1")
        maps = {name: load_map(body, strict=False) for name, body in doc["maps"].items()}
        stats = parse_stats(doc["stats"])
        states = [state_from_dict(d, maps[d["map"]], stats) for d in doc["states"]]
        return cls(states, [d.get("tag", "") for d in doc["states"]], doc["cap"])


def harvest_pool(match_logs, cap: int = DEFAULT_POOL_CAP, rng: Optional[random.Random] = None) -> StatePool:
    """Collect states from whole match logs, visiting logs in random order, until ``cap`` states.

    ``match_logs`` is a list of state lists, or of (tag, state list) pairs.
    """
    logs = [log if isinstance(log, tuple) else (f"log{i}", log) for i, log in enumerate(match_logs)]
    if not logs:
        raise EmptyPool("no match logs to harvest")
    rng = rng if rng is not None else random.Random(0)
    order = list(range(len(logs)))
    rng.shuffle(order)
    states, tags = [], []
    for i in order:
        tag, log = logs[i]
        for s in log:
            if len(states) >= cap:
                break
            states.append(s)
            tags.append(tag)
        if len(states) >= cap:
            break
    return StatePool(states, tags, cap)


# --- libraries ----------------------------------------------------------------


class InsertResult(enum.Enum):
    INSERTED = "inserted"
    DUPLICATE = "duplicate"
    NON_EXECUTABLE = "non-executable"


Inserted, Duplicate, NonExecutableResult = InsertResult.INSERTED, InsertResult.DUPLICATE, InsertResult.NON_EXECUTABLE


@dataclass(frozen=True)
class LibraryEntry:
    root: str
    program: Node
    signature: tuple

    @property
    def digest(self) -> str:
        return signature_digest(self.signature)


class Library:
    """Sub-programs grouped by root class, at most one per (class, behaviour)."""

    def __init__(self, pool: StatePool, player: int = 0):
        if len(pool) == 0:
            raise EmptyPool("a library needs at least one pool state")
        self.pool = pool
        self.player = player
        self.entries: dict[str, list[LibraryEntry]] = {c: [] for c in LIBRARY_CLASSES}
        self._index: dict = {}
        self._memo: dict = {}

    def __len__(self):
        return sum(len(v) for v in self.entries.values())

    def count(self, root: str) -> int:
        return len(self.entries.get(root, ()))

    def all_entries(self) -> list:
        return [e for c in LIBRARY_CLASSES for e in self.entries[c]]

    def signature_of(self, program: Node):
        got = self._memo.get(program)
        if got is None:
            got = self._memo[program] = signature(program, self.pool.states, self.player)
        return got

    def contains(self, program: Node) -> bool:
        sig = self.signature_of(program)
        return sig is not NON_EXECUTABLE and (program.symbol, sig) in self._index

    def try_insert(self, program: Node) -> InsertResult:
        root = program.symbol
        if root not in LIBRARY_CLASSES:
            raise ValueError(f"library classes are {LIBRARY_CLASSES}, got {root}")
        sig = self.signature_of(program)
        if sig is NON_EXECUTABLE:
            return InsertResult.NON_EXECUTABLE
        key = (root, sig)
        if key in self._index:
            return InsertResult.DUPLICATE
        entry = LibraryEntry(root, program, sig)
        self._index[key] = entry
        self.entries[root].append(entry)
        return InsertResult.INSERTED

    def add_subtrees(self, program: Node) -> int:
        """Offer every S/C/B subtree of ``program`` (pre-order); return how many were new."""
        added = 0
        for _, sub in iter_nonterminals(program):
            if sub.symbol in LIBRARY_CLASSES and self.try_insert(sub) is InsertResult.INSERTED:
                added += 1
        return added

    def sample(self, root: str, rng: random.Random) -> Node:
        pool = self.entries.get(root)
        if not pool:
            raise NoneAvailable(f"library has no {root} entries")
        return pool[rng.randrange(len(pool))].program

    def to_text(self) -> str:
        lines = ["format: 1", f"pool: {self.pool.fingerprint()}", f"player: {self.player}", f"entries: {len(self)}", ""]
        for e in self.all_entries():
            lines.append(f"root: {e.root}")
            lines.append(f"signature: {e.digest}")
            lines.extend(pretty(e.program).rstrip("\n").split("\n"))
            lines.append("")
        return "\n".join(lines)


def build_library(corpus: Iterable[Node], pool: StatePool, player: int = 0) -> Library:
    """Scan programs in order, offering each S/C/B subtree; the first program showing a behaviour keeps it."""
    lib = Library(pool, player)
    for program in corpus:
        lib.add_subtrees(program)
    return lib


def try_insert(library: Library, program: Node) -> InsertResult:
    return library.try_insert(program)


def sample_replacement(library: Library, nonterminal: str, rng: random.Random) -> Node:
    if nonterminal not in LIBRARY_CLASSES:
        raise ValueError(f"no library class {nonterminal}")
    return library.sample(nonterminal, rng)


def load_library(text: str, pool: StatePool, verify: bool = True) -> Library:
    """Read a library document; signatures are recomputed on ``pool`` and checked against the file."""
    blocks = text.split("\n\n")
    header = dict(line.split(": ", 1) for line in blocks[0].strip().splitlines())
    if header.get("format") != "1":
        raise LibraryFormatError("library document must start with 'format: 1'")
    if verify and header.get("pool") != pool.fingerprint():
        raise LibraryFormatError("library was built on a different state pool")
    lib = Library(pool, int(header.get("player", 0)))
    for block in blocks[1:]:
        if not block.strip():
            continue
        lines = block.split("\n")
        root = lines[0].removeprefix("root: ")
        digest = lines[1].removeprefix("signature: ")
        program = parse("\n".join(lines[2:]) + "\n", symbol=root)
        result = lib.try_insert(program)
        if verify:
            if result is not InsertResult.INSERTED:
                raise LibraryFormatError(f"entry {program!r} is {result.value} on this pool")
            if lib.entries[root][-1].digest != digest:
                raise LibraryFormatError(f"signature mismatch for {program!r}")
    expected = int(header.get("entries", len(lib)))
    if verify and expected != len(lib):
        raise LibraryFormatError(f"header says {expected} entries, found {len(lib)}")
    return lib
