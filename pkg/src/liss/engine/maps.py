"""ASCII map documents.

::

    format: 1
    name: NoWhereToRun
    size: 9x8
    max_ticks: 3000
    start_resources: 5,5
    RR.......
    .bw......
    ...          (H rows of W cells)
    pile 0,0: 20
    unit Light 1 4,5

Cells: ``.`` empty, ``#`` wall, ``R`` resource pile, ``b``/``B`` Base,
``w``/``W`` Worker, ``x``/``X`` Barracks (lower case = player 0). Every ``R``
needs a ``pile`` line. ``unit`` lines add start units the grid alphabet cannot
express (or that tests want to place explicitly).
"""

from __future__ import annotations

from importlib import resources as _res

from .state import GameMap, MapInvariantError
from .units import BARRACKS, BASE, UNIT_KINDS, WORKER

HEADER_KEYS = ("name", "size", "max_ticks", "start_resources")
UNIT_CHARS = {
    "b": (0, BASE), "B": (1, BASE),
    "w": (0, WORKER), "W": (1, WORKER),
    "x": (0, BARRACKS), "X": (1, BARRACKS),
}
CHAR_OF = {v: k for k, v in UNIT_CHARS.items()}

SHIPPED = {
    "nwr_9x8": "nwr_9x8.map",
    "ins_15x14": "ins_15x14.map",
    "lmo_16x8": "lmo_16x8.map",
    "brr_24x24": "brr_24x24.map",
    "chb_32x32": "chb_32x32.map",
    "bbb_64x64": "bbb_64x64.map",
    "basesworkers_24x24": "basesworkers_24x24.map",
}


class MapParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _int(text: str, line: int, col: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise MapParseError(f"expected integer, got {text.strip()!r}", line, col) from None


def _cell(text: str, line: int, col: int) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise MapParseError(f"expected x,y, got {text!r}", line, col)
    return (_int(parts[0], line, col), _int(parts[1], line, col))


def load_map(text: str, strict: bool = True) -> GameMap:
    lines = text.splitlines()
    i = 0

    def skip_blank():
        nonlocal i
        while i < len(lines) and not lines[i].strip():
            i += 1

    skip_blank()
    if i >= len(lines) or lines[i].strip().replace(" ", "") != "format:1":
        raise MapParseError("document must start with 'format: 1'", i + 1)
    i += 1
    header: dict[str, tuple[str, int]] = {}
    while len(header) < len(HEADER_KEYS):
        skip_blank()
        if i >= len(lines):
            missing = [k for k in HEADER_KEYS if k not in header]
            raise MapParseError(f"missing header keys {missing}", i + 1)
        key, sep, value = lines[i].partition(":")
        key = key.strip()
        if not sep or key not in HEADER_KEYS:
            raise MapParseError(f"expected one of {list(HEADER_KEYS)}, got {lines[i]!r}", i + 1)
        if key in header:
            raise MapParseError(f"duplicate header key {key!r}", i + 1)
        header[key] = (value.strip(), i + 1)
        i += 1

    name = header["name"][0]
    size, ln = header["size"]
    w_text, x_sep, h_text = size.partition("x")
    if not x_sep:
        raise MapParseError(f"size must look like WxH, got {size!r}", ln)
    width, height = _int(w_text, ln, 7), _int(h_text, ln, 7)
    if width <= 0 or height <= 0:
        raise MapParseError("size must be positive", ln)
    max_ticks = _int(header["max_ticks"][0], header["max_ticks"][1], 12)
    sr, ln = header["start_resources"]
    sr_parts = sr.split(",")
    if len(sr_parts) != 2:
        raise MapParseError("start_resources must be P0,P1", ln)
    start_resources = (_int(sr_parts[0], ln, 18), _int(sr_parts[1], ln, 18))

    walls = set()
    pile_cells = []
    units = []
    for y in range(height):
        if i >= len(lines):
            raise MapParseError(f"expected {height} grid rows, found {y}", i + 1)
        row = lines[i].rstrip("\n")
        if len(row) != width:
            raise MapParseError(f"grid row has {len(row)} cells, expected {width}", i + 1, 1)
        for x, ch in enumerate(row):
            if ch == ".":
                continue
            if ch == "#":
                walls.add((x, y))
            elif ch == "R":
                pile_cells.append((x, y))
            elif ch in UNIT_CHARS:
                owner, kind = UNIT_CHARS[ch]
                units.append((owner, kind, (x, y)))
            else:
                raise MapParseError(f"unknown cell character {ch!r}", i + 1, x + 1)
        i += 1

    amounts: dict = {}
    while i < len(lines):
        raw = lines[i]
        stripped = raw.strip()
        i += 1
        if not stripped:
            continue
        word, _, rest = stripped.partition(" ")
        if word == "pile":
            where, sep, amount = rest.partition(":")
            if not sep:
                raise MapParseError("pile line must be 'pile x,y: amount'", i)
            cell = _cell(where, i, 6)
            if cell not in pile_cells:
                raise MapParseError(f"pile {cell} does not match an 'R' cell", i, 6)
            amounts[cell] = _int(amount, i, len(where) + 7)
        elif word == "unit":
            parts = rest.split()
            if len(parts) != 3 or parts[0] not in UNIT_KINDS:
                raise MapParseError("unit line must be 'unit <Kind> <owner> x,y'", i, 6)
            units.append((_int(parts[1], i, 6), parts[0], _cell(parts[2], i, 6)))
        else:
            raise MapParseError(f"unexpected footer line {stripped!r}", i)
    missing = [c for c in pile_cells if c not in amounts]
    if missing:
        raise MapInvariantError(f"resource piles without an amount: {missing}")

    game_map = GameMap(
        name=name,
        width=width,
        height=height,
        walls=frozenset(walls),
        resource_piles=tuple((c, amounts[c]) for c in pile_cells),
        start_units=tuple(units),
        start_resources=start_resources,
        max_ticks=max_ticks,
    )
    game_map.validate(strict=strict)
    return game_map


def dump_map(game_map: GameMap) -> str:
    """Canonical document for a map; ``dump_map(load_map(doc))`` is a fixed point."""
    grid = [["."] * game_map.width for _ in range(game_map.height)]
    for x, y in game_map.walls:
        grid[y][x] = "#"
    for (x, y), _ in game_map.resource_piles:
        grid[y][x] = "R"
    extra = []
    for owner, kind, (x, y) in game_map.start_units:
        ch = CHAR_OF.get((owner, kind))
        if ch is not None and grid[y][x] == ".":
            grid[y][x] = ch
        else:
            extra.append((owner, kind, (x, y)))
    out = [
        "format: 1",
        f"name: {game_map.name}",
        f"size: {game_map.width}x{game_map.height}",
        f"max_ticks: {game_map.max_ticks}",
        f"start_resources: {game_map.start_resources[0]},{game_map.start_resources[1]}",
    ]
    out.extend("".join(row) for row in grid)
    for (x, y), amount in sorted(game_map.resource_piles, key=lambda p: (p[0][1], p[0][0])):
        out.append(f"pile {x},{y}: {amount}")
    for owner, kind, (x, y) in extra:
        out.append(f"unit {kind} {owner} {x},{y}")
    return "\n".join(out) + "\n"


def canonical(text: str) -> str:
    return dump_map(load_map(text, strict=False))


def shipped_map(key: str) -> GameMap:
    """Load one of the bundled maps by key (e.g. ``nwr_9x8``)."""
    if key not in SHIPPED:
        raise KeyError(f"unknown map {key!r}; shipped maps: {sorted(SHIPPED)}")
    text = _res.files("liss.engine").joinpath("data", SHIPPED[key]).read_text()
    return load_map(text)


def resolve_map(name_or_path: str) -> GameMap:
    if name_or_path in SHIPPED:
        return shipped_map(name_or_path)
    with open(name_or_path) as fh:
        return load_map(fh.read())
