"""Regenerate the bundled map documents under src/liss/engine/data/.

Every map is point-symmetric: player 1's layout is player 0's rotated by 180
degrees, so swapping start slots is fair.

    python scripts/make_maps.py
"""

from pathlib import Path

from liss.engine.maps import dump_map, load_map
from liss.engine.state import GameMap

OUT = Path(__file__).resolve().parents[1] / "src" / "liss" / "engine" / "data"

HAND = {
    "nwr_9x8": ("NoWhereToRun", 3000, [
        "RR.......",
        ".bw......",
        ".........",
        "....#....",
        "....#....",
        ".........",
        "......WB.",
        ".......RR",
    ]),
    "lmo_16x8": ("letMeOut", 3000, [
        "RR......#.......",
        ".bw.....#.......",
        "........#.......",
        "................",
        "................",
        ".......#........",
        ".......#.....WB.",
        ".......#......RR",
    ]),
}


def mirror(cells, w, h):
    return {(w - 1 - x, h - 1 - y) for x, y in cells}


def symmetric(name, w, h, max_ticks, base, piles, walls, amount=20):
    """Build a map from player 0's half; player 1 is the 180-degree rotation."""
    bx, by = base
    p0 = [(0, "Base", (bx, by)), (0, "Worker", (bx + 1, by))]
    p1 = [(1, k, (w - 1 - x, h - 1 - y)) for _, k, (x, y) in p0]
    walls = set(walls) | mirror(walls, w, h)
    pile_cells = set(piles) | mirror(piles, w, h)
    units = sorted(p0 + p1, key=lambda u: (u[2][1], u[2][0]))
    return GameMap(
        name=name,
        width=w,
        height=h,
        walls=frozenset(walls),
        resource_piles=tuple((c, amount) for c in sorted(pile_cells, key=lambda c: (c[1], c[0]))),
        start_units=tuple(units),
        start_resources=(5, 5),
        max_ticks=max_ticks,
    )


def generated():
    maps = {}
    maps["ins_15x14"] = symmetric(
        "itsNotSafe", 15, 14, 3000, base=(2, 2),
        piles=[(0, 0), (1, 0), (0, 1)],
        walls=[(x, 6) for x in range(4, 11)],
    )
    maps["brr_24x24"] = symmetric(
        "Barricades", 24, 24, 3000, base=(2, 2),
        piles=[(0, 0), (1, 0), (0, 1), (0, 2)],
        walls=[(x, 8) for x in range(0, 8)] + [(8, y) for y in range(0, 6)] + [(x, 11) for x in range(9, 15)],
    )
    maps["basesworkers_24x24"] = symmetric(
        "basesWorkers", 24, 24, 3000, base=(3, 3),
        piles=[(0, 0), (1, 0), (0, 1), (5, 0), (0, 5)],
        walls=[],
    )
    maps["chb_32x32"] = symmetric(
        "Chambers", 32, 32, 8000, base=(3, 3),
        piles=[(0, 0), (1, 0), (0, 1), (12, 12)],
        walls=[(x, 10) for x in range(0, 12)] + [(10, y) for y in range(0, 8)]
        + [(x, 16) for x in range(14, 22)],
    )
    maps["bbb_64x64"] = symmetric(
        "BloodBath.scmB", 64, 64, 8000, base=(5, 5),
        piles=[(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (20, 20)],
        walls=[(x, 24) for x in range(0, 20)] + [(24, y) for y in range(0, 18)]
        + [(x, 32) for x in range(26, 38)],
    )
    return maps


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for key, (name, max_ticks, rows) in HAND.items():
        h, w = len(rows), len(rows[0])
        header = f"format: 1\nname: {name}\nsize: {w}x{h}\nmax_ticks: {max_ticks}\nstart_resources: 5,5\n"
        piles = [(x, y) for y, row in enumerate(rows) for x, ch in enumerate(row) if ch == "R"]
        footer = "".join(f"pile {x},{y}: 20\n" for x, y in piles)
        doc = header + "\n".join(rows) + "\n" + footer
        (OUT / f"{key}.map").write_text(dump_map(load_map(doc)))
    for key, game_map in generated().items():
        game_map.validate()
        (OUT / f"{key}.map").write_text(dump_map(game_map))
    print(f"wrote maps to {OUT}")


if __name__ == "__main__":
    main()
