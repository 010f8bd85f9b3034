"""Experiment harnesses: identical-neighbour rate and sample efficiency."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import random
import statistics
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .dsl.ast import Node
from .dsl.syntax import pretty
from .engine.match import PolicyRuntimeFault, run_match, winning_rate
from .engine.state import GameMap
from .engine.units import DEFAULT_TABLE, StatsTable
from .interp import ProgramPolicy, run as run_program


# --- identical-neighbour rate --------------------------------------------------


@dataclass
class BetaConfig:
    space: object
    maps: list
    n_programs: int = 20
    n_neighbors: int = 200
    seed: int = 0
    stats: StatsTable = DEFAULT_TABLE


@dataclass
class BetaReport:
    p_beta_mean: float
    p_beta_std: float
    fractions: list
    programs: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("program", "identical_fraction", "size"))
        for i, (f, p) in enumerate(zip(self.fractions, self.programs)):
            w.writerow((i, f"{f:.6f}", p.size))
        return buf.getvalue()


@dataclass
class _Rollout:
    decisions: list  # (state, assignment, volatile) for the program's player
    fault_state: object = None


class _Recorder:
    """Wraps a policy and remembers what it decided at each consulted state."""

    def __init__(self, program: Node):
        self.program = ProgramPolicy(program).program
        self.seen: list = []
        self.fault_state = None

    def decide(self, state, player):
        try:
            ctx = run_program(self.program, state, player)
        except PolicyRuntimeFault:
            self.fault_state = state
            raise
        self.seen.append((state, ctx.assignment, ctx.used_random))
        return ctx.assignment, ctx.used_random


def _rollout(program: Node, opponent: Node, game_map: GameMap, stats: StatsTable) -> _Rollout:
    rec = _Recorder(program)
    run_match(rec, opponent, game_map, 0, stats=stats, keep_log=False)
    return _Rollout(rec.seen, rec.fault_state)


def same_trajectory(neighbor: Node, reference: _Rollout, player: int = 0) -> bool:
    """True iff ``neighbor`` would have made exactly the reference decisions.

    Matches are deterministic, so equal decisions at every consulted state mean
    the neighbour's own roll-out visits the same states; comparing on the
    reference states is therefore exact and stops at the first difference.
    """
    prog = ProgramPolicy(neighbor).program
    for state, assignment, volatile in reference.decisions:
        try:
            ctx = run_program(prog, state, player)
        except PolicyRuntimeFault:
            return False
        if ctx.assignment != assignment:
            return False
        if ctx.used_random and not volatile:
            return False  # it would have been consulted on ticks the reference skipped
    if reference.fault_state is not None:
        try:
            run_program(prog, reference.fault_state, player)
        except PolicyRuntimeFault:
            return True
        return False
    return True


def estimate_beta(config: BetaConfig) -> BetaReport:
    """Fraction of neighbours that behave exactly like their program, per sampled program.

    For each program ``p`` an extra neighbour serves as the opponent; ``p`` and
    each neighbour must make identical decisions on every configured map.
    Neighbours that fault are never identical.
    """
    rng = random.Random(config.seed)
    space = config.space
    fractions, programs = [], []
    for _ in range(config.n_programs):
        p = space.initial(rng)
        opponent = space.neighbors(p, 1, rng)[0]
        refs = [_rollout(p, opponent, m, config.stats) for m in config.maps]
        hits = 0
        for nb in space.neighbors(p, config.n_neighbors, rng):
            if nb == p or all(same_trajectory(nb, r) for r in refs):
                hits += 1
        fractions.append(hits / config.n_neighbors)
        programs.append(p)
    std = statistics.pstdev(fractions) if len(fractions) > 1 else 0.0
    return BetaReport(statistics.fmean(fractions), std, fractions, programs)


class FixedSpace:
    """A degenerate space whose every neighbour is the program itself (testing aid)."""

    def __init__(self, inner):
        self.inner = inner

    def initial(self, rng):
        return self.inner.initial(rng)

    def neighbors(self, current, k=1, rng=None):
        return [current] * k


# --- cross evaluation ---------------------------------------------------------


def head_to_head(a: Node, b: Node, game_map: GameMap, stats: StatsTable = DEFAULT_TABLE) -> list:
    """Both start slots of a against b; MatchResults from a's side."""
    return [run_match(a, b, game_map, slot, stats=stats, keep_log=False).result for slot in (0, 1)]


def mean_ci(values) -> tuple[float, float, float]:
    """Mean with a normal-approximation 95% interval."""
    values = list(values)
    m = statistics.fmean(values)
    if len(values) < 2:
        return m, m, m
    half = 1.959964 * statistics.stdev(values) / math.sqrt(len(values))
    return m, m - half, m + half


@dataclass
class SampleEfficiencyResult:
    budget: int
    seeds: list
    modes: list
    checkpoints: dict  # (mode, seed) -> list of games at each iteration end
    curves: list  # rows: (mode_a, mode_b, checkpoint, games, seed, winning_rate)
    final_games: dict  # (mode_a, mode_b) -> {"win": n, "draw": n, "loss": n}
    final_rates: dict  # (mode_a, mode_b) -> per-seed winning rates of a's final policies
    p_values: dict
    library_sizes: dict = field(default_factory=dict)


def compare_finals(finals_a: list, finals_b: list, game_map: GameMap, stats: StatsTable = DEFAULT_TABLE):
    """Every final policy of A meets every final policy of B from both slots.

    Returns per-A-policy winning rates and total win/draw/loss counts from A's side.
    """
    counts = {"win": 0, "draw": 0, "loss": 0}
    rates = []
    for a in finals_a:
        results = []
        for b in finals_b:
            results.extend(head_to_head(a, b, game_map, stats))
        for r in results:
            counts[r.outcome_for(0)] += 1
        rates.append(winning_rate(results, 0))
    return rates, counts


def sign_test(wins: int, losses: int) -> float:
    """One-sided binomial p-value that wins outnumber losses (draws ignored)."""
    from scipy.stats import binomtest

    n = wins + losses
    if n == 0:
        return 1.0
    return float(binomtest(wins, n, 0.5, alternative="greater").pvalue)


def run_sample_efficiency(transfers: dict, test_map: GameMap, budget: int,
                          pairs=(("liss", "syntax"), ("liss", "syntax_init"), ("syntax_init", "syntax")),
                          stats: StatsTable = DEFAULT_TABLE) -> SampleEfficiencyResult:
    """Cross-evaluate transfer runs. ``transfers`` maps (mode, seed) -> TransferResult.

    Checkpoint i of each run is the policy fixed at the end of self-play
    iteration i; runs split the budget evenly over iterations, so equal i means
    an equal game count up to one evaluation batch.
    """
    modes = sorted({m for m, _ in transfers})
    seeds = sorted({s for _, s in transfers})
    curves = []
    final_games, final_rates, p_values = {}, {}, {}
    for a, b in pairs:
        common = [s for s in seeds if (a, s) in transfers and (b, s) in transfers]
        if not common:
            continue
        for seed in common:
            ra, rb = transfers[(a, seed)], transfers[(b, seed)]
            for i, (pa, pb) in enumerate(zip(ra.policies, rb.policies)):
                rate = winning_rate(head_to_head(pa, pb, test_map, stats), 0)
                curves.append((a, b, i, ra.checkpoints[i], seed, rate))
        rates, counts = compare_finals([transfers[(a, s)].policies[-1] for s in common],
                                       [transfers[(b, s)].policies[-1] for s in common], test_map, stats)
        final_games[(a, b)] = counts
        final_rates[(a, b)] = rates
        p_values[(a, b)] = sign_test(counts["win"], counts["loss"])
    return SampleEfficiencyResult(
        budget=budget,
        seeds=seeds,
        modes=modes,
        checkpoints={k: list(v.checkpoints) for k, v in transfers.items()},
        curves=curves,
        final_games=final_games,
        final_rates=final_rates,
        p_values=p_values,
        library_sizes={k: v.library_size for k, v in transfers.items()},
    )


# --- reports ------------------------------------------------------------------


def content_hash(*parts) -> str:
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        h.update(p.encode() if isinstance(p, str) else p)
        h.update(b"\0")
    return h.hexdigest()


def curves_csv(result: SampleEfficiencyResult) -> str:
    """Per-seed rows plus mean and 95% interval per (pair, checkpoint)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("mode_a", "mode_b", "checkpoint", "games", "seed", "winning_rate", "mean", "ci_low", "ci_high"))
    groups: dict = {}
    for a, b, i, games, seed, rate in result.curves:
        groups.setdefault((a, b, i), []).append((seed, games, rate))
    for (a, b, i), rows in sorted(groups.items()):
        m, lo, hi = mean_ci(r for _, _, r in rows)
        for seed, games, rate in sorted(rows):
            w.writerow((a, b, i, games, seed, f"{rate:.3f}", f"{m:.3f}", f"{lo:.3f}", f"{hi:.3f}"))
    return buf.getvalue()


def finals_csv(result: SampleEfficiencyResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("mode_a", "mode_b", "mean_rate", "ci_low", "ci_high", "wins", "draws", "losses", "p_value"))
    for (a, b), counts in sorted(result.final_games.items()):
        m, lo, hi = mean_ci(result.final_rates[(a, b)])
        w.writerow((a, b, f"{m:.3f}", f"{lo:.3f}", f"{hi:.3f}", counts["win"], counts["draw"], counts["loss"],
                    f"{result.p_values[(a, b)]:.6f}"))
    return buf.getvalue()


def emit_report(results: dict, out_dir: Path, config: Optional[dict] = None, inputs: Optional[dict] = None) -> Path:
    """Write one CSV per experiment plus ``summary.txt``; output is a pure function of the inputs.

    ``results`` maps an experiment name to a BetaReport, a SampleEfficiencyResult
    or a ready CSV string. ``inputs`` maps input names to their text, which is
    hashed into the summary.
    """
    if not results:
        raise ValueError("nothing to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["format: 1"]
    if config:
        lines.append("config: " + json.dumps(_plain(config), sort_keys=True))
    for name, text in sorted((inputs or {}).items()):
        lines.append(f"input {name}: {content_hash(text)}")
    for name, res in sorted(results.items()):
        if isinstance(res, BetaReport):
            (out / f"{name}.csv").write_text(res.to_csv())
            lines.append(f"{name}: p_beta_mean={res.p_beta_mean:.6f} p_beta_std={res.p_beta_std:.6f} "
                         f"programs={len(res.fractions)}")
        elif isinstance(res, SampleEfficiencyResult):
            (out / f"{name}_curves.csv").write_text(curves_csv(res))
            (out / f"{name}_finals.csv").write_text(finals_csv(res))
            lines.append(f"{name}: budget={res.budget} seeds={','.join(map(str, res.seeds))}")
            for (a, b), counts in sorted(res.final_games.items()):
                m, lo, hi = mean_ci(res.final_rates[(a, b)])
                lines.append(f"  {a} vs {b}: mean={m:.3f} ci=[{lo:.3f},{hi:.3f}] "
                             f"w/d/l={counts['win']}/{counts['draw']}/{counts['loss']} "
                             f"p={res.p_values[(a, b)]:.6f}")
        elif isinstance(res, str):
            (out / f"{name}.csv").write_text(res)
            lines.append(f"{name}: {content_hash(res)}")
        else:
            raise TypeError(f"cannot report {type(res).__name__}")
    summary = out / "summary.txt"
    summary.write_text("\n".join(lines) + "\n")
    return summary


def _plain(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return _plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Node):
        return pretty(obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return repr(obj)
