"""End-to-end runs shared by the command line and the scripts."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

from .bench import BetaConfig, SampleEfficiencyResult, emit_report, estimate_beta, run_sample_efficiency
from .config import ConfigError, ExperimentConfig, dump_config
from .dsl.syntax import parse, pretty
from .engine.maps import dump_map, resolve_map
from .search import SearchTrace, ShcConfig
from .selfplay import (
    MODES,
    IbrConfig,
    TransferResult,
    load_training_library,
    run_dir,
    run_ibr,
    save_training,
    train_then_transfer,
)
from .space import SemanticSpace, SyntaxSpace

log = logging.getLogger(__name__)


def map_or_config_error(name: str):
    try:
        return resolve_map(name)
    except (KeyError, FileNotFoundError, ValueError) as exc:
        raise ConfigError(f"cannot load map {name!r}: {exc}") from None


def train(cfg: ExperimentConfig, map_name: str, seed: int, out: Path) -> Path:
    """Self-play in the syntax space; writes ``out/run/<seed>/``."""
    game_map = map_or_config_error(map_name)
    shc_cfg = ShcConfig(k=cfg.k, max_games=cfg.train_games_per_iteration,
                        max_seconds=cfg.train_seconds_per_iteration,
                        games_per_eval=cfg.games_per_eval, seed=seed)
    space = SyntaxSpace(z=cfg.z, cap=cfg.cap, k=cfg.k)
    log.info("training on %s, seed %d", game_map.name, seed)
    art = run_ibr(space, IbrConfig(map=game_map, shc=shc_cfg, iterations=cfg.train_iterations))
    directory = run_dir(out, seed)
    directory.mkdir(parents=True, exist_ok=True)
    pool, library = save_training(art, directory, pool_cap=cfg.pool_cap, seed=seed)
    (directory / "config.yaml").write_text(dump_config(cfg))
    (directory / "map.map").write_text(dump_map(game_map))
    log.info("corpus %d programs, pool %d states, library %d entries",
             len(art.corpus), len(pool), len(library))
    return directory


def find_run(train_dir: Path, seed: int) -> Path:
    """Accept either a run directory or the ``--out`` of ``train``."""
    train_dir = Path(train_dir)
    nested = run_dir(train_dir, seed)
    if (nested / "policy.mrl").exists():
        return nested
    if (train_dir / "policy.mrl").exists():
        return train_dir
    raise ConfigError(f"no training run for seed {seed} under {train_dir}")


def transfer(cfg: ExperimentConfig, mode: str, train_dir: Optional[Path], map_name: str, seed: int,
             out: Optional[Path] = None) -> TransferResult:
    mode = mode.replace("-", "_")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    game_map = map_or_config_error(map_name)
    run = None
    if mode != "syntax":
        if train_dir is None:
            raise ConfigError(f"mode {mode} needs --train")
        run = find_run(train_dir, seed)
    per_iter = cfg.transfer_game_budget // cfg.transfer_iterations
    shc_cfg = ShcConfig(k=cfg.k, max_games=per_iter, games_per_eval=cfg.games_per_eval, seed=seed)
    result = train_then_transfer(game_map, mode, shc_cfg, iterations=cfg.transfer_iterations,
                                 train_dir=run, z=cfg.z, cap=cfg.cap, epsilon=cfg.epsilon,
                                 continual_growth=cfg.continual_growth)
    if out is not None:
        write_transfer(result, Path(out))
    return result


def transfer_dir(root: Path, mode: str, map_name: str, seed: int) -> Path:
    return Path(root) / "transfer" / mode / map_name / str(seed)


def write_transfer(result: TransferResult, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "trace.csv").write_text(result.trace.to_csv(with_iteration=True))
    lines = ["iteration,games"]
    for i, (policy, games) in enumerate(zip(result.policies, result.checkpoints)):
        (directory / f"policy_iter{i}.mrl").write_text(pretty(policy))
        lines.append(f"{i},{games}")
    (directory / "checkpoints.csv").write_text("\n".join(lines) + "\n")
    (directory / "library_size.txt").write_text(f"{result.library_size}\n")


def read_transfer(directory: Path, mode: str) -> TransferResult:
    rows = (directory / "checkpoints.csv").read_text().strip().splitlines()[1:]
    games = [int(r.split(",")[1]) for r in rows]
    policies = [parse((directory / f"policy_iter{i}.mrl").read_text()) for i in range(len(games))]
    size_file = directory / "library_size.txt"
    size = int(size_file.read_text()) if size_file.exists() else 0
    return TransferResult(mode, SearchTrace(), policies, games, size)


def beta(cfg: ExperimentConfig, space_name: str, seed: int, train_dir: Optional[Path] = None):
    if space_name not in ("syntax", "liss"):
        raise ConfigError("space must be syntax or liss")
    maps = [map_or_config_error(m) for m in cfg.beta_maps]
    if space_name == "liss":
        if train_dir is None:
            raise ConfigError("the liss space needs --train")
        lib = load_training_library(find_run(train_dir, seed))
        space = SemanticSpace(z=cfg.z, cap=cfg.cap, k=cfg.k, library=lib,
                              epsilon=cfg.beta_epsilon, continual_growth=False)
    else:
        space = SyntaxSpace(z=cfg.z, cap=cfg.cap, k=cfg.k)
    return estimate_beta(BetaConfig(space, maps, cfg.beta_programs, cfg.beta_neighbors, seed))


def sample_efficiency(cfg: ExperimentConfig, root: Path, map_name: Optional[str] = None) -> SampleEfficiencyResult:
    """Collect transfer runs written under ``root/transfer`` and cross-evaluate them."""
    map_name = map_name or cfg.test_map
    game_map = map_or_config_error(map_name)
    runs = {}
    for mode in MODES:
        base = Path(root) / "transfer" / mode / map_name
        if not base.is_dir():
            continue
        for seed_dir in sorted(base.iterdir(), key=lambda p: p.name):
            if (seed_dir / "checkpoints.csv").exists():
                runs[(mode, int(seed_dir.name))] = read_transfer(seed_dir, mode)
    if not runs:
        raise ConfigError(f"no transfer runs for {map_name} under {root}")
    return run_sample_efficiency(runs, game_map, cfg.transfer_game_budget)


def report(cfg: ExperimentConfig, root: Path) -> Path:
    root = Path(root)
    results: dict = {}
    inputs = {}
    if (root / "transfer").is_dir():
        for map_dir in sorted({p.name for p in (root / "transfer").glob("*/*") if p.is_dir()}):
            results[f"sample_efficiency_{map_dir}"] = sample_efficiency(cfg, root, map_dir)
    for csv_path in sorted(root.glob("beta_*.csv")):
        inputs[csv_path.name] = csv_path.read_text()
    if not results and not inputs:
        raise ConfigError(f"nothing to report under {root}")
    if not results:
        results = {"inputs": "name\n" + "\n".join(sorted(inputs)) + "\n"}
    return emit_report(results, root / "report", config=cfg.snapshot(), inputs=inputs)
