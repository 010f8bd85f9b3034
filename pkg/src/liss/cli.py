"""``liss-lab`` command line.

Exit codes: 0 success, 2 configuration error, 3 runtime fault.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments
from .bench import emit_report
from .config import ConfigError, load_config, preset

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _config(args):
    cfg = preset(getattr(args, "preset", None) or "desk")
    if args.config:
        cfg = load_config(args.config, cfg)
    return cfg


def cmd_train(args) -> int:
    cfg = _config(args)
    directory = experiments.train(cfg, args.map, args.seed, Path(args.out))
    print(directory)
    return EXIT_OK


def cmd_transfer(args) -> int:
    cfg = _config(args)
    mode = args.mode.replace("-", "_")
    map_name = args.map or cfg.test_map
    root = Path(args.out) if args.out else (Path(args.train) if args.train else Path("results"))
    out = experiments.transfer_dir(root, mode, map_name, args.seed)
    result = experiments.transfer(cfg, mode, Path(args.train) if args.train else None, map_name, args.seed, out)
    print(f"{out}: {len(result.policies)} checkpoints, {result.checkpoints[-1]} games")
    return EXIT_OK


def cmd_beta(args) -> int:
    cfg = _config(args)
    seeds = [args.seed] if args.seed is not None else list(cfg.beta_seeds)
    out = Path(args.out)
    results = {}
    for seed in seeds:
        rep = experiments.beta(cfg, args.space, seed, Path(args.train) if args.train else None)
        results[f"beta_{args.space}_seed{seed}"] = rep
        print(f"seed {seed}: p_beta={rep.p_beta_mean:.4f} (std {rep.p_beta_std:.4f})")
    summary = emit_report(results, out, config=cfg.snapshot())
    print(summary)
    return EXIT_OK


def cmd_report(args) -> int:
    cfg = _config(args)
    summary = experiments.report(cfg, Path(args.inp))
    print(summary.read_text(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liss-lab", description="Program synthesis in syntax and library-induced spaces.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="format-1 YAML file; its values override the flags")
        p.add_argument("--preset", choices=("desk", "paper"), default="desk")

    p = sub.add_parser("train", help="self-play on a training map and build a library")
    p.add_argument("--map", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("transfer", help="self-play on a test map in one of three modes")
    p.add_argument("--mode", required=True, choices=("syntax", "syntax-init", "liss"))
    p.add_argument("--train", help="output directory of a train run")
    p.add_argument("--map")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="results root (default: the train directory)")
    common(p)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("beta", help="estimate the identical-neighbour rate of a space")
    p.add_argument("--space", required=True, choices=("syntax", "liss"))
    p.add_argument("--train", help="train output directory (needed for liss)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="results/beta")
    common(p)
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("report", help="cross-evaluate transfer runs and summarise results")
    p.add_argument("--in", dest="inp", required=True)
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any other failure is a runtime fault
        logging.getLogger(__name__).debug("runtime fault", exc_info=True)
        print(f"runtime fault: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
