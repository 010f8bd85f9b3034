"""Run both experiments at desk scale and write everything under --out.

    python scripts/run_desk.py --out results/desk
    python scripts/run_desk.py --out results/desk --skip-beta

Training runs are reused when ``run/<seed>/policy.mrl`` already exists.
"""

import argparse
import logging
import time
from pathlib import Path

from liss import experiments
from liss.bench import emit_report
from liss.config import load_config, preset

log = logging.getLogger("run_desk")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/desk")
    ap.add_argument("--preset", default="desk")
    ap.add_argument("--config")
    ap.add_argument("--skip-beta", action="store_true")
    ap.add_argument("--skip-transfer", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = preset(args.preset)
    if args.config:
        cfg = load_config(args.config, cfg)
    out = Path(args.out)
    seeds = sorted(set(cfg.beta_seeds) | set(cfg.exp2_seeds))

    for seed in seeds:
        if (out / "run" / str(seed) / "policy.mrl").exists():
            continue
        t = time.time()
        experiments.train(cfg, cfg.train_map, seed, out)
        log.info("train seed %d: %.0fs", seed, time.time() - t)

    if not args.skip_beta:
        results = {}
        for seed in cfg.beta_seeds:
            for space in ("syntax", "liss"):
                t = time.time()
                rep = experiments.beta(cfg, space, seed, out)
                results[f"beta_{space}_seed{seed}"] = rep
                log.info("beta %s seed %d: %.4f (%.0fs)", space, seed, rep.p_beta_mean, time.time() - t)
        emit_report(results, out / "beta", config=cfg.snapshot())

    if not args.skip_transfer:
        for seed in cfg.exp2_seeds:
            for mode in ("syntax", "syntax_init", "liss"):
                target = experiments.transfer_dir(out, mode, cfg.test_map, seed)
                if (target / "checkpoints.csv").exists():
                    continue
                t = time.time()
                experiments.transfer(cfg, mode, out, cfg.test_map, seed, target)
                log.info("transfer %s seed %d: %.0fs", mode, seed, time.time() - t)
        summary = experiments.report(cfg, out)
        print(summary.read_text(), end="")


if __name__ == "__main__":
    main()
