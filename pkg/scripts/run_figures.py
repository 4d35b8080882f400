#!/usr/bin/env python3
"""Run every figure preset and write one CSV (plus sidecar) per preset.

    python scripts/run_figures.py --out results --trials 20000 --workers 4

The full 10^5-trial presets take a while; ``--trials`` scales them down.
"""
import argparse
import logging
from pathlib import Path

from riskey.harness import SweepRow, run_capacity_sweep, run_key_experiment, write_metadata, write_rows
from riskey.presets import PRESETS, preset_configs

log = logging.getLogger("run_figures")


def run_preset(name, out_dir, **overrides):
    preset, configs = preset_configs(name, **overrides)
    out = out_dir / f"{name}.csv"
    rows = []
    for cfg in configs:
        if preset.kind == "capacity":
            rows.extend(run_capacity_sweep(cfg))
        else:
            suffix = f"_n{cfg.n_units}_m{cfg.budget}" if len(configs) > 1 else ""
            cell_rows, _ = run_key_experiment(cfg, key_dir=out_dir / f"{name}_keys{suffix}")
            rows.extend(cell_rows)
    rows.sort(key=SweepRow.sort_key)
    write_rows(out, rows)
    write_metadata(out, configs, rows, preset.kind, name, preset.notes)
    return out, rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--trials", type=int, help="override trials per cell")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--only", nargs="*", choices=sorted(PRESETS), help="subset of presets")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    args.out.mkdir(parents=True, exist_ok=True)
    overrides = {"workers": args.workers, "master_seed": args.seed}
    if args.trials:
        overrides["trials"] = args.trials
    for name in args.only or sorted(PRESETS):
        out, rows = run_preset(name, args.out, **overrides)
        log.info("%s: %d rows -> %s", name, len(rows), out)


if __name__ == "__main__":
    main()
