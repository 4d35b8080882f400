#!/usr/bin/env python3
"""Generate keys with the selected RIS units at one SNR and run the six NIST tests.

    python scripts/nist_table.py --snr 18 --bits 1000000 --out nist_report.csv
"""
import argparse
import warnings
from pathlib import Path

from riskey.harness import ExperimentConfig, Mode, run_key_experiment
from riskey.nist import run_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--snr", type=float, default=18.0)
    parser.add_argument("--bits", type=int, default=200_000, help="key length (2 bits per CSI sample)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path)
    args = parser.parse_args()

    cfg = ExperimentConfig(snr_grid_db=[args.snr], trials=args.bits // 2, modes=[Mode.OURS], master_seed=args.seed)
    (row,), keys = run_key_experiment(cfg)
    bits = next(iter(keys.values()))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run_suite(bits)
    for w in caught:
        print(f"# {w.message}")
    print(f"# {len(bits)} bits at {args.snr:g} dB, unmatched key rate {row.ukr:.5f}")
    text = report.to_csv()
    print(text, end="")
    if args.out:
        args.out.write_text(text)


if __name__ == "__main__":
    main()
