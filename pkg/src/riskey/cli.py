"""Command line entry point.

    riskey simulate capacity --preset fig5b --trials 20000 --out cap.csv
    riskey simulate keys --snr 0,18 --out ukr.csv
    riskey test randomness ukr_keys/keys_Ours_snr18.txt --out report.csv
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness, nist
from .errors import InsufficientDataError, InvalidParameterError
from .harness import ExperimentConfig, run_capacity_sweep, run_key_experiment
from .keys import read_key_bits
from .presets import Preset, load_config, preset_configs

log = logging.getLogger("riskey")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _modes(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_sweep_args(p):
    p.add_argument("--preset", help="named figure preset (fig5a ... fig5f)")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--snr", type=_floats, dest="snr_grid_db", help="comma separated SNR grid in dB")
    p.add_argument("--rho", type=_floats, dest="rho_values", help="comma separated correlation values")
    p.add_argument("--units", type=int, dest="n_units")
    p.add_argument("--ratio", type=float, dest="turn_on_ratio", help="turn-on ratio M/N")
    p.add_argument("--trials", type=int)
    p.add_argument("--modes", type=_modes, help="subset of Ours,Random,NoRis")
    p.add_argument("--variant", dest="formula_variant", choices=["composed", "printed13"])
    p.add_argument("--scenario", dest="eve_scenario", choices=["near_node", "near_ris"])
    p.add_argument("--strategy", dest="ours_strategy", choices=["top_m", "best_prefix"])
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=True, help="output CSV path")


_OVERRIDES = (
    "snr_grid_db", "rho_values", "n_units", "turn_on_ratio", "trials", "modes",
    "formula_variant", "eve_scenario", "ours_strategy", "master_seed", "workers",
)


def build_parser():
    parser = argparse.ArgumentParser(prog="riskey", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    top = parser.add_subparsers(dest="command", required=True)

    simulate = top.add_parser("simulate", help="run Monte Carlo experiments")
    sim_sub = simulate.add_subparsers(dest="experiment", required=True)
    _add_sweep_args(sim_sub.add_parser("capacity", help="secret key capacity sweep"))
    keys = sim_sub.add_parser("keys", help="quantized keys and unmatched key rate")
    _add_sweep_args(keys)
    keys.add_argument("--key-dir", help="directory for key files (default: <out stem>_keys)")

    test = top.add_parser("test", help="evaluate key material")
    test_sub = test.add_subparsers(dest="what", required=True)
    rnd = test_sub.add_parser("randomness", help="six NIST SP 800-22 tests on key files")
    rnd.add_argument("keys", nargs="+", help="ASCII '0'/'1' key files")
    rnd.add_argument("--out", help="report CSV path (default: stdout)")
    rnd.add_argument("--block-frequency-len", type=int, default=nist.BLOCK_FREQUENCY_LEN)
    rnd.add_argument("--serial-m", type=int, default=nist.SERIAL_M)
    rnd.add_argument("--linear-complexity-len", type=int, default=nist.LINEAR_COMPLEXITY_LEN)
    return parser


def _configs(args):
    overrides = {k: getattr(args, k) for k in _OVERRIDES if getattr(args, k) is not None}
    if args.preset and args.config:
        raise InvalidParameterError("use either --preset or --config, not both")
    if args.preset:
        preset, configs = preset_configs(args.preset, **overrides)
        return preset, configs
    kind = "keys" if args.experiment == "keys" else "capacity"
    if args.config:
        base = load_config(args.config)
        cfg = ExperimentConfig(**{**harness.config_record(base), **overrides, "output_path": None})
    else:
        cfg = ExperimentConfig(**overrides)
    return Preset(kind, (cfg,)), [cfg]


def _simulate(args):
    preset, configs = _configs(args)
    if preset.kind != args.experiment:
        raise InvalidParameterError(f"preset {args.preset} is a {preset.kind} experiment")
    for note in preset.notes:
        log.info("# %s", note)
    out = Path(args.out)
    if not out.parent.exists():
        raise OSError(f"output directory {out.parent} does not exist")

    rows = []
    multi = len(configs) > 1
    for cfg in configs:
        if args.experiment == "capacity":
            rows.extend(run_capacity_sweep(cfg))
        else:
            key_dir = Path(args.key_dir) if args.key_dir else out.with_name(out.stem + "_keys")
            if multi:
                key_dir = key_dir / f"n{cfg.n_units}_m{cfg.budget}"
            cell_rows, _ = run_key_experiment(cfg, key_dir=key_dir)
            rows.extend(cell_rows)
    rows.sort(key=harness.SweepRow.sort_key)
    harness.write_rows(out, rows)
    harness.write_metadata(out, configs, rows, args.experiment, args.preset, preset.notes)
    log.info("wrote %d rows to %s", len(rows), out)
    return 0


def _randomness(args):
    reports = []
    for path in args.keys:
        bits = read_key_bits(path)
        report = nist.run_suite(
            bits,
            block_frequency_len=args.block_frequency_len,
            serial_m=args.serial_m,
            linear_complexity_len=args.linear_complexity_len,
        )
        reports.append((path, report))
        for entry in report.entries:
            log.info("%s %-16s p=%.6f %s", path, entry.kind.value, entry.p_value, "pass" if entry.passed else "FAIL")
    text = "".join(report.to_csv(header=(i == 0)) for i, (_, report) in enumerate(reports))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose or args.command == "simulate" else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    try:
        if args.command == "simulate":
            return _simulate(args)
        return _randomness(args)
    except (InvalidParameterError, InsufficientDataError, OSError, ValueError) as exc:
        print(f"riskey: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
