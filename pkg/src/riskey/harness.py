"""Seeded Monte Carlo sweeps over SNR, correlation and RIS configuration mode.

Random streams are derived from ``(master_seed, purpose, cell key, block)``
where the cell key encodes the SNR / correlation / array size values, so a
row depends only on its own cell, never on grid layout or worker count.
Modes inside a cell share placement, channel, phase and noise draws.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .capacity import FormulaVariant, csk_closed_form, csk_independent_eve, effective_variance, gaussian_cmi_from_samples
from .channel import (
    EveScenario,
    RisState,
    SystemParams,
    correlate_eve_channels,
    observe_csi,
    sample_channel_set,
)
from .errors import InvalidParameterError
from .keys import BitSequence, Party, quantize_pair, unmatched_key_rate, write_key_file
from .optimizer import Strategy, best_prefix_switches, random_selection, top_m_switches, unit_gain

log = logging.getLogger(__name__)

CSV_FIELDS = ("snr_db", "rho", "mode", "n", "m", "trials", "mean_csk", "std_csk", "ukr", "seed")
BLOCK = 10_000
DEFAULT_SNR_GRID = tuple(float(s) for s in range(0, 20, 2))
DEFAULT_RHO = 0.3

_PLACEMENT, _CHANNEL, _EVE, _SELECTION, _OBSERVE = range(5)
# block slot reserved for the single placement of a key-experiment cell
_KEY_PLACEMENT = 2**32 - 1


class Mode(str, enum.Enum):
    OURS = "Ours"
    RANDOM = "Random"
    NO_RIS = "NoRis"


MODE_ORDER = {mode: i for i, mode in enumerate(Mode)}


@dataclass
class ExperimentConfig:
    snr_grid_db: list = field(default_factory=lambda: list(DEFAULT_SNR_GRID))
    trials: int = 100_000
    rho_values: list = field(default_factory=lambda: [DEFAULT_RHO])
    n_units: int = 80
    turn_on_ratio: float = 0.8
    modes: list = field(default_factory=lambda: list(Mode))
    formula_variant: FormulaVariant = FormulaVariant.COMPOSED
    master_seed: int = 0
    output_path: str | None = None
    eve_scenario: EveScenario = EveScenario.NEAR_NODE
    ours_strategy: Strategy = Strategy.TOP_M
    workers: int = 1
    noiseless: bool = False  # test hook: drop additive CSI noise

    def __post_init__(self):
        self.snr_grid_db = [float(s) for s in self.snr_grid_db]
        self.rho_values = [float(r) for r in self.rho_values]
        self.modes = [Mode(m) for m in self.modes]
        self.formula_variant = FormulaVariant(self.formula_variant)
        self.eve_scenario = EveScenario(self.eve_scenario)
        self.ours_strategy = Strategy(self.ours_strategy)
        if self.trials < 1:
            raise InvalidParameterError("trials must be >= 1")
        if not self.snr_grid_db or not self.rho_values or not self.modes:
            raise InvalidParameterError("SNR grid, rho values and modes must be non-empty")
        if not 0.0 < self.turn_on_ratio <= 1.0:
            raise InvalidParameterError(f"turn_on_ratio must be in (0, 1], got {self.turn_on_ratio}")
        if self.n_units < 1:
            raise InvalidParameterError("n_units must be positive")
        if any(not 0.0 <= r <= 1.0 for r in self.rho_values):
            raise InvalidParameterError("rho values must lie in [0, 1]")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParameterError("master_seed must be a 64-bit unsigned integer")

    @property
    def budget(self) -> int:
        return max(1, int(round(self.turn_on_ratio * self.n_units)))


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    rho: float
    mode: Mode
    n: int
    m: int
    trials: int
    mean_csk: float
    std_csk: float
    ukr: float
    seed: int
    empirical_csk: float = field(default=math.nan, compare=False)

    def csv_record(self):
        return [
            _fmt(self.snr_db), _fmt(self.rho), self.mode.value, self.n, self.m, self.trials,
            _fmt(self.mean_csk), _fmt(self.std_csk), _fmt(self.ukr), self.seed,
        ]

    def sort_key(self):
        return (self.n, self.m, self.snr_db, self.rho, MODE_ORDER[self.mode])


def _fmt(value):
    return f"{value:.10g}"


def _value_key(value, scale=1000):
    # non-negative integer key for SeedSequence; snr may be negative
    return int(round(value * scale)) + 10**9


def stream(seed, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def _blocks(trials):
    for start in range(0, trials, BLOCK):
        yield start // BLOCK, min(BLOCK, trials - start)


def _analytic(cfg, x, rho):
    if cfg.eve_scenario is EveScenario.NEAR_RIS:
        return csk_independent_eve(x)
    return csk_closed_form(x, rho, cfg.formula_variant)


def _mode_switches(cfg, mode, params, gains, sel_rng, size):
    m = params.budget
    if mode is Mode.NO_RIS:
        return np.zeros(gains.shape, dtype=np.int8)
    if mode is Mode.RANDOM:
        return random_selection(params.n_units, m, sel_rng, size=size)
    if cfg.ours_strategy is Strategy.BEST_PREFIX:
        return best_prefix_switches(gains, m, params.sigma2_ab, params.rho, cfg.formula_variant)
    if cfg.ours_strategy is Strategy.RANDOM:
        return random_selection(params.n_units, m, sel_rng, size=size)
    return top_m_switches(gains, m)


def _block_switches(cfg, mode, params, gains, snr_key, block, size):
    sel_rng = stream(cfg.master_seed, _SELECTION, snr_key, cfg.n_units, params.budget, block)
    return _mode_switches(cfg, mode, params, gains, sel_rng, size)


def _observe_modes(cfg, params, real, gains, snr_key, block, size):
    """Observations for every configured mode under shared draws."""
    out = {}
    for mode in cfg.modes:
        switches = _block_switches(cfg, mode, params, gains, snr_key, block, size)
        obs_rng = stream(cfg.master_seed, _OBSERVE, snr_key, cfg.n_units, block)
        ris = RisState.with_random_phases(switches, obs_rng, size=size)
        obs = observe_csi(real, ris, params, obs_rng, noise=not cfg.noiseless)
        out[mode] = (switches, obs)
    return out


def capacity_trials(cfg: ExperimentConfig, snr_db: float, rho: float, with_samples=True):
    """Per-trial closed-form capacity for each mode of one cell.

    Returns ``(csk, samples)``: ``csk[mode]`` has one value per trial and
    ``samples[mode]`` stacks the matching ``(H_A, H_B, H_BE)`` rows (``None``
    when ``with_samples`` is false).  Trials with the same index share
    placement and channel draws across modes, budgets and configs.
    """
    snr_key, rho_key = _value_key(snr_db), _value_key(rho, 10**6)
    m = cfg.budget
    csk = {mode: [] for mode in cfg.modes}
    samples = {mode: [] for mode in cfg.modes}
    for block, size in _blocks(cfg.trials):
        place_rng = stream(cfg.master_seed, _PLACEMENT, snr_key, cfg.n_units, block)
        params = SystemParams.from_snr(
            snr_db, cfg.n_units, m, rho, place_rng, size=size, eve_scenario=cfg.eve_scenario
        )
        gains = unit_gain(params.sigma2_ra, params.sigma2_rb)
        if not with_samples:
            for mode in cfg.modes:
                switches = _block_switches(cfg, mode, params, gains, snr_key, block, size)
                csk[mode].append(np.atleast_1d(_analytic(cfg, effective_variance(params, switches), rho)))
            continue
        real = sample_channel_set(params, stream(cfg.master_seed, _CHANNEL, snr_key, cfg.n_units, block))
        real = correlate_eve_channels(
            real, params, stream(cfg.master_seed, _EVE, snr_key, rho_key, cfg.n_units, block)
        )
        for mode, (switches, obs) in _observe_modes(cfg, params, real, gains, snr_key, block, size).items():
            csk[mode].append(np.atleast_1d(_analytic(cfg, effective_variance(params, switches), rho)))
            samples[mode].append(np.column_stack([obs.h_a, obs.h_b, obs.h_be_obs]))
    csk = {mode: np.concatenate(v) for mode, v in csk.items()}
    if not with_samples:
        return csk, None
    return csk, {mode: np.concatenate(v) for mode, v in samples.items()}


def _capacity_cell(cfg: ExperimentConfig, snr_db: float, rho: float):
    csk, samples = capacity_trials(cfg, snr_db, rho)
    rows = []
    for mode in cfg.modes:
        values, triples = csk[mode], samples[mode]
        rows.append(SweepRow(
            snr_db=snr_db, rho=rho, mode=mode, n=cfg.n_units, m=cfg.budget, trials=cfg.trials,
            mean_csk=float(values.mean()),
            std_csk=float(values.std(ddof=1)) if len(values) > 1 else 0.0,
            ukr=_ukr(triples[:, 0], triples[:, 1]),
            seed=cfg.master_seed,
            empirical_csk=_empirical(triples),
        ))
    return rows


def _ukr(h_a, h_b):
    if len(h_a) < 4:
        return math.nan
    alice, bob = quantize_pair(h_a, h_b)
    return unmatched_key_rate(alice, bob)


def _empirical(triples):
    if len(triples) < 1000:
        return math.nan
    return gaussian_cmi_from_samples(triples)


def _key_cell(cfg: ExperimentConfig, snr_db: float, rho: float):
    """One fixed placement per cell; ``trials`` coherent blocks of CSI."""
    snr_key, rho_key = _value_key(snr_db), _value_key(rho, 10**6)
    m = cfg.budget
    place_rng = stream(cfg.master_seed, _PLACEMENT, snr_key, cfg.n_units, _KEY_PLACEMENT)
    params = SystemParams.from_snr(snr_db, cfg.n_units, m, rho, place_rng, eve_scenario=cfg.eve_scenario)
    gains = unit_gain(params.sigma2_ra, params.sigma2_rb)
    sel_rng = stream(cfg.master_seed, _SELECTION, snr_key, cfg.n_units, m, 0)
    switches = {mode: _mode_switches(cfg, mode, params, gains, sel_rng, None) for mode in cfg.modes}

    h_a = {mode: [] for mode in cfg.modes}
    h_b = {mode: [] for mode in cfg.modes}
    for block, size in _blocks(cfg.trials):
        real = sample_channel_set(params, stream(cfg.master_seed, _CHANNEL, snr_key, cfg.n_units, block), size=size)
        real = correlate_eve_channels(
            real, params, stream(cfg.master_seed, _EVE, snr_key, rho_key, cfg.n_units, block)
        )
        for mode in cfg.modes:
            obs_rng = stream(cfg.master_seed, _OBSERVE, snr_key, cfg.n_units, block)
            ris = RisState.with_random_phases(switches[mode], obs_rng, size=size)
            obs = observe_csi(real, ris, params, obs_rng, noise=not cfg.noiseless)
            h_a[mode].append(obs.h_a)
            h_b[mode].append(obs.h_b)

    rows, keys = [], {}
    for mode in cfg.modes:
        alice, bob = quantize_pair(np.concatenate(h_a[mode]), np.concatenate(h_b[mode]))
        x = effective_variance(params, switches[mode])
        rows.append(SweepRow(
            snr_db=snr_db, rho=rho, mode=mode, n=cfg.n_units, m=m, trials=cfg.trials,
            mean_csk=float(_analytic(cfg, x, rho)), std_csk=0.0,
            ukr=unmatched_key_rate(alice, bob), seed=cfg.master_seed,
        ))
        keys[(mode, snr_db, rho)] = alice.bits
    return rows, keys


def _cells(cfg):
    return [(snr, rho) for snr in cfg.snr_grid_db for rho in cfg.rho_values]


def _map_cells(func, cfg):
    cells = _cells(cfg)
    if cfg.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(func, [cfg] * len(cells), *zip(*cells)))
    return [func(cfg, snr, rho) for snr, rho in cells]


def run_capacity_sweep(config: ExperimentConfig, preset=None, notes=()) -> list[SweepRow]:
    """Analytic and empirical capacity for every (SNR, rho, mode) cell.

    ``mean_csk``/``std_csk`` summarize the closed-form capacity over
    ``trials`` independent placements; each trial also contributes one CSI
    observation triple to the sample-covariance estimate kept in the
    metadata sidecar.
    """
    rows = [row for cell in _map_cells(_capacity_cell, config) for row in cell]
    rows.sort(key=SweepRow.sort_key)
    if config.output_path:
        write_rows(config.output_path, rows)
        write_metadata(config.output_path, config, rows, "capacity", preset, notes)
    return rows


def key_file_name(mode, snr_db, rho, multi_rho):
    name = f"keys_{Mode(mode).value}_snr{snr_db:g}"
    if multi_rho:
        name += f"_rho{rho:g}"
    return name + ".txt"


def run_key_experiment(config: ExperimentConfig, key_dir=None, preset=None, notes=()):
    """Quantize paired CSI per cell and measure the unmatched key rate.

    Returns ``(rows, key_bits)`` where ``key_bits`` maps
    ``(mode, snr_db, rho)`` to Alice's bit array.  Key files are written to
    ``key_dir`` (default: ``<output stem>_keys`` next to the CSV) when an
    output path or key directory is configured.
    """
    rows, keys = [], {}
    for cell_rows, cell_keys in _map_cells(_key_cell, config):
        rows.extend(cell_rows)
        keys.update(cell_keys)
    rows.sort(key=SweepRow.sort_key)
    if config.output_path:
        write_rows(config.output_path, rows)
        write_metadata(config.output_path, config, rows, "keys", preset, notes)
        if key_dir is None:
            out = Path(config.output_path)
            key_dir = out.with_name(out.stem + "_keys")
    if key_dir is not None:
        key_dir = Path(key_dir)
        key_dir.mkdir(parents=True, exist_ok=True)
        multi_rho = len(config.rho_values) > 1
        for (mode, snr_db, rho), bits in sorted(keys.items(), key=lambda kv: (MODE_ORDER[kv[0][0]], kv[0][1], kv[0][2])):
            write_key_file(key_dir / key_file_name(mode, snr_db, rho, multi_rho), BitSequence(bits, Party.ALICE))
    return rows, keys


def write_rows(path, rows, append=False):
    path = Path(path)
    new = not append or not path.exists()
    with path.open("a" if append else "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new:
            writer.writerow(CSV_FIELDS)
        writer.writerows(row.csv_record() for row in rows)
    return path


def read_rows(path):
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise InvalidParameterError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return [
            SweepRow(
                snr_db=float(r["snr_db"]), rho=float(r["rho"]), mode=Mode(r["mode"]),
                n=int(r["n"]), m=int(r["m"]), trials=int(r["trials"]),
                mean_csk=float(r["mean_csk"]), std_csk=float(r["std_csk"]),
                ukr=float(r["ukr"]), seed=int(r["seed"]),
            )
            for r in reader
        ]


def config_record(cfg: ExperimentConfig):
    record = dataclasses.asdict(cfg)
    for key, value in record.items():
        if isinstance(value, enum.Enum):
            record[key] = value.value
        elif isinstance(value, list):
            record[key] = [v.value if isinstance(v, enum.Enum) else v for v in value]
    return record


def write_metadata(path, cfgs, rows, kind, preset=None, notes=()):
    meta_path = Path(str(path) + ".meta.json")
    meta = {
        "kind": kind,
        "preset": preset,
        "config": [config_record(c) for c in cfgs] if isinstance(cfgs, (list, tuple)) else config_record(cfgs),
        "notes": list(notes) + [
            "mean_csk/std_csk: closed-form capacity over trials",
            "empirical_csk: Gaussian CMI of the same trials' (H_A, H_B, H_BE) samples",
        ],
        "empirical_csk": [
            {"snr_db": r.snr_db, "rho": r.rho, "mode": r.mode.value, "n": r.n, "m": r.m,
             "value": None if math.isnan(r.empirical_csk) else r.empirical_csk}
            for r in rows
        ],
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return meta_path
