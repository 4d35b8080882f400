"""Named experiment presets and the key-value config file format.

A config file holds one ``key = value`` pair per line, mirroring the
fields of :class:`~riskey.harness.ExperimentConfig`.  Lists are comma
separated and ``#`` starts a comment::

    snr_grid_db = 0, 6, 12, 18
    rho_values = 0.3
    n_units = 80
    turn_on_ratio = 0.8
    modes = Ours, Random, NoRis
    trials = 20000
    master_seed = 7
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .harness import DEFAULT_RHO, ExperimentConfig, Mode


@dataclass(frozen=True)
class Preset:
    kind: str  # "capacity" or "keys"
    configs: tuple
    notes: tuple = ()


def _rho_grid(step):
    return [round(float(r), 10) for r in np.arange(0.0, 1.0 + step / 2, step)]


_UNSTATED_RHO = f"rho not stated for this figure; default rho={DEFAULT_RHO}"

PRESETS = {
    "fig5a": Preset(
        "capacity",
        (ExperimentConfig(snr_grid_db=[18.0], rho_values=_rho_grid(0.05), modes=[Mode.OURS]),),
        ("capacity versus correlation at 18 dB",),
    ),
    "fig5b": Preset("capacity", (ExperimentConfig(),), (_UNSTATED_RHO,)),
    "fig5c": Preset(
        "capacity",
        (ExperimentConfig(rho_values=[0.1, 0.5, 0.9]),),
        ("three correlation factors; values not stated, 0.1/0.5/0.9 chosen",),
    ),
    "fig5d": Preset(
        "capacity",
        tuple(
            ExperimentConfig(n_units=80, turn_on_ratio=r, modes=[Mode.OURS, Mode.RANDOM])
            for r in (0.4, 0.6, 0.8)
        ),
        (_UNSTATED_RHO, "turn-on ratio r in {0.4, 0.6, 0.8} at N=80"),
    ),
    "fig5e": Preset(
        "capacity",
        tuple(ExperimentConfig(n_units=n, turn_on_ratio=0.8, modes=[Mode.OURS, Mode.RANDOM]) for n in (60, 80, 100)),
        (_UNSTATED_RHO, "N in {60, 80, 100} at r=0.8"),
    ),
    "fig5f": Preset("keys", (ExperimentConfig(),), (_UNSTATED_RHO, "unmatched key rate per mode")),
}


_LIST_FIELDS = {"snr_grid_db", "rho_values", "modes"}
_INT_FIELDS = {"trials", "n_units", "master_seed", "workers"}
_FLOAT_FIELDS = {"turn_on_ratio"}
_BOOL_FIELDS = {"noiseless"}
_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def _convert(key, text):
    if key in _LIST_FIELDS:
        items = [item.strip() for item in text.split(",") if item.strip()]
        return items if key == "modes" else [float(item) for item in items]
    if key in _INT_FIELDS:
        return int(text)
    if key in _FLOAT_FIELDS:
        return float(text)
    if key in _BOOL_FIELDS:
        if text.lower() not in {"true", "false", "1", "0", "yes", "no"}:
            raise InvalidParameterError(f"{key}: expected a boolean, got {text!r}")
        return text.lower() in {"true", "1", "yes"}
    return text


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into ExperimentConfig keyword arguments."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise InvalidParameterError(f"line {lineno}: expected 'key = value'")
        if key not in _FIELD_NAMES:
            raise InvalidParameterError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, value)
        except ValueError as exc:
            raise InvalidParameterError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return values


def load_config(path) -> ExperimentConfig:
    return ExperimentConfig(**parse_config_text(Path(path).read_text()))


def format_config(cfg: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config_text` for a full config."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, list):
            text = ", ".join(getattr(v, "value", None) or f"{v:g}" for v in value)
        else:
            text = str(getattr(value, "value", value))
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def preset_configs(name, **overrides):
    """Preset configs with field overrides applied to each of them."""
    if name not in PRESETS:
        raise InvalidParameterError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    preset = PRESETS[name]
    return preset, [replace(cfg, **overrides) for cfg in preset.configs]
