"""Experiment configuration: schema, TOML loading, and key=value overrides."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

CONFIG_SCHEMA_VERSION = 1

# dB range accepted for SNR values; keeps derived RNG keys well defined.
_SNR_DB_MIN = -100.0
_SNR_DB_MAX = 300.0


@dataclass(frozen=True)
class SystemConfig:
    """All experiment parameters.

    Defaults reproduce the reference simulation setup: a 2x2 link, frame
    sizes 50..500 in steps of 50, SNRs of 10/15/20 dB, 1000 trials per
    cell, and a separation tolerance of 1e-6.
    """

    tx_antennas: int = 2
    rx_antennas: int = 2
    frame_sizes: tuple[int, ...] = (50, 100, 150, 200, 250, 300, 350, 400, 450, 500)
    snr_db_list: tuple[float, ...] = (10.0, 15.0, 20.0)
    trials: int = 1000
    master_seed: int = 1234567
    rician_k_factor_db: float = 10.0
    ica_epsilon: float = 1e-6
    ica_max_iters: int = 1000
    si_match_threshold: float = 0.9
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "frame_sizes", tuple(int(v) for v in self.frame_sizes))
        object.__setattr__(self, "snr_db_list", tuple(float(v) for v in self.snr_db_list))
        self._validate()

    def _validate(self):
        n, m = self.tx_antennas, self.rx_antennas
        if n < 1:
            raise ConfigError(f"tx_antennas must be >= 1, got {n}")
        if m < 1:
            raise ConfigError(f"rx_antennas must be >= 1, got {m}")
        if m != n:
            # The stacked observation model is square only when m = n.
            raise ConfigError(f"rx_antennas must equal tx_antennas, got m={m}, n={n}")
        for fs in self.frame_sizes:
            if fs < 2 * n:
                raise ConfigError(f"frame_sizes entries must be >= 2*tx_antennas={2 * n}, got {fs}")
        for snr in self.snr_db_list:
            if not math.isfinite(snr) or not (_SNR_DB_MIN <= snr <= _SNR_DB_MAX):
                raise ConfigError(f"snr_db_list entries must be finite and within [{_SNR_DB_MIN}, {_SNR_DB_MAX}], got {snr}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be >= 0, got {self.master_seed}")
        if not self.ica_epsilon > 0:
            raise ConfigError(f"ica_epsilon must be > 0, got {self.ica_epsilon}")
        if self.ica_max_iters < 1:
            raise ConfigError(f"ica_max_iters must be >= 1, got {self.ica_max_iters}")
        if not (0.0 < self.si_match_threshold <= 1.0):
            raise ConfigError(f"si_match_threshold must be in (0, 1], got {self.si_match_threshold}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


_FIELDS = {f.name: f for f in dataclasses.fields(SystemConfig)}


def _coerce(name: str, value):
    """Coerce a raw TOML or override value to the field's declared type."""
    field = _FIELDS[name]
    try:
        if field.type in ("int", int):
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if field.type in ("float", float):
            return float(value)
        # list-valued fields (frame_sizes, snr_db_list)
        if isinstance(value, str):
            value = [v for v in value.split(",") if v.strip()]
        return tuple(float(v) if name == "snr_db_list" else int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for config key '{name}': {value!r}") from None


def load_config(path: str | Path) -> SystemConfig:
    """Load a SystemConfig from a TOML file, rejecting unknown keys."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from None
    return config_from_mapping(raw)


def config_from_mapping(raw: dict) -> SystemConfig:
    kwargs = {}
    for key, value in raw.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key '{key}'")
        kwargs[key] = _coerce(key, value)
    return SystemConfig(**kwargs)


def apply_overrides(config: SystemConfig, overrides: list[str]) -> SystemConfig:
    """Apply repeatable ``key=value`` overrides on top of a parsed config."""
    updates = {}
    for item in overrides:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override must have the form key=value, got '{item}'")
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key '{key}'")
        updates[key] = _coerce(key, value.strip())
    if not updates:
        return config
    return dataclasses.replace(config, **updates)


def config_as_dict(config: SystemConfig) -> dict:
    d = dataclasses.asdict(config)
    d["frame_sizes"] = list(config.frame_sizes)
    d["snr_db_list"] = list(config.snr_db_list)
    return d
