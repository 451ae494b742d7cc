"""Command-line front end: run sweeps, single trials, and plot-data export.

Exit codes: 0 success, 2 usage/config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path

from .config import CONFIG_SCHEMA_VERSION, SystemConfig, apply_overrides, load_config
from .errors import ConfigError
from .harness import CSV_HEADER, run_sweep, run_trial, write_results

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

_EPILOG = (f"config schema version {CONFIG_SCHEMA_VERSION}; keys: "
           + ", ".join(f.name for f in dataclasses.fields(SystemConfig)))

# panel name -> (CSV column, axis label)
_PANELS = {
    "elmmse_si_r": ("elmmse_si_r", "mean squared error of the reflected SI channel estimate"),
    "elmmse_soi": ("elmmse_soi", "mean squared error of the SOI channel estimate"),
    "srer_db": ("srer_db", "signal-to-residual-error ratio in dB"),
    "iterations": ("mean_iterations", "mean separation sweeps to convergence"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fdbss", epilog=_EPILOG,
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", epilog=_EPILOG,
                           help="run the Monte Carlo grid and write CSV + manifest")
    sweep.add_argument("--config", metavar="TOML", help="config file (defaults used when omitted)")
    sweep.add_argument("--out", metavar="DIR", default="results", help="output directory")
    sweep.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key (repeatable)")
    sweep.add_argument("--seed", type=int, help="override master_seed")

    trial = sub.add_parser("trial", epilog=_EPILOG, help="run one trial and print its record")
    trial.add_argument("--frame-size", type=int, required=True)
    trial.add_argument("--snr-db", type=float, required=True)
    trial.add_argument("--seed", type=int, required=True, help="master seed for the trial")
    trial.add_argument("--config", metavar="TOML")
    trial.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE")

    plot = sub.add_parser("plot", epilog=_EPILOG,
                          help="turn a sweep CSV into per-panel plot-data files")
    plot.add_argument("--input", metavar="CSV", required=True, help="CSV written by 'sweep'")
    plot.add_argument("--out", metavar="DIR", default="plots", help="output directory")
    return parser


def _load(args) -> SystemConfig:
    config = load_config(args.config) if args.config else SystemConfig()
    config = apply_overrides(config, args.overrides)
    if getattr(args, "seed", None) is not None and args.command == "sweep":
        config = apply_overrides(config, [f"master_seed={args.seed}"])
    return config


def _cmd_sweep(args) -> int:
    try:
        config = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = run_sweep(config, progress=True)
    try:
        csv_path, manifest_path = write_results(result, args.out)
    except OSError as exc:
        print(f"error: cannot write results to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {csv_path} and {manifest_path}")
    return EXIT_OK


def _cmd_trial(args) -> int:
    if args.frame_size < 1:
        print(f"error: --frame-size must be >= 1, got {args.frame_size}", file=sys.stderr)
        return EXIT_USAGE
    if not math.isfinite(args.snr_db):
        print(f"error: --snr-db must be finite, got {args.snr_db}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _load(args)
        config = apply_overrides(config, [f"master_seed={args.seed}"])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    record = run_trial(config, args.frame_size, args.snr_db, trial_index=0)
    for field in dataclasses.fields(record):
        print(f"{field.name:>20}: {getattr(record, field.name)}")
    return EXIT_OK


def _parse_sweep_csv(path: Path) -> list[dict]:
    """Parse a sweep CSV; raises ConfigError naming the offending line."""
    if not path.is_file():
        raise ConfigError(f"input CSV not found: {path}")
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"{path} line 1: expected header '{CSV_HEADER}'")
    columns = CSV_HEADER.split(",")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise ConfigError(f"{path} line {lineno}: expected {len(columns)} fields, got {len(parts)}")
        row = {}
        for name, part in zip(columns, parts):
            try:
                row[name] = float(part)
            except ValueError:
                raise ConfigError(f"{path} line {lineno}: non-numeric value '{part}' "
                                  f"in column {name}") from None
        rows.append(row)
    return rows


def _cmd_plot(args) -> int:
    try:
        rows = _parse_sweep_csv(Path(args.input))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    snr_order = []
    for row in rows:
        if row["snr_db"] not in snr_order:
            snr_order.append(row["snr_db"])

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for panel, (column, label) in _PANELS.items():
            lines = [f"# {panel}: {label}", "# format: frame_size value; blank line between SNR series"]
            for snr in snr_order:
                lines.append(f"# series snr_db={snr:g}")
                for row in rows:
                    if row["snr_db"] == snr:
                        lines.append(f"{row['frame_size']:g} {row[column]:.6g}")
                lines.append("")
            (out / f"{panel}.dat").write_text("\n".join(lines).rstrip("\n") + "\n",
                                              encoding="ascii")
    except OSError as exc:
        print(f"error: cannot write plot data to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(_PANELS)} panel files to {out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        return _cmd_sweep(args)
    if args.command == "trial":
        return _cmd_trial(args)
    return _cmd_plot(args)


if __name__ == "__main__":
    sys.exit(main())
