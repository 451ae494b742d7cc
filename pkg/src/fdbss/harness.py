"""Seeded Monte Carlo sweeps over frame sizes and SNRs.

Every trial owns an independent RNG substream derived from
(master_seed, frame_size, snr_db, trial_index), so execution order and
worker count cannot perturb results. Aggregation accumulates in (cell,
trial) order, which keeps floating-point sums, and therefore the CSV
output, byte-identical across parallelism settings.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import CONFIG_SCHEMA_VERSION, SystemConfig, config_as_dict
from .errors import DegenerateFrame, SiMatchFailure
from .fastica import separate
from .metrics import TrialRecord, channel_sq_error, sinr, srer
from .resolution import estimate_mixing, extract_channels, match_components, recover_soi
from .signal_model import (CH_SI_DIRECT, CH_SI_TOTAL, ROLE_SI, ROLE_SOI, ChannelMatrix,
                           gen_bpsk_frame, gen_rayleigh_channel, gen_rician_channel,
                           mix, snr_to_sigma_sq)

CSV_HEADER = ("frame_size,snr_db,trials,elmmse_si_r,elmmse_soi,srer_db,"
              "mean_iterations,nonconverged,si_match_failures")


@dataclass(frozen=True)
class SweepCell:
    """Aggregates for one (frame_size, snr_db) cell.

    Means cover only trials that converged and passed the SI match; the
    two failure counters report everything excluded. ``srer_infinite``
    counts exact-recovery trials left out of the dB average.
    """

    frame_size: int
    snr_db: float
    trials: int
    elmmse_si_r: float
    elmmse_soi: float
    srer_db: float
    mean_iterations: float
    nonconverged: int
    si_match_failures: int
    srer_infinite: int


@dataclass(frozen=True)
class SweepResult:
    config: SystemConfig
    cells: tuple[SweepCell, ...]


def trial_seed(master_seed: int, frame_size: int, snr_db: float, trial_index: int) -> int:
    """Derive the self-contained substream seed for one trial.

    The SNR enters as an integer key with milli-dB resolution, offset to
    stay non-negative for any SNR the config accepts.
    """
    snr_key = int(round((snr_db + 1000.0) * 1000.0))
    ss = np.random.SeedSequence((master_seed, frame_size, snr_key, trial_index))
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(config: SystemConfig, frame_size: int, snr_db: float,
              trial_index: int) -> TrialRecord:
    """Execute one end-to-end trial: generate, mix, separate, resolve, score.

    Draw order from the trial substream: direct SI channel, reflected SI
    channel, SOI channel, SI frame, SOI frame, receive noise, separation
    init. Degenerate frames and SI match failures are recorded in the
    flags, never raised.
    """
    n = config.tx_antennas
    m = config.rx_antennas
    seed = trial_seed(config.master_seed, frame_size, snr_db, trial_index)
    rng = np.random.default_rng(seed)

    h_si_c = gen_rayleigh_channel(m, n, rng, role=CH_SI_DIRECT)
    h_si_r = gen_rician_channel(m, n, config.rician_k_factor_db, rng)
    h_soi = gen_rayleigh_channel(m, n, rng)
    h_si = ChannelMatrix(coefficients=h_si_c.coefficients + h_si_r.coefficients,
                         role=CH_SI_TOTAL)
    s_si = gen_bpsk_frame(n, frame_size, rng, role=ROLE_SI)
    s_soi = gen_bpsk_frame(n, frame_size, rng, role=ROLE_SOI)

    noise_sigma = math.sqrt(snr_to_sigma_sq(snr_db))
    observation = mix(h_si, h_soi, s_si, s_soi, noise_sigma, rng)

    sinr_linear = sinr(h_soi.coefficients, s_soi.symbols,
                       h_si.coefficients, s_si.symbols, noise_sigma)

    nan = float("nan")
    iterations = 0
    converged = False
    si_match_ok = False
    elmmse_si_r = elmmse_soi = srer_lin = srer_db = ser = nan

    try:
        whitening, outcome = separate(observation, config.ica_epsilon,
                                      config.ica_max_iters, rng)
        iterations = outcome.iterations
        converged = outcome.converged
        if converged:
            assignment = match_components(outcome.components, s_si, s_soi,
                                          si_match_threshold=config.si_match_threshold)
            si_match_ok = True
            a_hat = estimate_mixing(whitening, outcome, assignment, s_si)
            estimates = extract_channels(a_hat, h_si_c)
            s_soi_hat, decisions = recover_soi(outcome.components, assignment)
            elmmse_si_r = channel_sq_error(h_si_r.coefficients, estimates.h_si_r_hat)
            elmmse_soi = channel_sq_error(h_soi.coefficients, estimates.h_soi_hat)
            srer_lin, srer_db = srer(s_soi.symbols, s_soi_hat)
            ser = float(np.mean(decisions != s_soi.symbols))
    except DegenerateFrame:
        pass
    except SiMatchFailure:
        pass

    return TrialRecord(frame_size=frame_size, snr_db=snr_db, seed=seed,
                       elmmse_si_r_sample=elmmse_si_r, elmmse_soi_sample=elmmse_soi,
                       srer_linear=srer_lin, srer_db=srer_db, sinr_linear=sinr_linear,
                       symbol_error_rate=ser, iterations=iterations,
                       converged=converged, si_match_ok=si_match_ok)


def aggregate_trials(frame_size: int, snr_db: float,
                     records: list[TrialRecord]) -> SweepCell:
    """Fold per-trial records into one cell, in the given order."""
    sum_si = sum_soi = sum_srer = sum_iters = 0.0
    n_ok = 0
    n_srer = 0
    nonconverged = 0
    match_failures = 0
    srer_infinite = 0
    for rec in records:
        if not rec.converged:
            nonconverged += 1
            continue
        if not rec.si_match_ok:
            match_failures += 1
            continue
        n_ok += 1
        sum_si += rec.elmmse_si_r_sample
        sum_soi += rec.elmmse_soi_sample
        sum_iters += rec.iterations
        if math.isinf(rec.srer_db):
            srer_infinite += 1
        else:
            sum_srer += rec.srer_db
            n_srer += 1
    nan = float("nan")
    return SweepCell(
        frame_size=frame_size,
        snr_db=snr_db,
        trials=len(records),
        elmmse_si_r=sum_si / n_ok if n_ok else nan,
        elmmse_soi=sum_soi / n_ok if n_ok else nan,
        srer_db=sum_srer / n_srer if n_srer else nan,
        mean_iterations=sum_iters / n_ok if n_ok else nan,
        nonconverged=nonconverged,
        si_match_failures=match_failures,
        srer_infinite=srer_infinite,
    )


def _trial_task(args) -> TrialRecord:
    config, frame_size, snr_db, trial_index = args
    return run_trial(config, frame_size, snr_db, trial_index)


def run_sweep(config: SystemConfig, *, progress: bool = False) -> SweepResult:
    """Run the full frame_size x snr_db x trials grid and aggregate.

    With ``config.workers > 1`` the trials execute in a process pool;
    results are consumed in submission order, so output is identical to a
    serial run.
    """
    cell_keys = [(fs, snr) for fs in config.frame_sizes for snr in config.snr_db_list]
    tasks = [(config, fs, snr, t) for fs, snr in cell_keys for t in range(config.trials)]

    cells = []

    def consume(record_iter):
        for idx, (frame_size, snr_db) in enumerate(cell_keys):
            records = [next(record_iter) for _ in range(config.trials)]
            cells.append(aggregate_trials(frame_size, snr_db, records))
            if progress:
                print(f"cell {idx + 1}/{len(cell_keys)}: frame_size={frame_size} "
                      f"snr_db={snr_db:g}", file=sys.stderr)

    if config.workers > 1 and tasks:
        chunk = max(1, len(tasks) // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            consume(iter(pool.map(_trial_task, tasks, chunksize=chunk)))
    else:
        consume(map(_trial_task, tasks))

    return SweepResult(config=config, cells=tuple(cells))


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def render_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for c in result.cells:
        lines.append(f"{c.frame_size},{_fmt(c.snr_db)},{c.trials},{_fmt(c.elmmse_si_r)},"
                     f"{_fmt(c.elmmse_soi)},{_fmt(c.srer_db)},{_fmt(c.mean_iterations)},"
                     f"{c.nonconverged},{c.si_match_failures}")
    return "\n".join(lines) + "\n"


def render_manifest(config: SystemConfig) -> str:
    lines = [f"config_schema_version = {CONFIG_SCHEMA_VERSION}"]
    for key, value in config_as_dict(config).items():
        if isinstance(value, list):
            value = ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_results(result: SweepResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write results.csv and manifest.txt into ``out_dir``; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    manifest_path = out / "manifest.txt"
    csv_path.write_text(render_csv(result), encoding="ascii")
    manifest_path.write_text(render_manifest(result.config), encoding="ascii")
    return csv_path, manifest_path
