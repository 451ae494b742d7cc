"""Evaluation metrics for one trial: channel error, SRER, SINR, complexity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrialRecord:
    """Metrics and flags for one end-to-end trial.

    Metric fields are NaN when the trial was flagged (not converged, SI
    match failed, or the frame was degenerate). ``seed`` is the derived
    substream seed that reproduces the trial on its own.
    """

    frame_size: int
    snr_db: float
    seed: int
    elmmse_si_r_sample: float
    elmmse_soi_sample: float
    srer_linear: float
    srer_db: float
    sinr_linear: float
    symbol_error_rate: float
    iterations: int
    converged: bool
    si_match_ok: bool


def channel_sq_error(h_true: np.ndarray, h_est: np.ndarray) -> float:
    """Squared Frobenius norm of the estimation error."""
    h_true = np.asarray(h_true)
    h_est = np.asarray(h_est)
    if h_true.shape != h_est.shape:
        raise ValueError(f"shape mismatch: {h_true.shape} vs {h_est.shape}")
    diff = h_true - h_est
    return float(np.sum(diff * diff))


def srer(s_true: np.ndarray, s_est: np.ndarray) -> tuple[float, float]:
    """Signal-to-residual-error ratio over the frame, linear and in dB.

    Returns (inf, inf) when the residual is exactly zero.
    """
    s_true = np.asarray(s_true)
    s_est = np.asarray(s_est)
    if s_true.shape != s_est.shape:
        raise ValueError(f"shape mismatch: {s_true.shape} vs {s_est.shape}")
    residual = np.sum((s_true - s_est) ** 2)
    if residual == 0.0:
        return float("inf"), float("inf")
    linear = float(np.sum(s_true ** 2) / residual)
    return linear, float(10.0 * np.log10(linear))


def sinr(h_soi: np.ndarray, s_soi: np.ndarray, h_si: np.ndarray,
         s_si: np.ndarray, noise_sigma: float) -> float:
    """SOI power over SI-plus-noise power, empirically over the frame.

    The noise term is the analytic per-sample power m * noise_sigma^2, so
    the ratio does not depend on a particular noise draw.
    """
    n_samples = s_soi.shape[1]
    m = h_soi.shape[0]
    soi_power = np.sum((h_soi @ s_soi) ** 2) / n_samples
    si_power = np.sum((h_si @ s_si) ** 2) / n_samples
    noise_power = m * noise_sigma ** 2
    denom = si_power + noise_power
    if denom == 0.0:
        return float("inf")
    return float(soi_power / denom)


def complexity_estimate(m_sources: int, k_iters: int, frame_size: int) -> int:
    """Nominal operation count of one separation: m^3 + k m^2 N."""
    return m_sources ** 3 + k_iters * m_sources ** 2 * frame_size
