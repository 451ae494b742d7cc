"""Sources, channels, noise, and the stacked observation model.

The link stacks the locally known self-interference (SI) symbols on top of
the received samples, so one frame of data is the 2n x N matrix

    [ S_si ]       [ I      0     ] [ S_si  ]   [ 0 ]
    [  R   ]   =   [ H_si   H_soi ] [ S_soi ] + [ N ]

with R = H_si S_si + H_soi S_soi + N the physical receive block. Only the
receive block carries noise; the top block is the transmitted SI frame
bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# role tags for SignalFrame
ROLE_SI = "si"
ROLE_SOI = "soi"

# role tags for ChannelMatrix
CH_SI_DIRECT = "si-direct"
CH_SI_REFLECTED = "si-reflected"
CH_SI_TOTAL = "si-total"
CH_SOI_TOTAL = "soi-total"

_SIGNAL_ROLES = (ROLE_SI, ROLE_SOI)
_CHANNEL_ROLES = (CH_SI_DIRECT, CH_SI_REFLECTED, CH_SI_TOTAL, CH_SOI_TOTAL)


@dataclass(frozen=True)
class SignalFrame:
    """An antennas x frame_size matrix of BPSK symbols, each exactly +-1."""

    symbols: np.ndarray
    role: str

    def __post_init__(self):
        if self.role not in _SIGNAL_ROLES:
            raise ConfigError(f"unknown signal role '{self.role}'")
        if self.symbols.ndim != 2:
            raise ConfigError("SignalFrame.symbols must be a 2-d matrix")
        if not np.all(np.abs(self.symbols) == 1.0):
            raise ConfigError("SignalFrame entries must be exactly +-1")

    @property
    def antennas(self) -> int:
        return self.symbols.shape[0]

    @property
    def frame_size(self) -> int:
        return self.symbols.shape[1]


@dataclass(frozen=True)
class ChannelMatrix:
    """An m x n real channel matrix with a role tag identifying which link it models."""

    coefficients: np.ndarray
    role: str

    def __post_init__(self):
        if self.role not in _CHANNEL_ROLES:
            raise ConfigError(f"unknown channel role '{self.role}'")
        if self.coefficients.ndim != 2:
            raise ConfigError("ChannelMatrix.coefficients must be a 2-d matrix")
        if not np.all(np.isfinite(self.coefficients)):
            raise ConfigError("ChannelMatrix entries must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.coefficients.shape


@dataclass(frozen=True)
class StackedObservation:
    """The 2n x N stacked frame: known SI symbols over received samples.

    ``noise_sigma`` is the standard deviation (linear units) of the white
    Gaussian noise added to the receive block.
    """

    data: np.ndarray
    noise_sigma: float

    @property
    def si_block(self) -> np.ndarray:
        return self.data[: self.data.shape[0] // 2]

    @property
    def received_block(self) -> np.ndarray:
        return self.data[self.data.shape[0] // 2:]


def gen_bpsk_frame(antennas: int, frame_size: int, rng: np.random.Generator,
                   role: str = ROLE_SOI) -> SignalFrame:
    """Draw an antennas x frame_size matrix of independent equiprobable +-1 symbols.

    Deterministic given the state of ``rng``: one ``integers`` draw.
    """
    bits = rng.integers(0, 2, size=(antennas, frame_size))
    return SignalFrame(symbols=bits.astype(np.float64) * 2.0 - 1.0, role=role)


def gen_rayleigh_channel(m: int, n: int, rng: np.random.Generator,
                         role: str = CH_SOI_TOTAL) -> ChannelMatrix:
    """Rich-scattering channel: i.i.d. zero-mean unit-variance Gaussian entries.

    This is the real-valued analogue of Rayleigh-envelope fading, matching
    the real BPSK signal model used throughout.
    """
    return ChannelMatrix(coefficients=rng.standard_normal((m, n)), role=role)


def gen_rician_channel(m: int, n: int, k_factor_db: float,
                       rng: np.random.Generator) -> ChannelMatrix:
    """Line-of-sight plus scatter channel with unit per-entry power.

    Each entry is ``nu + sigma_r * g`` with ``g`` standard Gaussian, where
    the K-factor fixes the power split: ``nu^2 / sigma_r^2 = K`` (K linear,
    from ``k_factor_db``) and ``nu^2 + sigma_r^2 = 1``.
    """
    k_lin = 10.0 ** (k_factor_db / 10.0)
    nu = np.sqrt(k_lin / (k_lin + 1.0))
    sigma_r = np.sqrt(1.0 / (k_lin + 1.0))
    coeff = nu + sigma_r * rng.standard_normal((m, n))
    return ChannelMatrix(coefficients=coeff, role=CH_SI_REFLECTED)


def mix(h_si: ChannelMatrix, h_soi: ChannelMatrix, s_si: SignalFrame,
        s_soi: SignalFrame, noise_sigma: float, rng: np.random.Generator) -> StackedObservation:
    """Form the stacked observation R = h_si s_si + h_soi s_soi + noise.

    The returned matrix holds ``s_si`` bit-exactly as its top block; noise
    enters the receive block only. The noise matrix is drawn from ``rng``
    even when ``noise_sigma`` is zero, so the stream advances identically
    for noisy and noiseless runs.
    """
    if noise_sigma < 0:
        raise ConfigError(f"noise_sigma must be >= 0, got {noise_sigma}")
    m, n = h_si.shape
    if h_soi.shape != (m, n):
        raise ConfigError(f"channel shapes differ: h_si {h_si.shape}, h_soi {h_soi.shape}")
    if s_si.antennas != n or s_soi.antennas != n:
        raise ConfigError("signal antenna counts do not match the channels")
    if s_si.frame_size != s_soi.frame_size:
        raise ConfigError("SI and SOI frames must have equal frame size")

    frame_size = s_si.frame_size
    noise = noise_sigma * rng.standard_normal((m, frame_size))
    received = h_si.coefficients @ s_si.symbols + h_soi.coefficients @ s_soi.symbols + noise
    return StackedObservation(data=np.vstack([s_si.symbols, received]),
                              noise_sigma=float(noise_sigma))


def snr_to_sigma_sq(snr_db: float) -> float:
    """Map an SNR in dB to the noise variance, assuming unit signal power.

    20 dB -> 0.01, 15 dB -> 0.0316..., 10 dB -> 0.1.
    """
    return 10.0 ** (-snr_db / 10.0)
