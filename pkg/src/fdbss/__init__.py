"""Blind-source-separation simulator for in-band full-duplex MIMO links.

The package synthesizes a stacked observation model in which a node's
known self-interference rides on top of the received samples, separates
the streams with a kurtosis-driven fixed-point iteration, resolves the
usual separation ambiguities against the known frame, and scores channel
sensing and signal recovery over seeded Monte Carlo sweeps.
"""

from .config import CONFIG_SCHEMA_VERSION, SystemConfig, apply_overrides, load_config
from .errors import ConfigError, DegenerateFrame, FdbssError, SiMatchFailure
from .fastica import (IcaOutcome, WhiteningResult, active_kernel, center,
                      fastica_kurtosis, separate, whiten)
from .harness import (SweepCell, SweepResult, aggregate_trials, run_sweep,
                      run_trial, trial_seed, write_results)
from .metrics import (TrialRecord, channel_sq_error, complexity_estimate,
                      sinr, srer)
from .resolution import (ChannelEstimates, ComponentAssignment, estimate_mixing,
                         extract_channels, ls_baseline, match_components,
                         recover_soi)
from .signal_model import (ChannelMatrix, SignalFrame, StackedObservation,
                           gen_bpsk_frame, gen_rayleigh_channel,
                           gen_rician_channel, mix, snr_to_sigma_sq)

__version__ = "0.1.0"

__all__ = [
    "CONFIG_SCHEMA_VERSION", "SystemConfig", "apply_overrides", "load_config",
    "ConfigError", "DegenerateFrame", "FdbssError", "SiMatchFailure",
    "IcaOutcome", "WhiteningResult", "active_kernel", "center",
    "fastica_kurtosis", "separate", "whiten",
    "SweepCell", "SweepResult", "aggregate_trials", "run_sweep", "run_trial",
    "trial_seed", "write_results",
    "TrialRecord", "channel_sq_error", "complexity_estimate", "sinr", "srer",
    "ChannelEstimates", "ComponentAssignment", "estimate_mixing",
    "extract_channels", "ls_baseline", "match_components", "recover_soi",
    "ChannelMatrix", "SignalFrame", "StackedObservation", "gen_bpsk_frame",
    "gen_rayleigh_channel", "gen_rician_channel", "mix", "snr_to_sigma_sq",
    "__version__",
]
