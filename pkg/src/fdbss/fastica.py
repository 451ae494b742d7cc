"""Separation pipeline: centering, whitening, and the kurtosis fixed point.

The fixed-point sweeps run in a compiled extension when it is available;
``FDBSS_KERNEL`` forces a backend (``compiled``, ``python``, or ``auto``).
Whitening and all orchestration stay in NumPy regardless of backend, so a
``WhiteningResult`` is backend independent.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrame
from .signal_model import StackedObservation
from . import _ica_numpy

# Relative eigenvalue floor below which the sample covariance is treated as
# rank deficient.
RANK_TOLERANCE = 1e-10


def _load_kernel():
    choice = os.environ.get("FDBSS_KERNEL", "auto").lower()
    if choice == "python":
        return _ica_numpy
    if choice == "compiled":
        from . import _ica_core
        return _ica_core
    if choice != "auto":
        raise ValueError(f"FDBSS_KERNEL must be 'auto', 'compiled', or 'python', got '{choice}'")
    try:
        from . import _ica_core
        return _ica_core
    except ImportError:
        return _ica_numpy


_KERNEL = _load_kernel()


def active_kernel() -> str:
    """Name of the sweep kernel in use: 'compiled' or 'python'."""
    return _KERNEL.BACKEND_NAME


@dataclass(frozen=True)
class WhiteningResult:
    """Output of the decorrelation step.

    ``whitened`` is V (X - mean); its sample covariance is the identity.
    ``dewhitening`` is the pseudoinverse map back to observation space.
    """

    whitened: np.ndarray
    whitening_matrix: np.ndarray
    dewhitening_matrix: np.ndarray
    mean_vector: np.ndarray


@dataclass(frozen=True)
class IcaOutcome:
    """Result of the fixed-point iteration.

    ``demixing`` has orthonormal rows (component extractors in whitened
    space) and ``components`` equals ``demixing @ whitened``. ``sweep_deltas``
    records the convergence measure max_row(1 - |<w_new, w_old>|) for every
    executed sweep; the final entry is below the tolerance iff ``converged``.
    """

    demixing: np.ndarray
    components: np.ndarray
    iterations: int
    converged: bool
    sweep_deltas: np.ndarray


def center(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Remove row means. Returns the centered matrix and the removed means."""
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("center expects a 2-d matrix with at least 2 columns")
    mean = x.mean(axis=1)
    return x - mean[:, None], mean


def whiten(xc: np.ndarray, mean_vector: np.ndarray | None = None) -> WhiteningResult:
    """Whiten centered data via eigendecomposition of the sample covariance.

    ``mean_vector`` only rides along in the result (it is the mean removed
    by ``center``); pass it so downstream reconstruction has the full map.
    Raises DegenerateFrame when the covariance is rank deficient relative
    to RANK_TOLERANCE, which happens for frames shorter than the number of
    rows or for degenerate channel draws.
    """
    n_samples = xc.shape[1]
    cov = xc @ xc.T / n_samples
    eigval, eigvec = np.linalg.eigh(cov)
    order = np.argsort(eigval)[::-1]
    eigval = eigval[order]
    eigvec = eigvec[:, order]
    if eigval[0] <= 0.0 or eigval[-1] <= RANK_TOLERANCE * eigval[0]:
        raise DegenerateFrame(
            f"sample covariance is rank deficient (eigenvalues {eigval[-1]:.3e} .. {eigval[0]:.3e})")

    # Fix each eigenvector's sign so whitening does not depend on the
    # eigensolver's arbitrary sign choice.
    flip = np.sign(eigvec[np.argmax(np.abs(eigvec), axis=0), np.arange(eigvec.shape[1])])
    eigvec = eigvec * flip

    scale = np.sqrt(eigval)
    whitening = eigvec.T / scale[:, None]
    dewhitening = eigvec * scale
    if mean_vector is None:
        mean_vector = np.zeros(xc.shape[0])
    return WhiteningResult(whitened=whitening @ xc,
                           whitening_matrix=whitening,
                           dewhitening_matrix=dewhitening,
                           mean_vector=np.asarray(mean_vector))


def fastica_kurtosis(z: np.ndarray, epsilon: float, max_iters: int,
                     rng: np.random.Generator) -> IcaOutcome:
    """Run symmetric fixed-point sweeps on whitened data.

    Every sweep updates all rows with the kurtosis contrast,
    w <- E[z (w^T z)^3] - 3w, then re-orthogonalizes the demixing matrix
    symmetrically. Convergence requires every row direction to move by
    less than ``epsilon`` (in 1 - |cosine| terms) in one sweep. Hitting
    ``max_iters`` is reported through ``converged=False``, not an error.

    The initial demixing matrix is a random Gaussian draw from ``rng``,
    symmetrically orthogonalized, so results are reproducible per stream.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    q = z.shape[0]
    w_init = _ica_numpy._sym_orth(rng.standard_normal((q, q)))
    z = np.ascontiguousarray(z, dtype=np.float64)
    w, iterations, converged, deltas = _KERNEL.kurtosis_sweeps(
        np.asarray(z), np.ascontiguousarray(w_init), float(epsilon), int(max_iters))
    w = np.asarray(w)
    return IcaOutcome(demixing=w, components=w @ z, iterations=iterations,
                      converged=converged, sweep_deltas=np.asarray(deltas))


def separate(observation: StackedObservation | np.ndarray, epsilon: float,
             max_iters: int, rng: np.random.Generator) -> tuple[WhiteningResult, IcaOutcome]:
    """Full pipeline: center, whiten, then fixed-point separation."""
    x = observation.data if isinstance(observation, StackedObservation) else observation
    xc, mean = center(x)
    whitening = whiten(xc, mean_vector=mean)
    outcome = fastica_kurtosis(whitening.whitened, epsilon, max_iters, rng)
    return whitening, outcome
