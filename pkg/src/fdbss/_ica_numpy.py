"""Pure-NumPy fixed-point kernel; fallback when the compiled core is absent.

Semantics match ``_ica_core`` exactly: same update, same orthogonalization,
same stopping rule. Floating-point results may differ in the last bits
because BLAS accumulates sums in a different order than the C loops.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _sym_orth(w: np.ndarray) -> np.ndarray:
    # W <- (W W^T)^(-1/2) W via the eigendecomposition of the Gram matrix
    s, u = np.linalg.eigh(w @ w.T)
    return (u * (1.0 / np.sqrt(s))) @ u.T @ w


def kurtosis_sweeps(z: np.ndarray, w_init: np.ndarray, epsilon: float,
                    max_iters: int):
    """Symmetric fixed-point sweeps with the kurtosis contrast.

    Parameters
    ----------
    z : (q, N) whitened data
    w_init : (q, q) initial demixing matrix, rows orthonormal
    epsilon : convergence tolerance on max_row(1 - |<w_new, w_old>|)
    max_iters : sweep cap

    Returns
    -------
    (w, iterations, converged, deltas) where ``deltas`` holds the per-sweep
    convergence measure, one entry per executed sweep.
    """
    n_samples = z.shape[1]
    w = np.array(w_init, dtype=np.float64, copy=True)
    deltas = np.empty(max_iters)
    iterations = 0
    converged = False
    for it in range(max_iters):
        proj = w @ z
        w_new = _sym_orth((proj ** 3) @ z.T / n_samples - 3.0 * w)
        delta = float(np.max(1.0 - np.abs(np.einsum("ij,ij->i", w_new, w))))
        deltas[it] = delta
        w = w_new
        iterations = it + 1
        if delta < epsilon:
            converged = True
            break
    return w, iterations, converged, deltas[:iterations].copy()
