# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-point kernel for the symmetric kurtosis iteration.

The per-sweep work (projection, cubic nonlinearity, re-estimation,
symmetric orthogonalization) runs as plain C loops: the matrices are tiny
(q = 2n rows), so avoiding per-call array overhead dominates any BLAS
advantage. ``_ica_numpy`` implements the same semantics in NumPy.
"""

import numpy as np

cimport cython
from libc.math cimport fabs, sqrt


cdef void _jacobi_eigh(double[:, ::1] a, double[:, ::1] v, Py_ssize_t q) noexcept:
    # Cyclic Jacobi diagonalization of the symmetric matrix ``a`` (overwritten;
    # eigenvalues end up on its diagonal). ``v`` receives the eigenvectors as
    # columns. Converges quadratically; 50 sweeps is far beyond need for q <= 8.
    cdef Py_ssize_t i, j, p, r, sweep
    cdef double off, scale, apr, app, arr, tau, t, c, s, aip, air, vip, vir

    for i in range(q):
        for j in range(q):
            v[i, j] = 1.0 if i == j else 0.0

    scale = 0.0
    for i in range(q):
        for j in range(q):
            scale += a[i, j] * a[i, j]
    if scale == 0.0:
        return

    for sweep in range(50):
        off = 0.0
        for i in range(q):
            for j in range(i + 1, q):
                off += a[i, j] * a[i, j]
        if off <= 1e-30 * scale:
            break
        for p in range(q - 1):
            for r in range(p + 1, q):
                apr = a[p, r]
                if fabs(apr) == 0.0:
                    continue
                app = a[p, p]
                arr = a[r, r]
                tau = (arr - app) / (2.0 * apr)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(q):
                    aip = a[i, p]
                    air = a[i, r]
                    a[i, p] = c * aip - s * air
                    a[i, r] = s * aip + c * air
                for i in range(q):
                    aip = a[p, i]
                    air = a[r, i]
                    a[p, i] = c * aip - s * air
                    a[r, i] = s * aip + c * air
                for i in range(q):
                    vip = v[i, p]
                    vir = v[i, r]
                    v[i, p] = c * vip - s * vir
                    v[i, r] = s * vip + c * vir


cdef void _sym_orth(double[:, ::1] w, double[:, ::1] gram, double[:, ::1] evec,
                    double[:, ::1] tmp, double* inv_sqrt, Py_ssize_t q) noexcept:
    # w <- (w w^T)^(-1/2) w, all in-place using the provided scratch buffers.
    cdef Py_ssize_t i, j, k
    cdef double acc

    for i in range(q):
        for j in range(q):
            acc = 0.0
            for k in range(q):
                acc += w[i, k] * w[j, k]
            gram[i, j] = acc

    _jacobi_eigh(gram, evec, q)
    for i in range(q):
        inv_sqrt[i] = 1.0 / sqrt(gram[i, i])

    # tmp = diag(inv_sqrt) evec^T w
    for i in range(q):
        for j in range(q):
            acc = 0.0
            for k in range(q):
                acc += evec[k, i] * w[k, j]
            tmp[i, j] = acc * inv_sqrt[i]
    # w = evec tmp
    for i in range(q):
        for j in range(q):
            acc = 0.0
            for k in range(q):
                acc += evec[i, k] * tmp[k, j]
            w[i, j] = acc


BACKEND_NAME = "compiled"


@cython.boundscheck(False)
@cython.wraparound(False)
def kurtosis_sweeps(double[:, ::1] z, double[:, ::1] w_init, double epsilon,
                    int max_iters):
    """Symmetric fixed-point sweeps with the kurtosis contrast.

    Same contract as ``_ica_numpy.kurtosis_sweeps``.
    """
    cdef Py_ssize_t q = z.shape[0]
    cdef Py_ssize_t n_samples = z.shape[1]
    cdef Py_ssize_t i, j, k, it
    cdef double acc, delta, d, inv_n
    cdef bint converged = False
    cdef int iterations = 0

    w_arr = np.array(w_init, dtype=np.float64, copy=True, order="C")
    w1_arr = np.empty((q, q), dtype=np.float64)
    gram_arr = np.empty((q, q), dtype=np.float64)
    evec_arr = np.empty((q, q), dtype=np.float64)
    tmp_arr = np.empty((q, q), dtype=np.float64)
    scale_arr = np.empty(q, dtype=np.float64)
    proj_arr = np.empty(q, dtype=np.float64)
    deltas_arr = np.empty(max_iters if max_iters > 0 else 1, dtype=np.float64)

    cdef double[:, ::1] w = w_arr
    cdef double[:, ::1] w1 = w1_arr
    cdef double[:, ::1] gram = gram_arr
    cdef double[:, ::1] evec = evec_arr
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[::1] scale = scale_arr
    cdef double[::1] proj = proj_arr
    cdef double[::1] deltas = deltas_arr

    if n_samples == 0:
        raise ValueError("empty frame")
    inv_n = 1.0 / n_samples

    for it in range(max_iters):
        # w1 = E[z (w z)^3] in a single pass over samples
        for i in range(q):
            for j in range(q):
                w1[i, j] = 0.0
        for k in range(n_samples):
            for i in range(q):
                acc = 0.0
                for j in range(q):
                    acc += w[i, j] * z[j, k]
                proj[i] = acc * acc * acc
            for i in range(q):
                acc = proj[i]
                for j in range(q):
                    w1[i, j] += acc * z[j, k]
        for i in range(q):
            for j in range(q):
                w1[i, j] = w1[i, j] * inv_n - 3.0 * w[i, j]

        _sym_orth(w1, gram, evec, tmp, &scale[0], q)

        delta = 0.0
        for i in range(q):
            acc = 0.0
            for j in range(q):
                acc += w1[i, j] * w[i, j]
            d = 1.0 - fabs(acc)
            if d > delta:
                delta = d
        deltas[it] = delta

        for i in range(q):
            for j in range(q):
                w[i, j] = w1[i, j]
        iterations = it + 1
        if delta < epsilon:
            converged = True
            break

    return w_arr, iterations, bool(converged), deltas_arr[:iterations].copy()
