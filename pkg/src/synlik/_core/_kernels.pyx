# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: KDE evaluation and the boom-bust path.

Numerics mirror `fallback.py`; the boom-bust inversion recurrences are
written identically so both backends map the same uniforms to the same
integer path.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport erfc, exp, log, sqrt, INFINITY

cnp.import_array()

cdef double LOG_SQRT_2PI = 0.5 * log(2.0 * np.pi)
cdef double SQRT2 = sqrt(2.0)
# smallest normal double's log; keep equal to fallback._LOG_UNDERFLOW
cdef double LOG_UNDERFLOW = -708.3964185322641


def kde_eval(double[:, ::1] batch, double[::1] h, double[::1] obs):
    """Per-column Gaussian-kernel log-pdf and cdf at the observed point."""
    cdef Py_ssize_t n = batch.shape[0]
    cdef Py_ssize_t d = batch.shape[1]
    cdef cnp.ndarray[double, ndim=1] logpdf = np.empty(d)
    cdef cnp.ndarray[double, ndim=1] cdf = np.empty(d)
    cdef Py_ssize_t i, j
    cdef double z, e, m, s, c, hj, oj

    for j in range(d):
        hj = h[j]
        oj = obs[j]
        m = -INFINITY
        c = 0.0
        for i in range(n):
            z = (oj - batch[i, j]) / hj
            e = -0.5 * z * z
            if e > m:
                m = e
            c += 0.5 * erfc(-z / SQRT2)
        if m == -INFINITY:
            logpdf[j] = -INFINITY
        else:
            s = 0.0
            for i in range(n):
                z = (oj - batch[i, j]) / hj
                s += exp(-0.5 * z * z - m)
            logpdf[j] = m + log(s) - log(<double> n) - log(hj) - LOG_SQRT_2PI
            if logpdf[j] <= LOG_UNDERFLOW:
                logpdf[j] = -INFINITY
        cdf[j] = c / n
        if cdf[j] < 0.0:
            cdf[j] = 0.0
        elif cdf[j] > 1.0:
            cdf[j] = 1.0
    return np.asarray(logpdf), np.asarray(cdf)


cdef long _poisson_inv(double lam, double u) noexcept:
    cdef double p, f
    cdef long k, kmax
    if lam <= 0.0:
        return 0
    p = exp(-lam)
    f = p
    k = 0
    kmax = <long> (lam + 40.0 * sqrt(lam) + 100.0)
    while u > f and k < kmax:
        k += 1
        p *= lam / k
        f += p
    return k


cdef long _binomial_inv(long n, double prob, double u) noexcept:
    cdef double q, p, f, ratio
    cdef long k
    if n <= 0 or prob <= 0.0:
        return 0
    if prob >= 1.0:
        return n
    if prob > 0.5:
        return n - _binomial_inv(n, 1.0 - prob, 1.0 - u)
    q = 1.0 - prob
    p = q ** n
    f = p
    k = 0
    ratio = prob / q
    while u > f and k < n:
        k += 1
        p *= ratio * (n - k + 1) / k
        f += p
    return k


def boombust_path(double[:, ::1] uniforms, long n0, double r, double kappa,
                  double alpha, double beta):
    """Advance the boom-bust population from n0 using pre-drawn uniforms."""
    cdef Py_ssize_t steps = uniforms.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(steps, dtype=np.int64)
    cdef Py_ssize_t t
    cdef long n = n0, n_next

    for t in range(steps):
        if n <= kappa:
            n_next = _poisson_inv(n * (1.0 + r), uniforms[t, 0])
        else:
            n_next = _binomial_inv(n, alpha, uniforms[t, 0])
        n = n_next + _poisson_inv(beta, uniforms[t, 1])
        out[t] = n
    return out
