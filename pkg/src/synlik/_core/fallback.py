"""Pure-numpy implementations of the hot kernels.

Selected at import time when the compiled extension is unavailable (or
forced via SYNLIK_FORCE_FALLBACK=1). Must match `_kernels.pyx`
numerically; the boom-bust path is bit-identical by construction since
both sides run the same inversion recurrences on the same uniforms.
"""

import numpy as np
from scipy.special import erfc

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
# smallest normal double's log: a column whose density would underflow in
# linear space reports -inf
_LOG_UNDERFLOW = -708.3964185322641


def kde_eval(batch, h, obs):
    """Per-column Gaussian-kernel log-pdf and cdf at the observed point.

    Parameters
    ----------
    batch : (n, d) float array of simulated statistics
    h : (d,) positive bandwidths
    obs : (d,) evaluation point

    Returns
    -------
    (logpdf, cdf) : pair of (d,) arrays; logpdf entries may be -inf.
    """
    batch = np.asarray(batch, dtype=float)
    h = np.asarray(h, dtype=float)
    obs = np.asarray(obs, dtype=float)
    n = batch.shape[0]

    z = (obs[None, :] - batch) / h[None, :]
    expo = -0.5 * z * z
    m = expo.max(axis=0)
    with np.errstate(divide="ignore"):
        logpdf = m + np.log(np.exp(expo - m[None, :]).sum(axis=0))
    logpdf -= np.log(n) + np.log(h) + _LOG_SQRT_2PI
    # All-kernels-underflown column: m is the best exponent; if even that
    # underflows exp(), report -inf rather than NaN from log(0).
    logpdf = np.where(np.isfinite(m) & (logpdf > _LOG_UNDERFLOW),
                      logpdf, -np.inf)

    cdf = 0.5 * erfc(-z / np.sqrt(2.0)).mean(axis=0)
    return logpdf, np.clip(cdf, 0.0, 1.0)


def _poisson_inv(lam, u):
    if lam <= 0.0:
        return 0
    p = np.exp(-lam)
    f = p
    k = 0
    kmax = int(lam + 40.0 * np.sqrt(lam) + 100.0)
    while u > f and k < kmax:
        k += 1
        p *= lam / k
        f += p
    return k


def _binomial_inv(n, prob, u):
    if n <= 0 or prob <= 0.0:
        return 0
    if prob >= 1.0:
        return n
    if prob > 0.5:
        # Mirror to keep the pmf start point away from underflow.
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


def boombust_path(uniforms, n0, r, kappa, alpha, beta):
    """Advance the boom-bust population from n0 using pre-drawn uniforms.

    `uniforms` has shape (steps, 2): column 0 drives the growth/decline
    draw, column 1 the immigration noise. Returns an int64 array of the
    `steps` successive populations.
    """
    uniforms = np.asarray(uniforms, dtype=float)
    steps = uniforms.shape[0]
    out = np.empty(steps, dtype=np.int64)
    n = int(n0)
    for t in range(steps):
        if n <= kappa:
            n_next = _poisson_inv(n * (1.0 + r), uniforms[t, 0])
        else:
            n_next = _binomial_inv(n, alpha, uniforms[t, 0])
        n = n_next + _poisson_inv(beta, uniforms[t, 1])
        out[t] = n
    return out
