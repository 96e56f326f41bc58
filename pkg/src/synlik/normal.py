"""Standard-normal CDF and inverse CDF used throughout the estimators.

The inverse is Acklam's rational approximation polished with one Halley
step against the erfc-based CDF, giving close to full double precision on
(1e-12, 1 - 1e-12). Tail accuracy matters: these maps feed the copula
quadratic form at clamped CDF values.
"""

import numpy as np
from scipy.special import erfc

_SQRT2 = np.sqrt(2.0)
_SQRT_2PI = np.sqrt(2.0 * np.pi)

# Acklam (2003) coefficients.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def std_norm_cdf(x):
    """Phi(x), elementwise, via the complementary error function."""
    x = np.asarray(x, dtype=float)
    return 0.5 * erfc(-x / _SQRT2)


def std_norm_logpdf(x):
    """log phi(x), elementwise."""
    x = np.asarray(x, dtype=float)
    return -0.5 * x * x - np.log(_SQRT_2PI)


def _acklam(p):
    out = np.empty_like(p)

    low = p < _P_LOW
    high = p > 1.0 - _P_LOW
    mid = ~(low | high)

    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        out[mid] = num * q / den

    for mask, pp, sign in ((low, p[low], 1.0), (high, 1.0 - p[high], -1.0)):
        if not np.any(mask):
            continue
        q = np.sqrt(-2.0 * np.log(pp))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        out[mask] = sign * num / den

    return out


def std_norm_ppf(p):
    """Phi^{-1}(p), elementwise.

    Returns -inf/+inf at p = 0/1 exactly; callers that must stay finite
    clamp p beforehand.
    """
    p = np.asarray(p, dtype=float)
    scalar = p.ndim == 0
    p = np.atleast_1d(p).astype(float)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("probabilities must lie in [0, 1]")

    x = np.full_like(p, np.nan)
    zero = p == 0.0
    one = p == 1.0
    inner = ~(zero | one)
    x[zero] = -np.inf
    x[one] = np.inf

    if np.any(inner):
        pi = p[inner]
        # Work on the lower tail, where err = Phi(x) - q avoids the
        # cancellation that Phi(x) - p suffers near p = 1; 1 - p is
        # exact for p >= 0.5.
        flip = pi > 0.5
        q = np.where(flip, 1.0 - pi, pi)
        xi = _acklam(q)
        # One Halley step against the erfc CDF.
        err = std_norm_cdf(xi) - q
        u = err * _SQRT_2PI * np.exp(0.5 * xi * xi)
        xi = xi - u / (1.0 + 0.5 * xi * u)
        x[inner] = np.where(flip, -xi, xi)

    return x[0] if scalar else x
