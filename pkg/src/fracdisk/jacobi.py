"""Jacobi polynomials P_n^{(a,b)} on [-1, 1].

Evaluation runs the three-term recurrence in the degree. The alternating
explicit sum is kept as :func:`jacobi_explicit` for cross-checking at small
degree; it loses digits to cancellation once n grows past ~15.
"""

import math

import numpy as np
from scipy.special import gammaln, poch

__all__ = [
    "eval_jacobi",
    "jacobi_table",
    "jacobi_explicit",
    "jacobi_norm",
    "diff_jacobi",
    "gamma_ratio",
]


def _as_points(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("Jacobi evaluation point must be finite")
    return t


def jacobi_table(nmax, a, b, t):
    """Evaluate P_0, ..., P_nmax at the points ``t``.

    Returns:
        array of shape ``(nmax + 1,) + np.shape(t)``.
    """
    if nmax < 0:
        raise ValueError("degree must be nonnegative")
    t = _as_points(t)
    out = np.empty((nmax + 1,) + t.shape)
    out[0] = 1.0
    if nmax == 0:
        return out
    out[1] = 0.5 * ((a - b) + (a + b + 2.0) * t)
    apb = a + b
    for k in range(2, nmax + 1):
        c = 2.0 * k + apb
        if abs(k + apb) < 0.1 or abs(c - 2.0) < 0.1:
            # near-zero leading coefficient (only possible for a + b < -1): the
            # recurrence would divide by it, so take this degree from the sum
            out[k] = jacobi_explicit(k, a, b, t)
            continue
        a1 = 2.0 * k * (k + apb) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        out[k] = ((a2 + a3 * t) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def eval_jacobi(n, a, b, t):
    """Return P_n^{(a,b)}(t). ``t`` may be a scalar or an array."""
    t = _as_points(t)
    val = jacobi_table(n, a, b, t)[n]
    return float(val) if val.ndim == 0 else val


def jacobi_explicit(n, a, b, t):
    """P_n^{(a,b)}(t) from the finite sum in powers of (1 + t).

    Gamma quotients are written as Pochhammer symbols so that parameters
    below -1 do not hit poles.
    """
    t = _as_points(t)
    total = np.zeros_like(t)
    for j in range(n + 1):
        coef = ((-1) ** j * 2.0 ** (-j) * math.comb(n, j)
                * poch(n + 1 + a + b, j) * poch(j + 1 + b, n - j))
        total = total + coef * (1.0 + t) ** j
    val = (-1) ** n * total / math.factorial(n)
    return float(val) if val.ndim == 0 else val


def gamma_ratio(num, den):
    """prod Gamma(num_i) / prod Gamma(den_j) for positive arguments, via log-gamma."""
    return math.exp(sum(gammaln(x) for x in num) - sum(gammaln(x) for x in den))


def jacobi_norm(n, a, b):
    """Weighted L2 norm of P_n^{(a,b)} under (1 - t)^a (1 + t)^b on [-1, 1]."""
    if a <= -1 or b <= -1:
        raise ValueError(f"Jacobi norm needs a, b > -1 (got a={a}, b={b})")
    if n == 0:
        log_sq = ((a + b + 1) * math.log(2.0) + gammaln(a + 1) + gammaln(b + 1)
                  - gammaln(a + b + 2))
    else:
        log_sq = ((a + b + 1) * math.log(2.0) - math.log(2 * n + a + b + 1)
                  + gammaln(n + a + 1) + gammaln(n + b + 1)
                  - gammaln(n + 1) - gammaln(n + a + b + 1))
    return math.exp(0.5 * log_sq)


def diff_jacobi(k, j, a, b, t):
    """j-th derivative of P_k^{(a,b)} at ``t``; zero once j exceeds k."""
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    t = _as_points(t)
    if j > k:
        val = np.zeros_like(t)
    else:
        scale = poch(a + b + k + 1, j) / 2.0 ** j
        val = scale * jacobi_table(k - j, a + j, b + j, t)[k - j]
    return float(val) if val.ndim == 0 else val
