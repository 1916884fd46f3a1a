"""Closed-form operator actions on the weighted disk basis.

Every operator here acts on coefficient fields through sparse scatter
stencils.  Families are tracked by the Jacobi exponent ``beta`` of the field:
the solution lives in beta = alpha/2 (times the weight (1 - r^2)^(alpha/2)),
gradients of weighted functions and their Riesz potentials live in
beta = alpha/2 - 1, and the forward operator lands back in beta = alpha/2.

Sign bookkeeping for y-derivatives: d/dy maps cos-type harmonics (mu = +1)
to sin-type (mu = -1) and back.  The factor on the degree-raising term is
``mu`` and on the degree-lowering term ``-mu``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.special import gammaln

from .basis import BasisIndex, CoefficientField

__all__ = [
    "OperatorParams",
    "GradientPair",
    "frac_laplacian_eigenvalue",
    "riesz_action",
    "riesz_action_field",
    "weighted_grad_stencil",
    "grad_weighted",
    "grad_unweighted",
    "riesz_grad_stencil",
    "riesz_grad",
    "divergence",
    "apply_forward",
    "apply_forward_transcribed",
]


@dataclass(frozen=True)
class OperatorParams:
    alpha: float
    k1: float = 1.0
    k2: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.k1 <= 0.0 or self.k2 <= 0.0:
            raise ValueError(f"k1, k2 must be positive, got {self.k1}, {self.k2}")


class GradientPair(NamedTuple):
    dx: CoefficientField
    dy: CoefficientField


def _lg(*args):
    return sum(gammaln(a) for a in args)


def frac_laplacian_eigenvalue(l, n, alpha):
    """Eigenvalue of (-Delta)^(alpha/2) on (1-r^2)^(alpha/2) V_{l,mu} P_n^{(alpha/2,l)}."""
    a = alpha / 2.0
    return 2.0 ** alpha * math.exp(_lg(n + 1 + a, n + 1 + a + l) - _lg(n + 1, n + 1 + l))


def riesz_action(l, n, s, alpha):
    """Riesz potential (-Delta)^((alpha-2)/2) of (1-|x|^2)_+^(alpha/2-s) V_{l,mu} P_n^{(alpha/2-s,l)}.

    The image is ``coefficient * V_{l,mu} P_{out_n}^{(out_a, l)}`` on the disk.

    Returns:
        (coefficient, out_n, out_a)
    """
    a = alpha / 2.0
    if a - s <= -1:
        raise ValueError(f"need alpha/2 - s > -1 (alpha={alpha}, s={s})")
    if n + 1 - s < 0:
        raise ValueError(f"output degree n + 1 - s is negative (n={n}, s={s})")
    delta = 2 + 2 * l
    log_mag = _lg(n + 1 - s + a, n - 1 + (delta + alpha) / 2.0) - _lg(n + 1, n + 1 - s + delta / 2.0)
    coeff = (-1.0) ** (1 - s) * 2.0 ** (alpha - 2.0) * math.exp(log_mag)
    return coeff, n + 1 - s, a - 2.0 + s


def riesz_action_field(c, alpha, s=1):
    """Apply :func:`riesz_action` termwise to a field in the alpha/2 - s family."""
    a = alpha / 2.0
    if abs(c.beta - (a - s)) > 1e-14:
        raise ValueError(f"field family beta={c.beta} does not match alpha/2 - s = {a - s}")
    out = {}
    for idx, value in c.raw_items():
        coeff, out_n, out_a = riesz_action(idx.l, idx.n, s, alpha)
        key = BasisIndex(idx.l, out_n, idx.mu)
        out[key] = out.get(key, 0.0) + coeff * value
    return CoefficientField(out, a - 2.0 + s, "raw")


def _emit(terms, l, n, mu, factor):
    # V_{0,-1} vanishes identically, so that target is simply dropped
    if l == 0 and mu == -1:
        return
    terms.append((BasisIndex(l, n, mu), factor))


def weighted_grad_stencil(l, n, mu, alpha):
    """Gradient of (1-r^2)^(alpha/2) V_{l,mu} P_n^{(alpha/2,l)}(2r^2-1).

    Returns:
        (x_terms, y_terms), each a list of (BasisIndex, factor) in the
        (1-r^2)^(alpha/2-1) V P^{(alpha/2-1, l')} family.
    """
    a = alpha / 2.0
    xs, ys = [], []
    if l == 0:
        _emit(xs, 1, n, 1, -2.0 * (n + a))
        _emit(ys, 1, n, -1, -2.0 * (n + a))
        return xs, ys
    _emit(xs, l + 1, n, mu, -(n + a))
    _emit(xs, l - 1, n + 1, mu, -(n + 1.0))
    _emit(ys, l + 1, n, -mu, -mu * (n + a))
    _emit(ys, l - 1, n + 1, -mu, mu * (n + 1.0))
    return xs, ys


def _scatter(c, stencil, beta, scale_x=1.0, scale_y=1.0):
    dx, dy = {}, {}
    for idx, value in c.raw_items():
        xs, ys = stencil(idx.l, idx.n, idx.mu)
        for key, factor in xs:
            dx[key] = dx.get(key, 0.0) + scale_x * factor * value
        for key, factor in ys:
            dy[key] = dy.get(key, 0.0) + scale_y * factor * value
    return GradientPair(CoefficientField(dx, beta, "raw"), CoefficientField(dy, beta, "raw"))


def _check_family(c, alpha):
    if abs(c.beta - alpha / 2.0) > 1e-14:
        raise ValueError(f"expected a field in the alpha/2 = {alpha / 2} family, got beta={c.beta}")


def grad_weighted(c, alpha):
    """Cartesian gradient of (1-r^2)^(alpha/2) times the expansion ``c``."""
    _check_family(c, alpha)
    return _scatter(c, lambda l, n, mu: weighted_grad_stencil(l, n, mu, alpha), alpha / 2.0 - 1.0)


def grad_unweighted(l, n, mu, gamma):
    """Gradient of V_{l,mu} P_n^{(gamma,l)}(2r^2-1), no weight.

    Returns:
        (x_terms, y_terms) of (BasisIndex, factor); targets use the Jacobi
        family gamma + 1.
    """
    BasisIndex(l, n, mu)
    xs, ys = [], []
    if l == 0:
        if n >= 1:
            _emit(xs, 1, n - 1, 1, 2.0 * (n + gamma + 1))
            _emit(ys, 1, n - 1, -1, 2.0 * (n + gamma + 1))
        return xs, ys
    _emit(xs, l - 1, n, mu, float(n + l))
    _emit(ys, l - 1, n, -mu, -mu * float(n + l))
    if n >= 1:
        _emit(xs, l + 1, n - 1, mu, n + gamma + l + 1.0)
        _emit(ys, l + 1, n - 1, -mu, mu * (n + gamma + l + 1.0))
    return xs, ys


def riesz_grad_stencil(l, n, mu, alpha):
    """(-Delta)^((alpha-2)/2) grad of (1-r^2)^(alpha/2) V_{l,mu} P_n^{(alpha/2,l)}.

    Targets are unweighted functions V P^{(alpha/2-1, l')}.
    """
    a = alpha / 2.0
    c2 = -(2.0 ** (alpha - 2.0)) * math.exp(_lg(n + 1 + a, n + a + l) - _lg(n + 1, n + 2 + l))
    xs, ys = [], []
    if l == 0:
        _emit(xs, 1, n, 1, 2.0 * c2 * (n + a))
        _emit(ys, 1, n, -1, 2.0 * c2 * (n + a))
        return xs, ys
    _emit(xs, l + 1, n, mu, c2 * (n + a + l))
    _emit(xs, l - 1, n + 1, mu, c2 * (n + l + 1.0))
    _emit(ys, l + 1, n, -mu, mu * c2 * (n + a + l))
    _emit(ys, l - 1, n + 1, -mu, -mu * c2 * (n + l + 1.0))
    return xs, ys


def riesz_grad(c, params):
    """Pair (k1 R d/dx, k2 R d/dy) of the weighted expansion, R the Riesz potential."""
    alpha = params.alpha
    _check_family(c, alpha)
    return _scatter(c, lambda l, n, mu: riesz_grad_stencil(l, n, mu, alpha),
                    alpha / 2.0 - 1.0, params.k1, params.k2)


def divergence(pair):
    """d/dx pair.dx + d/dy pair.dy for unweighted fields in a common family."""
    gamma = pair.dx.beta
    out = {}
    for channel, component in ((0, pair.dx), (1, pair.dy)):
        for idx, value in component.raw_items():
            terms = grad_unweighted(idx.l, idx.n, idx.mu, gamma)[channel]
            for key, factor in terms:
                out[key] = out.get(key, 0.0) + factor * value
    return CoefficientField(out, gamma + 1.0, "raw")


def apply_forward(u, params):
    """-div (-Delta)^((alpha-2)/2) K grad of (1-r^2)^(alpha/2) u, in coefficient space.

    ``u`` is taken in either convention (the solver uses ``halved``); the
    result is a raw field in the alpha/2 family.
    """
    flux = riesz_grad(u, params)
    div = divergence(flux)
    return CoefficientField({k: -v for k, v in div.items()}, div.beta, "raw")


def apply_forward_transcribed(u, params):
    """Forward operator written out row by row from the determining equations.

    Independent of the stencil composition in :func:`apply_forward`; kept as
    its cross-check.  ``u`` is read in the halved convention.
    """
    _check_family(u, params.alpha)
    u = u.to_halved()
    a = params.alpha / 2.0
    k1, k2 = params.k1, params.k2
    ksum, kdiff = k1 + k2, k1 - k2
    pre = 2.0 ** (params.alpha - 2.0)

    def g(p, q, r, s):
        return math.exp(_lg(p, q) - _lg(r, s))

    def row(l, n, mu):
        if mu == 1 and l == 0:
            diag = ksum
        elif l == 1:
            diag = 2.0 * (k1 if mu == 1 else k2) + ksum
        else:
            diag = 2.0 * ksum
        val = diag * g(n + 1 + a, n + 1 + a + l, n + 1, n + 1 + l) * u[(l, n, mu)]
        if n >= 1:
            val += kdiff * g(n + a, n + 1 + a + l, n, n + 1 + l) * u[(l + 2, n - 1, mu)]
        lowest = 0 if mu == 1 else 1
        if l - 2 >= lowest:
            val += kdiff * g(n + 2 + a, n + 1 + a + l, n + 2, n + 1 + l) * u[(l - 2, n + 1, mu)]
        return pre * val

    targets = set()
    for idx in u:
        for dl, dn in ((0, 0), (2, -1), (-2, 1)):
            l, n = idx.l + dl, idx.n + dn
            if l >= 0 and n >= 0 and not (l == 0 and idx.mu == -1):
                targets.add(BasisIndex(l, n, idx.mu))
    return CoefficientField({t: row(t.l, t.n, t.mu) for t in targets}, a, "raw")
