"""Weighted Besov norms and coefficient-decay diagnostics.

The norm of v in B^{s1,s2}_beta is

    sum over (l, n, mu) of (1 + l^(2 s1) + n^(2 s2)) v_{l,n,mu}^2 h_{l,n}^2

with h_{l,n} the basis-function norm.  An order of exactly 0 drops its term,
so B^{0,0} is plain L2_beta.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .basis import CoefficientField, basis_norm_h
from .errors import ResolutionError
from .spectral_solver import chain_of, rhs_scale, solution_scale

__all__ = [
    "BesovIndices",
    "besov_norm",
    "besov_seminorm",
    "tail_fraction",
    "decay_slope",
    "decay_rhs",
    "RegularityReport",
    "regularity_gain_report",
]


@dataclass(frozen=True)
class BesovIndices:
    s1: float
    s2: float

    def __post_init__(self):
        if self.s1 < 0 or self.s2 < 0:
            raise ValueError("Besov orders must be nonnegative")


def _power(k, s):
    return float(k) ** (2.0 * s) if s > 0 else 0.0


def _terms(c, idx, include_constant=True):
    s1, s2 = idx.s1, idx.s2
    base = 1.0 if include_constant else 0.0
    for key, value in c.raw_items():
        weight = base + _power(key.l, s1) + _power(key.n, s2)
        yield key, weight * value ** 2 * basis_norm_h(key.l, key.n, c.beta) ** 2


def besov_norm(c, idx, alpha=None):
    """Truncated B^{s1,s2} norm of the expansion ``c`` (family beta = c.beta)."""
    if alpha is not None and abs(c.beta - alpha / 2.0) > 1e-14:
        raise ValueError(f"field family beta={c.beta} is not alpha/2 = {alpha / 2}")
    return float(np.sqrt(sum(t for _, t in _terms(c, idx))))


def besov_seminorm(c, idx):
    return float(np.sqrt(sum(t for _, t in _terms(c, idx, include_constant=False))))


def tail_fraction(c, idx, layers=2):
    """Share of the squared norm carried by the outermost ``layers`` values of l + 2n.

    Each value of l + 2n is one coupling chain, so this measures how much
    of the norm sits in the last chains kept by the truncation.
    """
    terms = list(_terms(c, idx))
    total = sum(t for _, t in terms)
    if total == 0.0:
        return 0.0
    depth = max(k.l + 2 * k.n for k, _ in terms)
    tail = sum(t for k, t in terms if k.l + 2 * k.n > depth - layers)
    return tail / total


def decay_slope(c, axis, fixed, mu=1, window=0.5):
    """Least-squares slope of log|c h| against log(1 + index) along one axis.

    Args:
        axis: ``"l"`` (vary l at n = fixed) or ``"n"`` (vary n at l = fixed).
        window: only indices >= window * (largest nonzero index on the line)
            enter the fit; 0 fits the whole line.  The low indices are
            dominated by the chain ends and bias the exponent.

    Returns:
        the fitted exponent, or nan with fewer than three nonzero points.
    """
    if not 0.0 <= window < 1.0:
        raise ValueError("window must lie in [0, 1)")
    points = []
    for key, value in c.raw_items():
        if key.mu != mu or value == 0.0:
            continue
        if axis == "l" and key.n == fixed:
            k = key.l
        elif axis == "n" and key.l == fixed:
            k = key.n
        else:
            continue
        points.append((k, abs(value) * basis_norm_h(key.l, key.n, c.beta)))
    if not points:
        return float("nan")
    top = max(k for k, _ in points)
    kept = [(k, v) for k, v in points if k >= window * top]
    if len(kept) < 3:
        return float("nan")
    xs = np.log1p([k for k, _ in kept])
    ys = np.log([v for _, v in kept])
    return float(np.polyfit(xs, ys, 1)[0])


def decay_rhs(p, q, alpha, max_chain, mu=1):
    """f_{l,n,mu} = (1+l)^(-p) (1+n)^(-q) / h_{l,n} on every chain m <= max_chain."""
    a = alpha / 2.0
    entries = {}
    for n in range(max_chain):
        for l in range(2 * max_chain + 1):
            if (l == 0 and mu == -1) or chain_of(l, n, mu)[1] > max_chain:
                continue
            entries[(l, n, mu)] = (1.0 + l) ** -p * (1.0 + n) ** -q / basis_norm_h(l, n, a)
    return CoefficientField(entries, a, "raw")


def _rescaled(c, scale):
    # scales the stored values, so a halved field keeps its doubled l = 0 entries
    return CoefficientField({k: scale(k) * v for k, v in c.items()}, c.beta, "raw")


@dataclass
class RegularityReport:
    alpha: float
    norms: list = field(default_factory=list)    # (quantity, s1, s2, value)
    slopes: list = field(default_factory=list)   # (axis, stage, fixed, value)
    gains: dict = field(default_factory=dict)    # axis -> min gain of u over f

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["quantity", "s1", "s2", "value"])
        for q, s1, s2, v in self.norms:
            writer.writerow([q, repr(s1), repr(s2), repr(v)])
        writer.writerow(["slope", "axis", "stage", "value"])
        for axis, stage, fixed, v in self.slopes:
            writer.writerow(["slope", f"{axis}@{'n' if axis == 'l' else 'l'}={fixed}", stage, repr(v)])
        for axis, v in sorted(self.gains.items()):
            writer.writerow(["slope", f"{axis}-gain", "u_vs_f", repr(v)])
        return buf.getvalue()


def regularity_gain_report(f, u, alpha, s_grid=(BesovIndices(0.0, 0.0),), fixed=(0, 1, 2),
                           tail_tol=1e-8, window=0.5):
    """Norms of f and u across ``s_grid`` plus decay slopes of each stage.

    For each (s1, s2) the report holds ||f|| in B^{s1,s2} and ||u|| in
    B^{s1+alpha/2, s2+alpha}.  Slopes are fitted for f, f-tilde, d and u;
    the gain along an axis is the smallest drop in slope from f to u over
    the ``fixed`` lines, each fitted over its upper ``window`` range.

    Raises:
        ResolutionError: a norm keeps more than ``tail_tol`` of its mass
            in the outermost chains.
    """
    a = alpha / 2.0
    f = f.to_raw()
    u = u.to_raw()
    ftilde = _rescaled(f, lambda k: rhs_scale(k.l, k.n, alpha))
    d = _rescaled(u.to_halved(), lambda k: solution_scale(k.n, alpha))
    report = RegularityReport(alpha)
    for idx in s_grid:
        target = BesovIndices(idx.s1 + a, idx.s2 + alpha)
        for name, c, s in (("f", f, idx), ("u", u, target)):
            frac = tail_fraction(c, s)
            if frac > tail_tol:
                raise ResolutionError(
                    f"{name} in B^({s.s1},{s.s2}) keeps {frac:.2e} of its mass in the last chains")
            report.norms.append((name, s.s1, s.s2, besov_norm(c, s)))
    stages = (("f", f), ("ftilde", ftilde), ("d", d), ("u", u))
    for axis in ("l", "n"):
        for k in fixed:
            for name, c in stages:
                report.slopes.append((axis, name, k, decay_slope(c, axis, k, window=window)))
        report.gains[axis] = min(decay_slope(f, axis, k, window=window)
                                 - decay_slope(u, axis, k, window=window) for k in fixed)
    return report
