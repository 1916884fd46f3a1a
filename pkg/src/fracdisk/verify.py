"""Property suites that compare the closed-form machinery with the oracles.

Each suite returns a list of :class:`Check` records; the CLI turns them into
a pass/fail CSV.  Random draws come from a seeded generator, so a suite run
is reproducible.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisIndex, CoefficientField, eval_basis_function, eval_expansion
from .jacobi import diff_jacobi, eval_jacobi
from .operators import (
    OperatorParams,
    apply_forward,
    apply_forward_transcribed,
    frac_laplacian_eigenvalue,
    grad_weighted,
    riesz_action,
    riesz_action_field,
    riesz_grad,
)
from .oracle import QuadratureSpec, dense_eigenvalues, dense_solve, fd_gradient, riesz_quadrature
from .regularity import decay_rhs, regularity_gain_report
from .spectral_solver import EVEN, ODD, assemble_block, chain_of, gershgorin_bounds, solve, solve_block

__all__ = [
    "Check",
    "SUITES",
    "run_suite",
    "checks_to_csv",
    "jacobi_identity_errors",
    "RIESZ_POINTS",
]

RIESZ_POINTS = ((0.2, 0.1), (-0.5, 0.3), (0.7, -0.4), (0.1, -0.85), (-0.35, -0.55))


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    error: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)


def _rel(lhs, rhs, *scale_terms):
    # relative to the largest term in the identity, so cancellation is not penalised
    scale = max([1e-300, abs(lhs), abs(rhs)] + [abs(s) for s in scale_terms])
    return abs(lhs - rhs) / scale


def jacobi_identity_errors(n, a, b, t, l, gamma):
    """Relative defects of the recurrence, lemma and derivative identities at one sample.

    ``n >= 1`` and ``l >= 1`` are required (the lemma and the lowering
    recurrences use degree n - 1 and order l - 1).
    """
    P = lambda k, p, q: eval_jacobi(k, p, q, t)
    out = {}
    c = n + a / 2 + b / 2 + 1
    lhs = c * (1 - t) * P(n, a + 1, b)
    t1, t2 = (n + a + 1) * P(n, a, b), (n + 1) * P(n + 1, a, b)
    out["rec_lower_a"] = _rel(lhs, t1 - t2, t1, t2)
    lhs = c * (1 + t) * P(n, a, b + 1)
    t1, t2 = (n + b + 1) * P(n, a, b), (n + 1) * P(n + 1, a, b)
    out["rec_lower_b"] = _rel(lhs, t1 + t2, t1, t2)
    lhs = (2 * n + a + b) * P(n, a - 1, b)
    t1, t2 = (n + a + b) * P(n, a, b), (n + b) * P(n - 1, a, b)
    out["rec_shift_a"] = _rel(lhs, t1 - t2, t1, t2)
    lhs = (2 * n + a + b) * P(n, a, b - 1)
    t1, t2 = (n + a + b) * P(n, a, b), (n + a) * P(n - 1, a, b)
    out["rec_shift_b"] = _rel(lhs, t1 + t2, t1, t2)

    t1 = l * P(n, gamma, l)
    t2 = 0.5 * (1 + t) * (n + gamma + l + 1) * P(n - 1, gamma + 1, l + 1)
    out["lemma_order_shift"] = _rel(t1 + t2, (n + l) * P(n, gamma + 1, l - 1), t1, t2)


    # derivatives by central differences, step 1e-6 as for all smooth FD checks here
    h = 1e-6
    fd = (eval_jacobi(n, a, b, t + h) - eval_jacobi(n, a, b, t - h)) / (2 * h)
    out["derivative"] = abs(fd - diff_jacobi(n, 1, a, b, t)) / max(1.0, abs(fd))

    half = abs(a) % 1.0 + 0.2  # a positive exponent for the weighted forms
    m = l
    w = lambda s: (1 - s) ** half * eval_jacobi(n, half, m, s)
    fd = (w(t + h) - w(t - h)) / (2 * h)
    exact = -(n + half) * (1 - t) ** (half - 1) * eval_jacobi(n, half - 1, m + 1, t)
    out["weighted_derivative_a"] = abs(fd - exact) / max(1.0, abs(exact))
    w = lambda s: (1 + s) ** m * eval_jacobi(n, half, m, s)
    fd = (w(t + h) - w(t - h)) / (2 * h)
    exact = (n + m) * (1 + t) ** (m - 1) * eval_jacobi(n, half + 1, m - 1, t)
    out["weighted_derivative_b"] = abs(fd - exact) / max(1.0, abs(exact))
    return out


# finite differences carry O(h^2) truncation and O(eps / h) rounding
_FD_TOL = {"derivative": 1e-6, "weighted_derivative_a": 1e-6, "weighted_derivative_b": 1e-6}


def suite_jacobi(params, rng, samples=500):
    worst = {}
    for _ in range(samples):
        n = int(rng.integers(1, 13))
        a, b, gamma = rng.uniform(-0.9, 3.0, size=3)
        t = float(rng.uniform(-0.97, 0.97))
        l = int(rng.integers(1, 6))
        for name, err in jacobi_identity_errors(n, a, b, t, l, gamma).items():
            worst[name] = max(worst.get(name, 0.0), err)
    return [Check("jacobi", name, err, _FD_TOL.get(name, 1e-10)) for name, err in sorted(worst.items())]


def _random_point(rng, rmax=0.8):
    r = rmax * math.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2.0 * math.pi)
    return r * math.cos(phi), r * math.sin(phi)


def _random_index(rng, lmax=6, nmax=6):
    l = int(rng.integers(0, lmax + 1))
    mu = 1 if l == 0 else int(rng.choice([-1, 1]))
    return BasisIndex(l, int(rng.integers(0, nmax + 1)), mu)


def gradient_error(c, alpha, point, h=1e-5):
    """Max relative gap between the gradient stencil and central differences at ``point``."""
    x, y = point
    pair = grad_weighted(c, alpha)
    exact = [eval_expansion(pair.dx, x, y, weighted=True), eval_expansion(pair.dy, x, y, weighted=True)]
    fd = fd_gradient(lambda px, py: eval_expansion(c, px, py, weighted=True), x, y, h)
    return max(abs(e - f) / max(1.0, abs(e)) for e, f in zip(exact, fd))


def suite_gradient(params, rng, singletons=100, multi=20):
    alpha = params.alpha
    worst_single = 0.0
    for _ in range(singletons):
        c = CoefficientField({_random_index(rng): 1.0}, alpha / 2)
        worst_single = max(worst_single, gradient_error(c, alpha, _random_point(rng)))
    worst_multi = 0.0
    for _ in range(multi):
        entries = {_random_index(rng): float(rng.uniform(-1, 1)) for _ in range(5)}
        c = CoefficientField(entries, alpha / 2)
        worst_multi = max(worst_multi, gradient_error(c, alpha, _random_point(rng)))
    return [Check("gradient", "singleton_vs_fd", worst_single, 1e-6),
            Check("gradient", "multiterm_vs_fd", worst_multi, 1e-6)]


def riesz_error(l, n, alpha, point, spec=QuadratureSpec()):
    """Relative gap between the closed-form Riesz action (s = 1) and quadrature at ``point``."""
    a = alpha / 2.0
    coeff, out_n, out_a = riesz_action(l, n, 1, alpha)
    x, y = point
    exact = coeff * eval_basis_function(l, out_n, 1, out_a, x, y)
    g = lambda px, py: eval_basis_function(l, n, 1, a - 1.0, px, py)
    approx = riesz_quadrature(g, alpha, point, spec, weight_exponent=a - 1.0)
    return abs(approx - exact) / abs(exact)


def suite_riesz(params, rng, points=RIESZ_POINTS):
    worst = 0.0
    for l in range(3):
        for n in range(3):
            for p in points:
                worst = max(worst, riesz_error(l, n, params.alpha, p))
    return [Check("riesz", "closed_form_vs_quadrature", worst, 1e-5)]


def composition_error(lmax, nmax, alpha):
    """Max relative gap of riesz_action(s=1) o grad_weighted against riesz_grad over singletons."""
    a = alpha / 2.0
    iso = OperatorParams(alpha)
    worst = 0.0
    for l in range(lmax + 1):
        for n in range(nmax + 1):
            for mu in ((1,) if l == 0 else (1, -1)):
                c = CoefficientField({(l, n, mu): 1.0}, a)
                pair = grad_weighted(c, alpha)
                direct = riesz_grad(c, iso)
                for composed, ref in ((riesz_action_field(pair.dx, alpha), direct.dx),
                                      (riesz_action_field(pair.dy, alpha), direct.dy)):
                    scale = max(max(abs(v) for v in ref.entries.values()), 1e-300)
                    worst = max(worst, composed.max_abs_diff(ref) / scale)
    return worst


def transcription_error(lmax, nmax, params):
    """Max relative gap between the composed and the row-by-row forward operator."""
    worst = 0.0
    for l in range(lmax + 1):
        for n in range(nmax + 1):
            for mu in ((1,) if l == 0 else (1, -1)):
                u = CoefficientField({(l, n, mu): 1.0}, params.alpha / 2, "halved")
                ref = apply_forward_transcribed(u, params)
                got = apply_forward(u, params)
                scale = max(abs(v) for v in ref.entries.values())
                worst = max(worst, got.max_abs_diff(ref) / scale)
    return worst


def isotropic_diagonal_error(lmax, nmax, alpha, k):
    """Max relative gap of apply_forward(u) against k * lambda * u (raw) when k1 = k2 = k."""
    params = OperatorParams(alpha, k, k)
    worst = 0.0
    for l in range(lmax + 1):
        for n in range(nmax + 1):
            for mu in ((1,) if l == 0 else (1, -1)):
                u = CoefficientField({(l, n, mu): 1.0}, alpha / 2, "halved")
                expected = k * frac_laplacian_eigenvalue(l, n, alpha) * u.to_raw()[(l, n, mu)]
                got = apply_forward(u, params)
                off = max((abs(v) for key, v in got.items() if key != BasisIndex(l, n, mu)), default=0.0)
                worst = max(worst, abs(got[(l, n, mu)] - expected) / abs(expected), off / abs(expected))
    return worst


def suite_forward(params, rng):
    out = [Check("forward", "riesz_of_gradient_vs_composed", composition_error(10, 10, params.alpha), 1e-12),
           Check("forward", "composed_vs_transcribed", transcription_error(10, 10, params), 1e-12)]
    k = 0.5 * (params.k1 + params.k2)
    out.append(Check("forward", "isotropic_diagonal", isotropic_diagonal_error(20, 20, params.alpha, k), 1e-12))
    return out


def random_chain_rhs(rng, alpha, max_chain):
    """Random f on every (l, n, mu) whose chain size is at most ``max_chain``."""
    entries = {}
    for mu in (1, -1):
        for n in range(max_chain):
            for l in range(2 * max_chain + 1):
                if l == 0 and mu == -1:
                    continue
                if chain_of(l, n, mu)[1] <= max_chain:
                    entries[(l, n, mu)] = float(rng.uniform(-1, 1))
    return CoefficientField(entries, alpha / 2)


def round_trip_error(f, params, max_chain):
    u = solve(f, params, max_chain)
    back = apply_forward(u, params)
    return back.max_abs_diff(f)


def suite_blocks(params, rng, trials=5, max_chain=20, max_block=50):
    worst_rt = 0.0
    for _ in range(trials):
        f = random_chain_rhs(rng, params.alpha, max_chain)
        worst_rt = max(worst_rt, round_trip_error(f, params, max_chain))
    margin, gersh, dense_gap = math.inf, 0.0, 0.0
    floor = 2.0 * min(params.k1, params.k2)
    for mu in (1, -1):
        for parity in (EVEN, ODD):
            for m in range(1, max_block + 1):
                block = assemble_block(mu, parity, m, params)
                eig = dense_eigenvalues(block.dense())
                margin = min(margin, eig[0] - floor)
                lo, hi = gershgorin_bounds(block)
                gersh = max(gersh, lo - eig[0], eig[-1] - hi, 0.0)
                rhs = rng.uniform(-1, 1, m)
                ref = dense_solve(block.dense(), rhs)
                dense_gap = max(dense_gap, float(np.max(np.abs(solve_block(block, rhs) - ref))))
    return [Check("blocks", "round_trip", worst_rt, 1e-11),
            Check("blocks", "min_eig_minus_floor_deficit", max(0.0, -margin), 1e-12),
            Check("blocks", "eigs_outside_gershgorin", gersh, 1e-12),
            Check("blocks", "ldlt_vs_dense", dense_gap, 1e-12)]


def regularity_gains(alpha, k1=1.0, k2=1.0, p=3.0, q=3.0, max_chain=30):
    f = decay_rhs(p, q, alpha, max_chain)
    params = OperatorParams(alpha, k1, k2)
    u = solve(f, params, max_chain)
    return regularity_gain_report(f, u, alpha).gains


def suite_regularity(params, rng):
    gains = regularity_gains(params.alpha, params.k1, params.k2)
    a = params.alpha
    # a check passes when error <= 0, i.e. the shortfall below the threshold
    return [Check("regularity", "l_gain_shortfall", (a / 2 - 0.1) - gains["l"], 0.0),
            Check("regularity", "n_gain_shortfall", (a - 0.1) - gains["n"], 0.0)]


SUITES = {
    "jacobi": suite_jacobi,
    "gradient": suite_gradient,
    "riesz": suite_riesz,
    "forward": suite_forward,
    "blocks": suite_blocks,
    "regularity": suite_regularity,
}


def run_suite(name, params, seed=0):
    """Run one suite, or all of them for ``name == "all"``."""
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {', '.join(SUITES)} or all")
    checks = []
    for n in names:
        checks.extend(SUITES[n](params, np.random.default_rng(seed)))
    return checks


def checks_to_csv(checks):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["suite", "check", "error", "tolerance", "status"])
    for c in checks:
        writer.writerow([c.suite, c.name, repr(float(c.error)), repr(float(c.tolerance)),
                         "pass" if c.passed else "fail"])
    return buf.getvalue()
