import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdisk.basis import CoefficientField, basis_norm_h, eval_expansion
from fracdisk.errors import ResolutionError
from fracdisk.operators import OperatorParams
from fracdisk.oracle import weighted_l2_norm
from fracdisk.regularity import (
    BesovIndices,
    besov_norm,
    besov_seminorm,
    decay_rhs,
    decay_slope,
    regularity_gain_report,
    tail_fraction,
)
from fracdisk.spectral_solver import solve, solve_stages

orders = st.floats(0.0, 3.0)


def _gains(alpha, k1, k2, p=3.0, q=3.0, max_chain=30):
    f = decay_rhs(p, q, alpha, max_chain)
    u = solve(f, OperatorParams(alpha, k1, k2), max_chain)
    return regularity_gain_report(f, u, alpha)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        BesovIndices(-0.1, 0.0)


def test_norm_of_zero():
    assert besov_norm(CoefficientField({}, 0.5), BesovIndices(1.0, 2.0)) == 0.0


def test_single_coefficient_norm():
    l, n, v, beta = 3, 2, -0.7, 0.5
    c = CoefficientField({(l, n, -1): v}, beta)
    idx = BesovIndices(0.8, 1.3)
    expected = math.sqrt((1 + l ** 1.6 + n ** 2.6) * v * v) * basis_norm_h(l, n, beta)
    assert besov_norm(c, idx) == pytest.approx(expected, rel=1e-14)


def test_order_zero_is_weighted_l2():
    beta = 0.3
    c = CoefficientField({(0, 1, 1): 0.5, (2, 0, -1): 1.0, (1, 3, 1): -0.25}, beta)
    ref = weighted_l2_norm(lambda x, y: eval_expansion(c, x, y), beta)
    assert besov_norm(c, BesovIndices(0.0, 0.0)) == pytest.approx(ref, rel=1e-8)


def test_family_checked():
    with pytest.raises(ValueError):
        besov_norm(CoefficientField({(0, 0, 1): 1.0}, 0.2), BesovIndices(0, 0), alpha=1.0)


def test_halved_field_uses_raw_coefficients():
    raw = CoefficientField({(0, 2, 1): 1.0, (1, 1, 1): 2.0}, 0.5)
    assert besov_norm(raw.to_halved(), BesovIndices(1, 1)) == pytest.approx(besov_norm(raw, BesovIndices(1, 1)))


@settings(max_examples=50, deadline=None)
@given(s1=orders, s2=orders, d1=st.floats(0.0, 1.0), d2=st.floats(0.0, 1.0))
def test_monotone_in_orders(s1, s2, d1, d2):
    c = decay_rhs(2.0, 2.0, 1.0, 6)
    assert besov_norm(c, BesovIndices(s1 + d1, s2)) >= besov_norm(c, BesovIndices(s1, s2)) * (1 - 1e-14)
    assert besov_norm(c, BesovIndices(s1, s2 + d2)) >= besov_norm(c, BesovIndices(s1, s2)) * (1 - 1e-14)


@settings(max_examples=50, deadline=None)
@given(s1=orders, s2=orders)
def test_norm_dominates_seminorm(s1, s2):
    c = decay_rhs(2.0, 1.5, 0.8, 5)
    assert besov_norm(c, BesovIndices(s1, s2)) >= besov_seminorm(c, BesovIndices(s1, s2))


def test_decay_rhs_slopes_are_exact():
    f = decay_rhs(3.0, 2.0, 1.0, 12)
    assert decay_slope(f, "l", 1) == pytest.approx(-3.0, abs=1e-12)
    assert decay_slope(f, "n", 2) == pytest.approx(-2.0, abs=1e-12)
    assert decay_slope(f, "n", 0, window=0.0) == pytest.approx(-2.0, abs=1e-12)


def test_slope_needs_three_points():
    assert math.isnan(decay_slope(CoefficientField({(1, 0, 1): 1.0}, 0.5), "l", 0))


def test_single_basis_rhs_has_finite_norms():
    alpha = 1.0
    f = CoefficientField({(4, 1, 1): 1.0}, alpha / 2)
    u = solve(f, OperatorParams(alpha, 1.5, 0.5), 5)
    assert {(k.l, k.n) for k in u} == {(6, 0), (4, 1), (2, 2), (0, 3)}
    for s in (0.0, 1.0, 5.0, 20.0):
        assert math.isfinite(besov_norm(u, BesovIndices(s, s)))


def test_stage_bound_constant_is_truncation_independent():
    # sum (1 + l^2t1 + n^2t2) d^2 h^2 over sum (1 + l^2(t1-a) + n^2(t2-a)) f^2 h^2 settles as chains grow
    alpha, a = 1.0, 0.5
    for t in ((0.5, 0.5), (1.0, 0.6)):
        ratios = []
        for m in (10, 20, 30):
            f = decay_rhs(3.0, 3.0, alpha, m)
            d = solve_stages(f, OperatorParams(alpha, 1.5, 0.5), m).d
            num = besov_norm(d, BesovIndices(*t)) ** 2
            den = besov_norm(f, BesovIndices(t[0] - a, t[1] - a)) ** 2
            ratios.append(num / den)
        assert max(ratios) / min(ratios) < 1.01


def test_tail_check_raises_when_underresolved():
    alpha = 1.0
    f = decay_rhs(1.0, 1.0, alpha, 10)
    u = solve(f, OperatorParams(alpha), 10)
    assert tail_fraction(f, BesovIndices(1, 1)) > 1e-8
    with pytest.raises(ResolutionError):
        regularity_gain_report(f, u, alpha, [BesovIndices(1, 1)])


def test_report_csv_layout():
    report = _gains(1.0, 1.0, 1.0)
    lines = report.to_csv().splitlines()
    assert lines[0] == "quantity,s1,s2,value"
    assert lines[1].startswith("f,0.0,0.0,") and lines[2].startswith("u,0.5,1.0,")
    assert "slope,axis,stage,value" in lines
    stages = {line.split(",")[2] for line in lines if line.startswith("slope,l@") or line.startswith("slope,n@")}
    assert stages == {"f", "ftilde", "d", "u"}


@pytest.mark.parametrize("alpha", [0.6, 1.0, 1.2])
def test_isotropic_gain(alpha):
    gains = _gains(alpha, 1.0, 1.0).gains
    assert gains["l"] >= alpha / 2 - 0.1
    assert gains["n"] >= alpha - 0.1


def test_anisotropic_gain_example():
    # k1 = 1.5, k2 = 0.5, alpha = 1, chains <= 30; the slope criterion is taken as stated
    gains = _gains(1.0, 1.5, 0.5).gains
    assert gains["l"] >= 0.5 - 0.1
    assert gains["n"] >= 1.0 - 0.1


def test_anisotropic_line_zero_gain_approaches_theory():
    # along the lines through the chain ends (n = 0 in l, l = 0 in n) the gain is already close
    alpha = 1.0
    f = decay_rhs(3.0, 3.0, alpha, 30)
    u = solve(f, OperatorParams(alpha, 1.5, 0.5), 30)
    assert decay_slope(f, "l", 0) - decay_slope(u, "l", 0) >= alpha / 2 - 0.1
    assert decay_slope(f, "n", 0) - decay_slope(u, "n", 0) >= alpha - 0.1
