import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad
from scipy.special import eval_jacobi as sp_jacobi

from fracdisk.basis import (
    BasisIndex,
    CoefficientField,
    basis_norm_h,
    eval_basis_function,
    eval_expansion,
    eval_solid_harmonic,
    format_coefficients,
    parse_coefficients,
    project,
    read_coefficients,
    write_coefficients,
)
from fracdisk.errors import BasisIndexError, ResolutionError
from fracdisk.oracle import disk_integral


def _straight_line(entries, beta, x, y):
    # independent evaluator: polar trig and scipy's Jacobi
    r, phi = math.hypot(x, y), math.atan2(y, x)
    total = 0.0
    for (l, n, mu), v in entries.items():
        trig = math.cos(l * phi) if mu == 1 else math.sin(l * phi)
        total += v * r ** l * trig * sp_jacobi(n, beta, l, 2 * r * r - 1)
    return total


@pytest.mark.parametrize("key", [(0, 0, -1), (-1, 0, 1), (2, -1, 1), (1, 0, 0)])
def test_invalid_index(key):
    with pytest.raises(BasisIndexError):
        BasisIndex(*key)


def test_invalid_index_is_value_error():
    assert issubclass(BasisIndexError, ValueError)


def test_solid_harmonic_examples():
    assert eval_solid_harmonic(0, 1, 0.7, -0.2) == 1.0
    assert eval_solid_harmonic(1, 1, 0.3, 0.4) == pytest.approx(0.3, abs=1e-16)
    assert eval_solid_harmonic(2, -1, 0.3, 0.4) == pytest.approx(0.24, abs=1e-16)


def test_solid_harmonic_forbidden():
    with pytest.raises(BasisIndexError):
        eval_solid_harmonic(0, -1, 0.1, 0.1)


@settings(max_examples=100, deadline=None)
@given(l=st.integers(0, 8), mu=st.sampled_from([1, -1]),
       r=st.floats(0.0, 0.99), phi=st.floats(-math.pi, math.pi))
def test_solid_harmonic_polar_form(l, mu, r, phi):
    if l == 0 and mu == -1:
        return
    x, y = r * math.cos(phi), r * math.sin(phi)
    trig = math.cos(l * phi) if mu == 1 else math.sin(l * phi)
    assert eval_solid_harmonic(l, mu, x, y) == pytest.approx(r ** l * trig, abs=1e-14)


def test_expansion_halved_constant():
    c = CoefficientField({(0, 0, 1): 2.0}, 0.5, "halved")
    assert eval_expansion(c, 0.3, -0.1) == pytest.approx(1.0, abs=1e-16)


def test_expansion_raw_x():
    c = CoefficientField({(1, 0, 1): 1.0}, 0.5)
    assert eval_expansion(c, 0.5, 0.0) == pytest.approx(0.5, abs=1e-16)


def test_expansion_against_straight_line(rng):
    entries = {}
    while len(entries) < 6:
        l = int(rng.integers(0, 6))
        mu = 1 if l == 0 else int(rng.choice([1, -1]))
        entries[(l, int(rng.integers(0, 6)), mu)] = float(rng.uniform(-1, 1))
    c = CoefficientField(entries, 0.3)
    assert eval_expansion(c, 0.2, -0.6) == pytest.approx(_straight_line(entries, 0.3, 0.2, -0.6), abs=1e-13)


def test_expansion_weighted_zero_outside_disk():
    c = CoefficientField({(0, 0, 1): 1.0}, 0.5)
    assert eval_expansion(c, 1.2, 0.0, weighted=True) == 0.0
    assert eval_expansion(c, 0.6, 0.0, weighted=True) == pytest.approx(0.8, rel=1e-15)


def _polar_norm_sq(l, n, mu, beta):
    f = lambda r, phi: ((1 - r * r) ** beta * r
                        * eval_basis_function(l, n, mu, beta, r * math.cos(phi), r * math.sin(phi)) ** 2)
    return dblquad(f, 0, 2 * math.pi, 0, 1, epsabs=1e-13, epsrel=1e-12)[0]


def test_norm_of_constant_is_sqrt_pi():
    assert basis_norm_h(0, 0, 0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


@pytest.mark.parametrize("l,n,mu", [(1, 0, 1), (2, 1, 1), (2, 1, -1), (0, 2, 1)])
def test_norm_against_2d_quadrature(l, n, mu):
    assert basis_norm_h(l, n, 0.5) ** 2 == pytest.approx(_polar_norm_sq(l, n, mu, 0.5), rel=1e-10)


def test_norm_domain():
    with pytest.raises(ValueError):
        basis_norm_h(1, 1, -1.0)


def test_project_single_basis_function():
    g = lambda x, y: eval_basis_function(2, 1, 1, 0.5, x, y)
    c = project(g, 0.5, 6, 5)
    assert c[(2, 1, 1)] == pytest.approx(1.0, abs=1e-10)
    assert max(abs(v) for k, v in c.items() if k != BasisIndex(2, 1, 1)) < 1e-10


def test_project_constant(rng):
    c = project(lambda x, y: np.ones_like(x), 0.25, 4, 4).pruned(1e-12)
    assert list(c) == [BasisIndex(0, 0, 1)]
    pts = rng.uniform(-0.6, 0.6, size=(5, 2))
    for x, y in pts:
        assert eval_expansion(c, x, y) == pytest.approx(1.0, abs=1e-12)


def test_project_linear_combination():
    g = lambda x, y: (3 * eval_basis_function(1, 0, -1, 0.5, x, y)
                      + 0.5 * eval_basis_function(4, 2, 1, 0.5, x, y))
    c = project(g, 0.5, 6, 4).pruned(1e-10)
    assert dict(c.items()) == pytest.approx({BasisIndex(1, 0, -1): 3.0, BasisIndex(4, 2, 1): 0.5}, abs=1e-10)


def test_project_is_left_inverse_of_evaluation(rng):
    beta = 0.35
    entries = {(l, n, mu): float(rng.uniform(-1, 1))
               for l in range(5) for n in range(4) for mu in (1, -1) if not (l == 0 and mu == -1)}
    c = CoefficientField(entries, beta)
    back = project(lambda x, y: eval_expansion(c, x, y), beta, 4, 3)
    assert back.max_abs_diff(c) < 1e-10


def test_parseval(rng):
    beta = 0.6
    entries = {(l, n, 1): float(rng.uniform(-1, 1)) for l in range(4) for n in range(4)}
    c = CoefficientField(entries, beta)
    lhs = disk_integral(lambda x, y: eval_expansion(c, x, y) ** 2, beta)
    rhs = sum(v * v * basis_norm_h(k.l, k.n, beta) ** 2 for k, v in c.raw_items())
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_distinct_basis_functions_orthogonal():
    beta = 0.5
    pairs = [((1, 0, 1), (1, 0, -1)), ((2, 0, 1), (0, 1, 1)), ((3, 1, -1), (3, 2, -1))]
    for a, b in pairs:
        val = disk_integral(lambda x, y: eval_basis_function(*a, beta, x, y) * eval_basis_function(*b, beta, x, y), beta)
        assert abs(val) < 1e-10


def test_project_rejects_coarse_quadrature():
    with pytest.raises(ResolutionError):
        project(lambda x, y: x, 0.5, 6, 6, radial_nodes=4)
    with pytest.raises(ResolutionError):
        project(lambda x, y: x, 0.5, 6, 6, angular_nodes=10)


def test_convention_round_trip():
    c = CoefficientField({(0, 0, 1): 1.5, (0, 3, 1): -2.0, (2, 1, -1): 0.25}, 0.5)
    h = c.to_halved()
    assert h[(0, 0, 1)] == 3.0 and h[(2, 1, -1)] == 0.25
    assert h.to_raw().max_abs_diff(c) == 0.0
    assert dict(h.raw_items()) == dict(c.items())


def test_missing_entries_are_zero():
    c = CoefficientField({(1, 1, 1): 2.0}, 0.0)
    assert c[(5, 5, -1)] == 0.0


def test_duplicate_keys_accumulate():
    c = CoefficientField({(1, 1, 1): 2.0, BasisIndex(1, 1, 1): 1.0}, 0.0)
    assert c[(1, 1, 1)] == 3.0


index_st = st.tuples(st.integers(0, 20), st.integers(0, 20), st.sampled_from([1, -1])).filter(
    lambda k: not (k[0] == 0 and k[2] == -1))


@settings(max_examples=100, deadline=None)
@given(entries=st.dictionaries(index_st, st.floats(allow_nan=False, allow_infinity=False).filter(lambda v: v != 0.0)),
       beta=st.floats(-0.99, 3.0, allow_nan=False), conv=st.sampled_from(["raw", "halved"]))
def test_csv_round_trip_is_lossless(entries, beta, conv):
    c = CoefficientField(entries, beta, conv)
    back = parse_coefficients(format_coefficients(c))
    assert back.beta == beta and back.convention == conv
    assert dict(back.items()) == dict(c.items())


def test_csv_file_round_trip(tmp_path):
    c = CoefficientField({(2, 0, 1): 0.1, (1, 3, -1): 1e-300}, 0.25, "halved")
    path = tmp_path / "c.csv"
    write_coefficients(path, c)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.startswith(b"# beta=0.25 convention=halved\nmu,l,n,value\n")
    assert dict(read_coefficients(path).items()) == dict(c.items())


def test_empty_csv_gives_empty_field():
    c = parse_coefficients("", beta=0.5)
    assert len(c) == 0 and c.beta == 0.5


def test_bad_header_rejected():
    with pytest.raises(ValueError):
        parse_coefficients("l,n,mu,value\n1,0,1,2.0\n")
