import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyritus import specfun
from susyritus.errors import DomainError

mp.mp.dps = 40


def _f(v):
    return float(np.asarray(v).ravel()[0])


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ------------------------------------------------------------------ gamma


@pytest.mark.parametrize("x", [0.5, 1.0, 2.5, 10.0, 171.3, 1e4, -0.5, -3.7])
def test_log_gamma_matches_mpmath(x):
    val = specfun.log_gamma(x)
    ref = mp.gamma(x)
    assert abs(val - float(mp.log(abs(ref)))) < 1e-13 * max(1.0, abs(val))


def test_log_gamma_pole():
    with pytest.raises(ValueError):
        specfun.log_gamma(-2.0)


# --------------------------------------------------------------- Kummer M


def test_kummer_m_at_origin():
    assert _f(specfun.kummer_m(0.3, 1.7, 0.0)) == 1.0


def test_kummer_m_equal_parameters_is_exponential():
    assert _rel(_f(specfun.kummer_m(1.3, 1.3, 2.0)), math.exp(2.0)) < 1e-14


def test_kummer_m_against_direct_series():
    a, b, z = 0.1, 0.5, 1.0
    term, total = 1.0, 1.0
    for k in range(200):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
    assert _rel(_f(specfun.kummer_m(a, b, z)), total) < 1e-14


@pytest.mark.parametrize("a,b,z", [
    (0.1, 0.5, 4.0), (1.1, 1.5, 30.0), (-3.0, 0.5, 2.0), (-2.5, 1.5, 10.0),
    (0.4, 13.8, 600.0), (2.0, 3.0, -5.0), (0.25, 0.5, 250.0),
])
def test_kummer_m_matches_mpmath(a, b, z):
    ref = float(mp.hyp1f1(a, b, z))
    assert _rel(_f(specfun.kummer_m(a, b, z)), ref) < 1e-12


def test_log_kummer_m_beyond_overflow():
    val, sign = specfun.log_kummer_m(5.5, 12.0, 1e4)
    assert math.isinf(_f(specfun.kummer_m(5.5, 12.0, 1e4)))
    assert sign == 1
    assert _rel(val, float(mp.log(mp.hyp1f1(5.5, 12.0, 1e4)))) < 1e-14


@pytest.mark.parametrize("a,b,z", [(0.44, 13.9, 5e3), (0.2, 3.0, 1e5), (1.44, 14.9, 8e5)])
def test_scaled_log_kummer_m_at_huge_argument(a, b, z):
    val, sign = specfun.log_kummer_m_scaled(a, b, np.array([z]))
    ref = float(mp.log(mp.hyp1f1(a, b, z)) - z)
    assert sign[0] == 1
    assert abs(val[0] - ref) < 1e-12 * abs(ref)


def test_kummer_m_deriv_identities():
    assert _rel(_f(specfun.kummer_m_deriv(0.3, 1.7, 0.0)), 0.3 / 1.7) < 1e-15
    assert _rel(_f(specfun.kummer_m_deriv(1.0, 1.0, 1.0)), math.e) < 1e-14


def test_kummer_m_deriv_finite_difference():
    a, b, z, h = 0.1, 0.5, 4.0, 1e-4
    fd = (_f(specfun.kummer_m(a, b, z + h)) - _f(specfun.kummer_m(a, b, z - h))) / (2 * h)
    assert _rel(_f(specfun.kummer_m_deriv(a, b, z)), fd) < 1e-8


# -------------------------------------------------------------- Tricomi U


def test_tricomi_u_closed_form():
    assert _rel(_f(specfun.tricomi_u(3.0, 4.0, 2.0)), 0.125) < 1e-14


def test_tricomi_u_leading_asymptote():
    assert _rel(_f(specfun.tricomi_u(1.0, 2.0, 100.0)), 0.01) < 0.02


def test_tricomi_u_exponential_seed_parameters_vs_integral():
    """a, b from q2 = 6, epsilon1 = -11/2 against the integral representation."""
    kappa = math.sqrt(36 + 5.5)
    a, b = kappa - 6, 1 + 2 * kappa
    for z in (0.3, 2.0, 12.0):
        ref = mp.quad(lambda t: mp.exp(-z * t) * t ** (a - 1) * (1 + t) ** (b - a - 1), [0, 1, mp.inf])
        ref /= mp.gamma(a)
        assert _rel(_f(specfun.tricomi_u(a, b, z)), float(ref)) < 1e-8


@pytest.mark.parametrize("a,b,z", [
    (0.44, 13.88, 0.01), (0.44, 13.88, 3.0), (0.44, 13.88, 80.0), (1.44, 14.88, 1e3),
    (0.5, 0.5, 2.0), (2.0, 3.0, 0.7), (0.2, 1.0, 0.3), (7.3, 2.2, 1.5), (25.0, 40.0, 0.9),
])
def test_tricomi_u_matches_mpmath(a, b, z):
    val, sign = specfun.log_tricomi_u(a, b, np.array([z]))
    ref = float(mp.log(mp.hyperu(a, b, z)))
    assert sign[0] == 1
    assert abs(val[0] - ref) < 1e-12 * max(1.0, abs(ref))


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.01, 20.0), b=st.floats(0.05, 40.0), lz=st.floats(-3.0, 8.0))
def test_log_tricomi_u_property_against_mpmath(a, b, lz):
    z = math.exp(lz)
    val, _ = specfun.log_tricomi_u(a, b, np.array([z]))
    ref = float(mp.log(mp.hyperu(a, b, z)))
    assert abs(val[0] - ref) < 1e-11 * max(1.0, abs(ref))


def test_tricomi_u_deriv_cases():
    z = np.linspace(0.5, 5, 7)
    assert np.all(specfun.tricomi_u_deriv(0.0, 1.3, z) == 0.0)
    d = _f(specfun.tricomi_u_deriv(3.0, 4.0, 2.0))
    assert _rel(d, -3 * _f(specfun.tricomi_u(4.0, 5.0, 2.0))) < 1e-13
    h = 1e-4
    fd = (_f(specfun.tricomi_u(3.0, 4.0, 2.0 + h)) - _f(specfun.tricomi_u(3.0, 4.0, 2.0 - h))) / (2 * h)
    assert _rel(d, fd) < 1e-8
    assert _rel(_f(specfun.tricomi_u_deriv(1.0, 2.0, 100.0)), -1e-4) < 0.05


def test_tricomi_u_rejects_nonpositive_argument():
    with pytest.raises(DomainError):
        specfun.tricomi_u(1.0, 2.0, -1.0)


# ------------------------------------------------------ orthogonal polynomials


def test_hermite_low_orders():
    assert _f(specfun.hermite(0, 0.3)) == 1.0
    assert _rel(_f(specfun.hermite(1, 0.7)), 1.4) < 1e-15
    assert _rel(_f(specfun.hermite(2, 1.0)), 2.0) < 1e-15


@pytest.mark.parametrize("n", [3, 7, 20, 45])
def test_hermite_matches_mpmath(n):
    x = np.array([-3.1, -0.4, 0.0, 1.7, 6.0])
    ref = np.array([float(mp.hermite(n, xi)) for xi in x])
    scale = np.abs(ref).max()
    assert np.abs(specfun.hermite(n, x) - ref).max() < 1e-13 * scale


def test_laguerre_low_orders():
    assert _f(specfun.laguerre(0, 2.5, 1.3)) == 1.0
    assert _rel(_f(specfun.laguerre(2, 3.0, 0.0)), 10.0) < 1e-15
    a, x = 0.5, 1.5
    quad = 0.5 * x * x - (a + 2) * x + (a + 1) * (a + 2) / 2
    assert _rel(_f(specfun.laguerre(2, a, x)), quad) < 1e-14


@pytest.mark.parametrize("n,a", [(3, 11.0), (5, 0.5), (9, 2.0), (4, 10.88)])
def test_laguerre_matches_mpmath(n, a):
    x = np.array([0.01, 1.0, 7.5, 30.0])
    ref = np.array([float(mp.laguerre(n, a, xi)) for xi in x])
    assert np.all(np.abs(specfun.laguerre(n, a, x) - ref) < 1e-12 * np.maximum(1, np.abs(ref)))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 12), x=st.floats(-4.0, 4.0))
def test_hermite_recurrence_property(n, x):
    h_next = _f(specfun.hermite(n + 1, x))
    rhs = 2 * x * _f(specfun.hermite(n, x)) - 2 * n * _f(specfun.hermite(n - 1, x))
    assert abs(h_next - rhs) <= 1e-12 * max(1.0, abs(h_next), abs(rhs))
