import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyritus import FieldConfig, IntertwinedSystem, SeedSystem
from susyritus.errors import (
    LevelError,
    SingularTransformError,
    UnsupportedTransformError,
)
from susyritus.numerics import count_nodes, first_derivative, gram_matrix, integrate, second_derivative


def build(kind="uniform", **kw):
    if kind == "uniform":
        args = dict(B0=0.5, p2=1.0, epsilon1=-0.2, nu1=0.0)
    else:
        args = dict(B0=1.0, p2=5.0, epsilon1=-5.5, nu1=-1.5, alpha=1.0)
    args.update(kw)
    return IntertwinedSystem(SeedSystem(FieldConfig(kind, **args)))


# ----------------------------------------------------------- shifted potential


def test_shifted_potential(uniform_system, exponential_system):
    assert uniform_system.shifted_potential(-2.0) == pytest.approx(-0.3)
    assert exponential_system.shifted_potential(60.0) == pytest.approx(36 + 5.5)
    deg = build(epsilon1=0.0)
    x = np.linspace(-6, 3, 11)
    assert np.array_equal(deg.shifted_potential(x), deg.seed.partner_potential(x, 1))


# ------------------------------------------------------------------------ u1


def test_u1_origin_and_parameters(uniform_system, exponential_system):
    assert uniform_system.a == pytest.approx(0.1)
    assert uniform_system.u1(uniform_system.seed.center) == pytest.approx(1.0)
    root = math.sqrt(41.5)
    assert exponential_system.a == pytest.approx(root - 6, rel=1e-14)
    assert exponential_system.b == pytest.approx(1 + 2 * root, rel=1e-14)


@pytest.mark.parametrize("fixture", ["uniform_system", "exponential_system"])
def test_u1_ode_residual(fixture, request):
    system = request.getfixturevalue(fixture)
    lo, hi = system.window
    x = np.linspace(lo + 0.3 * (hi - lo), hi - 0.3 * (hi - lo), 401)
    # u1 in units of its value at the centre keeps the oracle in range
    ref = system.log_u1(x).mean()

    def u(y):
        return np.exp(system.log_u1(y) - ref)

    d2, _ = second_derivative(u, x)
    scale = np.abs(system.shifted_potential(x) * u(x)).max()
    assert np.abs(-d2 + system.shifted_potential(x) * u(x)).max() < 1e-7 * scale


# ------------------------------------------------------------------------ W1


def test_w1_odd_for_nu1_zero(uniform_system):
    c = uniform_system.seed.center
    assert abs(uniform_system.superpotential(c)) < 1e-15
    d = np.array([0.3, 1.1, 2.5])
    assert np.allclose(uniform_system.superpotential(c + d), -uniform_system.superpotential(c - d),
                       atol=1e-13)


@pytest.mark.parametrize("fixture", ["uniform_system", "exponential_system"])
def test_riccati(fixture, request):
    system = request.getfixturevalue(fixture)
    x = np.linspace(*system.window, 1024)
    w = system.superpotential(x)
    v = system.shifted_potential(x)
    res = w * w + system.superpotential_prime(x) - v
    assert np.abs(res).max() < 1e-8 * (1 + np.abs(v).max())
    assert abs(system.superpotential(1.0) ** 2 + system.superpotential_prime(1.0)
               - system.shifted_potential(1.0)) < 1e-8 * (1 + abs(system.shifted_potential(1.0)))


def test_w1_weak_field_side(exponential_system):
    # rho -> 0: -kappa plus the U-dominated term 2 kappa, so u1 grows like exp(kappa x)
    assert exponential_system.superpotential(40.0) == pytest.approx(exponential_system.kappa, rel=1e-12)


def test_w1_prime_matches_finite_difference(exponential_system):
    x = np.linspace(-4, 8, 61)
    fd = first_derivative(exponential_system.superpotential, x)
    assert np.abs(fd - exponential_system.superpotential_prime(x)).max() < 1e-8 * np.abs(fd).max()


# ------------------------------------------------------------------ V1 and B1


def test_degenerate_case_is_standard_pairing():
    deg = build(epsilon1=0.0)
    x = np.linspace(-7, 3, 41)
    assert np.abs(deg.partner_potential(x) - deg.seed.partner_potential(x, -1)).max() < 1e-8
    assert np.abs(deg.field(x) + deg.seed.field(x)).max() < 1e-12


def test_v1_against_finite_difference_of_log_u1(uniform_system):
    x = np.array([0.0])
    d2, _ = second_derivative(uniform_system.log_u1, x, h=0.02)
    direct = uniform_system.shifted_potential(x) - 2 * d2
    assert uniform_system.partner_potential(x)[0] == pytest.approx(direct[0], rel=1e-8)


def test_v1_merges_with_v0_far_out(uniform_system):
    c = uniform_system.seed.center
    gaps = [abs(uniform_system.partner_potential(c + d) - uniform_system.shifted_potential(c + d))
            / uniform_system.shifted_potential(c + d) for d in (6.0, 12.0, 24.0)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.01


def test_b1_closed_form_agrees(uniform_system):
    x = np.linspace(-8, 4, 257)
    assert np.abs(uniform_system.closed_form_field(x) - uniform_system.field(x)).max() < 1e-8
    assert np.abs(uniform_system.closed_form_superpotential(x)
                  - uniform_system.superpotential(x)).max() < 1e-9


def test_b1_exponential_against_fd(exponential_system):
    x = np.linspace(-5, 5, 201)
    fd = first_derivative(exponential_system.superpotential, x)
    assert np.abs(exponential_system.field(x) - fd).max() < 1e-6 * np.abs(fd).max()


def test_b1_finite_on_figure_window(uniform_system):
    assert np.all(np.isfinite(uniform_system.field(np.linspace(-8, 4, 2001))))


# -------------------------------------------------------------------- spectrum


def test_transformed_spectrum(uniform_system, exponential_system):
    assert uniform_system.spectrum(0) == 0
    assert uniform_system.spectrum(1) == pytest.approx(0.2, abs=1e-15)
    assert exponential_system.spectrum(1) == pytest.approx(5.5, abs=1e-15)
    assert exponential_system.n_levels == 7
    with pytest.raises(LevelError):
        exponential_system.spectrum(-1)


def test_degenerate_spectrum_unsupported():
    deg = build(epsilon1=0.0)
    with pytest.raises(UnsupportedTransformError):
        deg.spectrum(0)
    with pytest.raises(UnsupportedTransformError):
        deg.state(1)


def test_node_in_u1_is_singular():
    cfg = FieldConfig("uniform", 0.5, 1.0, -0.2, 0.0)
    object.__setattr__(cfg, "nu1", 1.5)  # bypass validation to force a node
    with pytest.raises(SingularTransformError):
        IntertwinedSystem(SeedSystem(cfg))


# -------------------------------------------------------------- eigenfunctions


@pytest.mark.parametrize("fixture", ["uniform_system", "exponential_system"])
def test_ground_state_annihilated_and_nodeless(fixture, request):
    system = request.getfixturevalue(fixture)
    x = np.linspace(*system.window, 2048)
    f0 = system.eigenfunction(0, x)
    assert count_nodes(f0) == 0
    lowered = system.lower(f0, x, first_derivative(lambda y: system.eigenfunction(0, y), x))
    assert np.abs(lowered).max() < 1e-8 * np.abs(f0).max()


def test_first_excited_closed_form(uniform_system):
    x = np.linspace(-8, 4, 301)
    closed = uniform_system.closed_form_excited(0, x)
    num = uniform_system.eigenfunction(1, x)
    # same function up to normalization and sign
    ratio = num[np.abs(closed) > 1e-3] / closed[np.abs(closed) > 1e-3]
    assert np.ptp(ratio) < 1e-8 * abs(ratio.mean())
    assert abs(abs(ratio.mean()) - 1) < 1e-6


def test_exponential_excited_closed_form(exponential_system):
    x = np.linspace(-3, 8, 201)
    for n in range(3):
        closed = exponential_system.closed_form_excited_exponential(n, x)
        num = exponential_system.eigenfunction(n + 1, x)
        assert np.abs(closed - num).max() < 1e-8 * np.abs(num).max()


@pytest.mark.parametrize("fixture", ["uniform_system", "exponential_system"])
def test_transformed_orthonormality(fixture, request):
    system = request.getfixturevalue(fixture)
    fns = [lambda x, k=k: system.eigenfunction(k, x) for k in range(6)]
    g = gram_matrix(fns, system.window)
    assert np.abs(g - np.eye(6)).max() < 1e-6


def test_eigenfunction_prime_matches_fd(exponential_system):
    x = np.linspace(-3, 8, 101)
    for level in (0, 2):
        fd = first_derivative(lambda y: exponential_system.eigenfunction(level, y), x)
        an = exponential_system.eigenfunction_prime(level, x)
        assert np.abs(fd - an).max() < 1e-8 * np.abs(an).max()


def test_level_beyond_tower(exponential_system):
    with pytest.raises(LevelError):
        exponential_system.state(7)


@settings(max_examples=12, deadline=None)
@given(frac=st.floats(0.05, 0.95), nu1=st.floats(-0.95, 0.95))
def test_uniform_family_property(frac, nu1):
    """Any admissible (epsilon1, nu1): nodeless u1, Riccati holds, spectrum shifted by -epsilon1."""
    system = build(epsilon1=-frac, nu1=nu1)
    x = np.linspace(*system.window, 257)
    w = system.superpotential(x)
    v = system.shifted_potential(x)
    assert np.abs(w * w + system.superpotential_prime(x) - v).max() < 1e-8 * (1 + np.abs(v).max())
    assert system.spectrum(3) == pytest.approx(2 + frac)
    assert count_nodes(system.eigenfunction(0, x)) == 0
    assert integrate(lambda y: system.eigenfunction(0, y) ** 2, system.window) == pytest.approx(1, abs=1e-8)
