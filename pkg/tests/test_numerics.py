import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from susyritus import FieldConfig, SeedSystem, specfun
from susyritus.errors import ConvergenceError, StepUnderflow, TailError
from susyritus.numerics import (
    Grid,
    count_nodes,
    first_derivative,
    gram_matrix,
    integrate,
    make_grid,
    second_derivative,
    sup_residual,
)


# --------------------------------------------------------------- quadrature


def test_integrate_gaussian():
    val = integrate(lambda x: np.exp(-x * x), (-10, 10), tol=1e-14)
    assert abs(val - math.sqrt(math.pi)) < 1e-13


def test_integrate_linear():
    assert abs(integrate(lambda x: x, (0, 1)) - 0.5) < 1e-15


def test_integrate_uniform_ground_state_normalization():
    seed = SeedSystem(FieldConfig("uniform", 0.5, 1.0, -0.2, 0.0))
    val = integrate(lambda x: seed.eigenfunction(0, x) ** 2, seed.window(0), tol=1e-14)
    assert abs(val - 1.0) < 1e-10


def test_integrate_vector_valued():
    val = integrate(lambda x: np.array([np.sin(x), np.cos(x)]), (0, math.pi), tol=1e-14)
    assert np.allclose(val, [2.0, 0.0], atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(0, 8), lo=st.floats(-3, 0), width=st.floats(0.1, 5))
def test_integrate_polynomials_property(n, lo, width):
    hi = lo + width
    exact = (hi ** (n + 1) - lo ** (n + 1)) / (n + 1)
    assert abs(integrate(lambda x: x ** n, (lo, hi), tol=1e-14) - exact) < 1e-12 * max(1, abs(exact))


def test_integrate_tail_check():
    with pytest.raises(TailError):
        integrate(lambda x: np.exp(-x * x), (-1, 1), check_tails=True)


def test_integrate_rejects_bad_window_and_nonfinite():
    with pytest.raises(ValueError):
        integrate(lambda x: x, (1, 0))
    with pytest.raises(ConvergenceError):
        integrate(lambda x: np.where(x > 0, np.inf, 0.0), (-1, 1))


# ------------------------------------------------------------- derivatives


def test_second_derivative_exact_on_quadratic():
    x = np.linspace(-3, 3, 13)
    d2, _ = second_derivative(lambda y: y * y, x)
    assert np.allclose(d2, 2.0, atol=1e-6)


def test_second_derivative_odd_function_at_origin():
    d2, _ = second_derivative(np.sin, np.array([0.0]))
    assert abs(d2[0]) < 1e-10


def test_second_derivative_gaussian_inflection():
    d2, _ = second_derivative(lambda y: np.exp(-y * y / 2), np.array([1.0]))
    assert abs(d2[0]) < 1e-8


def test_second_derivative_step_underflow():
    rough = lambda y: np.sign(np.sin(1e9 * y)) * 1e3  # noqa: E731
    with pytest.raises(StepUnderflow):
        second_derivative(rough, np.array([0.1]), tol=1e-12)


@settings(max_examples=25, deadline=None)
@given(x=st.floats(-5, 5), k=st.floats(0.1, 3))
def test_derivatives_of_sine_property(x, k):
    xs = np.array([x])
    d1 = first_derivative(lambda y: np.sin(k * y), xs)[0]
    d2, _ = second_derivative(lambda y: np.sin(k * y), xs)
    assert abs(d1 - k * math.cos(k * x)) < 1e-9
    assert abs(d2[0] + k * k * math.sin(k * x)) < 1e-7


# ------------------------------------------------------------ nodes, Gram


def test_count_nodes():
    assert count_nodes(np.ones(50)) == 0
    eta = np.linspace(-5, 5, 2001)
    assert count_nodes(specfun.hermite(3, eta) * np.exp(-eta * eta / 2)) == 3
    assert count_nodes(np.zeros(10)) == 0


def test_gram_single_function():
    g = gram_matrix([lambda x: np.exp(-x * x / 2) / math.pi ** 0.25], (-12, 12))
    assert abs(g[0, 0] - 1.0) < 1e-12


def test_gram_uniform_seed_states():
    seed = SeedSystem(FieldConfig("uniform", 0.5, 1.0, -0.2, 0.0))
    fns = [lambda x, n=n: seed.eigenfunction(n, x) for n in range(4)]
    g = gram_matrix(fns, seed.window(3))
    assert np.abs(g - np.eye(4)).max() < 1e-6


def test_gram_mixed_seed_and_transformed(uniform_system):
    seed = uniform_system.seed
    fns = [lambda x: seed.eigenfunction(1, x), lambda x: uniform_system.eigenfunction(0, x)]
    # F_1 (k = 1) is not an eigenfunction of the same operator as F^(1)_0, so
    # only the self-overlaps are fixed; the transformed states are mutually orthogonal
    g = gram_matrix(fns, uniform_system.window)
    assert abs(g[0, 0] - 1) < 1e-10 and abs(g[1, 1] - 1) < 1e-10
    fns = [lambda x: uniform_system.eigenfunction(0, x), lambda x: uniform_system.eigenfunction(2, x)]
    g = gram_matrix(fns, uniform_system.window)
    assert abs(g[0, 1]) < 1e-6


# ------------------------------------------------------------------- grids


def test_grid_and_residual_report():
    grid = make_grid((-1, 1), 101)
    assert isinstance(grid, Grid)
    assert abs(grid.spacing - 0.02) < 1e-15
    assert grid.samples().size == 101
    rep = sup_residual("r", np.array([1e-9, -2e-9]), 2.0, grid)
    assert rep.relative == pytest.approx(1e-9)
    assert rep.passes(1e-8) and not rep.passes(1e-10)
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        Grid(1.0, 0.0, 32)
