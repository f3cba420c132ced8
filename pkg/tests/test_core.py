import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from pgme.analysis import random_K
from pgme.core import (
    GridFunction,
    ProblemSpec,
    QuadratureConfig,
    integral_0_to_inf,
    integral_0_to_x,
    kernel_envelope,
    kernel_f,
    kernel_integrals,
    neumann_gamma_max,
    psi,
    tail_closure,
)

SQRT_PI = math.sqrt(math.pi)


def spec(p=1.0, delta=0.0):
    return ProblemSpec.dirichlet(p, delta)


# ----------------------------------------------------------------------------
# problem and grid types
# ----------------------------------------------------------------------------


def test_problem_spec_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ProblemSpec.robin(0.5, 0.1, 1.0)
    with pytest.raises(ValueError):
        ProblemSpec.robin(1.0, -0.1, 1.0)
    with pytest.raises(ValueError):
        ProblemSpec.robin(1.0, 0.1, 0.0)
    with pytest.raises(ValueError):
        ProblemSpec.neumann(1.0, 1.0, 1.01 * neumann_gamma_max(1.0))
    s = ProblemSpec.neumann(1.0, 1.0, neumann_gamma_max(1.0))
    assert s.kind == "neumann" and s.coefficient == neumann_gamma_max(1.0)


def test_grid_function_validation():
    with pytest.raises(ValueError):
        GridFunction([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        GridFunction([0.0, 2.0, 1.0], [0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        GridFunction([0.1, 1.0, 2.0], [0.0, 0.5, 1.0])
    h = GridFunction([0.0, 1.0, 2.0], [0.2, 0.5, 1.0])
    assert h.in_K() and not h.in_K(star=True)
    assert not GridFunction([0.0, 1.0, 2.0], [0.0, 1.5, 1.0]).in_K()
    with pytest.raises(ValueError):
        GridFunction([0.0, 1.0, 2.0], [-0.1, 0.5, 1.0]).require_K()
    with pytest.raises(ValueError):
        h.values[0] = 0.0  # read-only


def test_quadrature_config_defaults_and_tail_guard():
    q = QuadratureConfig()
    x = q.grid(3.0)
    assert x.size == 2001 and x[-1] == pytest.approx(12.0)
    with pytest.raises(ValueError):
        QuadratureConfig(x_max=3.0).grid(0.0)


# ----------------------------------------------------------------------------
# psi
# ----------------------------------------------------------------------------


def test_psi_examples(grid):
    one = GridFunction.constant(grid, 1.0)
    half = GridFunction.constant(grid, 0.5)
    assert np.all(psi(one, spec(2, 0.5)) == 1.5)
    assert np.all(psi(half, spec(2, 0.0)) == 1.0)
    assert psi(half, spec(2, 1.0), 7) == 1.25


# ----------------------------------------------------------------------------
# kernel
# ----------------------------------------------------------------------------


def test_kernel_for_zero_candidate_is_gaussian(grid):
    f = kernel_f(GridFunction.constant(grid, 0.0), spec(1, 0.7))
    assert f.values[0] == 1.0
    np.testing.assert_allclose(f.values, np.exp(-grid**2), rtol=1e-13, atol=0)


@pytest.mark.parametrize("p,delta", [(1, 0.3), (2, 1.0), (3.5, 2.0)])
def test_kernel_for_unit_candidate_has_closed_form(p, delta):
    x = QuadratureConfig().grid(delta)
    f = kernel_f(GridFunction.constant(x, 1.0), spec(p, delta))
    np.testing.assert_allclose(f.values, np.exp(-x**2 / (1 + delta)) / (1 + delta), rtol=1e-12, atol=0)


def test_kernel_for_erf_candidate_stays_in_envelope():
    delta = 0.1
    x = QuadratureConfig().grid(delta)
    h = GridFunction(x, [math.erf(t) for t in x])
    f = kernel_f(h, spec(1, delta)).values
    lo, hi = kernel_envelope(x, delta)
    assert np.all(f >= lo) and np.all(f <= hi)
    assert np.all(f > 0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.sampled_from([1.0, 1.5, 2.0, 3.0]), delta=st.floats(0.0, 2.0))
def test_kernel_envelope_property(seed, p, delta):
    x = QuadratureConfig(n_points=401).grid(delta)
    h = random_K(np.random.default_rng(seed), x)
    f = kernel_f(h, spec(p, delta)).values
    lo, hi = kernel_envelope(x, delta)
    assert np.all(f >= lo - 1e-15) and np.all(f <= hi + 1e-15)
    assert np.all(f > 0)


# ----------------------------------------------------------------------------
# running integral
# ----------------------------------------------------------------------------


@pytest.mark.parametrize("corrected", [False, True])
def test_running_integral_of_constant_is_exact(corrected):
    x = np.linspace(0.0, 2.0, 41)
    np.testing.assert_allclose(integral_0_to_x(np.ones_like(x), x, corrected), x, rtol=0, atol=1e-15)
    assert np.all(integral_0_to_x(np.zeros_like(x), x, corrected) == 0.0)


def test_running_integral_of_gaussian_matches_independent_quadrature(grid):
    oracle = float(mpmath.quad(lambda t: mpmath.exp(-t * t), [0, 3, 6]))
    cum = integral_0_to_x(np.exp(-grid**2), grid, end_correction=True)
    assert cum[-1] == pytest.approx(oracle, abs=1e-10)
    assert oracle == pytest.approx(SQRT_PI / 2 * math.erf(6.0), abs=1e-15)
    nodes = [0, 100, 333, 1000, 2000]
    for i in nodes:
        assert cum[i] == pytest.approx(SQRT_PI / 2 * math.erf(grid[i]), abs=1e-11)


def test_plain_trapezoid_is_second_order(grid):
    f = np.exp(-grid**2)
    exact = SQRT_PI / 2 * np.array([math.erf(t) for t in grid])
    err_plain = np.max(np.abs(integral_0_to_x(f, grid) - exact))
    err_corr = np.max(np.abs(integral_0_to_x(f, grid, end_correction=True) - exact))
    dx = grid[1]
    assert 1e-2 * dx**2 < err_plain < dx**2
    assert err_corr < 1e-3 * err_plain


def test_running_integral_accepts_grid_function(grid):
    g = GridFunction(grid, np.exp(-grid))
    np.testing.assert_array_equal(integral_0_to_x(g), integral_0_to_x(g.values, grid))
    with pytest.raises(ValueError):
        integral_0_to_x(np.ones(5))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1e3), min_size=3, max_size=50))
def test_plain_running_integral_is_monotone_for_nonnegative_integrands(values):
    x = np.linspace(0.0, 1.0, len(values))
    cum = integral_0_to_x(np.array(values), x)
    assert cum[0] == 0.0
    assert np.all(np.diff(cum) >= 0.0)


# ----------------------------------------------------------------------------
# integral to infinity
# ----------------------------------------------------------------------------


def test_total_mass_of_gaussian(grid):
    assert integral_0_to_inf(GridFunction.constant(grid, 0.0), spec(1, 0.0)) == pytest.approx(SQRT_PI / 2, abs=1e-10)


def test_total_mass_for_constant_conductivity():
    delta = 3.0
    x = QuadratureConfig().grid(delta)
    oracle, _ = integrate.quad(lambda t: math.exp(-t * t / (1 + delta)) / (1 + delta), 0, np.inf, epsabs=1e-14)
    assert oracle == pytest.approx(SQRT_PI / 4, abs=1e-12)
    assert integral_0_to_inf(GridFunction.constant(x, 1.0), spec(2, delta)) == pytest.approx(oracle, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.sampled_from([1.0, 2.0, 3.0]))
def test_total_mass_bounds(seed, p):
    delta = 1.0
    x = QuadratureConfig(n_points=801).grid(delta)
    h = random_K(np.random.default_rng(seed), x)
    a = integral_0_to_inf(h, spec(p, delta))
    assert SQRT_PI / 4 - 1e-12 <= a <= math.sqrt(2) * SQRT_PI / 2 + 1e-12


def test_tail_closure_matches_direct_integration():
    # short grid so the analytic tail carries real mass
    delta, x_max, inner = 0.5, 1.5, 0.6
    a = 1 + delta
    oracle, _ = integrate.quad(
        lambda t: math.exp(-2 * inner - (t * t - x_max**2) / a) / a, x_max, np.inf, epsabs=1e-15
    )
    assert tail_closure(inner, x_max, delta) == pytest.approx(oracle, rel=1e-12)


def test_tail_closure_survives_large_cutoff():
    v = tail_closure(200.0, 40.0, 0.0)
    assert v == 0.0 or math.isfinite(v)
    assert math.isfinite(tail_closure(0.5 * 30.0**2, 30.0, 0.0))


def test_head_and_tail_are_consistent(grid):
    h = GridFunction(grid, [math.erf(t) for t in grid])
    k = kernel_integrals(h, spec(2, 0.4))
    np.testing.assert_allclose(k.head + k.tail, k.total, rtol=0, atol=1e-14)
    assert k.tail[-1] > 0 and np.all(np.diff(k.tail) < 0)


def test_grid_refinement_is_second_order():
    delta, p = 0.5, 2.0
    vals = []
    for n in (251, 501, 1001, 2001):
        x = QuadratureConfig(n_points=n).grid(delta)
        h = GridFunction(x, [math.erf(t) for t in x])
        vals.append(integral_0_to_inf(h, spec(p, delta)))
    diffs = np.abs(np.diff(vals))
    panels = np.array([250, 500, 1000])
    c_fit = diffs[0] * panels[0] ** 2
    assert np.all(diffs <= 1.1 * c_fit * panels.astype(float) ** -2)
    assert diffs[1] / diffs[2] == pytest.approx(4.0, rel=0.05)
