import numpy as np
import pytest
from hypothesis import given, strategies as st

from tdswt import quadrature
from tdswt.errors import QuadratureError


def test_simpson_is_exact_for_cubics():
    t = np.linspace(0, 2, 9)
    f = 1 + t - 3 * t**2 + 2 * t**3
    assert np.isclose(quadrature.integrate(f, t), 2 + 2 - 8 + 8)


def test_time_average_of_constant_and_full_period_sine():
    t = np.linspace(0, 30, 257)
    assert quadrature.time_average(np.full(257, 2.5), t) == pytest.approx(2.5, abs=1e-15)
    assert abs(quadrature.time_average(np.sin(2 * np.pi * t / 30), t)) < 1e-12


def test_simpson_matches_brute_force_riemann():
    t = np.linspace(0, 30, 2049)
    f = lambda x: np.exp(-((x - 12) / 5) ** 2) * np.cos(0.7 * x)  # noqa: E731
    fine = np.linspace(0, 30, 1_000_001)
    mids = 0.5 * (fine[1:] + fine[:-1])
    oracle = np.sum(f(mids)) * (fine[1] - fine[0])
    assert quadrature.integrate(f(t), t) == pytest.approx(oracle, rel=1e-9)


def test_grid_validation():
    with pytest.raises(QuadratureError):
        quadrature.integrate(np.ones(4), np.linspace(0, 1, 4))      # odd interval count
    with pytest.raises(QuadratureError):
        quadrature.integrate(np.ones(5), np.array([0, 0.1, 0.3, 0.4, 0.5]))
    with pytest.raises(QuadratureError):
        quadrature.integrate(np.ones(1), np.zeros(1))


@given(st.integers(1, 40), st.floats(0.1, 5.0))
def test_cumulative_consistent_with_integrate(half, length):
    t = np.linspace(0, length, 2 * half + 1)
    f = np.cos(t) + t**2
    run = quadrature.cumulative(f, t)
    assert run[0] == 0
    assert np.isclose(run[-1], quadrature.integrate(f, t), rtol=1e-13, atol=1e-13)
    exact = np.sin(t) + t**3 / 3
    assert np.allclose(run, exact, atol=1e-2 * length**4 / half**3 + 1e-12)


def test_cumulative_exact_for_quadratics():
    t = np.linspace(0, 3, 13)
    run = quadrature.cumulative(3 * t**2 - t, t)
    assert np.allclose(run, t**3 - t**2 / 2, atol=1e-13)
