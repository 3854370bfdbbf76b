"""In-package incomplete gamma and quadrature, cross-checked against scipy."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sp_integrate
from scipy.special import gammainc, gammaincc

from kendall_walk.quadrature import QuadratureError, integrate, left_limit, stieltjes_midpoint
from kendall_walk.special import gammainc_lower, gammainc_upper


@given(a=st.floats(0.05, 60.0), x=st.floats(0.0, 200.0))
def test_incomplete_gamma_matches_scipy(a, x):
    assert gammainc_lower(a, x) == pytest.approx(gammainc(a, x), rel=1e-12, abs=1e-14)
    assert gammainc_upper(a, x) == pytest.approx(gammaincc(a, x), rel=1e-11, abs=1e-300)


def test_incomplete_gamma_vectorized_and_edges():
    x = np.array([0.0, 0.5, 3.0, 50.0])
    np.testing.assert_allclose(gammainc_lower(2.5, x), gammainc(2.5, x), rtol=1e-13, atol=1e-15)
    assert gammainc_lower(1.0, 0.0) == 0.0
    assert gammainc_upper(1.0, 0.0) == 1.0
    # far tail keeps relative accuracy where 1 - P would underflow
    assert gammainc_upper(2.0, 700.0) == pytest.approx(gammaincc(2.0, 700.0), rel=1e-10)


@pytest.mark.parametrize("f, a, b", [
    (np.sin, 0.0, math.pi),
    (lambda x: np.sqrt(x), 0.0, 1.0),
    (lambda x: np.exp(-x * x), -3.0, 4.0),
    (lambda x: x ** -0.5, 0.0, 2.0),
])
def test_integrate_matches_scipy(f, a, b):
    ref, _ = sp_integrate.quad(f, a, b, epsabs=1e-13, limit=200)
    val, err = integrate(f, a, b, abs_tol=1e-12)
    assert val == pytest.approx(ref, abs=1e-10)
    assert err <= 1e-10


def test_integrate_uses_breakpoints_for_kinks():
    f = lambda x: np.abs(x - 0.3)
    val, _ = integrate(f, 0.0, 1.0, breakpoints=(0.3,))
    assert val == pytest.approx(0.045 + 0.245, abs=1e-14)


def test_integrate_reports_failure():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(1.0 / x) / x ** 2, 1e-6, 1.0, abs_tol=1e-14, limit=5)


def test_left_limit_is_strictly_below():
    x = np.array([1.0, 2.5, 1e6])
    assert np.all(left_limit(x) < x)


def test_stieltjes_against_step_and_density():
    # K = uniform cdf plus an atom of 1/2 at 0.5; int y dK = 1/4 + 1/4
    K_right = lambda z: 0.5 * np.clip(z, 0, 1) + 0.5 * (z >= 0.5)
    K_left = lambda z: 0.5 * np.clip(z, 0, 1) + 0.5 * (z > 0.5)
    val = stieltjes_midpoint(lambda y: y, 0.0, 1.0, K_right, K_left, breakpoints=(0.5,), m=200)
    assert val == pytest.approx(0.5, abs=1e-12)
