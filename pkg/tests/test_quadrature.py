import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sint

from eulercells.quadrature import (
    NonConvergence,
    NonFiniteSample,
    QuadratureSpec,
    gk15,
    integrate,
)


def test_gk15_exact_for_polynomials():
    # Kronrod 15 integrates degree 22 exactly
    v, _ = gk15(lambda x: x**22, 0.0, 1.0)
    assert v == pytest.approx(1 / 23, rel=1e-14)


@pytest.mark.parametrize(
    "f, a, b",
    [
        (math.sin, 0.0, math.pi),
        (lambda x: math.exp(-x * x), -3.0, 2.0),
        (lambda x: 1 / (1 + 25 * x * x), -1.0, 1.0),
        (lambda x: math.sqrt(x), 0.0, 1.0),
        (lambda x: math.log(x), 1e-300, 1.0),
        (lambda x: math.cos(40 * x) * x, 0.0, 2.0),
    ],
)
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_against_scipy(f, a, b):
    ref, _ = sint.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=500)
    res = integrate(f, a, b, QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14))
    assert res.converged
    assert res.value == pytest.approx(ref, rel=1e-10, abs=1e-12)
    assert abs(res.value - ref) <= max(res.error, 1e-13)


def test_oscillatory_exact():
    exact = 2 * math.sin(80) / 40 + (math.cos(80) - 1) / 1600
    res = integrate(lambda x: x * np.cos(40 * x), 0.0, 2.0, vectorized=True)
    assert res.value == pytest.approx(exact, rel=1e-11)


def test_vectorized_matches_scalar():
    f = lambda x: np.cos(x) * np.exp(-x)
    a = integrate(f, 0.0, 5.0, vectorized=True)
    b = integrate(lambda x: math.cos(x) * math.exp(-x), 0.0, 5.0)
    assert a.value == b.value


def test_deterministic():
    f = lambda x: np.abs(np.sin(7 * x)) ** 0.3
    r1 = integrate(f, 0.0, 3.0, vectorized=True)
    r2 = integrate(f, 0.0, 3.0, vectorized=True)
    assert r1 == r2


def test_breakpoints_help_kinks():
    f = lambda x: np.abs(x - 0.3141)
    exact = (0.3141**2 + (1 - 0.3141) ** 2) / 2
    res = integrate(f, 0.0, 1.0, vectorized=True, points=(0.3141,))
    assert res.intervals <= 4
    assert res.value == pytest.approx(exact, rel=1e-14)


def test_endpoint_offset_power_law_singularity():
    # x^(-1/2) blows up at 0 and must not be sampled there
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-15, endpoint_offset=1e-6)

    def f(x):
        if np.any(x <= 0):
            raise AssertionError("sampled at the singular end")
        return x**-0.5

    res = integrate(f, 0.0, 1.0, spec, vectorized=True)
    assert res.value == pytest.approx(2.0, rel=1e-9)


def test_non_finite_sample():
    with pytest.raises(NonFiniteSample):
        integrate(lambda x: 1 / x if x != 0.5 else math.inf, 0.0, 1.0)


def test_non_convergence_flag_and_strict():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_intervals=5)
    f = lambda x: math.sin(1 / x) if x else 0.0
    res = integrate(f, 1e-4, 1.0, spec)
    assert not res.converged
    with pytest.raises(NonConvergence):
        integrate(f, 1e-4, 1.0, spec, strict=True)


def test_degenerate_interval():
    assert integrate(math.sin, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        integrate(math.sin, 2.0, 1.0)


def test_result_unpacks():
    value, error = integrate(math.cos, 0.0, 1.0)
    assert value == pytest.approx(math.sin(1.0), rel=1e-14)
    assert error >= 0


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=8),
    st.floats(min_value=-2, max_value=0),
    st.floats(min_value=0.1, max_value=3),
)
def test_polynomials_exact(coeffs, a, width):
    b = a + width
    p = np.polynomial.Polynomial(coeffs)
    exact = p.integ()(b) - p.integ()(a)
    res = integrate(p, a, b, vectorized=True)
    assert res.value == pytest.approx(exact, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-3, max_value=3), st.floats(min_value=0.1, max_value=2), st.floats(min_value=0.1, max_value=2))
def test_additivity(a, w1, w2):
    f = lambda x: np.sin(3 * x) + x * x
    m, b = a + w1, a + w1 + w2
    whole = integrate(f, a, b, vectorized=True).value
    parts = integrate(f, a, m, vectorized=True).value + integrate(f, m, b, vectorized=True).value
    assert whole == pytest.approx(parts, rel=1e-11, abs=1e-12)
