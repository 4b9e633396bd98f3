import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulercells.elliptic import (
    E_complete,
    E_jet,
    E_taylor,
    K_complete,
    K_derivative,
    K_jet,
    K_taylor,
    amplitude,
    jacobi_zeta,
    sn_cn_dn,
)
from eulercells.jet import DomainError, Jet

MODULI = [0.0, 1e-4, 0.1, 0.3, 0.5, 0.8, 0.95, 0.999, 1 - 1e-6]


@pytest.mark.parametrize("k", MODULI)
def test_complete_integrals_against_mpmath(k):
    assert K_complete(k) == pytest.approx(float(mp.ellipk(k * k)), rel=1e-14)
    assert E_complete(k) == pytest.approx(float(mp.ellipe(k * k)), rel=1e-14)


def test_complete_integrals_vectorized():
    ks = np.array([0.1, 0.5, 0.9])
    assert np.allclose(K_complete(ks), [K_complete(float(k)) for k in ks], rtol=1e-15)


def test_legendre_relation():
    # E K' + E' K - K K' = pi/2 with K' the complementary integral
    for k in (0.2, 0.6, 0.9):
        kp = math.sqrt(1 - k * k)
        lhs = E_complete(k) * K_complete(kp) + E_complete(kp) * K_complete(k) - K_complete(k) * K_complete(kp)
        assert lhs == pytest.approx(math.pi / 2, rel=1e-13)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.999])
@pytest.mark.parametrize("tau", [0.0, 0.3, 1.1, 2.7, -1.9])
def test_jacobi_functions_against_mpmath(k, tau):
    m = k * k
    sn, cn, dn = sn_cn_dn(tau, k)
    assert sn == pytest.approx(float(mp.ellipfun("sn", tau, m=m)), abs=1e-14)
    assert cn == pytest.approx(float(mp.ellipfun("cn", tau, m=m)), abs=1e-14)
    assert dn == pytest.approx(float(mp.ellipfun("dn", tau, m=m)), abs=1e-14)


@pytest.mark.parametrize("k", [0.1, 0.5, 0.9, 0.999])
@pytest.mark.parametrize("tau", [0.3, 1.1, 2.7])
def test_zeta_against_mpmath(k, tau):
    m = k * k
    am = amplitude(tau, k)
    assert float(mp.sin(am)) == pytest.approx(float(mp.ellipfun("sn", tau, m=m)), abs=1e-14)
    ref = mp.ellipe(am, m) - mp.ellipe(m) / mp.ellipk(m) * tau
    assert jacobi_zeta(tau, k) == pytest.approx(float(ref), abs=1e-14)


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=-20, max_value=20), st.floats(min_value=0, max_value=0.9999))
def test_identity_suite(tau, k):
    sn, cn, dn = sn_cn_dn(tau, k)
    assert abs(sn * sn + cn * cn - 1) <= 1e-12
    assert abs(dn * dn + k * k * sn * sn - 1) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=3), st.floats(min_value=0.05, max_value=0.99))
def test_derivative_identities(tau, k):
    h = 1e-5
    sp, cp, dp = sn_cn_dn(tau + h, k)
    sm, cm, dm = sn_cn_dn(tau - h, k)
    sn, cn, dn = sn_cn_dn(tau, k)
    assert (sp - sm) / (2 * h) == pytest.approx(cn * dn, abs=1e-8)
    assert (cp - cm) / (2 * h) == pytest.approx(-sn * dn, abs=1e-8)
    dz = (jacobi_zeta(tau + h, k) - jacobi_zeta(tau - h, k)) / (2 * h)
    assert dz == pytest.approx(dn * dn - E_complete(k) / K_complete(k), abs=1e-8)


def test_periodicity():
    for k in (0.3, 0.9):
        K = K_complete(k)
        a = sn_cn_dn(0.4, k)
        b = sn_cn_dn(0.4 + 4 * K, k)
        assert np.allclose(a, b, atol=1e-12)
        assert jacobi_zeta(K, k) == pytest.approx(0.0, abs=1e-14)


def test_modulus_domain():
    with pytest.raises(DomainError):
        sn_cn_dn(0.1, 1.0)


@pytest.mark.parametrize("k0", [0.0, 0.1, 0.25, 0.26, 0.5, 0.9, 0.99])
def test_taylor_coefficients_against_mpmath(k0):
    mp.mp.dps = 40
    try:
        Kf = lambda k: mp.ellipk(k * k)
        Ef = lambda k: mp.ellipe(k * k)
        kt, et = K_taylor(k0, 4), E_taylor(k0, 4)
        for n in range(5):
            kref = mp.diff(Kf, k0, n) / mp.factorial(n)
            eref = mp.diff(Ef, k0, n) / mp.factorial(n)
            assert kt[n] == pytest.approx(float(kref), rel=1e-11, abs=1e-12)
            assert et[n] == pytest.approx(float(eref), rel=1e-11, abs=1e-12)
    finally:
        mp.mp.dps = 15


def test_K_derivative_closed_form():
    for k in (0.2, 0.7):
        expected = (E_complete(k) - (1 - k * k) * K_complete(k)) / (k * (1 - k * k))
        assert K_derivative(k) == pytest.approx(expected, rel=1e-13)


def test_jets_compose_and_vectorize():
    x = Jet.variable(np.array([0.1, 0.5, 0.8]), 2)
    j = K_jet(x)
    for i, k in enumerate((0.1, 0.5, 0.8)):
        assert j.c[0][i] == pytest.approx(K_complete(k), rel=1e-14)
        assert j.c[1][i] == pytest.approx(K_derivative(k), rel=1e-12)
    e = E_jet(Jet.variable(0.5, 1) * 2.0 - 0.5)
    assert e.c[1] == pytest.approx(2 * (E_complete(0.5) - K_complete(0.5)) / 0.5, rel=1e-12)
