import math

import numpy as np
import pytest

from eulercells.criteria import (
    INTERIOR_THRESHOLD,
    ORIGIN_THRESHOLD,
    CriterionError,
    NotACriticalPoint,
    NotIsochronal,
    ZeroVelocityAtOrigin,
    hardy_ratio_interior,
    hardy_ratio_origin,
    interior_extremum,
    interior_test_function,
    isochronal,
    origin_extremum,
    origin_test_function,
    v_second_derivative_origin,
)
from eulercells.index import Verdict, index_value, minimize_over_alpha
from eulercells.profiles import make_general, make_rotational


def interior_sphere():
    return make_rotational("sin(r)", "9/8 - sqrt(2)*cos(r) + cos(r)^2", math.pi / 2)


def origin_general():
    return make_general("r", "5 + r^2/2", "1", "r^2 - r^4/8", 1.0)


def test_thresholds():
    assert INTERIOR_THRESHOLD == 9 / 16
    assert ORIGIN_THRESHOLD == 9 / 4


def test_isochronal_dichotomy(sphere, flat_disc):
    assert isochronal(sphere).verdict is Verdict.CERTIFIED
    hyper = make_rotational("sinh(r)", "1", 1.0)
    assert isochronal(hyper).verdict is Verdict.CERTIFIED
    assert isochronal(flat_disc).verdict is Verdict.INCONCLUSIVE
    torus = make_rotational("1", "1", 1.0, pole=False)
    assert isochronal(torus).verdict is Verdict.INCONCLUSIVE
    with pytest.raises(NotIsochronal):
        isochronal(make_rotational("sin(r)", "1 + r", math.pi))


def test_interior_example_ratio():
    rep = interior_extremum(interior_sphere(), math.pi / 4)
    assert rep.witness["ratio"] == pytest.approx(5 / 8, abs=1e-10)
    assert rep.lhs == pytest.approx(5 / 8, abs=1e-10)
    assert rep.verdict is Verdict.CERTIFIED
    assert rep.holds()


def test_interior_refines_nearby_guess():
    rep = interior_extremum(interior_sphere(), 0.8)
    assert rep.witness["r0"] == pytest.approx(math.pi / 4, abs=1e-12)


def test_interior_flat_and_monotone():
    flat = make_rotational("r", "2 - (r - 0.5)^2", 1.0)
    assert interior_extremum(flat, 0.5).verdict is Verdict.INCONCLUSIVE
    mono = make_rotational("sin(r)", "7/4 + 4*cos(r) + cos(r)^2", math.pi)
    for r0 in (0.5, 1.5, 2.5):
        with pytest.raises(NotACriticalPoint):
            interior_extremum(mono, r0)


def test_origin_example():
    rep = origin_extremum(origin_general())
    assert rep.lhs == pytest.approx(27.0, abs=1e-10)
    assert rep.rhs == pytest.approx(30.0, abs=1e-10)
    assert rep.verdict is Verdict.CERTIFIED
    assert v_second_derivative_origin(origin_general()) == pytest.approx(-1.5, abs=1e-10)


def test_origin_rotational():
    p = make_rotational("sin(r)", "3 + r^2", math.pi / 2)
    rep = origin_extremum(p)
    assert rep.witness["ratio"] == pytest.approx(1.5, abs=1e-12)
    assert rep.verdict is Verdict.INCONCLUSIVE
    flat = make_rotational("r", "3 + r^2", 1.0)
    assert origin_extremum(flat).verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("u", ["3 + r^2", "2 - 0.3*r^2", "1 + 5*r^2 + r^4"])
def test_v2_rotational_identity(u):
    p = make_rotational("sin(r)", u, 1.0)
    j = p.u.jet(0.0, 2)
    expected = -1.0 * j.c[0] + j.d(2)
    assert v_second_derivative_origin(p) == pytest.approx(expected, abs=1e-10)


def test_v2_constant_flat():
    # u constant is rejected before v'' is formed
    with pytest.raises(CriterionError):
        v_second_derivative_origin(make_rotational("r", "2", 1.0))


def test_origin_errors():
    with pytest.raises(ZeroVelocityAtOrigin):
        origin_extremum(make_rotational("sin(r)", "r^2", 1.0))
    with pytest.raises(NotACriticalPoint):
        origin_extremum(make_rotational("sin(r)", "1 + r", 1.0))
    with pytest.raises(CriterionError):
        origin_extremum(make_rotational("1", "1 + r^2", 1.0, pole=False))


@pytest.mark.parametrize("delta", [0.1, 0.2])
def test_hardy_ratios(delta):
    assert hardy_ratio_interior(delta) == pytest.approx(9 / 4 + 4 * delta / 3 + delta**2 / 3, abs=1e-6)
    assert hardy_ratio_origin(delta) == pytest.approx(delta**2 + delta + 4, abs=1e-6)


def test_hardy_ratios_approach_constants():
    vals = [hardy_ratio_interior(d) for d in (0.3, 0.2, 0.1, 0.05)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 9 / 4


def _direct_minimum(p, xi):
    # the three-sample fit cancels badly here, so evaluate I at alpha* directly
    q = minimize_over_alpha(p, xi)
    return q.alpha_star, index_value(p, xi, q.alpha_star)


def test_interior_family_goes_negative():
    p = interior_sphere()
    alpha, res = _direct_minimum(p, interior_test_function(math.pi / 4, 0.1, 0.1, 0.05))
    assert alpha == pytest.approx(p.u(math.pi / 4), rel=1e-3)
    assert res.converged
    assert res.value < -100 * res.error


def test_origin_family_goes_negative():
    p = origin_general()
    alpha, res = _direct_minimum(p, origin_test_function(0.3, 0.1, 0.05))
    assert alpha == pytest.approx(5.0, rel=1e-4)
    assert res.converged
    assert res.value < -100 * res.error


def test_test_functions_vanish_at_ends():
    xi = interior_test_function(0.5, 0.1)
    assert float(xi.xi(0.4)) == pytest.approx(0.0, abs=1e-14)
    assert float(xi.xi(0.6)) == pytest.approx(0.0, abs=1e-14)
    assert float(xi.xi(0.5)) > 0
    xo = origin_test_function(0.3)
    assert float(xo.xi(0.0)) == 0.0
    assert float(xo.xi(0.3)) == pytest.approx(0.0, abs=1e-14)
    grid = np.linspace(0.01, 0.29, 15)
    assert np.all(np.asarray(xo.xi(grid)) > 0)


def test_report_as_dict():
    d = origin_extremum(origin_general()).as_dict()
    assert d["criterion"] == "OriginExtremum"
    assert d["relation"] == "<"
    assert d["verdict"] == "ConjugatePointCertified"
