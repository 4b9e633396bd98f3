"""Closed-form conjugate-point criteria derived from the index form.

Three situations are covered: isochronal flows (u constant), an interior
critical radius of u, and a critical point of u at the pole.  Each returns a
:class:`CriterionReport` holding both sides of the decisive inequality.

The near-optimal Hardy test families used to realise the local criteria are
exposed as well, so the criteria can be cross-checked against the index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .index import TestFunctionXi, Verdict
from .jet import Jet, divide
from .profiles import Component, RadialProfile
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "CriterionReport",
    "CriterionError",
    "NotIsochronal",
    "NotACriticalPoint",
    "DegenerateCritical",
    "ZeroVelocityAtOrigin",
    "DegenerateSecondDerivative",
    "isochronal",
    "interior_extremum",
    "origin_extremum",
    "v_second_derivative_origin",
    "interior_test_function",
    "origin_test_function",
    "hardy_ratio_interior",
    "hardy_ratio_origin",
    "INTERIOR_THRESHOLD",
    "ORIGIN_THRESHOLD",
]

INTERIOR_THRESHOLD = 9.0 / 16.0
ORIGIN_THRESHOLD = 9.0 / 4.0
MARGIN = 1e-6
_CAP = 1e-3


class CriterionError(ValueError):
    pass


class NotIsochronal(CriterionError):
    pass


class NotACriticalPoint(CriterionError):
    pass


class DegenerateCritical(CriterionError):
    pass


DegenerateSecondDerivative = DegenerateCritical


class ZeroVelocityAtOrigin(CriterionError):
    pass


@dataclass(frozen=True)
class CriterionReport:
    name: str
    lhs: float
    rhs: float
    relation: str
    verdict: Verdict
    witness: dict = field(default_factory=dict)

    def holds(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def as_dict(self) -> dict:
        out = {"criterion": self.name, "lhs": self.lhs, "relation": self.relation, "rhs": self.rhs}
        out.update(self.witness)
        out["verdict"] = str(self.verdict)
        return out


def _strict(lhs: float, rhs: float, greater: bool) -> bool:
    gap = lhs - rhs if greater else rhs - lhs
    return gap > MARGIN * max(abs(lhs), abs(rhs), 1e-300)


# isochronal ---------------------------------------------------------------


def isochronal(p: RadialProfile, points: int = 201, tol: float = 1e-8) -> CriterionReport:
    """Certified iff d/dr(G'/phi) is not identically zero on the cell."""
    grid = np.linspace(0.0, p.R, points)[1:-1]
    u = np.broadcast_to(np.asarray(p.u(np.linspace(0.0, p.R, points)), dtype=float), (points,))
    u0 = float(u[0])
    if u0 == 0 or np.max(np.abs(u - u0)) > 1e-12 * (1 + abs(u0)):
        raise NotIsochronal("u is not constant on the cell")
    phi = p.phi.jet(grid, 2)
    G = p.G.jet(grid, 3)
    with np.errstate(all="ignore"):
        ratio = divide(G.deriv(), phi, strict=True)
    slope = np.broadcast_to(ratio.c[1], grid.shape)
    level = np.broadcast_to(np.abs(ratio.c[0]), grid.shape)
    worst = int(np.argmax(np.abs(slope)))
    lhs = float(abs(slope[worst]))
    rhs = tol * (1.0 + float(np.max(level)))
    witness = {"r_max": float(grid[worst]), "u": u0}
    if p.rotational:
        k = -np.broadcast_to(phi.c[2] * 2.0, grid.shape) / np.broadcast_to(phi.c[0], grid.shape)
        witness["kappa_max_abs"] = float(np.max(np.abs(k)))
    verdict = Verdict.CERTIFIED if lhs > rhs else Verdict.INCONCLUSIVE
    return CriterionReport("Isochronal", lhs, rhs, ">", verdict, witness)


# interior critical radius -------------------------------------------------


def _du(p: RadialProfile, r: float) -> float:
    return float(p.u.jet(r, 1).c[1])


def _refine_critical(p: RadialProfile, r0: float, window: float = 0.05) -> float:
    if abs(_du(p, r0)) <= 1e-10:
        return r0
    lo, hi = max(r0 - window, 0.0), min(r0 + window, p.R)
    xs = np.linspace(lo, hi, 41)
    ds = np.array([_du(p, float(x)) for x in xs])
    candidates = [i for i in range(40) if ds[i] == 0 or ds[i] * ds[i + 1] < 0]
    if not candidates:
        raise NotACriticalPoint(f"u' does not vanish near r = {r0!r}")
    i = min(candidates, key=lambda j: abs(0.5 * (xs[j] + xs[j + 1]) - r0))
    a, b = float(xs[i]), float(xs[i + 1])
    fa = ds[i]
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = _du(p, m)
        if fm == 0 or b - a < 1e-15:
            a = b = m
            break
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def interior_extremum(p: RadialProfile, r0: float) -> CriterionReport:
    """Criterion at an isolated interior critical radius r0 of u.

    lhs = -(u phi / (G u'')) * d/dr(G'/(2 phi)) at r0, certified when it
    exceeds 9/16.  For G = phi^2 this is kappa u / u''.
    """
    if not 0.0 < r0 < p.R:
        raise NotACriticalPoint(f"r0 = {r0!r} is not inside (0, {p.R})")
    r = _refine_critical(p, float(r0))
    if not 0.0 < r < p.R:
        raise NotACriticalPoint(f"refined critical radius {r!r} left the cell")
    uj = p.u.jet(r, 2)
    if abs(uj.c[1]) > 1e-10:
        raise NotACriticalPoint(f"|u'({r!r})| = {abs(uj.c[1])!r} exceeds 1e-10")
    u0, d2u = float(uj.c[0]), float(uj.d(2))
    if abs(d2u) < 1e-10 * (1 + abs(u0)):
        raise DegenerateCritical(f"u''({r!r}) vanishes")
    phi = p.phi.jet(r, 2)
    G = p.G.jet(r, 3)
    kfun = divide(G.deriv(), phi * 2.0, strict=True)
    K = float(kfun.c[1])
    phi0, G0 = float(phi.c[0]), float(G.c[0])
    lhs = -u0 * phi0 * K / (G0 * d2u)
    witness = {
        "r0": r,
        "u": u0,
        "u2": d2u,
        "K": K,
        "lhs_phi_form": -u0 * K / (phi0 * d2u),
    }
    if p.rotational:
        witness["kappa"] = -float(phi.d(2)) / phi0
        witness["ratio"] = witness["kappa"] * u0 / d2u
    verdict = Verdict.CERTIFIED if _strict(lhs, INTERIOR_THRESHOLD, True) else Verdict.INCONCLUSIVE
    return CriterionReport("InteriorExtremum", lhs, INTERIOR_THRESHOLD, ">", verdict, witness)


# pole ---------------------------------------------------------------------


def _origin_data(p: RadialProfile) -> dict:
    if not p.pole:
        raise CriterionError("the origin criterion needs a profile with a pole at r = 0")
    u = p.u.jet(0.0, 4)
    phi = p.phi.jet(0.0, 4)
    G = p.G.jet(0.0, 4)
    E0 = float(p.E(0.0))
    data = {
        "u": float(u.c[0]),
        "u1": float(u.d(1)),
        "u2": float(u.d(2)),
        "phi1": float(phi.d(1)),
        "phi3": float(phi.d(3)),
        "G2": float(G.d(2)),
        "G4": float(G.d(4)),
        "E": E0,
    }
    scale = 1.0 + abs(data["u"])
    if abs(data["u"]) < 1e-12:
        raise ZeroVelocityAtOrigin("u(0) = 0")
    if abs(data["u1"]) > 1e-10 * scale:
        raise NotACriticalPoint(f"u'(0) = {data['u1']!r} is not zero")
    if abs(data["u2"]) < 1e-10 * scale:
        raise DegenerateSecondDerivative("u''(0) vanishes")
    return data


def v_second_derivative_origin(p: RadialProfile) -> float:
    d = _origin_data(p)
    num = d["u"] * d["phi1"] * d["G4"] - d["u"] * d["phi3"] * d["G2"] + 3 * d["u2"] * d["phi1"] * d["G2"]
    return num / (6 * d["phi1"] ** 2)


def origin_extremum(p: RadialProfile) -> CriterionReport:
    """Criterion at a critical point of u at the pole.

    Certified when 3E(0) + 12G''(0) < (2u(0)/u''(0)) (phi'''(0) G''(0)/phi'(0) - G''''(0)).
    """
    d = _origin_data(p)
    lhs = 3 * d["E"] + 12 * d["G2"]
    c = 2 * d["u"] / d["u2"]
    rhs = c * (d["phi3"] * d["G2"] / d["phi1"] - d["G4"])
    witness = dict(d)
    witness["rhs_without_G2"] = c * (d["phi3"] / d["phi1"] - d["G4"])
    witness["v2"] = v_second_derivative_origin(p)
    if p.rotational:
        kappa0 = -d["phi3"] / d["phi1"]
        witness["kappa"] = kappa0
        witness["ratio"] = kappa0 * d["u"] / d["u2"]
    verdict = Verdict.CERTIFIED if _strict(lhs, rhs, False) else Verdict.INCONCLUSIVE
    return CriterionReport("OriginExtremum", lhs, rhs, "<", verdict, witness)


# near-optimal Hardy families ---------------------------------------------


def _interior_zeta(delta: float, beta: float):
    p = -1.5 + delta

    def zeta(x, order):
        s = x
        a = np.abs(s.c[0])
        capped = a < beta
        base = Jet([np.where(capped, beta, a)] + [np.where(capped, 0.0, np.sign(s.c[0]) * ck) for ck in s.c[1:]])
        one = 1.0 - s * s
        return one * one * base**p

    return zeta


def interior_test_function(r0: float, eps: float, delta: float = 0.1, beta: float = _CAP) -> TestFunctionXi:
    """xi(r) = zeta((r - r0)/eps) with zeta(s) = (1-s^2)^2 max(|s|, beta)^(delta - 3/2)."""
    zeta = _interior_zeta(delta, beta)

    def xi(x, order):
        return zeta((Jet.variable(x, order) - r0) * (1.0 / eps), order)

    label = f"interior(r0={r0!r}, eps={eps!r}, delta={delta!r})"
    return TestFunctionXi(Component(xi, label), r0 - eps, r0 + eps, (r0 - beta * eps, r0, r0 + beta * eps))


def _origin_zeta(delta: float, beta: float):
    p = -2.0 + delta
    slope = beta**p / beta

    def zeta(s):
        a = s.c[0]
        if np.ndim(a) == 0:
            if a < beta:
                return s * (slope * (1.0 - beta))
            return s**p * (1.0 - s)
        low = a < beta
        safe = Jet([np.where(low, 1.0, a)] + s.c[1:])
        far = safe**p * (1.0 - safe)
        near = s * (slope * (1.0 - beta))
        return Jet(np.where(low, n, f) for n, f in zip(near.c, far.c))

    return zeta


def origin_test_function(eps: float, delta: float = 0.1, beta: float = _CAP) -> TestFunctionXi:
    """xi(r) = zeta(r/eps): zeta(s) = s^(delta-2)(1-s), replaced by a linear ramp for s < beta."""
    zeta = _origin_zeta(delta, beta)

    def xi(x, order):
        return zeta(Jet.variable(x, order) * (1.0 / eps))

    label = f"origin(eps={eps!r}, delta={delta!r})"
    return TestFunctionXi(Component(xi, label), 0.0, eps, (beta * eps,))


_HARDY_SPEC = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-300, endpoint_offset=1e-9, max_intervals=6000)


def _weighted_ratio(zjet, a: float, b: float, w_num: int, w_den: int, spec=_HARDY_SPEC) -> float:
    def num(s):
        z = zjet(s)
        return s**w_num * z.c[1] ** 2

    def den(s):
        z = zjet(s)
        return s**w_den * z.c[0] ** 2

    with np.errstate(all="ignore"):
        top = integrate(num, a, b, spec, vectorized=True, strict=True).value
        bottom = integrate(den, a, b, spec, vectorized=True, strict=True).value
    return top / bottom


def hardy_ratio_interior(delta: float) -> float:
    """int s^4 zeta'^2 / int s^2 zeta^2 over [-1, 1] for zeta = (1-s^2)^2 |s|^(delta-3/2).

    The family is even, so both integrals are twice their value on [0, 1].
    """
    p = -1.5 + delta

    def z(s):
        x = Jet.variable(s, 1)
        one = 1.0 - x * x
        return one * one * x**p

    return _weighted_ratio(z, 0.0, 1.0, 4, 2)


def hardy_ratio_origin(delta: float) -> float:
    """int s^5 zeta'^2 / int s^3 zeta^2 over [0, 1] for zeta = s^(delta-2) (1-s)."""
    p = -2.0 + delta

    def z(s):
        x = Jet.variable(s, 1)
        return x**p * (1.0 - x)

    return _weighted_ratio(z, 0.0, 1.0, 5, 3)
