"""Cell geometry of the Kolmogorov flows f = -cos(mx) cos(ny) on the flat torus.

In the cell around the origin, X = sin(mx), Y = sin(ny) and the polar
coordinates are X = r cn(tau, r)/dn(tau, r), Y = r sn(tau, r) with
tau = 2 K(r) theta / pi, so the elliptic modulus is the radius itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .elliptic import E_complete, K_complete, K_jet, jacobi_zeta, sn_cn_dn
from .index import IndexQuadratic, TestFunctionXi, Verdict, minimize_over_alpha
from .jet import DomainError, Jet
from .profiles import Component, RadialProfile, make_general
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "R_MAX",
    "KolmogorovCell",
    "cell_profile",
    "J_integral",
    "flow_xy",
    "flow_residual",
    "polar_xy",
    "mbar",
    "mbar_expansion",
    "v11_closed",
    "Q11_closed",
    "Q11_from_v",
    "G_bracket",
    "CellPositivityReport",
    "cell_index_positivity",
    "default_test_functions",
]

R_MAX = 1.0 - 1e-6

_J_SPEC = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-16)


def _check_r(x):
    a = np.asarray(x, dtype=float)
    if np.any(a < 0) or np.any(a > R_MAX):
        raise DomainError(f"Kolmogorov radius must lie in [0, {R_MAX}]")


@lru_cache(maxsize=65536)
def _J_cached(r: float) -> float:
    K = K_complete(r)

    def integrand(tau):
        sn, cn, dn = sn_cn_dn(tau, r)
        zn = jacobi_zeta(tau, r)
        return (sn * dn - cn * zn) ** 2

    return integrate(integrand, 0.0, K, _J_SPEC, vectorized=True, strict=True).value


def J_integral(r):
    """int_0^K(r) [sn dn - cn zn]^2 dtau at modulus r."""
    _check_r(r)
    if np.ndim(r) == 0:
        return _J_cached(float(r))
    flat = [_J_cached(float(v)) for v in np.asarray(r, dtype=float).ravel()]
    return np.array(flat).reshape(np.shape(r))


def _K(x, order):
    return K_jet(Jet.variable(x, order))


def _builtins(m: int, n: int):
    mn = m * n
    s2 = m * m + n * n

    def u(x, order):
        _check_r(x)
        return (0.5 * math.pi * mn) / _K(x, order)

    def phi(x, order):
        _check_r(x)
        r = Jet.variable(x, order)
        return r * _K(x, order) * (2.0 / (math.pi * mn)) / (1.0 - r * r).sqrt()

    def G(x, order):
        _check_r(x)
        r = Jet.variable(x, order)
        K1 = _K(x, order + 1)
        dK = K1.deriv()
        return r * (1.0 - r * r) * K1.truncate(order) * dK * (4.0 * s2 / (mn * mn * math.pi**2))

    def E(x, order):
        _check_r(x)
        K = K_complete(x)
        val = s2 * J_integral(x) / (mn * mn * (1.0 - np.asarray(x) ** 2) ** 2 * K)
        return Jet([val])

    return u, phi, G, E


@dataclass(frozen=True)
class KolmogorovCell:
    m: int
    n: int
    profile: RadialProfile

    def u(self, r):
        return self.profile.u(r)

    def phi(self, r):
        return self.profile.phi(r)

    def G(self, r):
        return self.profile.G(r)

    def E(self, r):
        return self.profile.E(r)

    def omega_expected(self, r):
        """(m^2 + n^2) sqrt(1 - r^2)."""
        return (self.m**2 + self.n**2) * np.sqrt(1.0 - np.asarray(r, dtype=float) ** 2)


@lru_cache(maxsize=64)
def cell_profile(m: int, n: int) -> KolmogorovCell:
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")
    u, phi, G, E = _builtins(int(m), int(n))
    profile = make_general(
        Component(phi, f"phi_{m}{n}"),
        Component(u, f"u_{m}{n}"),
        Component(E, f"E_{m}{n}", max_order=0),
        Component(G, f"G_{m}{n}"),
        R_MAX,
        name=f"kolmogorov({m},{n})",
        meta={"m": m, "n": n},
    )
    return KolmogorovCell(int(m), int(n), profile)


def G_bracket(m: int, n: int, r):
    """G from the integrated form 4(m^2+n^2)/(pi^2 m^2 n^2) K (E - (1 - r^2) K)."""
    r = np.asarray(r, dtype=float)
    K, E = K_complete(r), E_complete(r)
    return 4.0 * (m * m + n * n) / (math.pi**2 * m * m * n * n) * K * (E - (1 - r * r) * K)


# flow -------------------------------------------------------------------


def flow_xy(m: int, n: int, t, s: float):
    """Trajectory through (s, 0): X = s cn(mnt, s)/dn(mnt, s), Y = s sn(mnt, s)."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"flow_xy needs 0 < s < 1, got {s!r}")
    sn, cn, dn = sn_cn_dn(m * n * np.asarray(t, dtype=float), s)
    return s * cn / dn, s * sn


def flow_residual(m: int, n: int, s: float, t, h: float = 1e-5) -> float:
    """Largest residual of dX/dt = -mn Y (1 - X^2), dY/dt = mn X (1 - Y^2) by central differences."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    Xp, Yp = flow_xy(m, n, t + h, s)
    Xm, Ym = flow_xy(m, n, t - h, s)
    X, Y = flow_xy(m, n, t, s)
    rx = (Xp - Xm) / (2 * h) + m * n * Y * (1 - X * X)
    ry = (Yp - Ym) / (2 * h) - m * n * X * (1 - Y * Y)
    return float(max(np.max(np.abs(rx)), np.max(np.abs(ry))))


def polar_xy(r: float, theta):
    """(X, Y) of the polar point (r, theta)."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"polar_xy needs 0 < r < 1, got {r!r}")
    tau = 2.0 * K_complete(r) * np.asarray(theta, dtype=float) / math.pi
    sn, cn, dn = sn_cn_dn(tau, r)
    return r * cn / dn, r * sn


# the bound on M ------------------------------------------------------------


def v11_closed(x, order: int = 0) -> Jet:
    """sqrt(1 - r^2)(1 + (1 - r^2) K'^2 / K^2) for the (1,1) cell."""
    r = Jet.variable(x, order)
    K1 = _K(x, order + 1)
    K, dK = K1.truncate(order), K1.deriv()
    w = 1.0 - r * r
    return w.sqrt() * (1.0 + w * dK * dK / (K * K))


def Q11_from_v(x, order: int = 0) -> Jet:
    """Q = v'/u' for the (1,1) cell built on :func:`v11_closed`."""
    v = v11_closed(x, order + 1).deriv()
    du = (0.5 * math.pi / _K(x, order + 1)).deriv()
    return v / du


def Q11_closed(x, order: int = 0) -> Jet:
    """Expanded closed form of Q for the (1,1) cell.

    Kept for comparison only: it disagrees with v'/u' (already at r = 0.02
    by 1e-4) and does not reproduce the small-r behaviour of the bound.
    """
    r = Jet.variable(x, order)
    K1 = _K(x, order + 1)
    K, dK = K1.truncate(order), K1.deriv()
    w = 1.0 - r * r
    inner = r * r * K * K / dK - 2.0 * r * w * K + (2.0 - 3.0 * r * r) * w * dK + r * w * w * dK * dK / K
    return inner * 2.0 / (math.pi * r * w.sqrt())


def mbar(r, route: str = "generic"):
    """Upper bound  G Q'/phi + Q^2 - 1  on M for the (1,1) cell.

    ``route="generic"`` derives Q from v = G'u/(2 phi) by jets; ``"closed"``
    differentiates the closed form of v11 (:func:`Q11_from_v`).
    """
    _check_r(r)
    if np.any(np.asarray(r) <= 0):
        raise DomainError("mbar needs r > 0")
    p = cell_profile(1, 1).profile
    if route == "generic":
        d = p.derived(r, 1)
        Q = d.Q()
        phi, G = d.phi.c[0], d.G.c[0]
    elif route == "closed":
        Q = Q11_from_v(r, 1)
        phi, G = p.phi(r), p.G(r)
    else:
        raise ValueError("route must be 'generic' or 'closed'")
    out = G * Q.c[1] / phi + Q.c[0] ** 2 - 1.0
    return float(out) if np.ndim(out) == 0 else out


def mbar_expansion(r):
    """Leading small-r behaviour -r^2/2 - 35 r^4/64."""
    r = np.asarray(r, dtype=float)
    return -0.5 * r**2 - 35.0 / 64.0 * r**4


# single-cell positivity -----------------------------------------------------


def default_test_functions() -> list[TestFunctionXi]:
    """Ten test functions vanishing at r = 0 and near the cell boundary."""
    R = R_MAX
    exprs = [
        f"r*({R!r}-r)",
        f"r^2*({R!r}-r)",
        f"r*({R!r}-r)^2",
        f"sin(pi*r/{R!r})",
        f"sin(2*pi*r/{R!r})",
        f"r*({R!r}-r)*(1+r)",
        f"sin(pi*r/{R!r})^3",
        f"r^3*({R!r}-r)",
        f"r*({R!r}-r)*exp(r)",
        f"sin(pi*r/{R!r})*(2-r)",
    ]
    xis = [TestFunctionXi.of(e) for e in exprs]
    return xis


@dataclass(frozen=True)
class CellPositivityReport:
    m: int
    n: int
    results: tuple

    @property
    def all_inconclusive(self) -> bool:
        return all(q.verdict is Verdict.INCONCLUSIVE and q.discriminant < 0 for _, q in self.results)

    @property
    def verdict(self) -> Verdict:
        return Verdict.INCONCLUSIVE if self.all_inconclusive else Verdict.CERTIFIED


_CELL_SPEC = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14, endpoint_offset=0.0, max_intervals=600)


def cell_index_positivity(m: int, n: int, xis=None, spec=None) -> CellPositivityReport:
    cell = cell_profile(m, n)
    xis = default_test_functions() if xis is None else list(xis)
    out = []
    for xi in xis:
        if not isinstance(xi, TestFunctionXi):
            xi = TestFunctionXi.of(xi)
        q: IndexQuadratic = minimize_over_alpha(cell.profile, xi, spec or _CELL_SPEC)
        out.append((xi.xi.label, q))
    return CellPositivityReport(int(m), int(n), tuple(out))
