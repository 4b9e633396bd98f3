"""Disc surfaces carrying a prescribed steady flow.

Given radial data phi (area density), G (mean angular metric component),
the stream function F (or the angular velocity u = F'/phi) and a potential
zeta(r, theta), the metric

    g11 = (phi^2/G) (1 + zeta_r^2/F'^2) / (1 + phi zeta_theta/(F' G))
    g12 = (phi/F') zeta_r
    g22 = G + (phi/F') zeta_theta

has area form phi dr dtheta and U = u d/dtheta is a steady Euler flow on it.
zeta is a finite series sum_n a_n(r) cos(n theta) + b_n(r) sin(n theta).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .expr import as_expression, evaluate_jet, to_text
from .jet import DomainError, Jet, divide
from .profiles import Component, RadialProfile, make_general

__all__ = [
    "DegenerateMetric",
    "SurfaceError",
    "ZetaMode",
    "ZetaSeries",
    "MetricField",
    "SteadyReport",
    "build_metric",
    "verify_steady",
    "profile_from_metric",
    "vorticity_density",
    "gaussian_curvature",
    "smoothness_check",
]

_THETA_NODES = 256
_VERIFY_GRID = 64
_MARGIN = 1e-6


class SurfaceError(ValueError):
    pass


class DegenerateMetric(SurfaceError):
    def __init__(self, message: str, r: float, theta: float):
        super().__init__(f"{message} at (r, theta) = ({r!r}, {theta!r})")
        self.r = r
        self.theta = theta


@dataclass(frozen=True)
class ZetaMode:
    n: int
    kind: str  # "cos" or "sin"
    coeff: object  # Expression in r

    def __post_init__(self):
        if self.kind not in ("cos", "sin"):
            raise SurfaceError(f"mode kind must be cos or sin, got {self.kind!r}")
        if self.n < 0 or (self.kind == "sin" and self.n == 0):
            raise SurfaceError(f"invalid mode {self.kind}{self.n}")
        object.__setattr__(self, "coeff", as_expression(self.coeff))

    def trig(self, theta):
        return np.cos(self.n * theta) if self.kind == "cos" else np.sin(self.n * theta)

    def trig_theta(self, theta):
        """d/dtheta of the angular factor."""
        if self.kind == "cos":
            return -self.n * np.sin(self.n * theta)
        return self.n * np.cos(self.n * theta)


@dataclass(frozen=True)
class ZetaSeries:
    modes: tuple = ()

    @classmethod
    def of(cls, spec) -> "ZetaSeries":
        """From a ZetaSeries, None, or a mapping like {"cos2": "r^6"}."""
        if isinstance(spec, ZetaSeries):
            return spec
        if not spec:
            return cls(())
        modes = []
        for key, expr in dict(spec).items():
            key = key.strip().lower()
            kind, idx = key[:3], key[3:]
            if kind not in ("cos", "sin") or not idx.isdigit():
                raise SurfaceError(f"zeta key must look like cos2 or sin1, got {key!r}")
            modes.append(ZetaMode(int(idx), kind, expr))
        return cls(tuple(sorted(modes, key=lambda m: (m.n, m.kind))))

    def scaled(self, c: float) -> "ZetaSeries":
        return ZetaSeries(tuple(ZetaMode(m.n, m.kind, f"{c!r}*({to_text(m.coeff.ast)})") for m in self.modes))

    def __str__(self) -> str:
        if not self.modes:
            return "0"
        return " + ".join(f"({to_text(m.coeff.ast)})*{m.kind}({m.n}*theta)" for m in self.modes)

    def jets(self, x, theta, order: int):
        """Jets in r of zeta_r and zeta_theta at (x, theta)."""
        zr = zt = None
        for m in self.modes:
            c = evaluate_jet(m.coeff, x, order + 1)
            a = c.deriv() * m.trig(theta)
            b = c.truncate(order) * m.trig_theta(theta)
            zr = a if zr is None else zr + a
            zt = b if zt is None else zt + b
        if zr is None:
            zero = Jet.constant(np.zeros(np.broadcast(x, theta).shape) if np.ndim(x) or np.ndim(theta) else 0.0, order)
            return zero, zero
        return zr, zt


@dataclass(frozen=True)
class MetricField:
    phi: Component
    G: Component
    Fp: Component  # F'
    u: Component
    zeta: ZetaSeries
    R: float
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def component_jets(self, r, theta, order: int = 0):
        """Jets in r of (g11, g12, g22); r and theta broadcast together."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if r.ndim == 0 and float(r) == 0.0:
            return self._at_pole(np.atleast_1d(theta), order, theta.ndim == 0)
        r, theta = np.broadcast_arrays(r, theta)
        if r.ndim == 0:
            return self._components(float(r), float(theta), order)
        pole = r == 0.0
        if not pole.any():
            return self._components(r, theta, order)
        jets = self._components(np.where(pole, 1.0, r), theta, order)
        idx = np.nonzero(pole)
        fixed = self._at_pole(theta[idx], order, False)
        out = []
        for j, f in zip(jets, fixed):
            cs = [np.array(c, dtype=float, copy=True) for c in j.c]
            for k in range(order + 1):
                cs[k][idx] = f.c[k]
            out.append(Jet(cs))
        return tuple(out)

    def _components(self, r, theta, order: int):
        phi = self.phi.jet(r, order)
        G = self.G.jet(r, order)
        Fp = self.Fp.jet(r, order)
        zr, zt = self.zeta.jets(r, theta, order)
        strict = np.ndim(r) > 0
        w = divide(phi, Fp, strict=strict)
        g12 = w * zr
        g22 = G + w * zt
        num = phi * phi * (Fp * Fp + zr * zr)
        g11 = divide(num, Fp * Fp * g22, strict=strict)
        return g11, g12, g22

    def _at_pole(self, thetas, order: int, scalar: bool):
        # removable zeros at r = 0 cancel only in scalar jets; loop over theta
        base = order + 5  # phi/F' costs one order, the g11 quotient four
        cols = []
        for t in thetas:
            jets = self._components(0.0, float(t), base)
            cols.append([j.truncate(order) if j.order >= order else _short(j) for j in jets])
        if scalar:
            return tuple(cols[0])
        return tuple(Jet(np.array([c[i].c[k] for c in cols]) for k in range(order + 1)) for i in range(3))

    def components(self, r, theta):
        """Values (g11, g12, g22)."""
        return tuple(j.c[0] for j in self.component_jets(r, theta, 0))

    def g11(self, r, theta):
        return self.components(r, theta)[0]

    def g12(self, r, theta):
        return self.components(r, theta)[1]

    def g22(self, r, theta):
        return self.components(r, theta)[2]

    def det(self, r, theta):
        a, b, c = self.components(r, theta)
        return a * c - b * b

    def g11_denominator(self, r, theta):
        """1 + phi zeta_theta/(F' G)."""
        phi, G, Fp = self.phi(r), self.G(r), self.Fp(r)
        _, zt = self.zeta.jets(np.asarray(r, dtype=float), np.asarray(theta, dtype=float), 0)
        return 1.0 + phi * zt.c[0] / (Fp * G)


def _short(j: Jet) -> Jet:
    raise DomainError(f"metric component has a non-removable singularity at r = 0 (jet order {j.order})")


def _grid(R: float, n: int):
    rs = np.linspace(0.0, R, n + 1)[1:]
    ts = np.arange(n) * (2 * math.pi / n)
    return rs, ts


def build_metric(phi, G, zeta=None, R: float = 1.0, F=None, u=None, check_points: int = _VERIFY_GRID) -> MetricField:
    """Metric components from (phi, G, zeta) and either F or u = F'/phi."""
    if F is None and u is None:
        raise SurfaceError("give the stream function F or the velocity u")
    phi_c = Component.of(phi)
    G_c = Component.of(G)
    if F is not None:
        F_c = Component.of(F)
        Fp = Component(lambda x, order, f=F_c: f.jet(x, order + 1).deriv(), f"d/dr({F_c.label})")
        u_from_F = Component(lambda x, order, a=Fp, b=phi_c: divide(a.jet(x, order + 1), b.jet(x, order + 1)), "F'/phi")
    if u is not None:
        u_c = Component.of(u)
        Fp_u = Component(lambda x, order, a=u_c, b=phi_c: a.jet(x, order) * b.jet(x, order), f"({phi_c.label})*({u_c.label})")
    if F is not None and u is not None:
        rs = np.linspace(0.0, R, 34)[1:-1]
        if not np.allclose(Fp(rs), Fp_u(rs), rtol=1e-9, atol=1e-12):
            raise SurfaceError("F and u are inconsistent: F' differs from phi u")
    if u is None:
        u_c, Fp_u = u_from_F, Fp
    elif F is None:
        Fp = Fp_u
    mf = MetricField(phi_c, G_c, Fp, u_c, ZetaSeries.of(zeta), float(R))
    _check_nondegenerate(mf, check_points)
    return mf


def _check_nondegenerate(mf: MetricField, n: int) -> None:
    rs, ts = _grid(mf.R, n)
    Rr, Tt = np.meshgrid(rs, ts, indexing="ij")
    with np.errstate(all="ignore"):
        phi, G, Fp = (np.broadcast_to(c(rs), rs.shape) for c in (mf.phi, mf.G, mf.Fp))
        for name, vals in (("phi", phi), ("G", G), ("F'", Fp)):
            if not np.all(vals > 0):
                i = int(np.argmax(~(vals > 0)))
                raise DegenerateMetric(f"{name} is not positive", float(rs[i]), 0.0)
        den = mf.g11_denominator(Rr, Tt)
        g11, g12, g22 = mf.components(Rr, Tt)
        det = g11 * g22 - g12 * g12
    for msg, bad in (
        ("g11 denominator below margin", ~(den >= _MARGIN)),
        ("g11 is not positive", ~(g11 > 0)),
        ("determinant is not positive", ~(det > 0)),
    ):
        if np.any(bad):
            i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
            raise DegenerateMetric(msg, float(rs[i]), float(ts[j]))


# verification -------------------------------------------------------------


@dataclass(frozen=True)
class SteadyReport:
    det_error: float
    det_worst: tuple
    curl_spread: float
    curl_worst: float
    omega_error: float
    cross_error: float
    det_ok: bool
    curl_ok: bool
    omega_ok: bool
    cross_ok: bool

    @property
    def ok(self) -> bool:
        return self.det_ok and self.curl_ok and self.omega_ok and self.cross_ok

    def as_dict(self) -> dict:
        return {
            "det_error": self.det_error,
            "det_worst_r": self.det_worst[0],
            "det_worst_theta": self.det_worst[1],
            "curl_spread": self.curl_spread,
            "curl_worst_r": self.curl_worst,
            "omega_error": self.omega_error,
            "cross_error": self.cross_error,
            "det": "PASS" if self.det_ok else "FAIL",
            "curl": "PASS" if self.curl_ok else "FAIL",
            "omega": "PASS" if self.omega_ok else "FAIL",
            "cross": "PASS" if self.cross_ok else "FAIL",
        }


def _curl_density(mf: MetricField, r, theta):
    """d/dr(u g22) - d/dtheta(u g12), pointwise."""
    u = mf.u.jet(r, 1)
    _, g12, g22 = mf.component_jets(r, theta, 1)
    radial = (u * g22).c[1]
    # d/dtheta g12 = (phi/F') zeta_{r theta}; differentiate the angular factor exactly
    w = divide(mf.phi.jet(r, 0), mf.Fp.jet(r, 0), strict=np.ndim(r) > 0).c[0]
    zrt = 0.0
    for m in mf.zeta.modes:
        c = evaluate_jet(m.coeff, r, 1)
        zrt = zrt + c.c[1] * m.trig_theta(theta)
    angular = u.c[0] * w * zrt
    return radial - angular


def _omega_density(mf: MetricField, r):
    """d/dr(F' G/phi), the theta-independent curl density."""
    Fp, G, phi = mf.Fp.jet(r, 1), mf.G.jet(r, 1), mf.phi.jet(r, 1)
    return divide(Fp * G, phi, strict=np.ndim(r) > 0).c[1]


def vorticity_density(mf: MetricField, r, theta=0.0):
    """phi * curl U, the coefficient of dr^dtheta in dU-flat."""
    return _curl_density(mf, np.asarray(r, dtype=float), np.asarray(theta, dtype=float))


def verify_steady(mf: MetricField, n: int = _VERIFY_GRID) -> SteadyReport:
    rs, ts = _grid(mf.R, n)
    Rr, Tt = np.meshgrid(rs, ts, indexing="ij")
    g11, g12, g22 = mf.components(Rr, Tt)
    phi = np.broadcast_to(mf.phi(rs), rs.shape)[:, None]
    det_err = np.abs(g11 * g22 - g12 * g12 - phi * phi) / np.maximum(1.0, phi * phi)
    i, j = np.unravel_index(int(np.argmax(det_err)), det_err.shape)

    dens = _curl_density(mf, Rr, Tt)
    curl = dens / phi
    spread = np.max(curl, axis=1) - np.min(curl, axis=1)
    scale = 1.0 + np.max(np.abs(curl), axis=1)
    rel_spread = spread / scale
    k = int(np.argmax(rel_spread))

    omega = np.broadcast_to(_omega_density(mf, rs), rs.shape)[:, None] / phi
    om_err = float(np.max(np.abs(curl - omega) / (1.0 + np.abs(omega))))

    # d/dtheta g12 = (1/u) d/dr (u (g22 - G))
    u = mf.u.jet(Rr, 1)
    Gj = mf.G.jet(Rr, 1)
    _, _, g22j = mf.component_jets(Rr, Tt, 1)
    rhs = (u * (g22j - Gj)).c[1] / u.c[0]
    w = mf.phi(Rr) / mf.Fp(Rr)
    lhs = 0.0
    for m in mf.zeta.modes:
        lhs = lhs + w * evaluate_jet(m.coeff, Rr, 1).c[1] * m.trig_theta(Tt)
    cross = np.abs(lhs - rhs) / (1.0 + np.abs(rhs))
    cross_err = float(np.max(cross))

    return SteadyReport(
        float(det_err[i, j]),
        (float(rs[i]), float(ts[j])),
        float(rel_spread[k]),
        float(rs[k]),
        om_err,
        cross_err,
        bool(det_err[i, j] <= 1e-12),
        bool(rel_spread[k] <= 1e-9),
        bool(om_err <= 1e-9),
        bool(cross_err <= 1e-8),
    )


# radial profile -------------------------------------------------------------


def _theta_average(mf: MetricField, index: int, x, order: int) -> Jet:
    ts = np.arange(_THETA_NODES) * (2 * math.pi / _THETA_NODES)
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        jets = mf.component_jets(float(x), ts, order)
        return Jet(np.mean(c) for c in jets[index].c)
    jets = mf.component_jets(x[..., None], ts, order)
    return Jet(np.mean(c, axis=-1) for c in jets[index].c)


def profile_from_metric(mf: MetricField, name: str = "surface") -> RadialProfile:
    """Radial profile with E, G the theta-averages of g11, g22 (256-node trapezoid)."""
    E = Component(lambda x, order: _theta_average(mf, 0, x, order), "<g11>")
    G = Component(lambda x, order: _theta_average(mf, 2, x, order), "<g22>")
    return make_general(mf.phi, mf.u, E, G, mf.R, True, name, {"zeta": str(mf.zeta)})


# smoothness and curvature -----------------------------------------------------


def smoothness_check(zeta, max_order: int = 4) -> list[str]:
    """Problems with the r^n a_n(r) form of each mode at r = 0; empty if fine.

    Only derivatives up to ``max_order`` are inspected; deeper modes warn.
    """
    problems = []
    for m in ZetaSeries.of(zeta).modes:
        need = min(m.n, max_order + 1)
        if m.n > max_order + 1:
            warnings.warn(f"mode {m.kind}{m.n}: vanishing checked only to order {max_order}", stacklevel=2)
        try:
            j = evaluate_jet(m.coeff, 0.0, max_order)
        except DomainError as exc:
            problems.append(f"{m.kind}{m.n}: coefficient not evaluable at r = 0 ({exc})")
            continue
        for k in range(need):
            if abs(j.d(k)) > 1e-12:
                problems.append(f"{m.kind}{m.n}: derivative {k} at r = 0 is {j.d(k)!r}, expected 0")
                break
    return problems


def gaussian_curvature(mf: MetricField, r, theta, h: float = 1e-3):
    """Brioschi formula with central differences of the components."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)

    def comp(dr, dt):
        return mf.components(r + dr, theta + dt)

    c00 = comp(0, 0)
    cp0, cm0 = comp(h, 0), comp(-h, 0)
    c0p, c0m = comp(0, h), comp(0, -h)
    cpp, cpm, cmp_, cmm = comp(h, h), comp(h, -h), comp(-h, h), comp(-h, -h)
    E, F, G = c00
    Eu, Fu, Gu = ((a - b) / (2 * h) for a, b in zip(cp0, cm0))
    Ev, Fv, Gv = ((a - b) / (2 * h) for a, b in zip(c0p, c0m))
    Euu, _, Guu = ((a - 2 * c + b) / h**2 for a, b, c in zip(cp0, cm0, c00))
    Evv, _, Gvv = ((a - 2 * c + b) / h**2 for a, b, c in zip(c0p, c0m, c00))
    _, Fuv, _ = ((pp - pm - mp + mm) / (4 * h * h) for pp, pm, mp, mm in zip(cpp, cpm, cmp_, cmm))
    W2 = E * G - F * F
    a11 = -0.5 * Evv + Fuv - 0.5 * Guu
    m1 = np.array(
        [
            [a11, 0.5 * Eu, Fu - 0.5 * Ev],
            [Fv - 0.5 * Gu, E, F],
            [0.5 * Gv, F, G],
        ]
    )
    m2 = np.array(
        [
            [np.zeros_like(E), 0.5 * Ev, 0.5 * Gu],
            [0.5 * Ev, E, F],
            [0.5 * Gu, F, G],
        ]
    )
    det1 = _det3(m1)
    det2 = _det3(m2)
    return (det1 - det2) / (W2 * W2)


def _det3(m):
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
