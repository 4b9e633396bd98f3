"""Index forms of a rotating test variation and the conjugate-point verdict.

For a profile p and a radial test function xi with xi(0) = xi(R) = 0 the
index is a quadratic in the drift alpha,

    I(alpha) = A alpha^2 + 2 B alpha + C,

and it can be made negative exactly when B^2 - A C > 0.  Three algebraically
equivalent integrands are provided; they differ by total derivatives.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .jet import DomainError
from .profiles import Component, RadialProfile
from .quadrature import QuadratureResult, QuadratureSpec, integrate

__all__ = [
    "Verdict",
    "TestFunctionXi",
    "IndexQuadratic",
    "IndexError_",
    "INDEX_SPEC",
    "index_I1",
    "index_I2",
    "index_I3",
    "index_value",
    "minimize_over_alpha",
    "constant_vorticity_rule",
]

INDEX_SPEC = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-16, endpoint_offset=1e-8, max_intervals=3000)


class Verdict(str, enum.Enum):
    CERTIFIED = "ConjugatePointCertified"
    INCONCLUSIVE = "Inconclusive"
    NO_CONJUGATE_POINT = "NoConjugatePointInThisFamily"
    NOT_APPLICABLE = "NotApplicable"

    def __str__(self) -> str:
        return self.value


class IndexError_(ValueError):
    """Inadmissible test function or a degenerate index computation."""


@dataclass(frozen=True)
class TestFunctionXi:
    """Radial test function supported in [a, b], vanishing at both ends.

    ``breaks`` lists interior points where xi is only piecewise smooth; the
    integrals are split there.
    """

    __test__ = False  # not a pytest class

    xi: Component
    a: float = 0.0
    b: float | None = None
    breaks: tuple = ()

    @classmethod
    def of(cls, xi, a: float = 0.0, b: float | None = None, breaks=()) -> "TestFunctionXi":
        return cls(Component.of(xi), float(a), None if b is None else float(b), tuple(map(float, breaks)))

    def scaled(self, c: float) -> "TestFunctionXi":
        src = self.xi
        comp = Component(lambda x, order: src.jet(x, order) * c, f"{c!r}*({src.label})")
        return TestFunctionXi(comp, self.a, self.b, self.breaks)

    def support(self, p: RadialProfile) -> tuple[float, float]:
        b = p.R if self.b is None else self.b
        if not 0.0 <= self.a < b <= p.R * (1 + 1e-14):
            raise IndexError_(f"support [{self.a}, {b}] is not inside [0, {p.R}]")
        return self.a, min(b, p.R)

    def check(self, p: RadialProfile, tol: float = 1e-9) -> tuple[float, float]:
        a, b = self.support(p)
        grid = np.linspace(a, b, 33)[1:-1]
        scale = float(np.max(np.abs(self.xi(grid)))) if grid.size else 0.0
        for end in (a, b):
            try:
                val = float(self.xi(end))
            except DomainError:
                continue  # singular-looking end; leave it to the integrator
            if abs(val) > tol * max(scale, 1.0):
                raise IndexError_(f"xi must vanish at r = {end!r}, got {val!r}")
        return a, b

    def jet(self, r, order: int):
        return self.xi.jet(r, order)


def _as_xi(xi) -> TestFunctionXi:
    if isinstance(xi, TestFunctionXi):
        return xi
    return TestFunctionXi.of(xi)


def _integrand(p: RadialProfile, xi: TestFunctionXi, alpha: float, form: int):
    def f(r):
        d = p.derived(r, 1)
        phi, u, E, G = d.phi.c[0], d.u.c[0], d.E.c[0], d.G.c[0]
        du = d.u.c[1]
        x = xi.jet(r, 1)
        z, dz = x.c[0], x.c[1]
        w = alpha - u
        if form == 1:
            dwz = -du * z + w * dz
            return (G / phi) * dwz**2 + (E / phi) * (w * z) ** 2 - d.omega.c[1] * w * z * z
        if form == 2:
            dv = d.v.c[1]
            return w * w * (G * dz * dz + E * z * z) / phi - 2.0 * dv * w * z * z
        Q = d.Q()
        M = d.M().c[0]
        return w * w * ((G / phi) * (dz - Q.c[0] * phi * z / G) ** 2 - (phi / G) * M * z * z)

    return f


def _integrate_form(p, xi, alpha, form, spec) -> QuadratureResult:
    xi = _as_xi(xi)
    a, b = xi.check(p)
    spec = spec or INDEX_SPEC
    f = _integrand(p, xi, float(alpha), form)
    if spec.endpoint_offset and 2 * spec.endpoint_offset >= (b - a):
        spec = QuadratureSpec(spec.rel_tol, spec.abs_tol, spec.max_depth, 0.0, spec.max_intervals)
    with np.errstate(all="ignore"):
        return integrate(f, a, b, spec, vectorized=True, points=xi.breaks)


def index_value(p: RadialProfile, xi, alpha: float, form: int = 1, spec=None) -> QuadratureResult:
    """Index of the given form (1, 2 or 3) with its quadrature error estimate."""
    if form not in (1, 2, 3):
        raise ValueError("form must be 1, 2 or 3")
    return _integrate_form(p, xi, alpha, form, spec)


def index_I1(p: RadialProfile, xi, alpha: float, spec=None) -> float:
    """int (G/phi)((alpha-u) xi)'^2 + (E/phi)(alpha-u)^2 xi^2 - omega'(alpha-u) xi^2 dr."""
    return index_value(p, xi, alpha, 1, spec).value


def index_I2(p: RadialProfile, xi, alpha: float, spec=None) -> float:
    """int (alpha-u)^2 (G xi'^2 + E xi^2)/phi - 2 v'(alpha-u) xi^2 dr."""
    return index_value(p, xi, alpha, 2, spec).value


def index_I3(p: RadialProfile, xi, alpha: float, spec=None) -> float:
    """int (alpha-u)^2 [(G/phi)(xi' - Q phi xi/G)^2 - (phi/G) M xi^2] dr.

    Raises :class:`CriticalVelocity` if u' vanishes on the support.
    """
    return index_value(p, xi, alpha, 3, spec).value


@dataclass(frozen=True)
class IndexQuadratic:
    A: float
    B: float
    C: float
    error: float
    verdict: Verdict

    @property
    def alpha_star(self) -> float:
        return -self.B / self.A

    @property
    def I_min(self) -> float:
        return (self.A * self.C - self.B**2) / self.A

    @property
    def discriminant(self) -> float:
        return self.B**2 - self.A * self.C

    def __call__(self, alpha: float) -> float:
        return self.A * alpha * alpha + 2 * self.B * alpha + self.C

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "alpha_star": self.alpha_star,
            "I_min": self.I_min,
            "discriminant": self.discriminant,
            "error": self.error,
            "verdict": str(self.verdict),
        }


def minimize_over_alpha(p: RadialProfile, xi, spec=None, form: int = 1) -> IndexQuadratic:
    """Fit I(alpha) from alpha in {0, 1, -1} and decide the sign of B^2 - AC."""
    r0 = index_value(p, xi, 0.0, form, spec)
    rp = index_value(p, xi, 1.0, form, spec)
    rm = index_value(p, xi, -1.0, form, spec)
    A = 0.5 * (rp.value + rm.value) - r0.value
    B = 0.25 * (rp.value - rm.value)
    C = r0.value
    if not A > 0:
        raise IndexError_(f"A = {A!r} is not positive; xi is degenerate")
    eA = 0.5 * (rp.error + rm.error) + r0.error
    eB = 0.25 * (rp.error + rm.error)
    eC = r0.error
    err = 2 * abs(B) * eB + abs(A) * eC + abs(C) * eA
    err += 64 * 2.2e-16 * (B * B + abs(A * C))
    disc = B * B - A * C
    verdict = Verdict.CERTIFIED if disc > 10 * err else Verdict.INCONCLUSIVE
    return IndexQuadratic(A, B, C, err, verdict)


def constant_vorticity_rule(p: RadialProfile, tol: float = 1e-10, points: int = 201) -> Verdict:
    """Constant vorticity means no conjugate point for this family of variations."""
    grid = np.linspace(0.0, p.R, points)[1:-1]
    with np.errstate(all="ignore"):
        w = p.derived(grid, 1).omega
    slopes = np.broadcast_to(w.c[1], grid.shape)
    if p.pole:
        slopes = np.concatenate([[p.derived(0.0, 1).omega.c[1]], slopes])
    scale = 1.0 + float(np.max(np.abs(np.broadcast_to(w.c[0], grid.shape))))
    if np.all(np.abs(slopes) <= tol * scale):
        return Verdict.NO_CONJUGATE_POINT
    return Verdict.NOT_APPLICABLE
