"""Radial data of a rotational cell and the scalars derived from it.

A cell is described in polar coordinates (r, theta) on [0, R] by the area
density phi, the angular velocity u, and the theta-averaged metric
components E (radial) and G (angular).  Derived quantities:

    omega = (G u)' / phi            vorticity
    v     = G' u / (2 phi)
    Q     = v' / u'                 (only where u' != 0)
    M     = (G/phi) Q' + Q^2 - E G / phi^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .expr import Expression, as_expression, evaluate_jet, to_text
from .jet import DomainError, Jet, divide

__all__ = [
    "Component",
    "RadialProfile",
    "ProfileError",
    "CriticalVelocity",
    "make_rotational",
    "make_general",
    "omega",
    "v_Q_M",
    "kappa",
    "DerivedJets",
]

_CHECK_POINTS = 50


class ProfileError(ValueError):
    """Radial data violates the invariants of a rotational cell."""


class CriticalVelocity(ArithmeticError):
    """Q and M are undefined because u' vanishes."""

    def __init__(self, r):
        super().__init__(f"u'(r) vanishes at r = {r!r}; Q is undefined there")
        self.r = r


@dataclass(frozen=True)
class Component:
    """One radial function with jet access.

    Either an :class:`Expression` or a callable ``(x, order) -> Jet``.
    ``max_order`` caps the order a builtin can supply (E of a Kolmogorov
    cell, for instance, is available as a value only).
    """

    source: object
    label: str = ""
    max_order: int | None = None

    @classmethod
    def of(cls, obj, label: str = "") -> "Component":
        if isinstance(obj, Component):
            return obj
        if callable(obj) and not isinstance(obj, Expression):
            return cls(obj, label or getattr(obj, "__name__", "builtin"))
        e = as_expression(obj)
        return cls(e, label or to_text(e.ast))

    def jet(self, x, order: int) -> Jet:
        if self.max_order is not None:
            order = min(order, self.max_order)
        if isinstance(self.source, Expression):
            return evaluate_jet(self.source, x, order)
        return self.source(x, order)

    def __call__(self, x):
        return self.jet(x, 0).c[0]

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class RadialProfile:
    R: float
    phi: Component
    u: Component
    E: Component
    G: Component
    rotational: bool = False
    pole: bool = True
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def jets(self, r, order: int) -> tuple[Jet, Jet, Jet, Jet]:
        return (
            self.phi.jet(r, order),
            self.u.jet(r, order),
            self.E.jet(r, order),
            self.G.jet(r, order),
        )

    def derived(self, r, order: int = 1) -> "DerivedJets":
        """Jets of the derived scalars at ``r`` (float or array)."""
        return DerivedJets.compute(self, r, order)

    def grid(self, n: int = _CHECK_POINTS, include_ends: bool = False) -> np.ndarray:
        if include_ends:
            return np.linspace(0.0, self.R, n)
        return np.linspace(0.0, self.R, n + 2)[1:-1]


@dataclass
class DerivedJets:
    phi: Jet
    u: Jet
    E: Jet
    G: Jet
    omega: Jet
    v: Jet
    r: object = None

    @classmethod
    def compute(cls, p: RadialProfile, r, order: int) -> "DerivedJets":
        base = order + 2  # one extra for the removable zero of phi at the pole
        phi, u, E, G = p.jets(r, base)
        with np.errstate(all="ignore"):
            omega = divide((G * u).deriv(), phi)
            v = divide(G.deriv() * u, phi * 2.0)
        return cls(phi, u, E, G, omega, v, r)

    def Q(self) -> Jet:
        du = self.u.deriv()
        threshold = 1e-12 * (1.0 + np.abs(self.u.c[0]))
        if np.any(np.abs(du.c[0]) < threshold):
            raise CriticalVelocity(_first_bad(np.abs(du.c[0]) < threshold, self.r))
        return divide(self.v.deriv(), du, strict=True)

    def M(self) -> Jet:
        Q = self.Q()
        phi = self.phi
        first = divide(self.G, phi, strict=True) * Q.deriv()
        last = divide(self.E * self.G, phi * phi, strict=True)
        return first + Q * Q - last


def _first_bad(mask, r):
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return r
    return float(np.asarray(r)[int(np.argmax(mask))])


def _float(x) -> float:
    return float(np.asarray(x).reshape(-1)[0])


def _validate(p: RadialProfile) -> None:
    if not (p.R > 0 and math.isfinite(p.R)):
        raise ProfileError(f"cell radius must be positive and finite, got {p.R!r}")
    inner = p.grid()
    try:
        phi0 = p.phi.jet(0.0, 1)
        g0 = p.G(0.0)
        phi_in = np.asarray(p.phi(inner), dtype=float)
        g_in = np.asarray(p.G(inner), dtype=float)
        e_all = np.asarray(p.E(p.grid(include_ends=True, n=_CHECK_POINTS + 2)), dtype=float)
        np.asarray(p.u(p.grid(include_ends=True, n=_CHECK_POINTS + 2)), dtype=float)
    except DomainError as exc:
        raise ProfileError(f"profile cannot be evaluated on [0, R]: {exc}") from exc
    phi_in = np.broadcast_to(phi_in, inner.shape)
    g_in = np.broadcast_to(g_in, inner.shape)
    if p.pole:
        if abs(phi0.c[0]) > 1e-12:
            raise ProfileError(f"phi(0) must vanish, got {phi0.c[0]!r}")
        if not phi0.c[1] > 0:
            raise ProfileError(f"phi'(0) must be positive, got {phi0.c[1]!r}")
        if abs(g0) > 1e-12:
            raise ProfileError(f"G(0) must vanish, got {g0!r}")
    elif not _float(phi0.c[0]) > 0:
        raise ProfileError("phi must be positive on [0, R] for a profile without a pole")
    if np.any(phi_in <= 0):
        i = int(np.argmax(phi_in <= 0))
        raise ProfileError(f"phi is not positive at r = {inner[i]!r}")
    if np.any(g_in <= 0):
        i = int(np.argmax(g_in <= 0))
        raise ProfileError(f"G is not positive at r = {inner[i]!r}")
    if np.any(np.broadcast_to(e_all, (_CHECK_POINTS + 2,)) <= 0):
        raise ProfileError("E is not positive on [0, R]")


def make_rotational(phi, u, R: float, pole: bool = True, name: str = "") -> RadialProfile:
    """Rotationally symmetric cell: metric dr^2 + phi^2 dtheta^2, so E = 1, G = phi^2."""
    phi_c = Component.of(phi)
    if isinstance(phi_c.source, Expression):
        G = Component.of(f"({to_text(phi_c.source.ast)})^2")
    else:
        G = Component(lambda x, order, f=phi_c: f.jet(x, order) ** 2, f"({phi_c.label})^2")
    p = RadialProfile(float(R), phi_c, Component.of(u), Component.of("1"), G, True, pole, name)
    _validate(p)
    return p


def make_general(phi, u, E, G, R: float, pole: bool = True, name: str = "", meta=None) -> RadialProfile:
    p = RadialProfile(
        float(R),
        Component.of(phi),
        Component.of(u),
        Component.of(E),
        Component.of(G),
        False,
        pole,
        name,
        dict(meta or {}),
    )
    _validate(p)
    return p


def omega(p: RadialProfile, r):
    """Vorticity (G u)'/phi; at the pole by the removable limit."""
    out = p.derived(r, 0).omega.c[0]
    return float(out) if np.ndim(out) == 0 else out


def v_Q_M(p: RadialProfile, r) -> tuple:
    d = p.derived(r, 1)
    v = d.v.c[0]
    Q = d.Q().c[0]
    M = d.M().c[0]
    if np.ndim(v) == 0:
        return float(v), float(Q), float(M)
    return v, Q, M


def kappa(p: RadialProfile, r):
    """Gaussian curvature -phi''/phi of a rotationally symmetric profile."""
    if not p.rotational:
        raise ProfileError("curvature from phi alone needs a rotationally symmetric profile")
    j = p.phi.jet(r, 3)
    out = divide(-(j.deriv().deriv()), j.truncate(1)).c[0]
    return float(out) if np.ndim(out) == 0 else out
