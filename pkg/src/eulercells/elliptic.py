"""Complete elliptic integrals and Jacobi elliptic functions.

The modulus is ``k`` (not the parameter ``m = k**2``).  Everything is built
on the arithmetic-geometric mean chain

    a_0 = 1, b_0 = sqrt(1 - k^2), c_0 = k,
    a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n), c_{n+1} = (a_n - b_n)/2,

which converges quadratically.  ``sn``, ``cn``, ``dn`` and the zeta function
come from the descending Landen phase recursion on the same chain.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .jet import DomainError, Jet, compose

__all__ = [
    "K_complete",
    "E_complete",
    "K_derivative",
    "agm_chain",
    "sn_cn_dn",
    "amplitude",
    "jacobi_zeta",
    "K_jet",
    "E_jet",
    "K_taylor",
    "E_taylor",
]

_MAX_STEPS = 40


def _check_modulus(k):
    kk = np.asarray(k, dtype=float)
    if np.any(~np.isfinite(kk)) or np.any(np.abs(kk) >= 1.0):
        raise DomainError(f"elliptic modulus must satisfy |k| < 1, got {k!r}")


@lru_cache(maxsize=4096)
def agm_chain(k: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """(a_n, c_n) for n = 0..N with c_N below rounding level."""
    _check_modulus(k)
    a, b, c = 1.0, math.sqrt(1.0 - k * k), abs(k)
    aa, cc = [a], [c]
    for _ in range(_MAX_STEPS):
        if abs(c) <= 1e-17 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        aa.append(a)
        cc.append(c)
    return tuple(aa), tuple(cc)


def _agm_arrays(k):
    k = np.asarray(k, dtype=float)
    a = np.ones_like(k)
    b = np.sqrt(1.0 - k * k)
    c = np.abs(k)
    csum = 0.5 * c * c
    scale = 0.5
    for _ in range(_MAX_STEPS):
        if np.all(np.abs(c) <= 1e-17 * a):
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        scale *= 2.0
        csum = csum + scale * c * c
    return a, csum


def K_complete(k):
    """Complete integral of the first kind, int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t)."""
    _check_modulus(k)
    a, _ = _agm_arrays(k)
    out = 0.5 * math.pi / a
    return float(out) if np.ndim(out) == 0 else out


def E_complete(k):
    """Complete integral of the second kind, int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt."""
    _check_modulus(k)
    a, csum = _agm_arrays(k)
    out = 0.5 * math.pi / a * (1.0 - csum)
    return float(out) if np.ndim(out) == 0 else out


def K_derivative(k):
    """dK/dk = (E - (1 - k^2) K) / (k (1 - k^2)); zero at k = 0."""
    k = np.asarray(k, dtype=float)
    K, E = K_complete(k), E_complete(k)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(k == 0, 0.0, (E - (1 - k * k) * K) / np.where(k == 0, 1.0, k * (1 - k * k)))
    return float(out) if out.ndim == 0 else out


def _phases(tau, k: float):
    """Landen phases phi_0 .. phi_N (phi_0 is the amplitude)."""
    aa, cc = agm_chain(abs(k))
    n = len(aa) - 1
    phi = (2.0**n) * aa[n] * np.asarray(tau, dtype=float)
    phases = [phi]
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(cc[j] / aa[j] * np.sin(phi)))
        phases.append(phi)
    phases.reverse()
    return phases, cc


def amplitude(tau, k: float):
    phases, _ = _phases(tau, k)
    return phases[0]


def sn_cn_dn(tau, k: float):
    """Jacobi sn, cn, dn at real argument ``tau`` and modulus ``k``."""
    _check_modulus(k)
    phases, _ = _phases(tau, k)
    p0 = phases[0]
    sn, cn = np.sin(p0), np.cos(p0)
    if len(phases) == 1:
        dn = np.ones_like(p0)
    else:
        dn = cn / np.cos(phases[1] - p0)
        # near cn = 0 the ratio loses accuracy; use the identity instead
        dn = np.where(np.abs(cn) < 0.5, np.sqrt(np.maximum(1.0 - k * k * sn * sn, 0.0)), dn)
    if np.ndim(p0) == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def jacobi_zeta(tau, k: float):
    """Jacobi zeta function zn with d/dtau zn = dn^2 - E/K."""
    _check_modulus(k)
    phases, cc = _phases(tau, k)
    z = np.zeros_like(np.asarray(phases[0], dtype=float))
    for j in range(1, len(phases)):
        z = z + cc[j] * np.sin(phases[j])
    return float(z) if np.ndim(z) == 0 else z


# Taylor jets in the modulus ------------------------------------------------

_SERIES_CUTOFF = 0.25
_SERIES_TERMS = 40


def _hyper_coeffs(first: float) -> list[float]:
    """(pi/2) * ((first)_n (1/2)_n / n!^2), the coefficients of k^(2n)."""
    out = []
    c = 0.5 * math.pi
    for n in range(_SERIES_TERMS):
        out.append(c)
        c *= (first + n) * (0.5 + n) / ((n + 1) ** 2)
    return out


_K_SERIES = _hyper_coeffs(0.5)
_E_SERIES = _hyper_coeffs(-0.5)


def _series_taylor(k0: float, order: int, coeffs: list[float]) -> list[float]:
    x = Jet.variable(k0, order)
    x2 = x * x
    acc = Jet.constant(coeffs[-1], order)
    for c in reversed(coeffs[:-1]):
        acc = acc * x2 + c
    return acc.c


def _ode_taylor(k0: float, order: int, c0: float, c1: float, q: tuple, s: float) -> list[float]:
    """Taylor coefficients of y solving (k - k^3) y'' + q(k) y' + s k y = 0.

    ``q`` holds the polynomial coefficients of q(k) in powers of k.
    """
    h = Jet.variable(k0, 3)
    p = (h - h * h * h).c
    qj = (q[0] + q[1] * h + q[2] * h * h).c
    t = h.c
    a = [c0, c1]
    for j in range(order - 1):
        rest = 0.0
        for i in range(1, 4):
            if j - i >= -2 and i < len(p):
                m = j - i + 2
                if 0 <= m < len(a):
                    rest += p[i] * (j - i + 1) * (j - i + 2) * a[m]
        for i in range(0, 3):
            m = j - i + 1
            if 0 <= m < len(a):
                rest += qj[i] * m * a[m]
        for i in range(0, 2):
            m = j - i
            if 0 <= m < len(a):
                rest += s * t[i] * a[m]
        a.append(-rest / (p[0] * (j + 1) * (j + 2)))
    return a[: order + 1]


def K_taylor(k0: float, order: int) -> list[float]:
    """Taylor coefficients of K about ``k0`` through ``order``."""
    _check_modulus(k0)
    if abs(k0) <= _SERIES_CUTOFF:
        return _series_taylor(k0, order, _K_SERIES)
    K, E = K_complete(k0), E_complete(k0)
    dK = (E - (1 - k0 * k0) * K) / (k0 * (1 - k0 * k0))
    return _ode_taylor(k0, order, K, dK, (1.0, 0.0, -3.0), -1.0)


def E_taylor(k0: float, order: int) -> list[float]:
    """Taylor coefficients of E about ``k0`` through ``order``."""
    _check_modulus(k0)
    if abs(k0) <= _SERIES_CUTOFF:
        return _series_taylor(k0, order, _E_SERIES)
    K, E = K_complete(k0), E_complete(k0)
    dE = (E - K) / k0
    return _ode_taylor(k0, order, E, dE, (1.0, 0.0, -1.0), 1.0)


def _apply(x, taylor):
    if not isinstance(x, Jet):
        return taylor(float(x), 0)[0]
    x0 = x.c[0]
    if np.ndim(x0) == 0:
        c = taylor(float(x0), x.order)
        return compose(x, [math.factorial(j) * cj for j, cj in enumerate(c)])
    flat = np.asarray(x0, dtype=float).ravel()
    cols = np.array([taylor(float(v), x.order) for v in flat]).T
    derivs = [math.factorial(j) * cols[j].reshape(np.shape(x0)) for j in range(x.order + 1)]
    return compose(x, derivs)


def K_jet(x):
    """K composed with a jet (or float) argument."""
    return _apply(x, K_taylor)


def E_jet(x):
    """E composed with a jet (or float) argument."""
    return _apply(x, E_taylor)
