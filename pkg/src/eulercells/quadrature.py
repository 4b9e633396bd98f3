"""Deterministic adaptive Gauss-Kronrod (7/15) quadrature.

Global adaptive bisection: the interval with the largest error estimate is
split next, ties broken by position, and the final sum is taken in a fixed
order with :func:`math.fsum`, so repeated runs are bit-identical.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "NonConvergence",
    "NonFiniteSample",
    "integrate",
    "gk15",
]

# Kronrod nodes on [0, 1]; index 1, 3, 5 are the shared 7-point Gauss nodes.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
for _i, _w in zip((1, 3, 5, 7, 9, 11, 13), (_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0])):
    _GW[_i] = _w

_EPS = float(np.finfo(float).eps)


class NonFiniteSample(ArithmeticError):
    """The integrand returned NaN or infinity."""

    def __init__(self, location: float, value: float):
        super().__init__(f"integrand is not finite at x = {location!r} (value {value!r})")
        self.location = location
        self.value = value


class NonConvergence(ArithmeticError):
    def __init__(self, result: "QuadratureResult"):
        super().__init__(
            f"quadrature did not converge: value {result.value!r}, error estimate {result.error!r}"
        )
        self.result = result


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 60
    endpoint_offset: float = 0.0
    max_intervals: int = 4000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.endpoint_offset < 0:
            raise ValueError("endpoint_offset must be nonnegative")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    converged: bool = True
    intervals: int = 1
    roundoff: bool = False

    def __iter__(self):
        yield self.value
        yield self.error

    def __float__(self):
        return self.value


def _samples(f, x: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).astype(float)
    else:
        y = np.array([float(f(float(t))) for t in x])
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteSample(float(x[i]), float(y[i]))
    return y


def gk15(f, a: float, b: float, vectorized: bool = False) -> tuple[float, float]:
    """One Gauss-Kronrod 7/15 panel: (Kronrod value, QUADPACK error estimate)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    y = _samples(f, c + h * _NODES, vectorized)
    kron = h * float(np.dot(_KW, y))
    gauss = h * float(np.dot(_GW, y))
    mean = kron / (2 * h) if h else 0.0
    resasc = abs(h) * float(np.dot(_KW, np.abs(y - mean)))
    resabs = abs(h) * float(np.dot(_KW, np.abs(y)))
    err = abs(kron - gauss)
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(err, 50 * _EPS * resabs)
    return kron, err


def _adaptive(f, a, b, spec: QuadratureSpec, vectorized: bool, points=()) -> QuadratureResult:
    cuts = [a] + sorted(t for t in points if a < t < b) + [b]
    # heap entries: (-error, a, b, depth, value)
    heap = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, e = gk15(f, lo, hi, vectorized)
        heap.append((-e, lo, hi, 0, v))
    heapq.heapify(heap)
    total_v = math.fsum(item[4] for item in heap)
    total_e = math.fsum(-item[0] for item in heap)
    count = len(heap)
    converged = True
    roundoff = 0
    while True:
        tol = max(spec.abs_tol, spec.rel_tol * abs(total_v))
        if total_e <= tol:
            break
        neg_e, lo, hi, depth, val = heap[0]
        if depth >= spec.max_depth or count >= spec.max_intervals:
            converged = False
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            converged = False
            break
        heapq.heappop(heap)
        v1, e1 = gk15(f, lo, mid, vectorized)
        v2, e2 = gk15(f, mid, hi, vectorized)
        heapq.heappush(heap, (-e1, lo, mid, depth + 1, v1))
        heapq.heappush(heap, (-e2, mid, hi, depth + 1, v2))
        count += 1
        # QUADPACK roundoff test: bisection no longer reduces the error
        if abs(val - (v1 + v2)) <= 1e-5 * abs(v1 + v2) and e1 + e2 >= 0.99 * -neg_e:
            roundoff += 1
            if roundoff >= 10:
                converged = False
                total_v = total_v - val + v1 + v2
                total_e = total_e + neg_e + e1 + e2
                break
        total_v = total_v - val + v1 + v2
        total_e = total_e + neg_e + e1 + e2
        if count % 64 == 0:
            # refresh running sums to avoid drift
            total_v = math.fsum(item[4] for item in heap)
            total_e = math.fsum(-item[0] for item in heap)
    pieces = sorted(heap, key=lambda item: item[1])
    value = math.fsum(item[4] for item in pieces)
    error = math.fsum(-item[0] for item in pieces)
    return QuadratureResult(value, error, converged, count, roundoff >= 10)


def _extrapolated(f, a, b, spec, vectorized, points=()) -> QuadratureResult:
    """Integrate over [a+eps, b-eps] and add the extrapolated endpoint tails."""
    eps = spec.endpoint_offset
    inner = _adaptive(f, a + eps, b - eps, spec, vectorized, points)
    value, error, ok, count = inner.value, inner.error, inner.converged, inner.intervals
    noisy = inner.roundoff
    # tails are judged against the size of the whole integral, not their own
    tail_tol = max(spec.abs_tol, spec.rel_tol * abs(inner.value) / 64)
    tail_spec = QuadratureSpec(spec.rel_tol, tail_tol, spec.max_depth, 0.0, spec.max_intervals)
    for side in (-1, 1):
        # dyadic tail pieces [eps/2^(j+1), eps/2^j] measured from the endpoint
        pieces = []
        for j in range(6):
            lo_d, hi_d = eps / 2 ** (j + 1), eps / 2**j
            if side < 0:
                r = _adaptive(f, a + lo_d, a + hi_d, tail_spec, vectorized)
            else:
                r = _adaptive(f, b - hi_d, b - lo_d, tail_spec, vectorized)
            pieces.append(r.value)
            error += r.error
            ok = ok and r.converged
            noisy = noisy or r.roundoff
            count += r.intervals
        partial = math.fsum(pieces)
        tail = partial
        t0, t1, t2 = pieces[-3], pieces[-2], pieces[-1]
        if t1 != 0 and t0 != 0:
            q1, q2 = t1 / t0, t2 / t1
            if 0 < q2 < 1 and abs(q1 - q2) < 0.05 * abs(q2):
                # geometric remainder beyond the last piece
                rest = t2 * q2 / (1 - q2)
                tail = partial + rest
                error += abs(rest - t2 * q1 / (1 - q1)) + _EPS * abs(rest)
        value += tail
    return QuadratureResult(value, error, ok, count, noisy)


def integrate(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    *,
    vectorized: bool = False,
    strict: bool = False,
    points=(),
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]``.

    With ``vectorized=True`` the integrand receives a numpy array of nodes.
    A positive ``spec.endpoint_offset`` keeps samples that far from both ends
    and recovers the excluded tails by geometric extrapolation over dyadic
    pieces.  ``points`` are interior kinks that seed the initial partition.
    Failure to converge is flagged in the result, or raised when
    ``strict`` is set.
    """
    spec = spec or QuadratureSpec()
    a, b = float(a), float(b)
    if not a < b:
        if a == b:
            return QuadratureResult(0.0, 0.0)
        raise ValueError("integration requires a < b")
    if spec.endpoint_offset > 0:
        if 2 * spec.endpoint_offset >= b - a:
            raise ValueError("endpoint_offset too large for the interval")
        inner = [t for t in points if a + spec.endpoint_offset < t < b - spec.endpoint_offset]
        result = _extrapolated(f, a, b, spec, vectorized, inner)
    else:
        result = _adaptive(f, a, b, spec, vectorized, points)
    if strict and not result.converged:
        raise NonConvergence(result)
    return result
