"""Exact trigonometric polynomials on the flat torus and the Misiolek index.

A :class:`TrigPoly2` is a finite sum of ``c * T(j x) * S(k y)`` with T, S in
{cos, sin}, j, k >= 0 and rational c.  Products use the product-to-sum rules,
so every integral over [0, 2 pi]^2 is an exact rational multiple of pi^2.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "TrigPoly2",
    "RationalPiSquared",
    "ZetaParseError",
    "derivative",
    "product",
    "poisson_bracket",
    "integral_T2",
    "kolmogorov_stream",
    "misiolek_index",
    "misiolek_index_float",
    "dmsy_zeta",
    "dmsy_bound",
    "dmsy_check",
    "zeta_m1",
    "zeta_22",
    "zeta_32",
    "zeta_32_yform",
    "zeta_33",
    "parse_zeta",
]

Key = tuple  # (tx, j, ty, k) with tx, ty in {"cos", "sin"}


def _canon_1d(kind: str, j: int):
    """Rewrite T(j t) with j possibly negative as sign * T(|j| t); None if zero."""
    if j < 0:
        return (kind, -j, 1 if kind == "cos" else -1)
    if kind == "sin" and j == 0:
        return None
    return (kind, j, 1)


def _mul_1d(a: str, j: int, b: str, k: int):
    """T_a(j t) T_b(k t) as a list of (kind, index, coefficient)."""
    h = Fraction(1, 2)
    if a == "cos" and b == "cos":
        return [("cos", j - k, h), ("cos", j + k, h)]
    if a == "sin" and b == "sin":
        return [("cos", j - k, h), ("cos", j + k, -h)]
    if a == "sin":
        return [("sin", j + k, h), ("sin", j - k, h)]
    return [("sin", j + k, h), ("sin", k - j, h)]


@dataclass(frozen=True)
class TrigPoly2:
    terms: Mapping  # canonical key -> nonzero Fraction

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (tx, j, ty, k), c in items:
            c = Fraction(c)
            if tx not in ("cos", "sin") or ty not in ("cos", "sin"):
                raise ValueError(f"basis kinds must be cos or sin, got {tx!r}, {ty!r}")
            cx, cy = _canon_1d(tx, int(j)), _canon_1d(ty, int(k))
            if cx is None or cy is None or c == 0:
                continue
            key = (cx[0], cx[1], cy[0], cy[1])
            acc[key] = acc.get(key, Fraction(0)) + c * cx[2] * cy[2]
        clean = {key: v for key, v in sorted(acc.items()) if v != 0}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def constant(cls, c) -> "TrigPoly2":
        return cls({("cos", 0, "cos", 0): c})

    @classmethod
    def term(cls, c, tx: str, j: int, ty: str = "cos", k: int = 0) -> "TrigPoly2":
        return cls({(tx, j, ty, k): c})

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __eq__(self, other):
        return isinstance(other, TrigPoly2) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = _lift(other)
        return TrigPoly2(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly2({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TrigPoly2({k: v * other for k, v in self.terms.items()})
        return product(self, other)

    __rmul__ = __mul__

    def coefficient(self, tx: str, j: int, ty: str, k: int) -> Fraction:
        return self.terms.get((tx, j, ty, k), Fraction(0))

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for (tx, j, ty, k), c in self.terms.items():
            fx = np.cos(j * x) if tx == "cos" else np.sin(j * x)
            fy = np.cos(k * y) if ty == "cos" else np.sin(k * y)
            out = out + float(c) * fx * fy
        return out

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        lines = []
        for (tx, j, ty, k), c in self.terms.items():
            lines.append(f"{c} * {tx}({j}x) * {ty}({k}y)")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.to_text().replace("\n", " + ")


def _lift(p) -> TrigPoly2:
    if isinstance(p, TrigPoly2):
        return p
    return TrigPoly2.constant(p)


@dataclass(frozen=True)
class RationalPiSquared:
    """The exact number q * pi^2."""

    q: Fraction

    def __float__(self) -> float:
        return float(self.q) * math.pi**2

    def __lt__(self, other):
        return self.q < _q(other)

    def __le__(self, other):
        return self.q <= _q(other)

    def __gt__(self, other):
        return self.q > _q(other)

    def __ge__(self, other):
        return self.q >= _q(other)

    def __str__(self) -> str:
        if self.q == 0:
            return "0"
        num, den = self.q.numerator, self.q.denominator
        head = "pi^2" if abs(num) == 1 else f"{abs(num)}*pi^2"
        sign = "-" if num < 0 else ""
        return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"


def _q(other) -> Fraction:
    if isinstance(other, RationalPiSquared):
        return other.q
    if other == 0:
        return Fraction(0)
    raise TypeError("compare RationalPiSquared with another one or with 0")


# algebra --------------------------------------------------------------


def derivative(p: TrigPoly2, axis: str) -> TrigPoly2:
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    out = []
    for (tx, j, ty, k), c in p.terms.items():
        if axis == "x":
            n, kind = j, tx
        else:
            n, kind = k, ty
        if n == 0:
            continue
        new = "sin" if kind == "cos" else "cos"
        factor = -n if kind == "cos" else n
        key = (new, j, ty, k) if axis == "x" else (tx, j, new, k)
        out.append((key, c * factor))
    return TrigPoly2(out)


def product(p: TrigPoly2, q: TrigPoly2) -> TrigPoly2:
    p, q = _lift(p), _lift(q)
    out = []
    for (ax, aj, ay, ak), ca in p.terms.items():
        for (bx, bj, by, bk), cb in q.terms.items():
            for kx, jx, wx in _mul_1d(ax, aj, bx, bj):
                for ky, jy, wy in _mul_1d(ay, ak, by, bk):
                    out.append(((kx, jx, ky, jy), ca * cb * wx * wy))
    return TrigPoly2(out)


def poisson_bracket(f: TrigPoly2, g: TrigPoly2) -> TrigPoly2:
    """{f, g} = f_x g_y - f_y g_x."""
    return product(derivative(f, "x"), derivative(g, "y")) - product(derivative(f, "y"), derivative(g, "x"))


def integral_T2(p: TrigPoly2) -> RationalPiSquared:
    """Integral over [0, 2 pi]^2."""
    return RationalPiSquared(4 * p.coefficient("cos", 0, "cos", 0))


def kolmogorov_stream(m: int, n: int) -> TrigPoly2:
    """-cos(m x) cos(n y)."""
    return TrigPoly2.term(-1, "cos", m, "cos", n)


def _check_mn(m, n):
    if int(m) != m or int(n) != n or m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")


def misiolek_index(m: int, n: int, zeta: TrigPoly2) -> RationalPiSquared:
    """Exact int |grad phi|^2 - (m^2 + n^2) phi^2 with phi = {f, zeta}."""
    _check_mn(m, n)
    phi = poisson_bracket(kolmogorov_stream(m, n), zeta)
    px, py = derivative(phi, "x"), derivative(phi, "y")
    integrand = product(px, px) + product(py, py) - product(phi, phi) * (m * m + n * n)
    return integral_T2(integrand)


def misiolek_index_float(m: int, n: int, zeta: TrigPoly2, points: int = 256) -> float:
    """Trapezoid value of the same integral on a points x points grid."""
    _check_mn(m, n)
    phi = poisson_bracket(kolmogorov_stream(m, n), zeta)
    px, py = derivative(phi, "x"), derivative(phi, "y")
    t = np.arange(points) * (2 * math.pi / points)
    X, Y = np.meshgrid(t, t, indexing="ij")
    val = px(X, Y) ** 2 + py(X, Y) ** 2 - (m * m + n * n) * phi(X, Y) ** 2
    return float(np.sum(val)) * (2 * math.pi / points) ** 2


# test functions ---------------------------------------------------------


def _c(j, k=0, c=1):
    return TrigPoly2.term(c, "cos", j, "cos", k)


def zeta_m1() -> TrigPoly2:
    """cos x (4 + cos 2y)."""
    return _c(1, 0, 4) + _c(1, 2)


def zeta_22() -> TrigPoly2:
    z = TrigPoly2()
    for j, c in ((1, 235), (3, -27), (5, -9)):
        z = z + _c(j, 0, c) + _c(0, j, c)
    for (j, k), c in (((4, 5), -5), ((3, 4), -10)):
        z = z + _c(j, k, c) + _c(k, j, c)
    return z


_Z32_ROWS = (
    # (k, c0, c6, c12): (c0 + c6 cos 6x + c12 cos 12x) cos(k y)
    (1, 0, 1320, 235),
    (3, 1000, 1060, 190),
    (5, 550, 650, 125),
    (7, 195, 270, 63),
    (9, 50, 73, 22),
    (11, 10, 10, 3),
)


def zeta_32() -> TrigPoly2:
    """Every row written as (c0 + c6 cos 6x + c12 cos 12x) cos(k y)."""
    return sum((_c(0, k, a) + _c(6, k, b) + _c(12, k, c) for k, a, b, c in _Z32_ROWS), TrigPoly2())


def zeta_32_yform() -> TrigPoly2:
    """Variant whose cos 9y row reads (50 + 73 cos 6y + 22 cos 12y) cos 9y."""
    z = TrigPoly2()
    for k, a, b, c in _Z32_ROWS:
        if k == 9:
            z = z + _c(0, 9, a) + product(_c(0, 6, b) + _c(0, 12, c), _c(0, 9))
        else:
            z = z + _c(0, k, a) + _c(6, k, b) + _c(12, k, c)
    return z


def zeta_33() -> TrigPoly2:
    return _c(1, 0, 1000) + _c(5, 6, -18) + _c(5, 0, -42) + _c(7, 0, -20) + _c(7, 6, -11)


def dmsy_zeta(m: int, n: int) -> TrigPoly2:
    """cos(m x + y) cos(n y) expanded in the product basis."""
    _check_mn(m, n)
    first = TrigPoly2.term(1, "cos", m, "cos", 1) - TrigPoly2.term(1, "sin", m, "sin", 1)
    return product(first, _c(0, n))


def dmsy_bound(n: int) -> float:
    return (3 * n * n + 6) / (math.sqrt(3) * n)


def dmsy_check(m: int, n: int) -> tuple[bool, RationalPiSquared]:
    """Membership in n >= 2, m > (3n^2 + 6)/(sqrt(3) n) and the exact index."""
    _check_mn(m, n)
    if m < n:
        raise ValueError("dmsy_check expects m >= n")
    # m > (3n^2+6)/(sqrt3 n)  <=>  3 m^2 n^2 > (3n^2+6)^2, decided in integers
    member = n >= 2 and 3 * m * m * n * n > (3 * n * n + 6) ** 2
    return member, misiolek_index(m, n, dmsy_zeta(m, n))


# text format ------------------------------------------------------------


class ZetaParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_FACTOR = re.compile(r"^(cos|sin)\(\s*(\d*)\s*\*?\s*([xy])\s*\)$")
_COEFF = re.compile(r"^[+-]?\d+(?:/\d+)?$")


def _parse_term(text: str, lineno: int):
    text = text.strip()
    sign = 1
    while text[:1] in "+-":
        if text[0] == "-":
            sign = -sign
        text = text[1:].strip()
    if not text:
        raise ZetaParseError("empty term", lineno)
    coeff = Fraction(1)
    fx, fy = ("cos", 0), ("cos", 0)
    seen = set()
    for part in _split_factors(text):
        if _COEFF.match(part):
            coeff *= Fraction(part)
            continue
        m = _FACTOR.match(part.replace(" ", ""))
        if m is None:
            raise ZetaParseError(f"cannot read factor {part!r}", lineno)
        kind, idx, axis = m.group(1), int(m.group(2) or 1), m.group(3)
        if axis in seen:
            raise ZetaParseError(f"two {axis} factors in one term", lineno)
        seen.add(axis)
        if axis == "x":
            fx = (kind, idx)
        else:
            fy = (kind, idx)
    return ((fx[0], fx[1], fy[0], fy[1]), sign * coeff)


def _split_factors(text: str):
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    parts.append(cur.strip())
    return [p for p in parts if p]


def parse_zeta(text: str) -> TrigPoly2:
    """Read lines of ``coeff * trig(j x) * trig(k y)``; ``#`` starts a comment.

    Missing factors default to cos(0); ``cos(x)`` means j = 1.
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        terms.append(_parse_term(line, lineno))
    return TrigPoly2(terms)
