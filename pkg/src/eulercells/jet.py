"""Truncated Taylor series ("jets") for exact forward-mode derivatives.

A :class:`Jet` of order ``n`` stores the Taylor coefficients ``c[0..n]`` of a
function about a point, so ``f^(k)(x0) = k! * c[k]``.  Coefficients may be
floats or equally shaped numpy arrays; the latter evaluates many expansion
points at once.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = ["Jet", "Jet4", "DomainError", "compose"]

_ZERO_TOL = 1e-12


class DomainError(ArithmeticError):
    """A function was evaluated outside its real domain."""

    def __init__(self, message: str, subexpression: str | None = None):
        text = message if subexpression is None else f"{message} in '{subexpression}'"
        super().__init__(text)
        self.message = message
        self.subexpression = subexpression


def _num(x):
    if isinstance(x, np.ndarray):
        return x.astype(float, copy=False)
    return float(x)


def _any(mask) -> bool:
    return bool(np.any(mask))


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable):
        self.c = [_num(x) for x in coeffs]
        if not self.c:
            raise ValueError("a jet needs at least one coefficient")

    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        x0 = _num(x0)
        zero = x0 * 0.0
        c = [x0] + [zero] * order
        if order >= 1:
            c[1] = zero + 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = _num(value)
        return cls([value] + [value * 0.0] * order)

    @classmethod
    def from_derivatives(cls, derivs: Sequence) -> "Jet":
        return cls(d / math.factorial(k) for k, d in enumerate(derivs))

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self):
        return self.c[0]

    @property
    def derivs(self) -> tuple:
        """Derivatives d^0 .. d^order at the expansion point."""
        return tuple(math.factorial(k) * ck for k, ck in enumerate(self.c))

    def d(self, k: int):
        return math.factorial(k) * self.c[k]

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[: order + 1])

    def deriv(self) -> "Jet":
        """Jet of the derivative; the order drops by one."""
        if self.order == 0:
            raise ValueError("derivative of an order-0 jet is unknown")
        return Jet((k + 1) * self.c[k + 1] for k in range(self.order))

    def is_constant(self) -> bool:
        return all(not _any(ck != 0) for ck in self.c[1:])

    def __repr__(self) -> str:
        return f"Jet({self.derivs})"

    # arithmetic -------------------------------------------------------

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other + self.c[0] * 0.0, self.order)

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = list(self.c)
            c[0] = c[0] + other
            return Jet(c)
        n = min(self.order, other.order)
        return Jet(self.c[k] + other.c[k] for k in range(n + 1))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-x for x in self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(x * other for x in self.c)
        n = min(self.order, other.order)
        a, b = self.c, other.c
        return Jet(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n + 1))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            if _any(np.asarray(other) == 0):
                raise DomainError("division by zero")
            return Jet(x / other for x in self.c)
        return divide(self, other)

    def __rtruediv__(self, other):
        return divide(self._lift(other), self)

    def __pow__(self, p):
        if isinstance(p, Jet):
            if p.is_constant():
                p0 = np.unique(np.asarray(p.c[0], dtype=float))
                if p0.size == 1 and float(p0[0]).is_integer():
                    return self.ipow(int(p0[0]))
                if p0.size == 1:
                    return self.rpow(float(p0[0]))
            return (p * self.log()).exp()
        if float(p).is_integer():
            return self.ipow(int(p))
        return self.rpow(float(p))

    def ipow(self, n: int) -> "Jet":
        if n < 0:
            return divide(Jet.constant(self.c[0] * 0.0 + 1.0, self.order), self.ipow(-n), strict=True)
        result = Jet.constant(self.c[0] * 0.0 + 1.0, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def rpow(self, p: float) -> "Jet":
        x = self.c[0]
        if _any(x < 0):
            raise DomainError(f"non-integer power {p} of a negative value")
        if _any(x == 0):
            if p > 0 and self.is_constant():
                return Jet.constant(x * 0.0, self.order)
            raise DomainError(f"power {p} is singular at zero")
        ds = []
        coef = 1.0
        for k in range(self.order + 1):
            ds.append(coef * x ** (p - k))
            coef *= p - k
        return compose(self, ds)

    # elementary functions ----------------------------------------------

    def exp(self):
        e = np.exp(self.c[0])
        return compose(self, [e] * (self.order + 1))

    def log(self):
        x = self.c[0]
        if _any(x <= 0):
            raise DomainError("logarithm of a nonpositive value")
        ds = [np.log(x)]
        for k in range(1, self.order + 1):
            ds.append((-1) ** (k - 1) * math.factorial(k - 1) / x**k)
        return compose(self, ds)

    def sqrt(self):
        return self.rpow(0.5)

    def sin(self):
        s, c = np.sin(self.c[0]), np.cos(self.c[0])
        cyc = [s, c, -s, -c]
        return compose(self, [cyc[k % 4] for k in range(self.order + 1)])

    def cos(self):
        s, c = np.sin(self.c[0]), np.cos(self.c[0])
        cyc = [c, -s, -c, s]
        return compose(self, [cyc[k % 4] for k in range(self.order + 1)])

    def sinh(self):
        s, c = np.sinh(self.c[0]), np.cosh(self.c[0])
        return compose(self, [s if k % 2 == 0 else c for k in range(self.order + 1)])

    def cosh(self):
        s, c = np.sinh(self.c[0]), np.cosh(self.c[0])
        return compose(self, [c if k % 2 == 0 else s for k in range(self.order + 1)])

    def tan(self):
        if _any(np.abs(np.cos(self.c[0])) < 1e-300):
            raise DomainError("tangent at a pole")
        return divide(self.sin(), self.cos(), strict=True)

    def tanh(self):
        return divide(self.sinh(), self.cosh(), strict=True)

    def abs(self):
        x = self.c[0]
        if _any(x == 0) and self.order > 0:
            raise DomainError("abs is not differentiable at zero")
        sign = np.sign(x)
        if np.ndim(sign) == 0:
            sign = float(sign)
        return self * sign if self.order > 0 else Jet([np.abs(x)])


Jet4 = Jet


def compose(inner: Jet, derivs: Sequence) -> Jet:
    """Jet of ``f(inner)`` given ``f^(k)(inner.value)`` for k = 0..order."""
    n = inner.order
    zero = inner.c[0] * 0.0
    h = Jet([zero] + inner.c[1:])
    out = [zero + derivs[0]] + [zero] * n
    power = Jet.constant(zero + 1.0, n)
    for k in range(1, n + 1):
        power = power * h
        scale = derivs[k] / math.factorial(k)
        for i in range(k, n + 1):
            out[i] = out[i] + scale * power.c[i]
    return Jet(out)


def divide(num: Jet, den: Jet, strict: bool = False) -> Jet:
    """Quotient of jets.

    When ``den`` vanishes exactly at the expansion point and ``strict`` is
    false, common leading powers of the shift are cancelled (l'Hopital) and
    the result has correspondingly lower order.
    """
    n = min(num.order, den.order)
    a, b = num.c[: n + 1], den.c[: n + 1]
    if _any(b[0] == 0):
        if strict or np.ndim(b[0]) > 0:
            raise DomainError("division by zero")
        shift = 0
        while shift <= n and b[shift] == 0.0:
            shift += 1
        if shift > n:
            raise DomainError("division by zero")
        scale = 1.0 + max(abs(x) for x in a)
        if any(abs(a[i]) > _ZERO_TOL * scale for i in range(shift)):
            raise DomainError("division by zero")
        a, b = a[shift:], b[shift:]
        n -= shift
    q = []
    for k in range(n + 1):
        s = a[k]
        for i in range(k):
            s = s - q[i] * b[k - i]
        q.append(s / b[0])
    return Jet(q)
