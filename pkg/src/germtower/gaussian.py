"""Exact Gaussian rationals ``a + b i`` with ``a, b`` in Q.

Used as the coefficient field of exact-mode jets. Components are stored as
``gmpy2.mpq`` for speed and compare equal to the matching ``Fraction``. Mixed arithmetic with
``int`` and :class:`fractions.Fraction` is supported; mixing with ``float``
or ``complex`` is deliberately an error so that roundoff never leaks into an
exact computation.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if not isinstance(re, (Rational, str)) or not isinstance(im, (Rational, str)):
            raise TypeError("GaussianRational components must be exact rationals")
        object.__setattr__(self, "re", mpq(re))
        object.__setattr__(self, "im", mpq(im))

    @classmethod
    def _make(cls, re, im) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, Rational):
            return cls(x, 0)
        raise TypeError(f"cannot use {type(x).__name__} in exact arithmetic")

    def _other(self, x):
        try:
            return GaussianRational.coerce(x)
        except TypeError:
            return None

    def __add__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return GaussianRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return GaussianRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return GaussianRational._make(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational._make(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussianRational(1) / self ** (-k)
        out, base = GaussianRational(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __abs__(self) -> float:
        return abs(complex(self))

    def norm(self) -> Fraction:
        """Squared modulus, exact."""
        return Fraction(self.re * self.re + self.im * self.im)

    def conjugate(self) -> GaussianRational:
        return GaussianRational._make(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, x):
        o = self._other(x)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, Rational))
