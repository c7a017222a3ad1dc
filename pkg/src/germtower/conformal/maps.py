"""Evaluable analytic maps built as composition trees of elementary maps.

Every node evaluates vectorized over numpy arrays, returns its derivative by
the chain rule over leaf derivatives, and knows its inverse tree.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from ..errors import BranchError, DomainViolation
from ..jets import JetSeries, invert


def _arr(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _out(arr_in: np.ndarray, out: np.ndarray):
    return complex(out) if arr_in.ndim == 0 else out


class AnalyticMap:
    """Base class; subclasses implement ``_eval``, ``_deriv`` and ``inverse``."""

    label = "map"

    def __call__(self, z):
        z = _arr(z)
        return _out(z, self._eval(z))

    def derivative(self, z):
        z = _arr(z)
        return _out(z, self._deriv(z))

    def derivative_at_0(self) -> complex:
        return complex(self._deriv(_arr(0.0)))

    def inverse(self) -> AnalyticMap:
        raise NotImplementedError

    def __matmul__(self, other: AnalyticMap) -> AnalyticMap:
        return Compose(self, other)

    def describe(self) -> dict:
        return {"map": self.label}

    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _deriv(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Identity(AnalyticMap):
    label = "identity"

    def _eval(self, z):
        return z.copy()

    def _deriv(self, z):
        return np.ones_like(z)

    def inverse(self):
        return self


class Linear(AnalyticMap):
    """``z -> c z``; scalings and rigid rotations are special cases."""

    label = "linear"

    def __init__(self, c: complex):
        c = complex(c)
        if c == 0:
            raise ValueError("linear map needs a nonzero factor")
        self.c = c

    def _eval(self, z):
        return self.c * z

    def _deriv(self, z):
        return np.full_like(z, self.c)

    def inverse(self):
        return Linear(1 / self.c)

    def describe(self):
        return {"map": self.label, "c": [self.c.real, self.c.imag]}


class Scale(Linear):
    label = "scale"

    def __init__(self, r: float):
        super().__init__(float(r))
        self.r = float(r)

    def inverse(self):
        return Scale(1 / self.r)


class Rotation(Linear):
    """Rigid rotation ``z -> e^{2 pi i alpha} z``."""

    label = "rotation"

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        super().__init__(cmath.exp(2j * math.pi * self.alpha))

    def inverse(self):
        return Rotation(-self.alpha)

    def describe(self):
        return {"map": self.label, "alpha": self.alpha}


class Mobius(AnalyticMap):
    """``(a z + b) / (c z + d)`` with ``ad - bc != 0``."""

    label = "mobius"

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (complex(x) for x in (a, b, c, d))
        self.det = self.a * self.d - self.b * self.c
        if self.det == 0:
            raise ValueError("degenerate Mobius map")

    def _eval(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def _deriv(self, z):
        return self.det / (self.c * z + self.d) ** 2

    def inverse(self):
        return Mobius(self.d, -self.b, -self.c, self.a)

    def describe(self):
        return {"map": self.label, "abcd": [[x.real, x.imag] for x in (self.a, self.b, self.c, self.d)]}


class DiskAutomorphism(Mobius):
    """``(z - b) / (1 - conj(b) z)``, ``|b| < 1``."""

    label = "disk-automorphism"

    def __init__(self, b: complex):
        b = complex(b)
        if abs(b) >= 1:
            raise ValueError("disk automorphism needs |b| < 1")
        self.center = b
        super().__init__(1, -b, -b.conjugate(), 1)

    def inverse(self):
        return DiskAutomorphism(-self.center)


def _sector_root(z: np.ndarray, q: int, center: float) -> np.ndarray:
    """The ``q``-th root with argument in ``(center - pi/q, center + pi/q]``."""
    rot = cmath.exp(1j * center)
    return rot * np.power(z * rot ** (-q), 1.0 / q)


class Power(AnalyticMap):
    """``z -> z^q``; ``center`` names the sector its inverse returns to."""

    label = "power"

    def __init__(self, q: int, center: float = 0.0):
        if q < 1:
            raise ValueError("power must be positive")
        self.q, self.center = int(q), float(center)

    def _eval(self, z):
        return z**self.q

    def _deriv(self, z):
        return self.q * z ** (self.q - 1)

    def inverse(self):
        return Root(self.q, self.center)

    def describe(self):
        return {"map": self.label, "q": self.q, "center": self.center}


class Root(AnalyticMap):
    """``q``-th root onto the sector of half-width ``pi/q`` around ``center``.

    ``center = 0`` is the principal root.
    """

    label = "root"

    def __init__(self, q: int, center: float = 0.0):
        if q < 1:
            raise ValueError("root order must be positive")
        self.q, self.center = int(q), float(center)

    def _eval(self, z):
        return _sector_root(z, self.q, self.center)

    def _deriv(self, z):
        return self._eval(z) / (self.q * z)

    def inverse(self):
        return Power(self.q, self.center)

    def describe(self):
        return {"map": self.label, "q": self.q, "center": self.center}


class JetEval(AnalyticMap):
    """Evaluate a truncated jet; the inverse is the reverted jet (same order)."""

    label = "jet"

    def __init__(self, jet: JetSeries):
        self.jet = jet.to_float()

    def _eval(self, z):
        return self.jet(z)

    def _deriv(self, z):
        c = np.asarray(self.jet.coeffs, dtype=complex)
        out = np.zeros_like(z)
        for k in range(len(c), 0, -1):
            out = out * z + k * c[k - 1]
        return out

    def inverse(self):
        return JetEval(invert(self.jet))

    def describe(self):
        return {"map": self.label, "jet": self.jet.to_json()}


class Compose(AnalyticMap):
    """``outer o inner``."""

    label = "compose"

    def __init__(self, outer: AnalyticMap, inner: AnalyticMap):
        self.outer, self.inner = outer, inner

    def _eval(self, z):
        return self.outer._eval(self.inner._eval(z))

    def _deriv(self, z):
        return self.outer._deriv(self.inner._eval(z)) * self.inner._deriv(z)

    def inverse(self):
        return Compose(self.inner.inverse(), self.outer.inverse())

    def describe(self):
        return {"map": self.label, "outer": self.outer.describe(), "inner": self.inner.describe()}


def chain(*maps: AnalyticMap) -> AnalyticMap:
    """``chain(m1, m2, m3) = m3 o m2 o m1``: maps listed in application order."""
    if not maps:
        return Identity()
    out = maps[0]
    for m in maps[1:]:
        out = Compose(m, out)
    return out


class _TaylorPatch:
    """Taylor data of ``F(u)/u`` near 0, read off by FFT on the circle ``|u| = radius/2``.

    Forming ``F(u)/u`` directly loses all relative accuracy once ``|u|`` is
    below the absolute roundoff of ``F``; inside ``radius/4`` the series is
    used instead.  ``radius`` must not exceed the distance from 0 to the
    nearest singularity of ``F``.
    """

    def __init__(self, F: AnalyticMap, radius: float, points: int = 128, terms: int = 64):
        self.rho = radius / 2
        self.switch = radius / 4
        z = self.rho * np.exp(2j * math.pi * np.arange(points) / points)
        a = np.fft.fft(F._eval(z)) / points  # a_k = c_k rho^k
        self.a = a[1 : terms + 1]

    def ratio(self, u):
        t = u / self.rho
        out = np.zeros_like(u)
        for ak in self.a[::-1]:
            out = out * t + ak
        return out / self.rho

    def derivative(self, u):
        t = u / self.rho
        out = np.zeros_like(u)
        for k in range(len(self.a), 0, -1):
            out = out * t + k * self.a[k - 1]
        return out / self.rho


class RadialLift(AnalyticMap):
    """``G(z) = z (F(z^q) / z^q)^{1/q}`` with the principal root.

    For ``F`` fixing 0 with ``F'(0) > 0``, ``G^q = F(z^q)`` and
    ``G(e^{2 pi i/q} z) = e^{2 pi i/q} G(z)`` hold identically; when ``F``
    commutes with complex conjugation, ``F(u)/u`` never meets the negative
    axis on its domain, so the principal branch is continuous there.
    ``radius`` and ``inverse_radius`` are analyticity radii of ``F`` and its
    inverse at 0, used for the small-``u`` series.
    """

    label = "radial-lift"

    def __init__(self, inner: AnalyticMap, q: int, radius: float, inverse_radius: float):
        if q < 1:
            raise ValueError("lift order must be positive")
        self.F, self.q = inner, int(q)
        self.radius, self.inverse_radius = float(radius), float(inverse_radius)
        self.patch = _TaylorPatch(inner, self.radius)

    def _split(self, u):
        return np.abs(u) < self.patch.switch

    def _ratio(self, u):
        ratio = np.empty_like(u)
        near = self._split(u)
        ratio[near] = self.patch.ratio(u[near])
        ratio[~near] = self.F._eval(u[~near]) / u[~near]
        bad = (ratio.real < 0) & (np.abs(ratio.imag) <= 1e-14 * np.abs(ratio))
        if bad.any():
            raise BranchError(f"F(u)/u on the root's branch cut at u = {complex(u[bad][0])}")
        return ratio

    def _eval(self, z):
        return z * np.power(self._ratio(z**self.q), 1.0 / self.q)

    def _deriv(self, z):
        # G' = F'(u) (F(u)/u)^{1/q - 1}, regular at z = 0
        u = z**self.q
        near = self._split(u)
        dF = np.empty_like(u)
        dF[near] = self.patch.derivative(u[near])
        dF[~near] = self.F._deriv(u[~near])
        return dF * np.power(self._ratio(u), 1.0 / self.q - 1)

    def inverse(self):
        return RadialLift(self.F.inverse(), self.q, self.inverse_radius, self.radius)

    def describe(self):
        return {"map": self.label, "q": self.q, "inner": self.F.describe()}


class Guarded(AnalyticMap):
    """Wrap a map with domain checks; ``check`` returns a mask of bad points."""

    def __init__(
        self,
        inner: AnalyticMap,
        check: Callable[[np.ndarray], np.ndarray],
        inverse_check: Callable[[np.ndarray], np.ndarray] | None = None,
        label: str = "guarded",
    ):
        self.inner, self.check, self.inverse_check, self.label = inner, check, inverse_check, label

    def _guard(self, z):
        bad = self.check(z)
        if np.any(bad):
            point = complex(np.broadcast_to(z, bad.shape)[bad].flat[0])
            raise DomainViolation(f"{self.label}: point outside the domain", point)

    def _eval(self, z):
        self._guard(z)
        return self.inner._eval(z)

    def _deriv(self, z):
        self._guard(z)
        return self.inner._deriv(z)

    def inverse(self):
        inv = self.inner.inverse()
        if self.inverse_check is None:
            return inv
        return Guarded(inv, self.inverse_check, self.check, label=f"{self.label}^-1")

    def describe(self):
        return {"map": self.label, "inner": self.inner.describe()}


def disk_check(radius: float = 1.0, slack: float = 1e-12):
    def check(z):
        return np.abs(z) > radius * (1 + slack)

    return check
