"""Truncated power series fixing the origin and the group law on formal germs.

A :class:`JetSeries` of order ``N`` stores ``c_1 .. c_N`` of
``c_1 z + ... + c_N z^N``.  Coefficients are either complex doubles (the
default) or exact :class:`~germtower.gaussian.GaussianRational` values when
the jet is built with ``exact=True``.  Every operation is a pure function of
its inputs; a binary operation on one exact and one float jet yields a float
jet.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import GermError, NotInvertible, OrderMismatch
from .gaussian import GaussianRational

TAU_ZERO = 1e-12
TAU_UNIT = 1e-9
TAU_RES = 1e-8
Q_MAX = 10**6

# Floor on the rational-recognition tolerance: a few ulps of a number in [0, 1).
_ANGLE_EPS = 4 * np.finfo(float).eps
# q^2 |alpha - p/q| below this without certifying p/q marks a Liouville-like
# angle whose rationality cannot be decided in double precision.
_SUSPICIOUS_APPROX = math.sqrt(TAU_UNIT)


def _exact_coeff(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, str):
        return GaussianRational(Fraction(x))
    if isinstance(x, (tuple, list)) and len(x) == 2:
        return GaussianRational(Fraction(x[0]), Fraction(x[1]))
    if isinstance(x, float) and x.is_integer():
        return GaussianRational(int(x))
    raise TypeError(f"{x!r} is not an exact coefficient")


class JetSeries:
    """Truncated series ``sum_{k=1..N} c_k z^k`` (no constant term)."""

    __slots__ = ("_c", "exact")

    def __init__(self, coeffs: Sequence, order: int | None = None, exact: bool = False):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs)
        if order < 1:
            raise GermError("truncation order must be at least 1")
        if len(coeffs) > order:
            raise GermError(f"{len(coeffs)} coefficients given for order {order}")
        coeffs = coeffs + [0] * (order - len(coeffs))
        if exact:
            self._c = (GaussianRational(0),) + tuple(_exact_coeff(c) for c in coeffs)
        else:
            arr = np.zeros(order + 1, dtype=complex)
            arr[1:] = [complex(c) for c in coeffs]
            arr.flags.writeable = False
            self._c = arr
        self.exact = exact

    @classmethod
    def _raw(cls, full, exact: bool) -> JetSeries:
        # ``full`` has the constant slot at index 0, which is dropped.
        obj = object.__new__(cls)
        if exact:
            obj._c = (GaussianRational(0),) + tuple(full[1:])
        else:
            arr = np.array(full, dtype=complex)
            arr[0] = 0
            arr.flags.writeable = False
            obj._c = arr
        obj.exact = exact
        return obj

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> tuple:
        return tuple(self._c[1:])

    def __getitem__(self, k: int):
        if not 1 <= k <= self.order:
            raise IndexError(f"coefficient index {k} outside 1..{self.order}")
        return self._c[k]

    @property
    def multiplier(self) -> complex:
        return complex(self._c[1])

    def to_float(self) -> JetSeries:
        if not self.exact:
            return self
        return JetSeries._raw([complex(c) for c in self._c], exact=False)

    def truncate(self, order: int) -> JetSeries:
        if not 1 <= order <= self.order:
            raise GermError(f"cannot truncate order {self.order} jet to order {order}")
        return JetSeries._raw(self._c[: order + 1], self.exact)

    def extend(self, order: int) -> JetSeries:
        """Pad with zero coefficients up to ``order``."""
        pad = [GaussianRational(0) if self.exact else 0] * (order - self.order)
        return JetSeries._raw(list(self._c) + pad, self.exact)

    def __call__(self, z):
        """Evaluate the polynomial at a point or numpy array (Horner)."""
        c = [complex(x) for x in self._c] if self.exact else self._c
        acc = np.zeros_like(np.asarray(z, dtype=complex)) + c[-1]
        for k in range(self.order - 1, -1, -1):
            acc = acc * z + c[k]
        return acc

    def __matmul__(self, other: JetSeries) -> JetSeries:
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, JetSeries):
            return NotImplemented
        if self.order != other.order:
            return False
        if self.exact and other.exact:
            return self._c == other._c
        return bool(np.array_equal(_as_float(self._c), _as_float(other._c)))

    __hash__ = None

    def __repr__(self):
        body = ", ".join(str(c) for c in self.coeffs)
        return f"JetSeries([{body}], order={self.order}{', exact=True' if self.exact else ''})"

    def to_json(self) -> dict:
        if self.exact:
            pairs = [[str(c.re), str(c.im)] for c in self.coeffs]
        else:
            pairs = [[float(c.real), float(c.imag)] for c in self.coeffs]
        return {"order": self.order, "coeffs": pairs}

    @classmethod
    def from_json(cls, doc: dict) -> JetSeries:
        pairs = doc["coeffs"]
        exact = any(isinstance(x, str) for pair in pairs for x in pair)
        if exact:
            coeffs = [GaussianRational(Fraction(str(re)), Fraction(str(im))) for re, im in pairs]
        else:
            coeffs = [complex(re, im) for re, im in pairs]
        return cls(coeffs, order=int(doc.get("order", len(coeffs))), exact=exact)


# -- raw truncated arithmetic on full coefficient arrays (index 0 = constant) --


def _as_float(c):
    if isinstance(c, np.ndarray):
        return c
    return np.array([complex(x) for x in c], dtype=complex)


def _zeros(n: int, exact: bool):
    if exact:
        return [GaussianRational(0)] * (n + 1)
    return np.zeros(n + 1, dtype=complex)


def _mul(a, b, n: int, exact: bool):
    """Product of two full coefficient arrays truncated to degree ``n``."""
    if not exact:
        return np.convolve(a[: n + 1], b[: n + 1])[: n + 1]
    out = [GaussianRational(0)] * (n + 1)
    nz_b = [(j, bj) for j, bj in enumerate(b[: n + 1]) if bj]
    for i, ai in enumerate(a[: n + 1]):
        if not ai:
            continue
        for j, bj in nz_b:
            if i + j > n:
                break
            out[i + j] = out[i + j] + ai * bj
    return out


def _compose_full(f, g, n: int, exact: bool):
    """``f(g)`` for full arrays; ``g`` must have zero constant term."""
    acc = _zeros(n, exact)
    acc[0] = f[n]
    for k in range(n - 1, 0, -1):
        acc = _mul(acc, g, n, exact)
        acc[0] = acc[0] + f[k]
    out = _mul(acc, g, n, exact)
    if not exact:
        out = out + f[0]
    else:
        out[0] = out[0] + f[0]
    return out


def _pair(f: JetSeries, g: JetSeries):
    if f.order != g.order:
        raise OrderMismatch(f"truncation orders differ: {f.order} vs {g.order}")
    if f.exact == g.exact:
        return f._c, g._c, f.exact
    return _as_float(f._c), _as_float(g._c), False


def compose(f: JetSeries, g: JetSeries) -> JetSeries:
    """``f o g`` truncated to the common order."""
    fc, gc, exact = _pair(f, g)
    return JetSeries._raw(_compose_full(fc, gc, f.order, exact), exact)


def identity(order: int, exact: bool = False) -> JetSeries:
    return JetSeries([1], order=order, exact=exact)


def linear(lam, order: int, exact: bool = False) -> JetSeries:
    """The linear germ ``L_lam(z) = lam z``."""
    return JetSeries([lam], order=order, exact=exact)


def rigid_rotation(p: int, q: int, order: int) -> JetSeries:
    """``R_{p/q}(z) = e^{2 pi i p/q} z``; exact when the multiplier is a Gaussian integer."""
    p %= q
    exact_units = {
        Fraction(0): GaussianRational(1),
        Fraction(1, 4): GaussianRational(0, 1),
        Fraction(1, 2): GaussianRational(-1),
        Fraction(3, 4): GaussianRational(0, -1),
    }
    key = Fraction(p, q)
    if key in exact_units:
        return linear(exact_units[key], order, exact=True)
    return linear(cmath.exp(2j * math.pi * p / q), order)


def _ensure_invertible(f: JetSeries, tau_zero: float = TAU_ZERO):
    c1 = f._c[1]
    if (f.exact and not c1) or abs(complex(c1)) <= tau_zero:
        raise NotInvertible(f"multiplier {complex(c1)} is not invertible")


def invert(f: JetSeries, tau_zero: float = TAU_ZERO) -> JetSeries:
    """Compositional inverse, solved order by order from ``f(g) = z``."""
    _ensure_invertible(f, tau_zero)
    n, exact = f.order, f.exact
    c1 = f._c[1]
    g = _zeros(n, exact)
    g[1] = (GaussianRational(1) / c1) if exact else 1 / c1
    for m in range(2, n + 1):
        # Only g_2..g_{m-1} are set, so f(g) is correct through order m-1
        # and its order-m coefficient is off by c_1 g_m.
        fg = _compose_full(f._c, g, m, exact)
        g[m] = -fg[m] / c1
    return JetSeries._raw(g, exact)


def iterate(f: JetSeries, m: int) -> JetSeries:
    """``m``-fold composition; negative ``m`` iterates the inverse."""
    if m < 0:
        f, m = invert(f), -m
    result = identity(f.order, f.exact)
    base = f
    while m:
        if m & 1:
            result = compose(result, base)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def distance(f: JetSeries, g: JetSeries) -> float:
    """Max coefficient modulus of ``f - g`` (orders must agree)."""
    if f.order != g.order:
        raise OrderMismatch(f"truncation orders differ: {f.order} vs {g.order}")
    return float(np.max(np.abs(_as_float(f._c) - _as_float(g._c))))


def abs_jet(f: JetSeries) -> JetSeries:
    """Jet of coefficient moduli; composing these gives majorants for roundoff."""
    return JetSeries._raw(np.abs(_as_float(f._c)), exact=False)


def relative_distance(f: JetSeries, g: JetSeries, scale: JetSeries) -> float:
    """Max over ``k`` of ``|f_k - g_k| / max(1, scale_k)``."""
    if not f.order == g.order == scale.order:
        raise OrderMismatch("truncation orders differ")
    diff = np.abs(_as_float(f._c) - _as_float(g._c))
    return float(np.max(diff / np.maximum(1.0, np.abs(_as_float(scale._c)))))


def is_identity(f: JetSeries, tol: float = 0.0) -> bool:
    if f.exact and tol == 0:
        return f == identity(f.order, exact=True)
    return distance(f.to_float(), identity(f.order)) <= tol


def rotation_number(f: JetSeries) -> complex:
    """``(1/2 pi i) log f'(0)`` in C/Z, real part normalized into [0, 1)."""
    _ensure_invertible(f)
    c1 = complex(f._c[1])
    re = (cmath.phase(c1) / (2 * math.pi)) % 1.0
    if re >= 1.0:
        re = 0.0
    return complex(re, -math.log(abs(c1)) / (2 * math.pi))


class Commutation(NamedTuple):
    commutes: bool
    residual: float


def commutes_to_order(f: JetSeries, g: JetSeries, tol: float = TAU_RES) -> Commutation:
    residual = distance(compose(f, g), compose(g, f))
    return Commutation(residual <= tol, residual)


# -- classification --------------------------------------------------------


class GermTag(str, enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    INDIFFERENT_IRRATIONAL = "indifferent-irrational"
    PARABOLIC_NONDEGENERATE = "parabolic-nondegenerate"
    PARABOLIC_DEGENERATE = "parabolic-degenerate"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class GermClass:
    tag: GermTag
    multiplier: complex
    # Fraction p/q in [0, 1) for parabolic germs, a float angle otherwise.
    rotation: Fraction | float | complex | None

    def to_json(self) -> dict:
        rot = self.rotation
        if isinstance(rot, Fraction):
            rot_doc = {"p": rot.numerator, "q": rot.denominator}
        elif isinstance(rot, complex):
            rot_doc = [rot.real, rot.imag]
        else:
            rot_doc = rot
        lam = complex(self.multiplier)
        return {"tag": self.tag.value, "multiplier": [lam.real, lam.imag], "rotation": rot_doc}


def convergents(x: Fraction, q_max: int):
    """Continued-fraction convergents ``p/q`` of ``x`` with ``q <= q_max``."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = math.floor(x)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > q_max:
            return
        yield Fraction(p1, q1)
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def recognize_rational(alpha: float, q_max: int = Q_MAX, tol: float = TAU_UNIT):
    """Certify ``alpha`` (mod 1) as a rational with denominator at most ``q_max``.

    A convergent ``p/q`` is accepted when ``|alpha - p/q| <= max(tol / q^2, 4 ulp)``.
    Returns ``(fraction_or_None, suspicious)`` where ``suspicious`` flags an
    unusually good approximation that still failed certification.
    """
    x = Fraction(alpha % 1.0)
    suspicious = False
    for c in convergents(x, q_max):
        err = abs(float(x - c))
        q = c.denominator
        if err <= max(tol / q**2, _ANGLE_EPS):
            return c % 1, False
        if q * q * err < _SUSPICIOUS_APPROX:
            suspicious = True
    return None, suspicious


_GAUSSIAN_UNITS = {
    GaussianRational(1): Fraction(0),
    GaussianRational(0, 1): Fraction(1, 4),
    GaussianRational(-1): Fraction(1, 2),
    GaussianRational(0, -1): Fraction(3, 4),
}


def classify(
    f: JetSeries,
    q_max: int = Q_MAX,
    tau_unit: float = TAU_UNIT,
    tau_res: float = TAU_RES,
) -> GermClass:
    _ensure_invertible(f)
    lam = f._c[1]
    lam_c = complex(lam)
    if f.exact:
        norm = lam.norm()
        if norm != 1:
            tag = GermTag.ATTRACTING if norm < 1 else GermTag.REPELLING
            return GermClass(tag, lam_c, rotation_number(f))
        if lam not in _GAUSSIAN_UNITS:
            # The only roots of unity in Q(i) are the fourth roots.
            return GermClass(GermTag.INDIFFERENT_IRRATIONAL, lam_c, rotation_number(f).real)
        rot = _GAUSSIAN_UNITS[lam]
        degenerate = is_identity(iterate(f, rot.denominator))
    else:
        modulus = abs(lam_c)
        if modulus < 1 - tau_unit:
            return GermClass(GermTag.ATTRACTING, lam_c, rotation_number(f))
        if modulus > 1 + tau_unit:
            return GermClass(GermTag.REPELLING, lam_c, rotation_number(f))
        alpha = rotation_number(f).real
        rot, suspicious = recognize_rational(alpha, q_max, tau_unit)
        if rot is None:
            tag = GermTag.UNDETERMINED if suspicious else GermTag.INDIFFERENT_IRRATIONAL
            return GermClass(tag, lam_c, alpha)
        degenerate = is_identity(iterate(f, rot.denominator), tau_res)
    tag = GermTag.PARABOLIC_DEGENERATE if degenerate else GermTag.PARABOLIC_NONDEGENERATE
    return GermClass(tag, lam_c, rot)
