"""Koenigs linearization and formal centralizers of non-resonant germs."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ResonantMultiplier, ZeroMultiplier
from .gaussian import GaussianRational
from .jets import JetSeries, _compose_full, _exact_coeff, _mul, _zeros, compose, invert, linear

TAU_DIV = 1e-10


@dataclass(frozen=True)
class LinearizationResult:
    h: JetSeries
    lam: complex
    divisors: tuple

    def to_json(self) -> dict:
        return {
            "h": self.h.to_json(),
            "lambda": [complex(self.lam).real, complex(self.lam).imag],
            "divisors": [[complex(d).real, complex(d).imag] for d in self.divisors],
        }


def small_divisors(lam, order: int) -> list:
    """``lam^n - lam`` for ``2 <= n <= order``."""
    out, power = [], lam
    for _ in range(2, order + 1):
        power = power * lam
        out.append(power - lam)
    return out


def koenigs_linearize(f: JetSeries, tau_div: float = TAU_DIV) -> LinearizationResult:
    """Tangent-to-identity ``h`` with ``h o f = lam * h`` to the order of ``f``.

    Comparing the coefficient of ``z^n`` gives
    ``(lam^n - lam) h_n = -sum_{k<n} h_k [f^k]_n``, where ``f^k`` is the
    ``k``-th multiplicative power; the ``h_n`` are found by back-substitution.
    """
    n_max, exact = f.order, f.exact
    lam = f[1]
    divisors = small_divisors(lam, n_max)
    for n, d in enumerate(divisors, start=2):
        if (exact and not d) or (not exact and abs(d) <= tau_div):
            raise ResonantMultiplier(n, complex(d))

    fc = f._c
    powers = [None, fc]
    for _ in range(2, n_max):
        powers.append(_mul(powers[-1], fc, n_max, exact))

    h = _zeros(n_max, exact)
    h[1] = GaussianRational(1) if exact else 1.0
    for n in range(2, n_max + 1):
        acc = GaussianRational(0) if exact else 0j
        for k in range(1, n):
            acc = acc + h[k] * powers[k][n]
        h[n] = -acc / divisors[n - 2]
    return LinearizationResult(JetSeries._raw(h, exact), lam, tuple(divisors))


def centralizer_element(f: JetSeries, mu, tau_div: float = TAU_DIV) -> JetSeries:
    """The formal centralizer element of ``f`` with multiplier ``mu``.

    This is ``h^{-1} o L_mu o h`` for the Koenigs linearizer ``h``.  It is
    computed from ``f o g = g o f`` directly, whose ``z^n`` coefficient reads
    ``(lam^n - lam) g_n = [f o g_{<n}]_n - [g_{<n} o f]_n``: the same divisors
    as for ``h``, without forming ``h`` and ``h^{-1}``, whose coefficients
    grow like ``|lam|^{-n}`` and would set the roundoff scale.
    """
    if mu == 0:
        raise ZeroMultiplier("centralizer multiplier must be non-zero")
    n_max, exact = f.order, f.exact
    lam = f[1]
    divisors = small_divisors(lam, n_max)
    for n, d in enumerate(divisors, start=2):
        if (exact and not d) or (not exact and abs(d) <= tau_div):
            raise ResonantMultiplier(n, complex(d))
    fc = f._c
    g = _zeros(n_max, exact)
    g[1] = _exact_coeff(mu) if exact else complex(mu)
    for n in range(2, n_max + 1):
        fg = _compose_full(fc, g, n, exact)[n]
        gf = _compose_full(g, fc, n, exact)[n]
        g[n] = (fg - gf) / divisors[n - 2]
    return JetSeries._raw(g, exact)


@dataclass(frozen=True)
class LinearCentralizerSpace:
    """Which coefficients ``g_n`` of ``g`` commuting with ``L_lam`` are free."""

    order: int
    free: tuple[int, ...]
    forced: tuple[int, ...]

    @property
    def only_linear(self) -> bool:
        return not self.free

    def to_json(self) -> dict:
        return {"order": self.order, "free": list(self.free), "forced": list(self.forced)}


def centralizer_solve_linear(lam, order: int, tau_div: float = TAU_DIV) -> LinearCentralizerSpace:
    """Solve ``lam^n g_n = lam g_n`` for ``2 <= n <= order``.

    ``lam`` may be a complex number (decided with ``tau_div``), a
    :class:`GaussianRational` (decided exactly), or a :class:`Fraction`
    ``p/q`` standing for the exact root of unity ``e^{2 pi i p/q}``, in which
    case ``lam^n = lam`` iff ``q`` divides ``(n - 1) p``.
    """
    free, forced = [], []
    for n in range(2, order + 1):
        if isinstance(lam, Fraction):
            resonant = ((n - 1) * lam).denominator == 1
        elif isinstance(lam, GaussianRational):
            resonant = lam**n == lam
        else:
            lam_c = complex(lam)
            resonant = abs(lam_c**n - lam_c) <= tau_div
        (free if resonant else forced).append(n)
    return LinearCentralizerSpace(order, tuple(free), tuple(forced))


def divisor_growth(lam: complex, order: int, f2: complex = 1.0) -> list[float]:
    """``|h_n|`` of the Koenigs linearizer of ``lam z + f2 z^2``, ``n = 1..order``."""
    res = koenigs_linearize(JetSeries([lam, f2], order=order))
    return [abs(c) for c in res.h.coeffs]


def multiplier_from_angle(alpha: float) -> complex:
    return cmath.exp(2j * math.pi * alpha)
