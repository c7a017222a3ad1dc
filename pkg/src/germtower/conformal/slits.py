"""Radially slit disks: uniformization, intrinsic rotations and root extraction."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainViolation, GermError
from .maps import (
    AnalyticMap,
    DiskAutomorphism,
    Guarded,
    Linear,
    Mobius,
    Power,
    RadialLift,
    Root,
    Rotation,
    Scale,
    chain,
    disk_check,
)

TAU_MAP = 1e-9
SLIT_SLACK = 1e-14


@dataclass(frozen=True)
class SlitDomain:
    """``D(eps, q)``: the disk of radius ``eps0`` minus ``q`` radial slits ``[eps, eps0)``."""

    eps0: float
    eps: float
    q: int

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if not 0 < self.eps < self.eps0:
            raise ValueError("need 0 < eps < eps0")
        if self.q < 1:
            raise ValueError("need at least one slit")

    def on_slit(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        return (r >= self.eps * (1 - SLIT_SLACK)) & (self._ray_offset(z) <= SLIT_SLACK * self.eps0)

    def _ray_offset(self, z: np.ndarray) -> np.ndarray:
        """Angular offset from the nearest slit ray, times the modulus."""
        turns = np.angle(z) * self.q / (2 * math.pi)
        return np.abs(turns - np.round(turns)) * 2 * math.pi / self.q * np.abs(z)

    def outside(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return (np.abs(z) > self.eps0 * (1 + 1e-12)) | self.on_slit(z)

    def contains(self, z) -> np.ndarray:
        return ~self.outside(z)

    @property
    def endpoints(self) -> np.ndarray:
        """Slit tips ``eps e^{2 pi i j/q}``."""
        return self.eps * np.exp(2j * math.pi * np.arange(self.q) / self.q)

    def sample(self, count: int, rng: np.random.Generator, margin: float = 1e-6) -> np.ndarray:
        """Uniform points of the domain, at least ``margin * eps0`` from the boundary."""
        out = []
        while sum(len(x) for x in out) < count:
            r = self.eps0 * (1 - margin) * np.sqrt(rng.random(count))
            z = r * np.exp(2j * math.pi * rng.random(count))
            ok = (np.abs(z) < self.eps) | (self._ray_offset(z) > margin * self.eps0)
            out.append(z[ok])
        return np.concatenate(out)[:count]

    def to_json(self) -> dict:
        return {"eps0": self.eps0, "eps": self.eps, "q": self.q}


def _single_slit_chain(s: float) -> AnalyticMap:
    """Unnormalized chain ``D - [s, 1) -> D`` with no subtraction of nearly equal terms.

    The tip ``s`` is sent to 0 first, so the square root acts on the slit
    itself rather than on a difference of squares near 1.
    """
    steps = [
        DiskAutomorphism(s),                  # slit -> [0, 1), 0 -> -s
        Linear(-1),                           # slit -> (-1, 0]
        Root(2),                              # -> right half-disk
        Mobius(1, -1j, 1, 1j),                # -> third quadrant
        Power(2, center=-3 * math.pi / 4),    # -> upper half-plane
    ]
    m = chain(*steps)
    xi0 = m(0.0)
    m = chain(m, Mobius(1, -xi0, 1, -xi0.conjugate()))  # -> disk, 0 -> 0
    d = m.derivative_at_0()
    return chain(m, Linear(abs(d) / d))


def single_slit_uniformizer(s: float) -> AnalyticMap:
    """Riemann map ``F`` of ``D - [s, 1)`` onto ``D`` with ``F(0) = 0``, ``F'(0) > 0``."""
    if not 0 < s < 1:
        raise ValueError("slit tip must lie in (0, 1)")
    dom = SlitDomain(1.0, s, 1)
    return Guarded(_single_slit_chain(s), dom.outside, disk_check(1.0), label=f"slit-map(s={s})")


def q_slit_uniformizer(d: SlitDomain) -> AnalyticMap:
    """``F_q(z) = [F_1((z/eps0)^q)]^{1/q}`` with ``F_1`` the map of ``D - [(eps/eps0)^q, 1)``.

    The root is realized by :class:`RadialLift`, which makes ``F_q``
    single-valued and commute with ``z -> e^{2 pi i/q} z`` exactly.
    """
    s = (d.eps / d.eps0) ** d.q
    F1 = Guarded(_single_slit_chain(s), SlitDomain(1.0, s, 1).outside, disk_check(1.0), label="slit-map")
    lift = RadialLift(F1, d.q, radius=s, inverse_radius=1.0) if d.q > 1 else F1
    body = chain(Scale(1 / d.eps0), lift)
    return Guarded(body, d.outside, disk_check(1.0), label=f"slit-map(q={d.q}, eps={d.eps}, eps0={d.eps0})")


def intrinsic_rotation(d: SlitDomain, alpha: float, F: AnalyticMap | None = None) -> AnalyticMap:
    """``F^{-1} o R_alpha o F``, the automorphism of ``d`` fixing 0 with derivative ``e^{2 pi i alpha}``."""
    F = F if F is not None else q_slit_uniformizer(d)
    return chain(F, Rotation(alpha), F.inverse())


def prop5_root(h: AnalyticMap, q: int, eps: float, eps0: float, a: int) -> AnalyticMap:
    """``phi = h^{-1} o R_{D(eps,q), 1/(aq)} o h``, an ``a``-th root of ``h^{-1} o R_{1/q} o h``."""
    if q < 2 or a < 2:
        raise GermError("need q >= 2 and a >= 2")
    d = SlitDomain(eps0, eps, q)
    return chain(h, intrinsic_rotation(d, 1 / (a * q)), h.inverse())


def iterate_map(f: AnalyticMap, z, m: int):
    """``f^m(z)`` by repeated evaluation; escapes raise :class:`DomainViolation`."""
    z = np.asarray(z, dtype=complex)
    for _ in range(m):
        z = f(z)
    return z


@dataclass(frozen=True)
class ProbeResult:
    limits: tuple[complex, complex]
    history: tuple[tuple[float, complex, complex], ...]

    @property
    def separation(self) -> float:
        return abs(self.limits[0] - self.limits[1])

    def to_json(self) -> dict:
        return {
            "limits": [[w.real, w.imag] for w in self.limits],
            "separation": self.separation,
            "history": [
                {"delta": dl, "plus": [a.real, a.imag], "minus": [b.real, b.imag]} for dl, a, b in self.history
            ],
        }


def biaccessibility_probe(
    d: SlitDomain,
    zstar: complex,
    delta0: float = 1e-8,
    refinements: int = 3,
    F: AnalyticMap | None = None,
) -> ProbeResult:
    """One-sided boundary limits of the uniformizer at a slit point.

    ``zstar +- delta n`` (``n`` normal to the slit) is evaluated as ``delta``
    halves.  Near a tip the images approach their limit like ``sqrt(delta)``,
    elsewhere like ``delta``; the limits are Richardson-extrapolated in
    ``sqrt(delta)`` from the two finest refinements, which removes the
    leading term in the first case and keeps ``O(delta)`` in the second.
    """
    zstar = complex(zstar)
    r = abs(zstar)
    if not (d.on_slit(zstar) and d.eps * (1 - 1e-12) <= r < d.eps0):
        raise DomainViolation("probe point must lie on a slit, from its tip inward of eps0", zstar)
    if refinements < 1:
        raise ValueError("need at least one refinement")
    F = F if F is not None else q_slit_uniformizer(d)
    normal = 1j * zstar / r
    history = []
    delta = delta0
    for _ in range(refinements + 1):
        plus, minus = F(zstar + delta * normal), F(zstar - delta * normal)
        history.append((delta, plus, minus))
        delta /= 2
    k = math.sqrt(2)
    (_, p1, m1), (_, p2, m2) = history[-2], history[-1]
    limits = ((k * p2 - p1) / (k - 1), (k * m2 - m1) / (k - 1))
    return ProbeResult(limits, tuple(history))


def circle_angle_gap(w1: complex, w2: complex) -> float:
    """Arc distance between the arguments of two points."""
    return abs(cmath.phase(w1 / w2))
