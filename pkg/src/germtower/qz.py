"""Exact arithmetic in Q/Z and the subgroup structure used by the tower.

Everything here is integer/rational arithmetic; no floating point enters the
subgroup or neighborhood computations.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, order=True)
class QZRational:
    """Reduced representative ``p/q`` of an element of Q/Z, ``0 <= p < q``."""

    p: int
    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("denominator must be positive")
        p, q = self.p % self.q, self.q
        g = math.gcd(p, q)
        if p == 0:
            p, q = 0, 1
        else:
            p, q = p // g, q // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def of(cls, x) -> QZRational:
        """Build from a Fraction, int, ``"p/q"`` string or another QZRational."""
        if isinstance(x, QZRational):
            return x
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    def __add__(self, other: QZRational) -> QZRational:
        return qz_add(self, other)

    def __neg__(self) -> QZRational:
        return qz_neg(self)

    def __sub__(self, other: QZRational) -> QZRational:
        return qz_add(self, qz_neg(other))

    def __mul__(self, k: int) -> QZRational:
        return QZRational(self.p * k, self.q)

    __rmul__ = __mul__

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, doc) -> QZRational:
        if isinstance(doc, dict):
            return cls(int(doc["p"]), int(doc["q"]))
        return cls.of(doc)


def qz_add(x: QZRational, y: QZRational) -> QZRational:
    return QZRational.of(x.fraction + y.fraction)


def qz_neg(x: QZRational) -> QZRational:
    return QZRational(-x.p, x.q)


def qz_order(x: QZRational) -> int:
    return x.q


def cyclic_generator(xs: Iterable[QZRational]) -> QZRational:
    """Generator ``1/q`` of the subgroup generated by ``xs``; ``q`` is the lcm of the orders."""
    xs = [QZRational.of(x) for x in xs]
    if not xs:
        raise ValueError("need at least one element")
    q = reduce(math.lcm, (qz_order(x) for x in xs), 1)
    return QZRational(1 % q, q)


def subgroup_closure(xs: Iterable[QZRational]) -> frozenset[QZRational]:
    """Brute-force closure under addition, by search over residues mod the common denominator."""
    gens = [QZRational.of(x) for x in xs]
    L = math.lcm(*(g.q for g in gens)) if gens else 1
    steps = [g.p * (L // g.q) for g in gens]
    seen = bytearray(L)
    seen[0] = 1
    frontier = [0]
    while frontier:
        nxt = []
        for e in frontier:
            for g in steps:
                s = (e + g) % L
                if not seen[s]:
                    seen[s] = 1
                    nxt.append(s)
        frontier = nxt
    return frozenset(QZRational(k, L) for k in range(L) if seen[k])


def cyclic_subgroup(gen: QZRational) -> frozenset[QZRational]:
    return frozenset(QZRational(k * gen.p, gen.q) for k in range(gen.q))


@dataclass(frozen=True)
class CyclicTower:
    """Chain ``q_1 | q_2 | ...`` with ratios ``a_{n+1} = q_{n+1}/q_n >= 2``."""

    qs: tuple[int, ...]

    def __post_init__(self):
        qs = tuple(int(q) for q in self.qs)
        object.__setattr__(self, "qs", qs)
        if not qs or qs[0] < 1:
            raise ValueError("tower needs positive entries")
        for a, b in zip(qs, qs[1:]):
            if b % a or b // a < 2:
                raise ValueError(f"{b} is not a proper multiple of {a}")

    @property
    def ratios(self) -> tuple[int, ...]:
        """``(a_2, a_3, ...)``."""
        return tuple(b // a for a, b in zip(self.qs, self.qs[1:]))

    def __len__(self):
        return len(self.qs)

    def to_json(self) -> dict:
        return {"qs": list(self.qs)}

    @classmethod
    def from_json(cls, doc: dict) -> CyclicTower:
        return cls(tuple(doc["qs"]))


def tower_decompose(xs: Iterable[QZRational], depth: int) -> CyclicTower:
    """Orders of ``<x_1..x_k>`` at each strict growth, stopping after ``depth`` jumps.

    A shorter tower means the enumeration stabilized (finite subgroup so far).
    """
    qs: list[int] = []
    current = 1
    for x in xs:
        current_next = math.lcm(current, qz_order(QZRational.of(x)))
        if current_next != current:
            current = current_next
            qs.append(current)
            if len(qs) == depth:
                break
    if not qs:
        raise ValueError("enumeration generates the trivial subgroup")
    return CyclicTower(tuple(qs))


def delta_sequence(tower: CyclicTower, factor: Fraction = Fraction(1, 3)) -> list[Fraction]:
    """``delta_n = factor / q_{n+1}`` for each level that has a successor."""
    if len(tower) < 2:
        raise ValueError("need at least two levels")
    return [Fraction(factor) / q for q in tower.qs[1:]]


@dataclass(frozen=True)
class IntersectionReport:
    holds: bool
    superset_ok: bool
    levels: tuple[int, ...]
    survivors: int
    strays: int
    uncertified: tuple[Fraction, ...]
    max_tail_levels: int
    vacuous: bool = False

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "superset_ok": self.superset_ok,
            "levels": list(self.levels),
            "finite_depth_survivors": self.survivors,
            "strays": self.strays,
            "uncertified": [str(x) for x in self.uncertified],
            "max_tail_levels": self.max_tail_levels,
            "vacuous": self.vacuous,
        }


def _dist_to_lattice(x: Fraction, q: int) -> Fraction:
    """Distance from ``x`` to ``(1/q) Z``."""
    y = x * q
    return abs(y - round(y)) / q


def _neighborhood_intervals(q: int, delta: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Open intervals ``(k/q - delta, k/q + delta)``, ``k = 0..q``, merged.

    Restricted to [0, 1) this is exactly the neighborhood taken mod 1.
    """
    out: list[tuple[Fraction, Fraction]] = []
    for k in range(q + 1):
        lo, hi = Fraction(k, q) - delta, Fraction(k, q) + delta
        if out and lo < out[-1][1]:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def _intersect(a, b):
    out, i, j = [], 0, 0
    while i < len(a) and j < len(b):
        lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def _grid_in_interval(lo: Fraction, hi: Fraction, b: np.ndarray):
    """Pairs ``(a, b)`` with ``lo < a/b < hi`` and ``0 <= a < b``, exact integer bounds."""
    a_lo = np.maximum((lo.numerator * b) // lo.denominator + 1, 0)
    a_hi = np.minimum(-((-hi.numerator * b) // hi.denominator) - 1, b - 1)
    counts = np.maximum(a_hi - a_lo + 1, 0)
    bb = np.repeat(b, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(a_lo, counts) + offsets, bb


def _tail_levels(a: np.ndarray, b: np.ndarray, q_last: int, factor: Fraction, max_levels: int):
    """Extra levels needed to exclude each ``a/b`` for every continuation of the tower.

    Continue with ratio 2, the least expanding choice: while a point survives,
    its signed offset from ``(1/q)Z`` is multiplied by the ratio and, for
    ``factor < 1/2``, never wraps, so exclusion under ratio 2 at some level
    bounds every continuation.  Entries that are never excluded get -1.
    """
    out = np.full(a.shape, -1, dtype=np.int64)
    if factor >= Fraction(1, 2):
        return out
    r = (q_last % b) * a % b  # q a mod b, so ||q a/b|| = min(r, b - r) / b
    fn, fd = factor.numerator, factor.denominator
    for level in range(1, max_levels + 1):
        hit = (out < 0) & (2 * np.minimum(r, b - r) * fd >= fn * b)
        out[hit] = level
        if (out >= 0).all():
            break
        r = 2 * r % b
    return out


def neighborhood_intersection_check(
    tower: CyclicTower,
    start: int,
    resolution: int,
    factor: Fraction = Fraction(1, 3),
    max_tail_levels: int = 200,
    chunk: int = 256,
) -> IntersectionReport:
    """Check ``cap_{n >= start} ((1/q_n)Z + D_{delta_n})/Z = ((1/q_start)Z)/Z``.

    Levels are 1-indexed and ``delta_n = factor / q_{n+1}``, so the available
    levels are ``start .. len(tower) - 1``.

    * superset: every ``k/q_start`` lies in each available neighborhood.
    * subset: every grid point ``a/b`` in [0, 1) with ``b <= resolution``
      that survives all available levels is a multiple of ``1/q_start``, or
      is excluded at a later level for every continuation of the tower.
    """
    qs = tower.qs
    if len(qs) < 2 or start >= len(qs):
        warnings.warn("tower too short for any neighborhood level; check is vacuous")
        return IntersectionReport(True, True, (), 0, 0, (), 0, vacuous=True)
    if start < 1:
        raise ValueError("levels are 1-indexed")
    factor = Fraction(factor)
    deltas = delta_sequence(tower, factor)
    levels = range(start - 1, len(qs) - 1)
    q_start = qs[start - 1]

    superset_ok = all(
        _dist_to_lattice(Fraction(k, q_start), qs[n]) < deltas[n]
        for k in range(q_start)
        for n in levels
    )

    region = [(Fraction(-1), Fraction(2))]
    for n in levels:
        region = _intersect(region, _neighborhood_intervals(qs[n], deltas[n]))

    survivors = strays = worst = 0
    uncertified: list[Fraction] = []
    for b0 in range(1, resolution + 1, chunk):
        b = np.arange(b0, min(b0 + chunk, resolution + 1), dtype=np.int64)
        for lo, hi in region:
            a, bb = _grid_in_interval(lo, hi, b)
            keep = np.gcd(a, bb) == 1
            a, bb = a[keep], bb[keep]
            survivors += len(a)
            stray = (a * q_start) % bb != 0
            a, bb = a[stray], bb[stray]
            strays += len(a)
            if not len(a):
                continue
            tail = _tail_levels(a, bb, qs[-1], factor, max_tail_levels)
            bad = np.nonzero(tail < 0)[0]
            uncertified += [Fraction(int(a[i]), int(bb[i])) for i in bad[: 10 - len(uncertified)]]
            if tail.size and (tail >= 0).any():
                worst = max(worst, int(tail[tail >= 0].max()))
            if len(uncertified) >= 10:
                break
        if len(uncertified) >= 10:
            break
    holds = superset_ok and not uncertified
    return IntersectionReport(
        holds,
        superset_ok,
        tuple(n + 1 for n in levels),
        survivors,
        strays,
        tuple(uncertified),
        worst,
    )


@dataclass(frozen=True)
class Irrational:
    """Marker for a rotation number known (by the caller) to be irrational."""

    label: str = "irrational"
    value: float | None = None


class SubgroupCase(str, enum.Enum):
    FINITE = "case-i"
    INFINITE_TORSION = "case-ii"
    IRRATIONAL = "case-iii"


def classify_subgroup(rotations: Sequence, finite: bool) -> SubgroupCase:
    """Kind of maximal abelian subgroup from its tagged rotation numbers."""
    if any(isinstance(r, Irrational) for r in rotations):
        return SubgroupCase.IRRATIONAL
    for r in rotations:
        QZRational.of(r)
    return SubgroupCase.FINITE if finite else SubgroupCase.INFINITE_TORSION
