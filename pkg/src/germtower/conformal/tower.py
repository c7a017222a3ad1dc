"""The inductive tower of roots ``f_n = f_{n+1}^{a_{n+1}}`` and its numerical audit.

Level 1 is the rigid rotation ``R_{1/q_1}``.  Given ``f_n = h_n^{-1} R_{1/q_n} h_n``
with ``h_n`` tangent to the identity, the next germ is the conjugate by
``h_n`` of the intrinsic rotation of angle ``1/q_{n+1}`` of the slit domain
``D(eps_n, q_n)``; the new uniformizer absorbs the slit-domain map.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import CertificationFailure, DepthExceeded, DomainViolation, GermError
from ..qz import CyclicTower
from .maps import AnalyticMap, Identity, Rotation, Scale, chain
from .slits import SlitDomain, iterate_map, q_slit_uniformizer

SAFETY = 0.8
BOUNDARY_SAMPLES = 2**10
TAU_TOWER = 1e-7
TAU_DERIV = 1e-10


@dataclass
class TowerLevel:
    index: int
    q: int
    a: int | None
    eps: float
    eps0: float
    h: AnalyticMap
    f: AnalyticMap
    endpoints: np.ndarray
    derivative_at_0: complex
    alpha: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def domain(self) -> SlitDomain:
        return SlitDomain(self.eps0, self.eps, self.q)

    def endpoints_at(self, eps: float) -> np.ndarray:
        """``h_n^{-1}(eps e^{2 pi i j/q_n})``."""
        return self.h.inverse()(eps * np.exp(2j * math.pi * np.arange(self.q) / self.q))

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "q": self.q,
            "a": self.a,
            "eps": self.eps,
            "eps0": self.eps0,
            "alpha": self.alpha,
            "endpoints": [[z.real, z.imag] for z in self.endpoints],
            "derivative_at_0": [self.derivative_at_0.real, self.derivative_at_0.imag],
            "diagnostics": self.diagnostics,
        }


def _certify_radius(F: AnalyticMap, d: SlitDomain, scale: float) -> tuple[float, dict]:
    """Inscribed radius of ``scale * F(d)`` from boundary samples on ``|z| = eps0``.

    The samples avoid the slit directions; a uniformizer onto the disk sends
    them to ``|w| = 1``, so the spread of ``|F|`` is reported as a sanity
    diagnostic and a large spread refuses certification.
    """
    m = BOUNDARY_SAMPLES
    theta = 2 * math.pi * (np.arange(m) + 0.5) / m
    w = np.abs(F(d.eps0 * np.exp(1j * theta))) * scale
    lo, hi = float(w.min()), float(w.max())
    diag = {"boundary_min": lo, "boundary_max": hi, "samples": m, "safety": SAFETY, "rigorous": False}
    if not (np.isfinite(lo) and lo > 0) or hi - lo > 1e-6 * hi:
        raise CertificationFailure(f"boundary image not a circle: |w| in [{lo}, {hi}]")
    return SAFETY * lo, diag


def tower_build(
    tower: CyclicTower,
    sigma: float = 0.3,
    depth: int | None = None,
    alpha_shift: dict[int, float] | None = None,
) -> list[TowerLevel]:
    """Levels ``1..depth`` of the construction with ``eps_n = sigma * eps0_n``.

    ``alpha_shift`` maps a level index ``n >= 2`` to an angle added to
    ``1/q_n`` (fault injection).
    """
    qs = tower.qs
    depth = len(qs) if depth is None else depth
    if depth < 1 or depth > len(qs):
        raise DepthExceeded(f"depth {depth} not in 1..{len(qs)}")
    if qs[0] < 2:
        raise GermError("q_1 must be at least 2")
    if not 0 < sigma < 1:
        raise GermError("sigma must lie in (0, 1)")
    alpha_shift = alpha_shift or {}

    h: AnalyticMap = Identity()
    alpha = 1 / qs[0]
    f: AnalyticMap = Rotation(alpha)
    eps0 = 1.0
    levels: list[TowerLevel] = []
    diag: dict = {"inscribed_radius": 1.0}
    for n in range(depth):
        q = qs[n]
        eps = sigma * eps0
        ends = h.inverse()(eps * np.exp(2j * math.pi * np.arange(q) / q))
        levels.append(
            TowerLevel(
                index=n + 1,
                q=q,
                a=None if n == 0 else q // qs[n - 1],
                eps=eps,
                eps0=eps0,
                h=h,
                f=f,
                endpoints=ends,
                derivative_at_0=f.derivative_at_0(),
                alpha=alpha,
                diagnostics=diag,
            )
        )
        if n + 1 == depth:
            break
        d = SlitDomain(eps0, eps, q)
        F = q_slit_uniformizer(d)
        c = F.derivative_at_0().real
        alpha = 1 / qs[n + 1] + alpha_shift.get(n + 2, 0.0)
        f = chain(h, F, Rotation(alpha), F.inverse(), h.inverse())
        h = chain(h, F, Scale(1 / c))
        eps0, diag = _certify_radius(F, d, 1 / c)
        diag["uniformizer_derivative"] = c
        diag["inscribed_radius"] = 1 / c
    return levels


def _sub_disk_radius(level: TowerLevel, shrink: float = 0.9) -> float:
    """Radius of a disk inside ``h_n^{-1}(D_{shrink * eps_n})``, by boundary sampling."""
    theta = 2 * math.pi * np.arange(BOUNDARY_SAMPLES) / BOUNDARY_SAMPLES
    ring = level.h.inverse()(shrink * level.eps * np.exp(1j * theta))
    return SAFETY * float(np.abs(ring).min())


def match_cyclic_shift(images: np.ndarray, targets: np.ndarray, shift: int = 1) -> dict:
    """Nearest-target assignment of ``images[j]``; ambiguous if the runner-up is within 2x."""
    q = len(targets)
    dist = np.abs(images[:, None] - targets[None, :])
    order = np.argsort(dist, axis=1)
    nearest = order[:, 0]
    best = dist[np.arange(q), nearest]
    if q > 1:
        second = dist[np.arange(q), order[:, 1]]
        ambiguous = bool(np.any(second <= 2 * best))
    else:
        ambiguous = False
    expected = (np.arange(q) + shift) % q
    return {
        "assignment": nearest.tolist(),
        "is_shift": bool(np.array_equal(nearest, expected)),
        "ambiguous": ambiguous,
        "max_distance": float(best.max()),
    }


def mu_defect(g: AnalyticMap, endpoints: np.ndarray) -> tuple[float, float]:
    """``D = max_j |g(z_j)/z_j - g'(0)|`` and ``C = max_j D_j / |z_j|``."""
    dev = np.abs(g(endpoints) / endpoints - g.derivative_at_0())
    return float(dev.max()), float((dev / np.abs(endpoints)).max())


@dataclass
class TowerReport:
    vacuous: bool
    tol: float
    pairs: list[dict] = field(default_factory=list)
    derivatives: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if self.vacuous:
            return True
        checks = [d["ok"] for d in self.derivatives]
        for p in self.pairs:
            checks += [p["pointwise"]["ok"], p["endpoints"]["ok"], p["mu"]["ok"]]
        return all(checks)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "vacuous": self.vacuous,
            "tol": self.tol,
            "derivative_audit": self.derivatives,
            "pairs": self.pairs,
        }


def _pointwise(lo: TowerLevel, hi: TowerLevel, samples: int, tol: float, rng) -> dict:
    rho = _sub_disk_radius(lo)
    z = rho * np.sqrt(rng.random(samples)) * np.exp(2j * math.pi * rng.random(samples))
    try:
        resid = float(np.abs(iterate_map(hi.f, z, hi.a) - lo.f(z)).max())
    except DomainViolation as exc:
        return {"ok": False, "residual": None, "radius": rho, "escaped": exc.to_json()}
    return {"ok": resid <= tol, "residual": resid, "radius": rho, "samples": samples}


def _mu_check(level: TowerLevel, ratio: float) -> dict:
    eps1, eps2 = level.eps, level.eps / ratio
    d1, c1 = mu_defect(level.f, level.endpoints_at(eps1))
    d2, c2 = mu_defect(level.f, level.endpoints_at(eps2))
    out = {"eps": [eps1, eps2], "defect": [d1, d2], "C": [c1, c2], "eps_ratio": ratio}
    if d1 <= 1e-13 and d2 <= 1e-13:
        # a rigid rotation: g(z_j)/z_j is exactly the multiplier
        out.update(ok=True, exact=True, defect_ratio=None, exponent=None)
        return out
    r = d1 / d2
    out.update(
        defect_ratio=r,
        exponent=math.log(r) / math.log(ratio),
        exact=False,
        ok=ratio / 2 <= r <= 2 * ratio,
        # the O(eps) bound itself: C = D/|z| does not grow as eps shrinks
        upper_bound_ok=c2 <= c1 * (1 + 1e-9),
    )
    return out


def tower_verify(
    levels: list[TowerLevel],
    samples: int = 500,
    tol: float = TAU_TOWER,
    deriv_tol: float = TAU_DERIV,
    eps_ratio: float = 2.0,
    seed: int = 0,
) -> TowerReport:
    """Run the four checks on every adjacent pair of levels.

    1. ``f_{n+1}^{a_{n+1}} = f_n`` on uniform samples of a sub-disk of
       ``h_n^{-1}(D_{0.9 eps_n})`` (radius from boundary sampling).
    2. ``f_n'(0) = e^{2 pi i/q_n}``, from the chain rule.
    3. ``f_n`` permutes the endpoints ``z_j`` as ``j -> j+1``.
    4. ``|f_n(z_j)/z_j - f_n'(0)|`` at ``eps_n`` and ``eps_n/eps_ratio``: the
       defect ratio must be within a factor 2 of ``eps_ratio``.  The report
       also gives the fitted exponent and whether ``C = D/|z_j|`` is
       non-increasing (the one-sided ``O(eps)`` bound).
    """
    report = TowerReport(vacuous=len(levels) < 2, tol=tol)
    rng = np.random.default_rng(seed)
    for lv in levels:
        target = cmath.exp(2j * math.pi / lv.q)
        err = abs(lv.f.derivative_at_0() - target)
        report.derivatives.append({"level": lv.index, "error": err, "ok": err <= deriv_tol})
    if report.vacuous:
        return report
    for lo, hi in zip(levels, levels[1:]):
        ends = match_cyclic_shift(lo.f(lo.endpoints), lo.endpoints)
        ends["ok"] = ends["is_shift"] and not ends["ambiguous"] and ends["max_distance"] <= tol
        report.pairs.append(
            {
                "levels": [lo.index, hi.index],
                "a": hi.a,
                "pointwise": _pointwise(lo, hi, samples, tol, rng),
                "endpoints": ends,
                "mu": _mu_check(lo, eps_ratio),
            }
        )
    return report


def tower_to_json(levels: list[TowerLevel], tower: CyclicTower, sigma: float) -> dict:
    return {
        "qs": list(tower.qs),
        "sigma": sigma,
        "depth": len(levels),
        "levels": [lv.to_json() for lv in levels],
    }


def tower_from_json(doc: dict) -> tuple[list[TowerLevel], CyclicTower, float]:
    """Rebuild a tower from its parameters and check the stored level data against it."""
    tower = CyclicTower(tuple(doc["qs"]))
    sigma = float(doc["sigma"])
    levels = tower_build(tower, sigma, int(doc["depth"]))
    for lv, stored in zip(levels, doc.get("levels", [])):
        if abs(lv.eps - stored["eps"]) > 1e-12 * max(1.0, lv.eps):
            raise GermError(f"stored level {lv.index} does not match the rebuilt tower")
    return levels, tower, sigma


def dump_samples_csv(levels: list[TowerLevel], path, samples: int = 200, seed: int = 0) -> None:
    """Write ``level, Re z, Im z, Re f_n(z), Im f_n(z)`` rows for plotting."""
    rng = np.random.default_rng(seed)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "z_re", "z_im", "f_re", "f_im"])
        for lv in levels:
            rho = _sub_disk_radius(lv)
            z = rho * np.sqrt(rng.random(samples)) * np.exp(2j * math.pi * rng.random(samples))
            fz = lv.f(z)
            for a, b in zip(z, fz):
                w.writerow([lv.index, a.real, a.imag, b.real, b.imag])
