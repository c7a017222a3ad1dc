"""Parabolic germs: the vector fields ``X_{n,tau}``, their flows, formal normal forms.

``X_{n,tau} = z^{n+1} / (1 + tau z^n) d/dz``.  A nondegenerate parabolic
germ ``f`` with rotation number ``p/q`` is formally conjugate to
``e^{2 pi i p/q} exp(X_{n,tau})`` for a unique ``tau``;
:func:`parabolic_normalize` finds ``n``, ``tau`` and a conjugator ``phi``
with ``f = phi o e^{2 pi i p/q} exp(X_{n,tau}) o phi^{-1}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParabolic, GermError, InsufficientOrder, NotParabolic
from .gaussian import GaussianRational
from .jets import (
    TAU_RES,
    GermTag,
    JetSeries,
    _compose_full,
    _exact_coeff,
    _mul,
    _zeros,
    classify,
    compose,
    distance,
    invert,
    iterate,
    linear,
)
from .qz import QZRational


@dataclass(frozen=True)
class VectorFieldNF:
    n: int
    tau: complex | GaussianRational = 0

    def __post_init__(self):
        if self.n < 1:
            raise GermError("vector field order n must be at least 1")

    def coefficient_series(self, order: int, exact: bool = False):
        """Full coefficient array of ``z^{n+1} / (1 + tau z^n)`` up to ``z^order``."""
        n = self.n
        tau = _exact_coeff(self.tau) if exact else complex(self.tau)
        out = _zeros(order, exact)
        term = GaussianRational(1) if exact else 1.0 + 0j
        k = n + 1
        while k <= order:
            out[k] = term
            term = term * (-tau)
            k += n
        return out


def _derivative_full(c, exact: bool):
    """Full array of ``s'`` for a full array ``s`` (same length, top slot zero)."""
    n = len(c) - 1
    out = _zeros(n, exact)
    for k in range(1, n + 1):
        out[k - 1] = c[k] * k
    return out


def _apply_field(field, c, order: int, exact: bool):
    return _mul(field, _derivative_full(c, exact), order, exact)


def vf_derivation(X: VectorFieldNF, s: JetSeries) -> JetSeries:
    """``X . s = z^{n+1}/(1 + tau z^n) s'`` truncated to the order of ``s``."""
    field = X.coefficient_series(s.order, s.exact)
    return JetSeries._raw(_apply_field(field, s._c, s.order, s.exact), s.exact)


def flow(X: VectorFieldNF, t, order: int, exact: bool = False) -> JetSeries:
    """Time-``t`` flow ``sum_k t^k (X^k z) / k!``; finite since ``X`` raises order by ``n``.

    In float mode the series cancels heavily once ``|t| max(1, |tau|)`` is
    of order 1 (7 digits lost at ``t = 2i``, ``tau = i``), so the flow is
    taken at ``t / 2^m`` and squared ``m`` times.
    """
    if order < 1:
        raise GermError("order must be at least 1")
    if not exact:
        t = complex(t)
        size = abs(t) * max(1.0, abs(complex(X.tau)))
        m = max(0, math.ceil(math.log2(8 * size))) if size > 0 else 0
        if m:
            return iterate(_lie_series(X, t / 2**m, order, False), 2**m)
    return _lie_series(X, t, order, exact)


def _lie_series(X: VectorFieldNF, t, order: int, exact: bool) -> JetSeries:
    t = _exact_coeff(t) if exact else complex(t)
    field = X.coefficient_series(order, exact)
    term = _zeros(order, exact)
    term[1] = GaussianRational(1) if exact else 1.0
    total = list(term) if exact else term.copy()
    for k in range(1, (order - 1) // X.n + 1):
        term = _apply_field(field, term, order, exact)
        scale = t / k
        term = [c * scale for c in term] if exact else term * scale
        total = [a + b for a, b in zip(total, term)] if exact else total + term
    return JetSeries._raw(total, exact)


def rotation_jet(k: int, n: int, order: int) -> JetSeries:
    """``L_{e^{2 pi i k/n}}`` as a jet, exact for fourth roots of unity."""
    frac = (k % n) * 4
    if frac % n == 0:
        unit = [GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1), GaussianRational(0, -1)]
        return linear(unit[frac // n], order, exact=True)
    return linear(cmath.exp(2j * math.pi * k / n), order)


def normal_form_germ(p_over_q: QZRational, X: VectorFieldNF, order: int, exact: bool = False) -> JetSeries:
    """``e^{2 pi i p/q} exp(X_{n,tau})`` truncated to ``order``."""
    rot = rotation_jet(p_over_q.p, p_over_q.q, order)
    fl = flow(X, 1, order, exact=exact)
    if exact and not rot.exact:
        fl = fl.to_float()
    return compose(rot, fl)


@dataclass(frozen=True)
class ParabolicData:
    p_over_q: QZRational
    n: int
    a: complex
    tau: complex
    conjugator: JetSeries

    @property
    def field(self) -> VectorFieldNF:
        return VectorFieldNF(self.n, self.tau)

    def normal_form(self) -> JetSeries:
        return normal_form_germ(self.p_over_q, self.field, self.conjugator.order, self.conjugator.exact)

    def realize(self) -> JetSeries:
        """``phi o e^{2 pi i p/q} exp(X_{n,tau}) o phi^{-1}``."""
        phi = self.conjugator
        return compose(phi, compose(self.normal_form(), invert(phi)))

    def residual(self, f: JetSeries) -> float:
        return distance(self.realize().to_float(), f.to_float())

    def to_json(self) -> dict:
        return {
            "p": self.p_over_q.p,
            "q": self.p_over_q.q,
            "n": self.n,
            "a": _scalar_json(self.a),
            "tau": _scalar_json(self.tau),
            "phi": self.conjugator.to_json(),
        }


def _scalar_json(x) -> list:
    """``[re, im]``; exact values as rational strings, like jet coefficients."""
    if isinstance(x, GaussianRational):
        return [str(x.re), str(x.im)]
    x = complex(x)
    return [x.real, x.imag]


def _one(exact: bool):
    return GaussianRational(1) if exact else 1.0 + 0j


def _remove_nonresonant(f: JetSeries, q: int):
    """Tangent-to-identity ``psi`` and resonant-only ``f1`` with ``f o psi = psi o f1``.

    At order ``m`` the unknowns enter as ``(c_1 - c_1^m) psi_m - f1_m``: for
    ``q`` not dividing ``m - 1`` we kill ``f1_m``, otherwise ``psi_m = 0``.
    """
    N, exact = f.order, f.exact
    c1 = f._c[1]
    psi = _zeros(N, exact)
    psi[1] = _one(exact)
    f1 = _zeros(N, exact)
    f1[1] = c1
    for m in range(2, N + 1):
        lhs = _compose_full(f._c, psi, m, exact)[m]
        rhs = _compose_full(psi, f1, m, exact)[m]
        resid = lhs - rhs
        if (m - 1) % q:
            psi[m] = resid / (c1**m - c1)
        else:
            f1[m] = resid
    return psi, f1


def _normalize_tangent(G2, n: int, exact: bool):
    """Solve ``psi o exp(X_{n,tau}) = G2 o psi`` with ``G2 = z + z^{n+1} + ...``.

    ``psi_k`` first enters at order ``k + n`` with coefficient ``k - n - 1``;
    at ``k = n + 1`` that equation fixes ``tau`` instead and ``psi_{n+1} = 0``.
    """
    N = len(G2) - 1
    psi = _zeros(N, exact)
    psi[1] = _one(exact)
    tau = GaussianRational(0) if exact else 0j
    E = flow(VectorFieldNF(n, tau), 1, N, exact=exact)._c
    for m in range(n + 2, N + 1):
        k = m - n
        resid = _compose_full(psi, E, m, exact)[m] - _compose_full(G2, psi, m, exact)[m]
        if k == n + 1:
            # E_{2n+1} = (n+1)/2 - tau enters only through psi_1 = 1.
            tau = resid
            E = flow(VectorFieldNF(n, tau), 1, N, exact=exact)._c
        else:
            psi[k] = -resid / (k - n - 1)
    return psi, tau


def parabolic_normalize(f: JetSeries, tau_res: float = TAU_RES) -> ParabolicData:
    """Formal normal form of a nondegenerate parabolic jet.

    Two stages, each solved order by order: a Poincare-Dulac step removes
    the non-resonant terms (resonant coefficients of the conjugator set to
    0), then the tangent-to-identity part is conjugated to ``exp(X_{n,tau})``
    after rescaling its leading term to 1.  Exact jets stay exact when the
    rescaling is trivial and are otherwise promoted to floats.
    """
    cls = classify(f, tau_res=tau_res)
    if cls.tag is GermTag.PARABOLIC_DEGENERATE:
        raise DegenerateParabolic(f"f^q = id to order {f.order} (rotation {cls.rotation})")
    if cls.tag is not GermTag.PARABOLIC_NONDEGENERATE:
        raise NotParabolic(f"germ is {cls.tag.value}")
    rot = QZRational.of(cls.rotation)
    q = rot.q
    N = f.order

    psi1, f1 = _remove_nonresonant(f, q)
    exact = f.exact
    lam = rotation_jet(rot.p, q, 1)[1]
    if exact and not isinstance(lam, GaussianRational):
        exact = False
    if not exact:
        lam = complex(lam)
        f1 = np.array([complex(c) for c in f1])
        psi1 = np.array([complex(c) for c in psi1])
    G = [c / lam for c in f1] if exact else f1 / lam

    lead = next((k for k in range(2, N + 1) if abs(complex(G[k])) > tau_res), None)
    if lead is None:
        raise DegenerateParabolic(f"f^q = id to order {N}")
    n = lead - 1
    if n % q:
        raise GermError(f"leading resonant order {lead} inconsistent with q = {q}")
    if N < 2 * n + 1:
        raise InsufficientOrder(f"need order >= {2 * n + 1} to resolve tau (have {N})", 2 * n + 1)

    a_lead = G[n + 1]
    if exact and a_lead != 1:
        exact = False
        G = np.array([complex(c) for c in G])
        psi1 = np.array([complex(c) for c in psi1])
    if exact:
        c = GaussianRational(1)
        G2 = list(G)
    else:
        c = complex(a_lead) ** (-1.0 / n)
        G2 = np.array(G, dtype=complex) * c ** np.arange(-1, N)
        G2[0] = 0
        G2[n + 1] = 1.0

    psi2, tau = _normalize_tangent(G2, n, exact)
    scale = _zeros(N, exact)
    scale[1] = c
    phi = _compose_full(psi1, _compose_full(scale, psi2, N, exact), N, exact)
    fq = iterate(f, q)
    return ParabolicData(rot, n, fq[n + 1], tau, JetSeries._raw(phi, exact))


def parabolic_centralizer_element(n: int, tau, k: int, t, order: int, exact: bool = False) -> JetSeries:
    """``e^{2 pi i k/n} exp(t X_{n,tau})``."""
    rot = rotation_jet(k, n, order)
    fl = flow(VectorFieldNF(n, tau), t, order, exact=exact)
    if fl.exact and not rot.exact:
        fl = fl.to_float()
    return compose(rot, fl)


@dataclass(frozen=True)
class ParabolicMembership:
    member: bool
    k: int | None
    t: complex | None
    residual: float

    def to_json(self) -> dict:
        t = None if self.t is None else [complex(self.t).real, complex(self.t).imag]
        return {"member": self.member, "k": self.k, "t": t, "residual": self.residual}


def centralizer_membership_parabolic(
    f: JetSeries,
    g: JetSeries,
    data: ParabolicData | None = None,
    tau_res: float = TAU_RES,
) -> ParabolicMembership:
    """Test whether ``phi^{-1} o g o phi = e^{2 pi i k/n} exp(t X_{n,tau})``.

    ``k`` is read from the multiplier of the conjugated germ (reduced mod
    ``n``) and ``t`` from its ``z^{n+1}`` coefficient once the rotation is
    removed; the rotation is composed on the left.
    """
    if data is None:
        data = parabolic_normalize(f, tau_res)
    phi = data.conjugator
    gt = compose(invert(phi), compose(g, phi)).to_float()
    n, N = data.n, g.order
    mu = gt.multiplier
    k = round(n * cmath.phase(mu) / (2 * math.pi)) % n
    rot = cmath.exp(2j * math.pi * k / n)
    if abs(mu - rot) > tau_res:
        return ParabolicMembership(False, None, None, abs(mu - rot))
    tangent = JetSeries([c / rot for c in gt.coeffs])
    t = tangent[n + 1] if n + 1 <= N else 0j
    model = flow(VectorFieldNF(n, complex(data.tau)), t, N)
    residual = distance(tangent, model)
    if residual > tau_res:
        return ParabolicMembership(False, None, None, residual)
    return ParabolicMembership(True, k, t, residual)
