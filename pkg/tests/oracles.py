"""Independent reference computations for the tests (sympy, closed forms)."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp

from germtower.gaussian import GaussianRational
from germtower.jets import JetSeries, abs_jet, compose

Z = sp.Symbol("z")


def to_sympy(f: JetSeries):
    terms = []
    for k, c in enumerate(f.coeffs, start=1):
        if f.exact:
            coeff = sp.Rational(str(c.re)) + sp.I * sp.Rational(str(c.im))
        else:
            coeff = sp.nsimplify(complex(c).real) + sp.I * sp.nsimplify(complex(c).imag)
        terms.append(coeff * Z**k)
    return sp.Add(*terms)


def truncated(expr, order: int) -> list:
    """Coefficients of ``z^1..z^order`` of a polynomial expression."""
    poly = sp.Poly(sp.expand(expr), Z)
    return [poly.coeff_monomial(Z**k) for k in range(1, order + 1)]


def sympy_compose(f: JetSeries, g: JetSeries) -> list:
    return truncated(to_sympy(f).subs(Z, to_sympy(g)), f.order)


def as_gaussian(c) -> GaussianRational:
    re, im = sp.re(c), sp.im(c)
    return GaussianRational(Fraction(str(re)), Fraction(str(im)))


def residue_tau(fq: JetSeries, n: int, q: int) -> Fraction:
    """``q ((n+1)/2 - Res_0 1/(z - f^q(z)))``, the formal invariant read off ``f^q``.

    For ``f^q = exp(Y)`` one has ``Res 1/(z - exp Y) = (n+1)/2 - Res 1/Y``,
    and ``Res 1/Y = tau/q`` when ``f = e^{2 pi i p/q} exp(X_{n,tau})``.
    """
    g = to_sympy(fq)
    lead = sp.expand(Z - g)
    # 1/(z - g) = z^{-(n+1)} / (lead / z^{n+1}); expand the regular factor far enough
    regular = sp.expand(lead / Z ** (n + 1))
    inv = sp.series(1 / regular, Z, 0, n + 1).removeO()
    res = sp.Poly(sp.expand(inv), Z).coeff_monomial(Z**n)
    tau = q * (sp.Rational(n + 1, 2) - res)
    return complex(sp.N(tau)) if tau.free_symbols else complex(tau)


def random_germ(rng: np.random.Generator, order: int, lam: complex | None = None) -> JetSeries:
    """Coefficients uniform in the unit disk; ``lam`` fixes the multiplier."""
    r = np.sqrt(rng.random(order))
    c = r * np.exp(2j * np.pi * rng.random(order))
    if lam is not None:
        c[0] = lam
    return JetSeries(c)


def random_exact_germ(rng: np.random.Generator, order: int, den: int = 4, lam=None) -> JetSeries:
    """Gaussian-rational coefficients with denominator ``den`` in the unit square."""
    c = []
    for _ in range(order):
        a, b = rng.integers(-den, den + 1, size=2)
        c.append(GaussianRational(Fraction(int(a), den), Fraction(int(b), den)))
    if lam is not None:
        c[0] = lam
    elif not c[0]:
        c[0] = GaussianRational(1)
    return JetSeries(c, exact=True)


def majorant_compose(f: JetSeries, g: JetSeries) -> JetSeries:
    """Coefficient moduli bound of ``f o g``, the scale of its roundoff."""
    return compose(abs_jet(f), abs_jet(g))
