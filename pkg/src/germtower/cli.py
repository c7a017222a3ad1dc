"""Command-line front end: one subcommand per operation, JSON in and out.

Exit codes: 0 success, 1 domain error from a module (JSON error object on
stdout), 2 usage error (JSON error object on stdout).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import jets, linearization, parabolic, qz
from .conformal import maps, slits, tower as towermod
from .errors import GermError
from .gaussian import GaussianRational

OUTPUT_DIR_ENV = "GERMTOWER_OUTPUT_DIR"
DEFAULT_ORDER = 32


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument helpers --


def _load_json(text: str):
    """Inline JSON, or a path to a JSON file."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _load_germ(text: str, exact: bool = False, order: int | None = None) -> jets.JetSeries:
    f = jets.JetSeries.from_json(_load_json(text))
    if exact and not f.exact:
        f = jets.JetSeries([GaussianRational(Fraction(c.real), Fraction(c.imag)) for c in f.coeffs], exact=True)
    if order is not None and order != f.order:
        f = f.truncate(order) if order < f.order else f.extend(order)
    return f


def _complex(text: str) -> complex:
    """``re``, ``re,im`` or a Python complex literal like ``1+2j``."""
    if "," in text:
        re, im = text.split(",")
        return complex(float(re), float(im))
    return complex(text.replace(" ", ""))


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _fractions(text: str) -> list[Fraction]:
    return [Fraction(x) for x in text.split(",") if x]


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _points(args, d: slits.SlitDomain):
    if args.points:
        return np.array([_complex(p) for p in args.points.split(";")])
    return d.sample(args.samples, np.random.default_rng(args.seed))


# -- commands --


def cmd_compose(a):
    f = _load_germ(a.input, a.exact, a.order)
    g = _load_germ(a.other, a.exact, a.order)
    return jets.compose(f, g).to_json()


def cmd_invert(a):
    return jets.invert(_load_germ(a.input, a.exact, a.order), a.tau_zero).to_json()


def cmd_iterate(a):
    return jets.iterate(_load_germ(a.input, a.exact, a.order), a.m).to_json()


def cmd_classify(a):
    f = _load_germ(a.input, a.exact, a.order)
    return jets.classify(f, a.q_max, a.tau_unit, a.tau_res).to_json()


def cmd_linearize(a):
    f = _load_germ(a.input, a.exact, a.order)
    return linearization.koenigs_linearize(f, a.tau_div).to_json()


def cmd_centralizer_element(a):
    f = _load_germ(a.input, order=a.order)
    g = linearization.centralizer_element(f, _complex(a.mu), a.tau_div)
    check = jets.commutes_to_order(f, g, a.tau_res)
    return {"g": g.to_json(), "commutes": check.commutes, "residual": check.residual}


def cmd_centralizer_solve_linear(a):
    if a.root:
        lam = Fraction(a.root)
    elif a.lam is not None:
        lam = _complex(a.lam)
    else:
        raise UsageError("give --lambda or --root")
    return linearization.centralizer_solve_linear(lam, a.order, a.tau_div).to_json()


def cmd_normal_form(a):
    f = _load_germ(a.input, a.exact, a.order)
    data = parabolic.parabolic_normalize(f, a.tau_res)
    return {**data.to_json(), "residual": data.residual(f)}


def cmd_flow(a):
    X = parabolic.VectorFieldNF(a.n, Fraction(a.tau) if a.exact else _complex(a.tau))
    t = Fraction(a.t) if a.exact else _complex(a.t)
    return parabolic.flow(X, t, a.order, exact=a.exact).to_json()


def cmd_qz_generator(a):
    return qz.cyclic_generator(_fractions(a.elems)).to_json()


def cmd_qz_tower(a):
    t = qz.tower_decompose(_fractions(a.elems), a.depth)
    return {**t.to_json(), "as": list(t.ratios)}


def cmd_qz_intersection(a):
    t = qz.CyclicTower(tuple(_ints(a.qs)))
    rep = qz.neighborhood_intersection_check(t, a.start, a.resolution, Fraction(a.factor))
    return {"tower": t.to_json(), "start": a.start, "resolution": a.resolution, "factor": a.factor, **rep.to_json()}


def _domain(a) -> slits.SlitDomain:
    return slits.SlitDomain(a.eps0, a.eps, a.q)


def cmd_slit_map(a):
    d = _domain(a)
    F = slits.q_slit_uniformizer(d)
    z = _points(a, d)
    w = F(z)
    back = F.inverse()(w)
    return {
        "domain": d.to_json(),
        "derivative_at_0": _pair(F.derivative_at_0()),
        "points": [_pair(x) for x in z],
        "values": [_pair(x) for x in w],
        "round_trip": float(np.abs(back - z).max()),
    }


def cmd_intrinsic_rotation(a):
    d = _domain(a)
    R = slits.intrinsic_rotation(d, float(Fraction(a.alpha)))
    z = _points(a, d)
    return {
        "domain": d.to_json(),
        "alpha": a.alpha,
        "derivative_at_0": _pair(R.derivative_at_0()),
        "points": [_pair(x) for x in z],
        "values": [_pair(x) for x in R(z)],
    }


def _named_h(name: str) -> maps.AnalyticMap:
    if name == "identity":
        return maps.Identity()
    if name == "mobius":
        return maps.Mobius(1, 0, -1, 1)  # z / (1 - z)
    raise UsageError(f"unknown conjugator {name!r} (identity | mobius)")


def cmd_prop5_root(a):
    h = _named_h(a.h)
    phi = slits.prop5_root(h, a.q, a.eps, a.eps0, a.a)
    d = slits.SlitDomain(a.eps0, a.eps, a.q)
    w = d.sample(a.samples, np.random.default_rng(a.seed))
    z = h.inverse()(w)
    target = maps.chain(h, maps.Rotation(1 / a.q), h.inverse())
    resid = float(np.abs(slits.iterate_map(phi, z, a.a) - target(z)).max())
    d0 = phi.derivative_at_0()
    expected = complex(np.exp(2j * math.pi / (a.a * a.q)))
    return {
        "derivative_at_0": _pair(d0),
        "derivative_error": abs(d0 - expected),
        "iterate_residual": resid,
        "samples": a.samples,
    }


def cmd_tower_build(a):
    t = qz.CyclicTower(tuple(_ints(a.qs)))
    levels = towermod.tower_build(t, a.sigma, a.depth)
    return towermod.tower_to_json(levels, t, a.sigma)


def cmd_tower_verify(a):
    levels, _, _ = towermod.tower_from_json(_load_json(a.input))
    rep = towermod.tower_verify(levels, a.samples, a.tol, eps_ratio=a.eps_ratio, seed=a.seed)
    if a.csv:
        towermod.dump_samples_csv(levels, a.csv, a.samples, a.seed)
    return rep.to_json()


def cmd_divisor_growth(a):
    if a.alpha is not None:
        lam = linearization.multiplier_from_angle(float(Fraction(a.alpha)))
    elif a.lam is not None:
        lam = _complex(a.lam)
    else:
        raise UsageError("give --alpha or --lambda")
    mags = linearization.divisor_growth(lam, a.order, _complex(a.f2))
    return {"lambda": _pair(lam), "order": a.order, "h_abs": mags}


# -- parser --


def _add_io(p, need_input=True):
    if need_input:
        p.add_argument("-i", "--input", required=True, help="germ JSON (inline or path)")
        p.add_argument("--order", type=int, help="truncate or zero-pad the input germ to this order")
    p.add_argument("-o", "--output", help="output path (default: stdout)")


def _add_tols(p, *names):
    defaults = {
        "tau_zero": jets.TAU_ZERO,
        "tau_unit": jets.TAU_UNIT,
        "tau_res": jets.TAU_RES,
        "tau_div": linearization.TAU_DIV,
    }
    for name in names:
        p.add_argument("--" + name.replace("_", "-"), type=float, default=defaults[name])


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="germtower", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("compose", cmd_compose, "f o g")
    _add_io(p)
    p.add_argument("--with", dest="other", required=True, help="inner germ g")
    p.add_argument("--exact", action="store_true")

    p = add("invert", cmd_invert, "compositional inverse")
    _add_io(p)
    p.add_argument("--exact", action="store_true")
    _add_tols(p, "tau_zero")

    p = add("iterate", cmd_iterate, "m-fold composition")
    _add_io(p)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--exact", action="store_true")

    p = add("classify", cmd_classify, "attracting / repelling / indifferent / parabolic")
    _add_io(p)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--q-max", type=int, default=jets.Q_MAX)
    _add_tols(p, "tau_unit", "tau_res")

    p = add("linearize", cmd_linearize, "Koenigs linearizer")
    _add_io(p)
    p.add_argument("--exact", action="store_true")
    _add_tols(p, "tau_div")

    p = add("centralizer-element", cmd_centralizer_element, "formal centralizer element with multiplier mu")
    _add_io(p)
    p.add_argument("--mu", required=True, help="re,im or complex literal")
    _add_tols(p, "tau_div", "tau_res")

    p = add("centralizer-solve-linear", cmd_centralizer_solve_linear, "free/forced coefficients of Cent(L_lambda)")
    _add_io(p, need_input=False)
    p.add_argument("--lambda", dest="lam", help="re,im")
    p.add_argument("--root", help="p/q: the exact root of unity e^{2 pi i p/q}")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    _add_tols(p, "tau_div")

    p = add("normal-form", cmd_normal_form, "parabolic normal form (n, tau, phi)")
    _add_io(p)
    p.add_argument("--exact", action="store_true")
    _add_tols(p, "tau_res")

    p = add("flow", cmd_flow, "time-t flow of X_{n,tau}")
    _add_io(p, need_input=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", default="0")
    p.add_argument("--t", default="1")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--exact", action="store_true", help="tau and t read as rationals")

    p = add("qz-generator", cmd_qz_generator, "generator of the subgroup of Q/Z")
    _add_io(p, need_input=False)
    p.add_argument("--elems", required=True, help="comma-separated p/q")

    p = add("qz-tower", cmd_qz_tower, "cyclic tower of an enumeration")
    _add_io(p, need_input=False)
    p.add_argument("--elems", required=True)
    p.add_argument("--depth", type=int, default=8)

    p = add("qz-intersection", cmd_qz_intersection, "neighborhood intersection identity")
    _add_io(p, need_input=False)
    p.add_argument("--qs", required=True)
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--resolution", type=int, default=10**4)
    p.add_argument("--factor", default="1/3", help="delta_n = factor / q_{n+1}")

    for name, fn in (("slit-map", cmd_slit_map), ("intrinsic-rotation", cmd_intrinsic_rotation)):
        p = add(name, fn, "q-slit disk uniformizer" if name == "slit-map" else "intrinsic rotation of D(eps,q)")
        _add_io(p, need_input=False)
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--eps", type=float, required=True)
        p.add_argument("--eps0", type=float, default=1.0)
        p.add_argument("--points", help="semicolon-separated re,im points")
        p.add_argument("--samples", type=int, default=16)
        p.add_argument("--seed", type=int, default=0)
        if name == "intrinsic-rotation":
            p.add_argument("--alpha", required=True, help="float or p/q")

    p = add("prop5-root", cmd_prop5_root, "a-th root of h^{-1} R_{1/q} h via a slit domain")
    _add_io(p, need_input=False)
    p.add_argument("--h", default="identity", help="identity | mobius (z/(1-z))")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--eps0", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = add("tower-build", cmd_tower_build, "build the torsion tower")
    _add_io(p, need_input=False)
    p.add_argument("--qs", required=True)
    p.add_argument("--sigma", type=float, default=0.3)
    p.add_argument("--depth", type=int)

    p = add("tower-verify", cmd_tower_verify, "verify a tower JSON")
    _add_io(p)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--tol", type=float, default=towermod.TAU_TOWER)
    p.add_argument("--eps-ratio", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="also dump (z, f_n(z)) samples here")

    p = add("divisor-growth", cmd_divisor_growth, "|h_n| of the Koenigs linearizer of lambda z + f2 z^2")
    _add_io(p, need_input=False)
    p.add_argument("--alpha", help="lambda = e^{2 pi i alpha}")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--f2", default="1")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    return ap


def _emit(doc, output: str | None, stdout) -> None:
    text = json.dumps(doc, indent=2, default=_json_default)
    if output:
        path = Path(output)
        if not path.is_absolute() and os.environ.get(OUTPUT_DIR_ENV):
            path = Path(os.environ[OUTPUT_DIR_ENV]) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
    else:
        stdout.write(text + "\n")


def _json_default(x):
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        doc = args.func(args)
    except UsageError as exc:
        _emit({"error": {"code": "usage", "message": str(exc)}}, None, stdout)
        return 2
    except GermError as exc:
        _emit({"error": exc.to_json()}, None, stdout)
        return 1
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit({"error": {"code": "invalid_input", "message": str(exc)}}, None, stdout)
        return 1
    _emit(doc, args.output, stdout)
    return 0


def main() -> None:
    sys.exit(run())
