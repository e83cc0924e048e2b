"""Command-line entry point ``jacobi-cohomology``.

Exit codes: 0 success, 1 verification failure (a report is still written),
2 bad input.  Complex flags are ``re+imi`` strings, rationals ``p/q``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cohomology import Cocycle, coboundary_solve, eta_map, parabolic_check
from .group import GroupElement, JacobiElement
from .multiplier import MultiplierSystem, UnitaryRep
from .numeric import FourierSeries, QuadratureError, parse_complex, parse_fraction
from .periods import (eichler_holo, eichler_holo_integral, period_hol, period_hol_from_eichler,
                      period_nonhol)
from .theta import (ConditioningError, JacobiFormData, ThetaSeries, jacobi_slash_eval,
                    skew_slash_eval, theta_eval, theta_expand_eval)
from .verify import SuiteConfig, run_suite
from .vvforms import PoincareSpec, VVForm, VVType, poincare_eval, poincare_fourier

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    C: int = 200
    tol: float = 1e-6
    output: str | None = None
    seed: int = 20240601

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("tolerance must be positive")
        if self.C < 1:
            raise InputError("C must be at least 1")


# ----------------------------------------------------------------------------
# parsing helpers
# ----------------------------------------------------------------------------


def _cpx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _load(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as ex:
        raise InputError(f"cannot read {path}: {ex}") from ex


def _gamma(text: str) -> GroupElement:
    try:
        return GroupElement.from_seq(text.replace(" ", "").split(","))
    except ValueError as ex:
        raise InputError(f"bad matrix {text!r}: {ex}") from ex


def _specs(items) -> list[PoincareSpec]:
    """``n:alpha[:b]`` items."""
    out = []
    for it in items or []:
        parts = it.split(":")
        if len(parts) not in (2, 3):
            raise InputError(f"bad Poincare term {it!r}; expected n:alpha[:b]")
        b = parse_complex(parts[2]) if len(parts) == 3 else 1.0
        out.append(PoincareSpec(int(parts[0]), int(parts[1]), b))
    if not out:
        raise InputError("at least one --spec is required")
    return out


def _vtype(args) -> VVType:
    if getattr(args, "type", None):
        return VVType.from_json(_load(args.type))
    if getattr(args, "m", None):
        w = parse_fraction(args.jacobi_weight)
        proto = JacobiFormData(w, args.m, MultiplierSystem.eta(args.eta), args.skew,
                               [FourierSeries()] * (2 * args.m))
        return proto.vv_type()
    w = parse_fraction(args.weight)
    return VVType(w, MultiplierSystem.trivial(w), UnitaryRep.trivial(1))


def _form(path: str) -> VVForm:
    obj = _load(path)
    try:
        return VVForm.from_json(obj)
    except (KeyError, TypeError, ValueError) as ex:
        raise InputError(f"{path} is not a vector-valued form: {ex}") from ex


def _emit(obj, cfg: JobConfig, out) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def cmd_theta_eval(args, cfg, out):
    th = ThetaSeries(args.S, parse_fraction(args.a), parse_fraction(args.b))
    v = complex(theta_eval(th, parse_complex(args.tau), parse_complex(args.z)))
    _emit({"value": _cpx(v)}, cfg, out)
    return EXIT_OK


def cmd_jacobi_slash(args, cfg, out):
    J = JacobiFormData.from_json(_load(args.form))
    lam, mu = (int(x) for x in args.X.split(","))
    g = JacobiElement(_gamma(args.gamma), lam, mu)
    tau, z = parse_complex(args.tau), parse_complex(args.z)
    phi = lambda t, w: theta_expand_eval(J, t, w)
    slash = skew_slash_eval if J.skew else jacobi_slash_eval
    v = complex(slash(phi, g, J.weight, J.m, J.chi, np.array([tau]), np.array([z]))[0])
    _emit({"value": _cpx(v), "skew": J.skew}, cfg, out)
    return EXIT_OK


def cmd_poincare(args, cfg, out):
    vt = _vtype(args)
    taus = np.array([parse_complex(t) for t in args.tau])
    vals, err = poincare_eval(_specs(args.spec), vt, taus, C=cfg.C, return_error=True)
    _emit({"tau": [_cpx(t) for t in taus], "values": [[_cpx(v) for v in row] for row in vals],
           "truncation_error": err, "C": cfg.C}, cfg, out)
    return EXIT_OK


def cmd_fourier(args, cfg, out):
    f = poincare_fourier(_specs(args.spec), _vtype(args), C=cfg.C, n_max=args.n_max)
    _emit(f.to_json(), cfg, out)
    return EXIT_OK


def cmd_period(args, cfg, out):
    f = _form(args.form)
    g = _gamma(args.gamma)
    if args.method == "integral":
        r = period_hol(f, g)
    elif args.method == "eichler":
        r = period_hol_from_eichler(f, g)
    else:
        r = period_nonhol(f, g)
    _emit(r.to_json(), cfg, out)
    return EXIT_OK if r.residual < cfg.tol else EXIT_FAIL


def cmd_eichler(args, cfg, out):
    f = _form(args.form)
    taus = np.array([parse_complex(t) for t in args.tau])
    if args.method == "series":
        vals = eichler_holo(f)(taus)
    else:
        from .periods import c_const
        k = int(f.vtype.weight) - 2
        vals = eichler_holo_integral(f, taus) / c_const(k)
    _emit({"tau": [_cpx(t) for t in taus], "values": [[_cpx(v) for v in row] for row in vals]},
          cfg, out)
    return EXIT_OK


def _cocycle(path) -> Cocycle:
    try:
        return Cocycle.from_json(_load(path))
    except (KeyError, TypeError, ValueError) as ex:
        raise InputError(f"{path} is not a cocycle: {ex}") from ex


def cmd_cocycle_check(args, cfg, out):
    c = _cocycle(args.cocycle)
    res = c.relation_residual()
    _emit({"relation_residual": res, "tolerance": cfg.tol}, cfg, out)
    return EXIT_OK if res < cfg.tol else EXIT_FAIL


def cmd_coboundary(args, cfg, out):
    rep = coboundary_solve(_cocycle(args.cocycle), tol=cfg.tol)
    _emit(rep.to_json(), cfg, out)
    return EXIT_OK if rep.is_coboundary else EXIT_FAIL


def cmd_parabolic(args, cfg, out):
    ok, Q, res = parabolic_check(_cocycle(args.cocycle), tol=cfg.tol)
    _emit({"is_parabolic": ok, "residual": res, "witness": Q.to_json() if ok else None}, cfg, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_eta_map(args, cfg, out):
    Phi = JacobiFormData.from_json(_load(args.phi)) if args.phi else None
    Psi = JacobiFormData.from_json(_load(args.psi)) if args.psi else None
    if Phi is None and Psi is None:
        raise InputError("give --phi and/or --psi")
    c = eta_map(Phi, Psi, conjugate_alpha=args.conjugate_alpha)
    obj = c.to_json()
    obj["relation_residual"] = c.relation_residual()
    _emit(obj, cfg, out)
    return EXIT_OK


def cmd_verify_suite(args, cfg, out):
    numbers = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_suite(SuiteConfig(m=args.m, k=args.k, seed=cfg.seed, C=cfg.C), numbers)
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {"passed": all(r.passed for r in results),
              "criteria": [{"number": r.number, "name": r.name, "passed": r.passed,
                            "measurements": {k: {"value": v, "tolerance": t, "sense": s}
                                             for k, (v, t, s) in r.measurements.items()}}
                           for r in results]}
    _emit(report, cfg, out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_plot_data(args, cfg, out):
    f = _form(args.form)
    a, b = parse_complex(args.start), parse_complex(args.end)
    taus = a + (b - a) * np.linspace(0, 1, args.points)
    if np.any(taus.imag <= 0):
        raise InputError("the segment must stay in the upper half plane")
    vals = f(taus)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "component", "re", "im"])
    for t, row in zip(taus, vals):
        for j, v in enumerate(row):
            w.writerow([repr(float(t.real)), repr(float(t.imag)), j,
                        repr(float(v.real)), repr(float(v.imag))])
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return EXIT_OK


COMMANDS = {
    "theta-eval": cmd_theta_eval, "jacobi-slash": cmd_jacobi_slash, "poincare": cmd_poincare,
    "fourier": cmd_fourier, "period": cmd_period, "eichler": cmd_eichler,
    "cocycle-check": cmd_cocycle_check, "coboundary": cmd_coboundary, "parabolic": cmd_parabolic,
    "eta-map": cmd_eta_map, "verify-suite": cmd_verify_suite, "plot-data": cmd_plot_data,
}


def _type_flags(p):
    p.add_argument("--type", help="VVType JSON file")
    p.add_argument("--weight", default="12", help="weight of a scalar trivial type")
    p.add_argument("--m", type=int, help="use the theta-component type of this index")
    p.add_argument("--jacobi-weight", default="9/2", help="Jacobi weight for --m")
    p.add_argument("--eta", type=int, default=1, help="Jacobi multiplier is eta^eta")
    p.add_argument("--skew", action="store_true")
    p.add_argument("--spec", action="append",
                   help="Poincare term n:alpha[:b], seed frequency kappa_alpha - n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jacobi-cohomology")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--C", type=int, default=200, help="Poincare truncation")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--output", "-o")
    common.add_argument("--seed", type=int, default=20240601)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta-eval", parents=[common])
    p.add_argument("--S", type=int, required=True)
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="0")
    p.add_argument("--tau", required=True)
    p.add_argument("--z", required=True)

    p = sub.add_parser("jacobi-slash", parents=[common])
    p.add_argument("--form", required=True, help="JacobiFormData JSON")
    p.add_argument("--gamma", required=True, help="a,b,c,d")
    p.add_argument("--X", default="0,0", help="lambda,mu")
    p.add_argument("--tau", required=True)
    p.add_argument("--z", required=True)

    for name in ("poincare", "fourier"):
        p = sub.add_parser(name, parents=[common])
        _type_flags(p)
        if name == "poincare":
            p.add_argument("--tau", action="append", required=True)
        else:
            p.add_argument("--n-max", type=int, default=12)

    p = sub.add_parser("period", parents=[common])
    p.add_argument("--form", required=True, help="VVForm JSON")
    p.add_argument("--gamma", default="0,-1,1,0")
    p.add_argument("--method", choices=("integral", "eichler", "nonholomorphic"), default="integral")

    p = sub.add_parser("eichler", parents=[common])
    p.add_argument("--form", required=True)
    p.add_argument("--tau", action="append", required=True)
    p.add_argument("--method", choices=("series", "integral"), default="integral")

    for name in ("cocycle-check", "coboundary", "parabolic"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--cocycle", required=True, help="cocycle JSON")

    p = sub.add_parser("eta-map", parents=[common])
    p.add_argument("--phi", help="holomorphic JacobiFormData JSON")
    p.add_argument("--psi", help="skew JacobiFormData JSON with Poincare data")
    p.add_argument("--conjugate-alpha", action="store_true")

    p = sub.add_parser("verify-suite", parents=[common])
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--only", help="comma-separated criterion numbers")

    p = sub.add_parser("plot-data", parents=[common])
    p.add_argument("--form", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--end", required=True)
    p.add_argument("--points", type=int, default=50)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return EXIT_OK if ex.code == 0 else EXIT_INPUT
    try:
        cfg = JobConfig(args.command, vars(args), C=args.C, tol=args.tol, output=args.output,
                        seed=args.seed)
        return COMMANDS[args.command](args, cfg, out)
    except (InputError, ValueError, KeyError, ConditioningError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_INPUT
    except QuadratureError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
