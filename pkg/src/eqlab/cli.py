"""Command-line interface.

Exit codes: 0 success, 1 negative verdict of a check, 2 invalid input,
3 numerical failure.
"""
import argparse
import dataclasses
import json
import sys
from importlib import resources

import numpy as np

from . import apps, emcurv, nbody, spectral, svg
from .config import DEFAULT, Tolerances
from .errors import CollisionError, EqlabError, NumericalError, PreconditionError

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3
SCHEMA_VERSION = "1"


class InputError(Exception):
    """Bad command-line input or configuration file."""


def schema(name):
    """Published JSON schema for a command document, e.g. ``schema("toy")``."""
    text = resources.files("eqlab").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def fmt_float(x):
    """Shortest round-trip representation (at most 17 significant digits)."""
    return repr(float(x))


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not np.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _float_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _bracket(text):
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError("bracket needs two values lo,hi")
    return tuple(vals)


def load_config(path):
    """Read a configuration file into a :class:`nbody.Configuration`."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise InputError("configuration must be a JSON object")
    for key in ("dimension", "masses", "positions"):
        if key not in doc:
            raise InputError(f"missing field {key!r}")
    d, masses, positions = doc["dimension"], doc["masses"], doc["positions"]
    if not isinstance(d, int) or isinstance(d, bool) or d not in (2, 4):
        raise InputError("dimension must be 2 or 4")
    if not isinstance(masses, list) or len(masses) < 2:
        raise InputError("masses must be a list of at least two numbers")
    if not isinstance(positions, list) or len(positions) != len(masses):
        raise InputError("positions must list one vector per mass")
    try:
        m = np.array(masses, dtype=float)
        X = np.array(positions, dtype=float)
    except (TypeError, ValueError):
        raise InputError("masses and positions must be numeric")
    if X.shape != (len(masses), d):
        raise InputError(f"every position must have {d} coordinates")
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(X))):
        raise InputError("non-finite values in configuration")
    try:
        return nbody.Configuration(nbody.MassSystem(m, d), X.ravel())
    except PreconditionError as exc:
        raise InputError(str(exc))


def _emit(doc, out=None):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verdict_doc(v):
    return {
        "class": v.verdict,
        "max_real": v.max_real,
        "zero_multiplicity": v.zero_multiplicity,
        "norm": v.norm,
        "eigenvalues": [[z.real, z.imag] for z in v.eigenvalues],
    }


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_cc_check(args, tol):
    c = load_config(args.config)
    com = c.center_of_mass()
    raw_norm = c.m_norm2()
    try:
        cn = nbody.normalize(c, tol)
        res = nbody.cc_residual(cn, tol)
        lam = nbody.potential(cn, tol)
    except (PreconditionError, CollisionError) as exc:
        raise InputError(str(exc))
    ok = res < tol.cc_residual
    _emit({
        "command": "cc-check",
        "residual": res,
        "lambda": lam,
        "is_central": bool(ok),
        "threshold": tol.cc_residual,
        "input_center_of_mass_norm": float(np.linalg.norm(com)),
        "input_m_norm2": raw_norm,
    }, args.out)
    return EXIT_OK if ok else EXIT_NEGATIVE


def sweep_csv(rows):
    """CSV text for sweep rows with ``\\n`` line endings."""
    lines = ["gamma,max_real,zero_mult,class"]
    for r in rows:
        lines.append(",".join([fmt_float(r.gamma), fmt_float(r.max_real),
                               str(r.zero_multiplicity), r.verdict]))
    return "\n".join(lines) + "\n"


def cmd_sweep_r4(args, tol):
    masses = args.masses
    if len(masses) != 3 or min(masses) <= 0:
        raise InputError("--masses needs three positive values")
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    rows = spectral.sweep_inclination(masses, args.grid, tol, threads=args.threads)
    text = sweep_csv(rows)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.svg:
        _write_text(args.svg, svg.line_plot(
            [r.gamma for r in rows], [r.max_real for r in rows],
            xlabel="inclination gamma (rad)", ylabel="max |Re lambda| on E3",
            title="masses " + ", ".join(fmt_float(m) for m in masses)))
    return EXIT_OK


def toy_report(model, energy=1.0, tol=DEFAULT):
    """The four conditions of the two-dimensional model as a dict."""
    v = spectral.analyze(emcurv.toy_linear_system(model), "planar", tol)
    mane = emcurv.mane_certificate(model)
    zs = emcurv.zero_set(model, energy)
    sqrt_test = emcurv.stability_test(model)
    conds = [v.verdict == spectral.LINEARLY_STABLE, mane.kind == "StrictlyAbove",
             zs.kind in (emcurv.EMPTY, emcurv.HYPERBOLA), sqrt_test]
    return {
        "alpha": model.alpha, "beta": model.beta, "k": model.k,
        "spectral_class": v.verdict,
        "mane": mane.kind,
        "mane_C": mane.C,
        "mane_action": mane.action,
        "zero_set": zs.kind,
        "sqrt_test": sqrt_test,
        "outcome": emcurv.stability_outcome(model, tol),
        "agree": bool(all(conds) or not any(conds)),
    }


def cmd_toy(args, tol):
    model = emcurv.QuadModel2D(args.alpha, args.beta, args.k)
    _emit({"command": "toy", **toy_report(model, args.energy, tol)}, args.out)
    return EXIT_OK


def cmd_curvature_map(args, tol):
    model = emcurv.QuadModel2D(args.alpha, args.beta, args.k)
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    xs = np.linspace(-args.extent, args.extent, args.grid)
    Z = emcurv.curvature_map(model, args.energy, xs, xs)
    lines = ["x,y,K_tilde"]
    for i, y in enumerate(xs):
        for j, x in enumerate(xs):
            lines.append(f"{fmt_float(x)},{fmt_float(y)},{fmt_float(Z[i, j])}")
    _write_text(args.out, "\n".join(lines) + "\n")
    zs = emcurv.zero_set(model, args.energy)
    conic = {"kind": zs.kind}
    if zs.coefficients is not None:
        conic.update(c_x=zs.coefficients[0], c_y=zs.coefficients[1], rhs=zs.coefficients[2])
    if args.svg:
        branches = emcurv.conic_branches(zs, 400, extent=4.0)
        _write_text(args.svg, svg.heatmap(xs, xs, Z, branches, "x", "y",
                                          f"min curvature, e = {fmt_float(args.energy)} ({zs.kind})"))
    _emit({"command": "curvature-map", "conic": conic, "grid": args.grid,
           "min": float(Z.min()), "max": float(Z.max()),
           "all_positive": bool(np.all(Z > 0))}, args.json)
    return EXIT_OK


def cmd_reduce(args, tol):
    system, masses = args.system, args.masses or []
    if system == "lagrange":
        if len(masses) != 3 or min(masses) <= 0:
            raise InputError("lagrange needs three positive masses")
        r = apps.lagrange_pipeline(masses, tol)
        doc = {
            "system": system, "masses": list(r.masses),
            "hred_eigenvalues": list(r.hred_eigenvalues),
            "k": r.k,
            "planes": [{"alpha": r.alpha, "beta": r.beta,
                        "verdict": "Stable" if r.curvature_criterion else "Unstable"}],
            "routh": r.routh, "routh_ratio": r.routh_ratio,
            "curvature_criterion": r.curvature_criterion,
            "spectral": _verdict_doc(r.spectral),
            "overall": "Stable" if r.curvature_criterion else "Unstable",
            "consistent": r.consistent,
        }
    else:
        if system == "square" and len(masses) > 1:
            raise InputError("square takes at most one mass value")
        if system == "rhombus" and len(masses) != 1:
            raise InputError("rhombus takes exactly one mass value m (masses m,1,m,1)")
        m = masses[0] if masses else 1.0
        if m <= 0:
            raise InputError("mass must be positive")
        r = apps.four_body_pipeline(system, m, tol)
        doc = {
            "system": system, "masses": [m, m, m, m] if system == "square" else [m, 1.0, m, 1.0],
            "shape_ratio": r.shape_ratio,
            "hred_eigenvalues": list(r.hred_eigenvalues),
            "k": r.planes[0].k if r.planes else None,
            "split_found": r.split_found,
            "pairing_residual": r.pairing_residual,
            "planes": [{"alpha": p.alpha, "beta": p.beta, "verdict": p.plane_verdict,
                        "zero_set": p.zero_set} for p in r.planes],
            "spectral": _verdict_doc(r.spectral),
            "overall": r.overall,
            "consistent": r.consistent,
        }
        if r.overall == apps.STABLE:
            # stronger than the instability-only statement; valid because planes decouple
            doc["overall_note"] = "stable (decoupled)"
    _emit({"command": "reduce", **doc}, args.out)
    return EXIT_OK


def planar_lagrange_objective(tol):
    def stable(m1):
        return apps.lagrange_pipeline([m1, 1.0, 1.0], tol).spectral.verdict != spectral.UNSTABLE
    return stable


def gamma_onset_objective(masses, tol):
    def stable(g):
        return spectral.inclined_verdict(masses, g, tol).verdict != spectral.UNSTABLE
    return stable


def cmd_threshold(args, tol):
    if args.mode == "routh-mass":
        bracket = args.bracket or (40.0, 60.0)
        obj = planar_lagrange_objective(tol)
    else:
        masses = args.masses or [1.0, 1.0, 1.0]
        if len(masses) != 3 or min(masses) <= 0:
            raise InputError("--masses needs three positive values")
        bracket = args.bracket or (0.5, 1.5)
        obj = gamma_onset_objective(masses, tol)
    xtol = args.xtol or tol.threshold_xtol
    try:
        x = spectral.find_threshold(obj, bracket, xtol, tol)
    except PreconditionError as exc:
        raise NumericalError(str(exc), bracket=bracket)
    _emit({"command": "threshold", "mode": args.mode, "threshold": x,
           "xtol": xtol, "bracket": list(bracket)}, args.out)
    return EXIT_OK


def _tolerance_flags(parser):
    g = parser.add_argument_group("tolerance overrides")
    for f in dataclasses.fields(Tolerances):
        g.add_argument("--tol-" + f.name.replace("_", "-"), dest="tol_" + f.name,
                       type=_positive_float, default=None, metavar="X",
                       help=f"default {f.default}")


def build_parser():
    p = argparse.ArgumentParser(prog="eqlab", description="Linear stability of n-body relative equilibria.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cc-check", help="central-configuration residual of a config file")
    s.add_argument("config")
    s.add_argument("--out")

    s = sub.add_parser("sweep-r4", help="inclination sweep of the Lagrange triangle in R^4")
    s.add_argument("--masses", type=_float_list, required=True)
    s.add_argument("--grid", type=int, default=91)
    s.add_argument("--out")
    s.add_argument("--svg")
    s.add_argument("--threads", type=int, default=None)

    s = sub.add_parser("toy", help="four conditions of the planar quadratic model")
    s.add_argument("--alpha", type=_positive_float, required=True)
    s.add_argument("--beta", type=_positive_float, required=True)
    s.add_argument("--k", type=_positive_float, default=1.0)
    s.add_argument("--energy", type=_positive_float, default=1.0)
    s.add_argument("--out")

    s = sub.add_parser("curvature-map", help="grid of direction-minimized curvature")
    s.add_argument("--alpha", type=_positive_float, required=True)
    s.add_argument("--beta", type=_positive_float, required=True)
    s.add_argument("--k", type=_positive_float, default=1.0)
    s.add_argument("--energy", type=_positive_float, default=0.1)
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--extent", type=_positive_float, default=1.0)
    s.add_argument("--out", required=True)
    s.add_argument("--svg")
    s.add_argument("--json")

    s = sub.add_parser("reduce", help="planar reduction pipelines")
    s.add_argument("--system", choices=["lagrange", "square", "rhombus"], required=True)
    s.add_argument("--masses", type=_float_list)
    s.add_argument("--out")

    s = sub.add_parser("threshold", help="bisection for stability thresholds")
    s.add_argument("--mode", choices=["routh-mass", "gamma-onset"], required=True)
    s.add_argument("--masses", type=_float_list)
    s.add_argument("--bracket", type=_bracket)
    s.add_argument("--xtol", type=_positive_float)
    s.add_argument("--out")

    for sp in sub.choices.values():
        _tolerance_flags(sp)
    return p


COMMANDS = {
    "cc-check": cmd_cc_check,
    "sweep-r4": cmd_sweep_r4,
    "toy": cmd_toy,
    "curvature-map": cmd_curvature_map,
    "reduce": cmd_reduce,
    "threshold": cmd_threshold,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("tol_")}
    tol = DEFAULT.override(**overrides)
    try:
        return COMMANDS[args.command](args, tol)
    except InputError as exc:
        print(f"eqlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, CollisionError) as exc:
        print(f"eqlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, EqlabError) as exc:
        diag = getattr(exc, "diagnostics", {})
        print(f"eqlab: numerical failure: {exc} {diag if diag else ''}".rstrip(), file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"eqlab: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
