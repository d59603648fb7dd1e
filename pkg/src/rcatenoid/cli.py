"""Command-line interface: ``rcatenoid <subcommand> [options]``.

Settings come from built-in defaults, then an optional JSON config file
(``--config``), then command-line flags, each overriding the previous.
Relative output paths are resolved against ``$RCATENOID_OUTPUT_DIR`` when
it is set.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage,
domain or I/O errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (ANALYSIS_QUADRATURE, count_bvp_solutions, envelope_curve, envelope_min,
                       profile_intersections)
from .curvature import verify_hj_signs
from .errors import DomainError, IntegrationError, QuadratureError
from .export import export_mesh, export_profile, write_text
from .family import make_family
from .heights import QuadratureSettings, half_height, half_height_derivative, height_limit
from .profile import OdeSettings, cross_validate, integrate_profile, max_first_integral_residual
from .verify import CHECKS, DEFAULT_TOLERANCES, run_suite

OUTPUT_ENV = "RCATENOID_OUTPUT_DIR"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "n": 4,
    "r": 1,
    "a": 1.0,
    "a_min": 0.05,
    "a_max": 10.0,
    "count": 50,
    "t0": 0.7,
    "R": None,
    "b": 2.0,
    "t_min": 0.1,
    "t_max": 1.2,
    "samples": 100,
    "n_t": 200,
    "n_theta": 128,
    "rho_max": 6.0,
    "quad_rel_tol": ANALYSIS_QUADRATURE.rel_tol,
    "quad_abs_tol": ANALYSIS_QUADRATURE.abs_tol,
    "ode_rel_tol": 1e-10,
    "ode_abs_tol": 1e-12,
    "f_cap": 30.0,
    "output": None,
    "tolerances": {},
    "checks": None,
    "timings": True,
}


class UsageError(Exception):
    pass


def _number(x):
    """JSON-safe float: non-finite values become strings."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _add_common(p, *names):
    p.add_argument("--config", help="JSON file with default values for any option (keys use underscores)")
    p.add_argument("--n", type=int, help="ambient dimension of the hyperbolic factor (default 4)")
    p.add_argument("--r", type=int, help="order: the surface has H_{r+1} = 0 (default 1)")
    p.add_argument("-o", "--output", help="output file; relative paths go under $" + OUTPUT_ENV)
    p.add_argument("--quad-rel-tol", type=float, help="quadrature relative tolerance (default 1e-13)")
    p.add_argument("--quad-abs-tol", type=float, help="quadrature absolute tolerance (default 1e-15)")
    if "ode" in names:
        p.add_argument("--ode-rel-tol", type=float, help="ODE relative tolerance (default 1e-10)")
        p.add_argument("--ode-abs-tol", type=float, help="ODE absolute tolerance (default 1e-12)")
        p.add_argument("--f-cap", type=float, help="radius at which ODE integration stops (default 30)")
    if "a" in names:
        p.add_argument("--a", type=float, help="neck radius (default 1.0)")
    if "t0" in names:
        p.add_argument("--t0", type=float, help="half-distance between the boundary spheres (default 0.7)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcatenoid", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter,
                                     epilog=__doc__.split("\n", 2)[2])
    parser.add_argument("--version", action="version", version=f"rcatenoid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("profile", help="write the profile curve of one catenoid as CSV")
    _add_common(p, "a", "ode")

    p = sub.add_parser("length", help="half-height L(a) and its derivative")
    _add_common(p, "a")

    p = sub.add_parser("sweep", help="L(a) over a logarithmic grid of neck radii")
    _add_common(p)
    p.add_argument("--a-min", type=float, help="smallest neck radius (default 0.05)")
    p.add_argument("--a-max", type=float, help="largest neck radius (default 10)")
    p.add_argument("--count", type=int, help="number of grid points (default 50)")

    p = sub.add_parser("bvp", help="count catenoids through the spheres of radius R at heights +-t0")
    _add_common(p, "t0")
    p.add_argument("--R", type=float, help="sphere radius (default: the envelope radius m(t0))")

    p = sub.add_parser("envelope", help="envelope radius m(t) over a grid of heights")
    _add_common(p)
    p.add_argument("--t-min", type=float, help="lowest height (default 0.1)")
    p.add_argument("--t-max", type=float, help="highest height (default 1.2)")
    p.add_argument("--count", type=int, help="number of heights (default 50)")

    p = sub.add_parser("intersect", help="crossings of the profiles with necks a and b")
    _add_common(p, "a")
    p.add_argument("--b", type=float, help="second neck radius (default 2.0)")

    p = sub.add_parser("curvature", help="curvature sign checks along one catenoid")
    _add_common(p, "a", "ode")
    p.add_argument("--samples", type=int, help="points sampled uniformly in t (default 100)")

    p = sub.add_parser("mesh", help="write the revolved surface as an OBJ mesh (n = 2 only)")
    _add_common(p, "a", "ode")
    p.add_argument("--n-t", type=int, help="rows per half of the t grid (default 200)")
    p.add_argument("--n-theta", type=int, help="points around each circle (default 128)")
    p.add_argument("--rho-max", type=float, help="hyperbolic radius where the mesh stops (default 6)")

    p = sub.add_parser("verify", help="run the acceptance checks and write a JSON report")
    p.add_argument("--config", help="JSON file; may hold 'tolerances' and 'checks'")
    p.add_argument("-o", "--output", help="report file (default: stdout)")
    p.add_argument("--check", action="append", dest="checks", choices=sorted(CHECKS),
                   help="run only this check (repeatable)")
    p.add_argument("--tol", action="append", default=None, metavar="NAME=VALUE",
                   help="override a check tolerance, e.g. --tol conservation=1e-16 (repeatable)")
    p.add_argument("--no-timings", dest="timings", action="store_false", default=None,
                   help="omit run times so identical runs give identical reports")
    return parser


def resolve_settings(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"config {args.config} must hold a JSON object")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise UsageError(f"unknown config keys in {args.config}: {', '.join(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config", "tol") or value is None:
            continue
        cfg[key] = value
    tol = dict(cfg.get("tolerances") or {})
    for item in getattr(args, "tol", None) or []:
        name, sep, value = item.partition("=")
        try:
            tol[name] = float(value)
        except ValueError:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}") from None
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
    cfg["tolerances"] = tol
    return cfg


def output_path(path) -> Path:
    path = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not path.is_absolute():
        return Path(base) / path
    return path


def _family(cfg):
    return make_family(int(cfg["n"]), int(cfg["r"]))


def _quad(cfg):
    return QuadratureSettings(rel_tol=cfg["quad_rel_tol"], abs_tol=cfg["quad_abs_tol"])


def _ode(cfg):
    return OdeSettings(rel_tol=cfg["ode_rel_tol"], abs_tol=cfg["ode_abs_tol"], f_cap=cfg["f_cap"])


def _family_info(fp):
    return {"n": fp.n, "r": fp.r, "q": _number(fp.q), "regime": fp.regime.value, "version": __version__}


def _emit_json(payload, cfg):
    text = json.dumps(payload, indent=2) + "\n"
    if cfg.get("output"):
        path = write_text(output_path(cfg["output"]), text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def cmd_profile(cfg):
    fp = _family(cfg)
    name = cfg["output"] or f"profile_n{fp.n}_r{fp.r}_a{cfg['a']:g}.csv"
    path = export_profile(fp, cfg["a"], output_path(name), _ode(cfg), _quad(cfg))
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_mesh(cfg):
    fp = _family(cfg)
    name = cfg["output"] or f"mesh_n{fp.n}_r{fp.r}_a{cfg['a']:g}.obj"
    path = export_mesh(fp, cfg["a"], output_path(name), int(cfg["n_t"]), int(cfg["n_theta"]), cfg["rho_max"],
                       _ode(cfg), _quad(cfg))
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_length(cfg):
    fp, quad = _family(cfg), _quad(cfg)
    L = half_height(fp, cfg["a"], quad)
    dL = half_height_derivative(fp, cfg["a"], quad)
    _emit_json({"family": _family_info(fp), "a": _number(cfg["a"]), "L": _number(L.value),
                "L_error_estimate": _number(L.error_estimate), "dL_da": _number(dL.value),
                "dL_da_error_estimate": _number(dL.error_estimate),
                "L_limit": _number(height_limit(fp))}, cfg)
    return EXIT_OK


def cmd_sweep(cfg):
    import numpy as np

    fp, quad = _family(cfg), _quad(cfg)
    if not 0 < cfg["a_min"] < cfg["a_max"]:
        raise DomainError("need 0 < a_min < a_max")
    if int(cfg["count"]) < 2:
        raise DomainError("count must be at least 2")
    rows = []
    for a in np.geomspace(cfg["a_min"], cfg["a_max"], int(cfg["count"])):
        rows.append({"a": _number(a), "L": _number(half_height(fp, a, quad).value),
                     "dL_da": _number(half_height_derivative(fp, a, quad).value)})
    _emit_json({"family": _family_info(fp), "L_limit": _number(height_limit(fp)), "rows": rows}, cfg)
    return EXIT_OK


def cmd_bvp(cfg):
    fp, quad = _family(cfg), _quad(cfg)
    t0 = cfg["t0"]
    R = cfg["R"]
    if R is None:
        R = envelope_min(fp, t0, quad, allow_unvalidated=True).m
    res = count_bvp_solutions(fp, t0, R, quad)
    _emit_json({"family": _family_info(fp), "t0": _number(t0), "R": _number(R), "count": res.count,
                "roots": [_number(x) for x in res.roots], "m0": _number(res.m0), "a0": _number(res.a0),
                "validated": res.validated, "flag": res.flag,
                "phi_residuals": [_number(x) for x in res.phi_residuals]}, cfg)
    return EXIT_OK


def cmd_envelope(cfg):
    import numpy as np

    fp, quad = _family(cfg), _quad(cfg)
    grid = np.linspace(cfg["t_min"], cfg["t_max"], int(cfg["count"]))
    rows = [{"t": _number(p.t), "m": _number(p.m), "a_star": _number(p.a_star), "validated": p.validated,
             "tangency_residual": _number(p.tangency_residual), "status": p.status}
            for p in envelope_curve(fp, grid, quad)]
    _emit_json({"family": _family_info(fp), "points": rows}, cfg)
    return EXIT_OK


def cmd_intersect(cfg):
    fp, quad = _family(cfg), _quad(cfg)
    hits = profile_intersections(fp, cfg["a"], cfg["b"], settings=quad)
    _emit_json({"family": _family_info(fp), "a": _number(cfg["a"]), "b": _number(cfg["b"]),
                "upper_crossings": [{"rho": _number(r), "t": _number(t)} for r, t in hits]}, cfg)
    return EXIT_OK


def cmd_curvature(cfg):
    fp = _family(cfg)
    curve = integrate_profile(fp, cfg["a"], _ode(cfg), _quad(cfg))
    rep = verify_hj_signs(fp, cfg["a"], int(cfg["samples"]), curve=curve)
    cv = cross_validate(fp, cfg["a"], curve=curve, quadrature=_quad(cfg))
    _emit_json({"family": _family_info(fp), "a": _number(cfg["a"]), "samples": rep.n_samples,
                "passed": rep.passed, "max_abs_H_order": _number(rep.max_abs_H_order),
                "max_kn_residual": _number(rep.max_kn_residual),
                "min_newton_eigenvalue_unit_scale": _number(rep.min_newton_eig),
                "min_abs_H_next_unit_scale": _number(rep.min_abs_H_next),
                "max_first_integral_residual": _number(max_first_integral_residual(curve)),
                "cross_validation_gap": _number(cv.max_gap),
                "violations": [{"t": _number(t), "message": m} for t, m in rep.violations]}, cfg)
    return EXIT_OK


def cmd_verify(cfg):
    def progress(res):
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: measured={res.measured} tolerance={res.tolerance}", file=sys.stderr)

    unknown = sorted(set(cfg["tolerances"]) - set(DEFAULT_TOLERANCES))
    if unknown:
        raise UsageError(f"unknown tolerance names: {', '.join(unknown)}")
    report = run_suite(cfg["tolerances"], cfg.get("checks"), timings=bool(cfg["timings"]), progress=progress)
    _emit_json(report, cfg)
    return EXIT_OK if report["summary"]["all_passed"] else EXIT_CHECK_FAILED


COMMANDS = {
    "profile": cmd_profile, "length": cmd_length, "sweep": cmd_sweep, "bvp": cmd_bvp,
    "envelope": cmd_envelope, "intersect": cmd_intersect, "curvature": cmd_curvature,
    "mesh": cmd_mesh, "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_settings(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, DomainError, KeyError) as exc:
        print(f"rcatenoid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, IntegrationError) as exc:
        print(f"rcatenoid {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rcatenoid {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
