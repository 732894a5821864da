"""Command-line frontend: solve, lane-emden, scan, bound, verify, fit.

Summaries are single-line JSON on stdout with floats printed to 17
significant digits, so identical invocations produce byte-identical
output; bulk data (profiles, scans) goes to CSV files.  Exit codes:
0 success, 2 input validation, 3 physical / no-solution outcome,
4 numerical failure.

Units: equation-of-state parameters (k, k0), densities and the surface
combination are always geometrized (G = c = 1, centimeter powers).
Masses are accepted in solar masses and radii in kilometers unless
--geometrized asks for raw geometrized values.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import bounds as bounds_mod
from . import catalog as catalog_mod
from . import scan as scan_mod
from .eos import PolytropicEos, eos_from_text
from .errors import (
    CatalogError,
    DomainError,
    FoldPointError,
    HorizonApproachError,
    NoFiniteRadiusError,
    NonConvergenceError,
    SingularPointError,
    TovkitError,
    UnderdeterminedError,
    UnknownUnitError,
)
from .relations import MonomialRelation, rational_from_text
from .structure import (
    IntegrationOptions,
    integrate_lane_emden,
    integrate_tov,
    newtonian_star,
    profile_to_csv,
)
from .units import KM_CM, SOLAR_MASS_LENGTH_CM, DENSITY_GEOM_PER_CGS, polytropic_k_from_geometrized

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PHYSICAL = 3
EXIT_NUMERICAL = 4

_VALIDATION_ERRORS = (DomainError, UnknownUnitError, UnderdeterminedError, CatalogError)
_PHYSICAL_ERRORS = (NoFiniteRadiusError, HorizonApproachError, SingularPointError, FoldPointError)
_NUMERICAL_ERRORS = (NonConvergenceError,)


def _fmt_json(value) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "null"
        return f"{value:.17g}"
    if isinstance(value, str):
        import json

        return json.dumps(value)
    if isinstance(value, dict):
        return "{" + ",".join(f"{_fmt_json(str(k))}:{_fmt_json(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_fmt_json(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def _emit(payload: dict) -> None:
    sys.stdout.write(_fmt_json(payload) + "\n")


def _mass_to_geom(value: float, geometrized: bool) -> float:
    return value if geometrized else value * SOLAR_MASS_LENGTH_CM


def _length_to_geom(value: float, geometrized: bool) -> float:
    return value if geometrized else value * KM_CM


def _load_eos(args: argparse.Namespace) -> PolytropicEos:
    if getattr(args, "eos_file", None):
        with open(args.eos_file, "r", encoding="utf-8") as stream:
            return eos_from_text(stream.read())
    if args.k is None or args.gamma is None:
        raise DomainError("either --eos-file or both --k and --gamma are required")
    return PolytropicEos(k=args.k, gamma=args.gamma, k0=args.k0)


def _integration_options(args: argparse.Namespace) -> IntegrationOptions:
    kwargs = {}
    if getattr(args, "rtol", None) is not None:
        kwargs["rtol"] = args.rtol
    return IntegrationOptions(**kwargs)


def _cmd_solve(args: argparse.Namespace) -> int:
    eos = _load_eos(args)
    opts = _integration_options(args)
    if args.mode == "tov":
        profile = integrate_tov(eos, args.rho_c, opts)
    else:
        profile = newtonian_star(eos, args.rho_c, opts)
    if args.out:
        profile_to_csv(profile, args.out)
    verdict = eos.is_causal_at_center(args.rho_c)
    _emit(
        {
            "mode": args.mode,
            "k": eos.k,
            "k0": eos.k0,
            "gamma": eos.gamma,
            "rho_c": args.rho_c,
            "mass": profile.total_mass,
            "radius": profile.surface_radius,
            "mass_msun": profile.total_mass / SOLAR_MASS_LENGTH_CM,
            "radius_km": profile.surface_radius / KM_CM,
            "surface_combination": profile.rho_rel_limit,
            "causal": verdict.causal,
            "v2_center": verdict.v2_max,
        }
    )
    return EXIT_OK


def _cmd_lane_emden(args: argparse.Namespace) -> int:
    opts = _integration_options(args)
    solution = integrate_lane_emden(args.n, opts)
    _emit(
        {
            "n": solution.n,
            "xi1": solution.xi1 if solution.has_finite_radius else None,
            "theta_prime_at_xi1": solution.theta_prime_at_xi1
            if solution.has_finite_radius
            else None,
            "finite_radius": solution.has_finite_radius,
        }
    )
    if not solution.has_finite_radius:
        print(f"no finite radius for index n={args.n:g}", file=sys.stderr)
        return EXIT_PHYSICAL
    return EXIT_OK


def _cmd_scan(args: argparse.Namespace) -> int:
    with open(args.config, "r", encoding="utf-8") as stream:
        spec = scan_mod.parse_scan_config(stream.read())
    opts = _integration_options(args)
    points = scan_mod.run_scan(spec, opts, jobs=args.jobs)
    if args.format == "json":
        text = scan_mod.scan_points_to_json(points) + "\n"
        if args.out:
            with open(args.out, "w", encoding="ascii") as stream:
                stream.write(text)
        else:
            sys.stdout.write(text)
    else:
        if args.out:
            scan_mod.scan_points_to_csv(points, args.out)
        else:
            scan_mod.scan_points_to_csv(points, sys.stdout)
    return EXIT_OK


def _require(args: argparse.Namespace, names: Sequence[str], route: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise DomainError(f"route {route} requires {', '.join(missing)}")


def _build_bound(args: argparse.Namespace):
    """Returns (bounds, relation) for the requested route; bounds is a list."""
    geo = args.geometrized
    route = args.route
    relation = None
    if route == "newtonian-causal":
        _require(args, ("n", "mass", "radius", "surface_combination"), route)
        bound = bounds_mod.newtonian_causal_k_bound(
            args.n,
            _mass_to_geom(args.mass, geo),
            _length_to_geom(args.radius, geo),
            args.surface_combination,
        )
        return [bound], relation
    if route == "causal-monomial":
        _require(args, ("a", "b", "gamma", "r0"), route)
        bound = bounds_mod.causal_k_bound_monomial(
            args.a, args.b, args.gamma, _length_to_geom(args.r0, geo)
        )
        return [bound], relation
    if route == "causal-rational":
        _require(args, ("relation_file", "gamma", "r0", "seed_mass"), route)
        with open(args.relation_file, "r", encoding="utf-8") as stream:
            relation = rational_from_text(stream.read())
        bound = bounds_mod.causal_k_bound_rational(
            relation,
            args.gamma,
            _length_to_geom(args.r0, geo),
            _mass_to_geom(args.seed_mass, geo),
        )
        return [bound], relation
    if route == "monomial-amplitude":
        _require(args, ("mass_max", "radius_max", "b"), route)
        bound = bounds_mod.amplitude_bound_from_mass_radius(
            _mass_to_geom(args.mass_max, geo), _length_to_geom(args.radius_max, geo), args.b
        )
        return [bound], relation
    if route == "mass-derivative":
        _require(args, ("a", "b", "gamma", "m0", "r0"), route)
        rel = MonomialRelation(a=args.a, b=args.b)
        results = bounds_mod.density_bound_from_mass_derivative(
            rel, _mass_to_geom(args.m0, geo), _length_to_geom(args.r0, geo), args.gamma
        )
        return results, relation
    raise DomainError(f"unknown route {route!r}")


def _bound_payload(bound: bounds_mod.BoundResult) -> dict:
    payload = bound.to_dict()
    if bound.quantity == "k":
        gamma = bound.inputs.get("gamma")
        if gamma is None and "n" in bound.inputs:
            n = bound.inputs["n"]
            gamma = (n + 1.0) / n
        if gamma is not None:
            payload["value_cgs"] = polytropic_k_from_geometrized(bound.value, gamma)
    elif bound.quantity == "R0":
        payload["value_km"] = bound.value / KM_CM
    elif bound.quantity == "rho":
        payload["value_cgs"] = bound.value / DENSITY_GEOM_PER_CGS
    return payload


def _cmd_bound(args: argparse.Namespace) -> int:
    results, _ = _build_bound(args)
    if len(results) == 1:
        _emit(_bound_payload(results[0]))
    else:
        _emit({"bounds": [_bound_payload(b) for b in results]})
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    results, relation = _build_bound(args)
    bound = results[0]
    if bound.direction == "upper":
        grid = np.geomspace(bound.value / 100.0, bound.value * 0.999, args.grid_points)
        probe = bound.value * 1.001
    else:
        grid = np.geomspace(bound.value * 1.001, bound.value * 100.0, args.grid_points)
        probe = bound.value * 0.999
    report = bounds_mod.verify_bound_by_bruteforce(bound, grid, relation)
    probe_report = bounds_mod.verify_bound_by_bruteforce(bound, [probe], relation)
    # the probe sits outside the bound region; rerun it as if admitted to
    # see whether the direct check fails there (sharpness)
    check = bounds_mod._direct_check(bound, relation)
    sharp = None if check is None else bool(check(probe) > 0.0)
    payload = report.to_dict()
    payload["bound_value"] = bound.value
    payload["sharp_outside_probe_fails"] = sharp
    payload["probe_skipped"] = probe_report.skipped
    _emit(payload)
    return EXIT_OK if report.violations == 0 else EXIT_PHYSICAL


def _parse_exponents(text: Optional[str], flag: str) -> list[float]:
    if not text:
        raise DomainError(f"{flag} is required for the rational model")
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise DomainError(f"{flag} must be a comma-separated list of numbers") from None


def _cmd_fit(args: argparse.Namespace) -> int:
    records = catalog_mod.load_catalog(args.catalog, mass_floor=args.mass_floor)
    if args.model == "monomial":
        result = catalog_mod.fit_monomial(records)
    else:
        result = catalog_mod.fit_rational(
            records,
            _parse_exponents(args.p_exponents, "--p-exponents"),
            _parse_exponents(args.q_exponents, "--q-exponents"),
        )
    _emit(result.to_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tovkit",
        description="Stellar structure for polytropes plus causality-driven parameter bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser(
        "solve",
        help="integrate one star and print its mass/radius summary",
        description="Integrate a single star. EOS parameters and rho_c are geometrized.",
    )
    solve.add_argument("--k", type=float, help="polytropic constant (geometrized)")
    solve.add_argument("--k0", type=float, default=0.0, help="stiffness offset (geometrized)")
    solve.add_argument("--gamma", type=float, help="polytrope exponent, > 1")
    solve.add_argument("--eos-file", help="key-value file with k, k0, gamma (alternative to flags)")
    solve.add_argument("--rho-c", type=float, required=True, help="central density (geometrized)")
    solve.add_argument("--mode", choices=("tov", "newtonian"), default="tov")
    solve.add_argument("--rtol", type=float, help="integrator relative tolerance (default 1e-10)")
    solve.add_argument("--out", help="write the radial profile CSV (r,p,rho,m) here")
    solve.set_defaults(func=_cmd_solve)

    lane = sub.add_parser(
        "lane-emden",
        help="first zero of the dimensionless polytrope equation",
        description="Integrate the dimensionless polytrope to its first zero (dimensionless).",
    )
    lane.add_argument("--n", type=float, required=True, help="polytropic index, n >= 0")
    lane.add_argument("--rtol", type=float, help="integrator relative tolerance (default 1e-10)")
    lane.set_defaults(func=_cmd_lane_emden)

    scan = sub.add_parser(
        "scan",
        help="sweep a (k, gamma, rho_c) grid from a config file",
        description="Run a parameter sweep. Config keys: mode, <axis>_{min,max,count,spacing} "
        "for axes k, gamma, rho_c; all values geometrized.",
    )
    scan.add_argument("--config", required=True, help="key = value scan configuration file")
    scan.add_argument("--out", help="output path (default: stdout)")
    scan.add_argument("--format", choices=("csv", "json"), default="csv")
    scan.add_argument("--jobs", type=int, default=None,
                      help="worker processes (default: all cores)")
    scan.add_argument("--rtol", type=float, help="integrator relative tolerance")
    scan.set_defaults(func=_cmd_scan)

    def add_bound_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--route",
            required=True,
            choices=bounds_mod.ROUTES,
            help="which derivation to run",
        )
        p.add_argument("--geometrized", action="store_true",
                       help="masses/radii are raw geometrized values, not Msun/km")
        p.add_argument("--n", type=float, help="polytropic index (newtonian-causal)")
        p.add_argument("--mass", type=float, help="stellar mass [Msun unless --geometrized]")
        p.add_argument("--radius", type=float, help="stellar radius [km unless --geometrized]")
        p.add_argument("--surface-combination", type=float,
                       help="limiting |p'(R)|/rho_rel value (geometrized)")
        p.add_argument("--a", type=float, help="monomial amplitude (geometrized)")
        p.add_argument("--b", type=float, help="monomial exponent")
        p.add_argument("--gamma", type=float, help="polytrope exponent")
        p.add_argument("--r0", type=float, help="evaluation radius [km unless --geometrized]")
        p.add_argument("--m0", type=float, help="cap on M' [Msun unless --geometrized]")
        p.add_argument("--mass-max", type=float, help="mass cap [Msun unless --geometrized]")
        p.add_argument("--radius-max", type=float, help="radius cap [km unless --geometrized]")
        p.add_argument("--seed-mass", type=float,
                       help="branch seed mass [Msun unless --geometrized]")
        p.add_argument("--relation-file",
                       help="rational relation rows 'p|q,coef,exponent' (geometrized)")

    bound = sub.add_parser(
        "bound",
        help="derive a parameter bound from mass/radius/causality constraints",
        description="Derive a bound. Values are reported geometrized plus cgs/solar "
        "equivalents where the quantity has a clean conversion.",
    )
    add_bound_flags(bound)
    bound.set_defaults(func=_cmd_bound)

    verify = sub.add_parser(
        "verify",
        help="brute-force check a derived bound over a grid",
        description="Derive a bound, then test a log-spaced grid inside it against the "
        "route's direct check; exits 3 if any violation is found.",
    )
    add_bound_flags(verify)
    verify.add_argument("--grid-points", type=int, default=1000,
                        help="grid size inside the bound region (default 1000)")
    verify.set_defaults(func=_cmd_verify)

    fit = sub.add_parser(
        "fit",
        help="fit a mass-radius relation to a catalog CSV",
        description="Fit a relation to catalog records (mass,radius[,label][,weight]; "
        "masses in Msun, radii in solar radii; fits are unit-agnostic).",
    )
    fit.add_argument("--model", choices=("monomial", "rational"), required=True)
    fit.add_argument("--catalog", required=True, help="catalog CSV path")
    fit.add_argument("--mass-floor", type=float, default=catalog_mod.MASS_FLOOR_MSUN,
                     help="reject records below this mass [Msun] (default 0.1)")
    fit.add_argument("--p-exponents", help="comma-separated exponents of p(M) (rational)")
    fit.add_argument("--q-exponents", help="comma-separated exponents of q(M) (rational)")
    fit.set_defaults(func=_cmd_fit)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", None) is None and args.command == "scan":
        import os

        args.jobs = os.cpu_count() or 1
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"tovkit: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _PHYSICAL_ERRORS as exc:
        print(f"tovkit: {exc}", file=sys.stderr)
        return EXIT_PHYSICAL
    except _NUMERICAL_ERRORS as exc:
        print(f"tovkit: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TovkitError as exc:  # any remaining package error is numerical-ish
        print(f"tovkit: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"tovkit: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
