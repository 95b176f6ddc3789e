"""Command-line front end.

    polymean zeros     --m 1 --s 0 --lambda-max 30 --out catalog.json
    polymean verify    --m 1 --s 0 --field cylinder@zero-index-0 --out res.csv
    polymean plane-wave --m 2 --s 1 --seed 3
    polymean synth     --m 3 --s 1 --seed 0 --out spec.json
    polymean two-radii --m 1 --s 0 --r1 1 --r2 1.4142135624 --R 3 --out report.json

Exit codes: 0 pass, 1 contract failure, 2 usage or validation error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from math import pi

import numpy as np

from . import __version__
from . import persist
from .chareq import CharacteristicFn, EquationParams
from .fields import CylinderWave, Field, Monomial, PlaneWave, Superposition
from .meanvalue import (DEFAULT_RULE, QuadratureError, calibrate_plane_wave_constant, plane_wave_constant,
                        plane_wave_defect, residual, residual_sweep)
from .specfun import OutOfEnvelopeError
from .synthesis import (SpecValidationError, build_solution, non_zero_lambda, random_spec,
                        verify_solution, with_injected_wave)
from .tworadii import MATCH_TOL, Regime, check_counterexample, classify
from .zeroscan import ScanError, find_zeros, strip_check, select_Zr

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2, 3

log = logging.getLogger("polymean")


class UsageError(ValueError):
    pass


# -- helpers -----------------------------------------------------------------

def _params(args, r=None) -> EquationParams:
    try:
        return EquationParams(args.m, args.s, args.r if r is None else r)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}
    return dict(sorted(cfg.items()))


def _catalog(args):
    if not args.lambda_max >= 5:
        raise UsageError("--lambda-max must be at least 5")
    return find_zeros(CharacteristicFn(args.m, args.s), args.lambda_max, seed=args.seed)


def _disk_samples(rng: np.random.Generator, radius: float, n: int) -> np.ndarray:
    """Seeded uniform points in the open disk of the given radius."""
    rho = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    t = rng.uniform(-pi, pi, n)
    return rho * np.exp(1j * t)


def _emit(args, doc_or_text) -> None:
    if args.out:
        text = doc_or_text if isinstance(doc_or_text, str) else persist.dumps(doc_or_text)
        persist.atomic_write(args.out, text)


def _print(obj) -> None:
    print(json.dumps(obj, indent=2))


def builtin_field(name: str, params: EquationParams, lambda_max: float, seed: int) -> Field:
    """``constant``, ``cylinder@zero-index-N[:k]`` or ``planewave[:lam[:alpha]]``."""
    if name == "constant":
        return Superposition([(1.0, Monomial(0, 0))])
    if name.startswith("cylinder@zero-index-"):
        rest = name[len("cylinder@zero-index-"):]
        idx, _, k = rest.partition(":")
        try:
            idx, k = int(idx), int(k or 0)
        except ValueError as exc:
            raise UsageError(f"bad field {name!r}") from exc
        catalog = find_zeros(params.characteristic, lambda_max, seed=seed)
        zs = select_Zr(catalog, params.r)
        if not 0 <= idx < len(zs):
            raise UsageError(f"zero index {idx} outside 0..{len(zs) - 1}")
        return CylinderWave(zs[idx].lam, 0, k)
    if name.startswith("planewave"):
        parts = name.split(":")[1:]
        try:
            lam = complex(parts[0]) if parts else 3.0
            alpha = float(parts[1]) if len(parts) > 1 else 0.0
        except ValueError as exc:
            raise UsageError(f"bad field {name!r}") from exc
        return PlaneWave(lam, alpha)
    raise UsageError(f"unknown field {name!r}")


# -- commands -----------------------------------------------------------------

def cmd_zeros(args) -> int:
    _params(args)
    catalog = _catalog(args)
    rep = strip_check(catalog)
    _emit(args, persist.catalog_to_dict(catalog, _config(args)))
    _print({
        "zeros": len(catalog.zeros),
        "origin_multiplicity": catalog.origin_multiplicity,
        "outer_winding": catalog.outer_winding,
        "c1": rep.c1,
        "min_lam_gprime": rep.c2,
        "all_large_simple": rep.all_large_simple,
    })
    return EXIT_PASS if rep.all_large_simple else EXIT_FAIL


def cmd_verify(args) -> int:
    params = _params(args)
    if args.spec and args.field:
        raise UsageError("give either --spec or --field")
    if args.spec:
        try:
            spec = persist.spec_from_dict(persist.read_json(args.spec))
        except (OSError, persist.SchemaError, SpecValidationError) as exc:
            raise UsageError(str(exc)) from exc
        params = spec.params
        f = build_solution(spec)
    else:
        f = builtin_field(args.field or "constant", params, args.lambda_max, args.seed)
    R = args.R if args.R is not None else 3 * params.r
    if not R > params.r:
        raise UsageError("need R > r")
    zs = _disk_samples(np.random.default_rng(args.seed), R - params.r, args.n_samples)
    reps = residual_sweep(f, zs, params, DEFAULT_RULE)
    ok = all(x.satisfied(args.tol) for x in reps)
    _emit(args, persist.residuals_to_csv(reps, _config(args)))
    summary = {
        "max_abs_residual": max(abs(x.residual) for x in reps),
        "max_quad_error": max(x.quad_error_estimate for x in reps),
        "pass": ok,
    }
    if isinstance(f, PlaneWave) and abs(f.lam) >= 1e-6:
        predicted = max(abs(plane_wave_defect(f.lam, f.alpha, x.z, params)) for x in reps)
        summary["closed_form_max_abs"] = predicted
    _print(summary)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_plane_wave(args) -> int:
    params = _params(args)
    rng = np.random.default_rng(args.seed)
    if args.on_zeros:
        zs = select_Zr(_catalog(args), params.r)[: args.n_samples]
        lams = [z.lam for z in zs]
    else:
        lams = []
        while len(lams) < args.n_samples:
            mod = rng.uniform(0.5, 20.0)
            lam = mod * np.exp(1j * rng.uniform(-pi, pi))
            if abs(lam.imag) <= 3.0:
                lams.append(complex(lam))
    if args.lam is not None:
        if abs(args.lam) < 1e-6:
            raise UsageError("|lambda| must be at least 1e-6")
        lams = [args.lam]
    constant = complex(calibrate_plane_wave_constant(params.m, params.s))
    worst_rel, worst_abs = 0.0, 0.0
    for lam in lams:
        alpha = rng.uniform(-pi, pi)
        z = complex(*rng.uniform(-1, 1, 2)) * np.sqrt(0.5)
        got = -residual(PlaneWave(lam, alpha), z, params).residual
        want = plane_wave_defect(lam, alpha, z, params)
        dev = abs(got - want)
        worst_abs = max(worst_abs, dev)
        worst_rel = max(worst_rel, dev / max(abs(want), 1e-300))
    if args.on_zeros:
        ok = worst_abs <= args.tol
    else:
        ok = worst_rel <= args.tol
    _print({
        "cases": len(lams),
        "calibrated_constant": [constant.real, constant.imag],
        "matches_closed_form_constant": constant == plane_wave_constant(params.s),
        "max_relative_deviation": worst_rel,
        "max_abs_deviation": worst_abs,
        "pass": ok,
    })
    return EXIT_PASS if ok and constant == plane_wave_constant(params.s) else EXIT_FAIL


def cmd_synth(args) -> int:
    params = _params(args)
    catalog = None
    if args.spec:
        try:
            spec = persist.spec_from_dict(persist.read_json(args.spec))
        except (OSError, persist.SchemaError, SpecValidationError) as exc:
            raise UsageError(str(exc)) from exc
    else:
        catalog = _catalog(args)
        spec = random_spec(catalog, params, np.random.default_rng(args.seed),
                           n_harmonics=args.harmonics, n_zeros=args.n_zeros)
    if args.inject:
        catalog = catalog or find_zeros(spec.params.characteristic, args.lambda_max, seed=args.seed)
        spec = with_injected_wave(spec, non_zero_lambda(catalog, spec.params))
    R = args.R if args.R is not None else 3 * spec.params.r
    rep = verify_solution(spec, R, n_samples=args.n_samples, abs_tol=args.tol)
    _emit(args, persist.spec_to_dict(spec, _config(args)))
    _print({
        "points": rep.n_points,
        "max_residual": rep.max_residual,
        "max_error_estimate": rep.max_error_estimate,
        "max_ratio": rep.max_ratio,
        "pass": rep.passed,
        "note": rep.note,
    })
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_two_radii(args) -> int:
    if args.r1 is None or args.r2 is None or args.R is None:
        raise UsageError("two-radii needs --r1, --r2 and --R")
    _params(args, r=args.r1)
    _params(args, r=args.r2)
    catalog = _catalog(args)
    try:
        report = classify(catalog, args.r1, args.r2, args.R, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    contract = None
    ok = True
    if report.regime is Regime.COUNTEREXAMPLE_CONSTRUCTED:
        c = check_counterexample(report.counterexample, args.m, args.s, args.r1, args.r2, args.R,
                                 n_samples=args.n_samples)
        contract = {"max_residual_ratio": list(c.max_residual_ratio), "pde_ratio": c.pde_ratio,
                    "passed": c.passed}
        ok = c.passed
    doc = persist.report_to_dict(report, _config(args), contract)
    _emit(args, doc)
    _print({k: doc[k] for k in ("regime", "scope", "common_zeros")} | (
        {"contract": contract} if contract else {}))
    return EXIT_PASS if ok else EXIT_FAIL


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polymean", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--s", type=int, required=True)
        p.add_argument("--r", type=float, default=1.0)
        p.add_argument("--lambda-max", type=float, default=40.0)
        p.add_argument("--tol", type=float, default=tol)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("zeros", help="certified zero catalog of the characteristic function")
    common(p, 1e-10)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("verify", help="residual sweep of a field, CSV output")
    common(p, 1e-9)
    p.add_argument("--field")
    p.add_argument("--spec")
    p.add_argument("--R", type=float)
    p.add_argument("--n-samples", type=int, default=20)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plane-wave", aliases=["lemma2"], help="plane-wave closed form against quadrature")
    common(p, 1e-7)
    p.add_argument("--n-samples", type=int, default=100)
    p.add_argument("--on-zeros", action="store_true", help="use catalog zeros as wavenumbers")
    p.add_argument("--lam", type=complex)
    p.set_defaults(func=cmd_plane_wave)

    p = sub.add_parser("synth", help="build and verify a truncated solution")
    common(p, 1e-9)
    p.add_argument("--spec")
    p.add_argument("--R", type=float)
    p.add_argument("--harmonics", type=int, default=3)
    p.add_argument("--n-zeros", type=int, default=3)
    p.add_argument("--n-samples", type=int, default=20)
    p.add_argument("--inject", action="store_true", help="add one wave at a non-zero (negative control)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("two-radii", help="common zeros and regime for two radii")
    common(p, MATCH_TOL)
    p.add_argument("--r1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--n-samples", type=int, default=20)
    p.set_defaults(func=cmd_two_radii)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScanError, QuadratureError, OutOfEnvelopeError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
