"""
Command-line entry point for the kreweras toolkit.

Subcommands:
1. enumerate          walk generating function Q (or Q(0,0)) as a series artifact
2. kernel-check       residual of the cleared kernel equation
3. theta              the x-part Theta, optionally cross-checked against the residue oracle
4. guess-ode          staircase search for a differential operator, with reserve report
5. guess-alg          modular search for an algebraic equation
6. ore                operator arithmetic and local analysis on operator artifacts
7. verify-closedform  certificate section Theta = C
8. certify            transcendence chain, or the whole pipeline with --full

Exit codes:
- 0: success (certify: the verdict holds)
- 1: KrewerasError, logged at ERROR
- 2: usage error (argparse)
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from kreweras import config
from kreweras.certify import certify_theta_equals_C, certify_transcendence
from kreweras.errors import FormatError, KrewerasError
from kreweras.extraction import residue_oracle, theta_series
from kreweras.guessing import (
    algebraic_staircase, c_zero_experiment, guess_algebraic_mod_p, q00_series_mod_p, reduce_mod_p,
    specialize_x, staircase_search,
)
from kreweras.local import detect_log_at_0, power_series_solutions
from kreweras.models import Certificate, CheckStatus, GuessConfig
from kreweras.ore import apply, lclm, rrem, to_recurrence
from kreweras.pipeline import load_pipeline_config, run_pipeline
from kreweras.textio import (
    operator_from_text, operator_to_text, poly_to_text, read_artifact, series_from_text, series_to_text,
    write_artifact,
)
from kreweras.walks import StepSet, WeightSpec, coeff_at, enumerate_walks, kernel_residual, series_Q

# Configure logging
logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


# ===== HELPERS =====

def _command_line(args) -> str:
    return "python -m kreweras.main " + " ".join(args.argv)


def _emit(text: str, out: Optional[str]):
    """Write an artifact to --out, or print it."""
    if out:
        write_artifact(out, text)
        logger.info(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _read_series(path: str):
    return series_from_text(read_artifact(path))


def _read_operator(path: str):
    return operator_from_text(read_artifact(path))


def _certificate_ok(cert: Certificate) -> bool:
    if cert.verdict is not None:
        return cert.verdict.holds
    return all(c.holds for c in cert.checks if c.status != CheckStatus.UNPROVEN)


# ===== SUBCOMMANDS =====

def cmd_enumerate(args) -> int:
    weights = WeightSpec(args.a, args.b, args.c, prime=args.prime)
    gf = enumerate_walks(StepSet.from_name(args.steps), weights, args.n)
    if args.q00:
        f = coeff_at(gf, 0, 0)
    else:
        f = series_Q(gf, args.x_value, args.y_value)
    _emit(series_to_text(f, _command_line(args)), args.out)
    return 0


def cmd_kernel_check(args) -> int:
    gf = enumerate_walks(StepSet.from_name(args.steps), WeightSpec.symbolic(), args.n - 1)
    residual = kernel_residual(gf, args.n)
    print(f"kernel equation holds mod t^{residual.prec} for {args.steps}")
    return 0


def cmd_theta(args) -> int:
    theta = theta_series(args.n)
    if args.check_oracle:
        oracle = residue_oracle(min(args.n, args.oracle_order))
        if theta.truncate(oracle.prec) != oracle:
            logger.error(f"theta_series and residue_oracle differ mod t^{oracle.prec}")
            return 1
        logger.info(f"theta_series agrees with residue_oracle mod t^{oracle.prec}")
    _emit(series_to_text(theta, _command_line(args)), args.out)
    return 0


def cmd_guess_ode(args) -> int:
    f = _read_series(args.series)
    if args.x_value is not None:
        if "x" not in getattr(f.ring, "names", ()):
            raise FormatError("--x-value needs a series with coefficients in x")
        f = specialize_x(f, int(args.x_value))
    cfg = GuessConfig(max_order=args.max_order, max_degree=args.max_degree, max_x_degree=args.max_x_degree,
                      reserve=args.reserve, prime=args.prime)
    result = staircase_search(f, cfg)
    if result.operator is None:
        logger.warning(f"no operator within order {cfg.max_order}, degree {cfg.max_degree}")
        print(json.dumps({"found": False, "cells": len(result.visited), "skipped": len(result.skipped)}, indent=2))
        return 1
    _emit(operator_to_text(result.operator, _command_line(args)), args.out)
    print(result.report.model_dump_json(indent=2))
    return 0


def cmd_guess_alg(args) -> int:
    if args.c_zero:
        report = c_zero_experiment(args.prime, args.n)
        print(report.model_dump_json(indent=2))
        print(f"outcome: {report.outcome}")
        return 0
    if args.q00:
        f = q00_series_mod_p(args.prime, args.n)
    else:
        f = reduce_mod_p(_read_series(args.series), args.prime)
    if args.deg_t is not None and args.deg_u is not None:
        guess = guess_algebraic_mod_p(f, args.deg_t, args.deg_u, reserve=args.reserve)
    else:
        guess, visited = algebraic_staircase(f, args.max_deg_t, args.max_deg_u, reserve=args.reserve)
        logger.info(f"visited {len(visited)} degree pairs")
    if guess is None:
        logger.warning("no algebraic relation at these degrees")
        return 1
    _emit(poly_to_text(guess.poly, _command_line(args)), args.out)
    print(guess.report.model_dump_json(indent=2))
    return 0


def cmd_ore(args) -> int:
    if args.lclm:
        L, M = (_read_operator(p) for p in args.lclm)
        _emit(operator_to_text(lclm(L, M), _command_line(args)), args.out)
    elif args.rrem:
        L, M = (_read_operator(p) for p in args.rrem)
        _emit(operator_to_text(rrem(L, M), _command_line(args)), args.out)
    elif args.apply:
        L = _read_operator(args.apply[0])
        f = _read_series(args.apply[1])
        _emit(series_to_text(apply(L, f), _command_line(args)), args.out)
    elif args.solve:
        sol = power_series_solutions(_read_operator(args.solve), args.n)
        print(f"dimension: {sol.dimension}")
        print(f"r: {sol.r}")
        for k, s in enumerate(sol.basis):
            terms = " + ".join(f"({c})*t^{n}" for n, c in s.items())
            print(f"s{k}: {terms} + O(t^{s.prec})")
    elif args.loganalysis:
        data = detect_log_at_0(_read_operator(args.loganalysis))
        print(f"indicial: {data.indicial.as_expr()}")
        print("roots: " + ", ".join(f"{rho} (mult {m})" for rho, m in data.roots))
        print(f"log: {'unknown' if data.log is None else ('present' if data.log else 'absent')}")
    elif args.recurrence:
        print(to_recurrence(_read_operator(args.recurrence)))
    return 0


def cmd_verify_closedform(args) -> int:
    cert = certify_theta_equals_C(args.n)
    _emit(cert.to_json(), args.out)
    return 0 if _certificate_ok(cert) else 1


def cmd_certify(args) -> int:
    if args.full:
        overrides = {"closedform_order": args.n, "prime": args.prime, "reserve": args.reserve,
                     "output_dir": args.output_dir}
        cfg = load_pipeline_config(args.config, overrides)
        cert = run_pipeline(cfg, modular=not args.no_modular)
        if args.out:
            write_artifact(args.out, cert.to_json())
    else:
        cert = certify_transcendence(depth=args.depth)
        _emit(cert.to_json(), args.out)
    ok = _certificate_ok(cert)
    if not ok:
        logger.error("certificate does not hold")
    return 0 if ok else 1


# ===== ARGUMENT PARSING =====

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kreweras", description="Kreweras walks with interacting boundaries")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="walk generating function as a series artifact")
    p.add_argument("--n", type=int, default=config.ENUMERATE_ORDER, help="largest walk length")
    p.add_argument("--steps", default="kreweras", choices=["kreweras", "reverse-kreweras"])
    p.add_argument("--a", default=None, help="weight a (rational), symbolic when omitted")
    p.add_argument("--b", default=None)
    p.add_argument("--c", default=None)
    p.add_argument("--x-value", default=None, help="substitute x (rational)")
    p.add_argument("--y-value", default=None, help="substitute y (rational)")
    p.add_argument("--prime", type=int, default=None, help="work in GF(prime)")
    p.add_argument("--q00", action="store_true", help="emit Q(0,0) instead of Q(x,y)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("kernel-check", help="residual of the kernel equation")
    p.add_argument("--n", type=int, default=config.ENUMERATE_ORDER, help="check mod t^n")
    p.add_argument("--steps", default="kreweras", choices=["kreweras", "reverse-kreweras"])
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("theta", help="the x-part Theta")
    p.add_argument("--n", type=int, default=config.PRECISION)
    p.add_argument("--check-oracle", action="store_true", help="compare with the residue oracle")
    p.add_argument("--oracle-order", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("guess-ode", help="guess a differential operator")
    p.add_argument("--series", required=True)
    p.add_argument("--x-value", default=None, help="specialize x to an integer first")
    p.add_argument("--max-order", type=int, default=config.MAX_ORDER)
    p.add_argument("--max-degree", type=int, default=config.MAX_DEGREE)
    p.add_argument("--max-x-degree", type=int, default=config.MAX_X_DEGREE)
    p.add_argument("--reserve", type=int, default=config.RESERVE)
    p.add_argument("--prime", type=int, default=config.PRIME, help="prime of the modular prefilter")
    p.add_argument("--out")
    p.set_defaults(func=cmd_guess_ode)

    p = sub.add_parser("guess-alg", help="guess an algebraic equation modulo a prime")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--series")
    source.add_argument("--q00", action="store_true", help="Q(0,0) at a = b = c = 1")
    source.add_argument("--c-zero", action="store_true", help="Q(1,1) at a=2, b=3, c=0")
    p.add_argument("--prime", type=int, default=config.PRIME)
    p.add_argument("--n", type=int, default=config.MODULAR_DEPTH, help="depth for --q00 and --c-zero")
    p.add_argument("--deg-t", type=int, default=None)
    p.add_argument("--deg-u", type=int, default=None)
    p.add_argument("--max-deg-t", type=int, default=16)
    p.add_argument("--max-deg-u", type=int, default=4)
    p.add_argument("--reserve", type=int, default=config.RESERVE)
    p.add_argument("--out")
    p.set_defaults(func=cmd_guess_alg)

    p = sub.add_parser("ore", help="operator arithmetic")
    action = p.add_mutually_exclusive_group(required=True)
    action.add_argument("--lclm", nargs=2, metavar=("F", "G"))
    action.add_argument("--rrem", nargs=2, metavar=("F", "G"))
    action.add_argument("--apply", nargs=2, metavar=("F", "SERIES"))
    action.add_argument("--solve", metavar="F")
    action.add_argument("--loganalysis", metavar="F")
    action.add_argument("--recurrence", metavar="F")
    p.add_argument("--n", type=int, default=8, help="terms for --solve")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ore)

    p = sub.add_parser("verify-closedform", help="certify Theta = C")
    p.add_argument("--n", type=int, default=config.CLOSEDFORM_ORDER)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_closedform)

    p = sub.add_parser("certify", help="transcendence certificate")
    p.add_argument("--full", action="store_true", help="run the whole pipeline")
    p.add_argument("--config", default=None, help="key=value file")
    p.add_argument("--n", type=int, default=None, help="closed-form order")
    p.add_argument("--prime", type=int, default=None)
    p.add_argument("--reserve", type=int, default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--depth", type=int, default=config.MINIMALITY_DEPTH)
    p.add_argument("--no-modular", action="store_true", help="skip the modular experiments")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logger.info(f"=== kreweras {args.command} ===")
    try:
        return args.func(args)
    except KrewerasError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
