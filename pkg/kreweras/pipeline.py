"""
End-to-end certify run.

Stages, each reading and writing text artifacts under the output directory:
1. enumerate       -> Q.txt, Q00.txt   (symbolic a, b, c, x, y)
2. kernel-check    -> kernel.txt       (residual of the cleared kernel equation)
3. theta           -> theta.txt        (cross-checked against the residue oracle)
4. guess-ode       -> L_g.txt          (reads theta.txt)
5. closedform      -> C.txt, L_C.txt
6. certify         -> certificate.json (reads theta.txt, L_g.txt)
7. modular         -> Q00 mod p guess and the c = 0 experiment (informational)

Design decisions:
- Stages share nothing but files: every stage re-reads what it consumes.
- A failing stage raises StageError carrying the stage name and the command
  that replays it.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, Optional

from kreweras import config
from kreweras.certify import REPLAY, certify_full
from kreweras.closedform import build_closed_form
from kreweras.errors import ConfigError, KrewerasError, StageError
from kreweras.extraction import residue_oracle, theta_series
from kreweras.guessing import c_zero_experiment, guess_q00, staircase_search
from kreweras.local import SolBasis, power_series_solutions
from kreweras.models import Certificate, CheckRecord, CheckStatus, GuessConfig, PipelineConfig
from kreweras.ore import OreOp
from kreweras.textio import (
    artifact_hash, operator_from_text, operator_to_text, read_artifact, series_from_text, series_to_text,
    write_artifact,
)
from kreweras.walks import StepSet, WeightSpec, coeff_at, enumerate_walks, kernel_residual, series_Q

logger = logging.getLogger(__name__)

ORACLE_ORDER = 20

_GUESS_KEYS = {"max_order", "max_degree", "max_x_degree", "reserve", "x_points"}


# ===== CONFIGURATION =====

def parse_config_text(text: str) -> Dict[str, str]:
    """key=value lines; blank lines and '#' comments ignored."""
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"config line {number}: expected key=value, got '{line}'")
        values[key.strip()] = value.strip()
    return values


def load_pipeline_config(path: Optional[str] = None, overrides: Optional[Dict[str, object]] = None) -> PipelineConfig:
    """
    Environment defaults, then the --config file, then command-line overrides.

    Keys of the guess staircase may be given bare (max_degree) or prefixed (guess.max_degree).
    """
    values: Dict[str, object] = {}
    if path:
        values.update(parse_config_text(read_artifact(path)))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    guess = {"reserve": config.THETA_RESERVE}
    top = {}
    for key, value in values.items():
        bare = key[len("guess."):] if key.startswith("guess.") else key
        if bare in _GUESS_KEYS:
            guess[bare] = tuple(int(v) for v in str(value).split(",")) if bare == "x_points" else value
        elif bare in PipelineConfig.model_fields:
            top[bare] = value
        else:
            raise ConfigError(f"unknown configuration key '{key}'")
    if "prime" in top:
        guess["prime"] = top["prime"]
    try:
        return PipelineConfig(guess=GuessConfig(**guess), **top)
    except ValueError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


# ===== STAGES =====

class Pipeline:
    """Runs the stages of a PipelineConfig against one output directory."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg.validate_orders()
        self.out = Path(cfg.output_dir)
        self.hashes: Dict[str, str] = {}

    def path(self, name: str) -> Path:
        return self.out / name

    def _write(self, name: str, text: str) -> Path:
        self.hashes[name] = artifact_hash(text)
        return write_artifact(self.path(name), text)

    def _stage(self, name: str, replay: str, body: Callable):
        logger.info(f"=== Stage: {name} ===")
        try:
            return body()
        except KrewerasError as e:
            logger.error(f"stage {name} failed: {e}")
            raise StageError(name, replay, e) from e

    def enumerate_stage(self):
        N = self.cfg.enumerate_order
        cmd = f"{REPLAY} enumerate --n {N} --out {self.path('Q.txt')}"

        def body():
            gf = enumerate_walks(StepSet.kreweras(), WeightSpec.symbolic(), N)
            self._write("Q.txt", series_to_text(series_Q(gf), cmd))
            self._write("Q00.txt", series_to_text(coeff_at(gf, 0, 0), cmd))
        self._stage("enumerate", cmd, body)

    def kernel_check(self):
        N = self.cfg.enumerate_order
        cmd = f"{REPLAY} kernel-check --n {N}"

        def body():
            for steps in (StepSet.kreweras(), StepSet.reverse_kreweras()):
                gf = enumerate_walks(steps, WeightSpec.symbolic(), N - 1)
                residual = kernel_residual(gf, N)
                self._write(f"kernel-{steps.name}.txt", series_to_text(residual, cmd))
        self._stage("kernel-check", cmd, body)

    def theta(self):
        N = self.cfg.theta_order
        cmd = f"{REPLAY} theta --n {N} --check-oracle --out {self.path('theta.txt')}"

        def body():
            theta = theta_series(N)
            oracle = residue_oracle(min(ORACLE_ORDER, N))
            if theta.truncate(oracle.prec) != oracle:
                raise KrewerasError(f"theta_series and residue_oracle differ mod t^{oracle.prec}")
            self._write("theta.txt", series_to_text(theta, cmd))
        self._stage("theta", cmd, body)

    def guess(self) -> Optional[CheckRecord]:
        g = self.cfg.guess
        cmd = (f"{REPLAY} guess-ode --series {self.path('theta.txt')} --max-order {g.max_order} "
               f"--max-degree {g.max_degree} --max-x-degree {g.max_x_degree} --reserve {g.reserve} "
               f"--out {self.path('L_g.txt')}")

        def body():
            theta = series_from_text(read_artifact(self.path("theta.txt")))
            result = staircase_search(theta, g)
            if result.operator is None:
                logger.warning("no operator found for Theta within the staircase")
                self.path("L_g.txt").unlink(missing_ok=True)
                return CheckRecord(
                    name="lg-guess", statement="a guessed annihilator of Theta", status=CheckStatus.UNPROVEN,
                    holds=False, inputs={"Theta": self.hashes.get("theta.txt", "")},
                    orders={"cells": len(result.visited)}, replay=cmd)
            self._write("L_g.txt", operator_to_text(result.operator, cmd))
            return CheckRecord(
                name="lg-guess", statement=f"guessed operator of order {result.operator.order} annihilates Theta",
                status=CheckStatus.UNPROVEN, holds=result.report.ok,
                inputs={"Theta": self.hashes.get("theta.txt", ""), "L_g": self.hashes["L_g.txt"]},
                orders={"order": result.operator.order, "degree": result.cell[1],
                        "reserve_passed": result.report.passed},
                replay=cmd, detail=f"staircase cell {result.cell}")
        return self._stage("guess-ode", cmd, body)

    def check_closedform_orders(self, L: OreOp) -> SolBasis:
        """Re-validate the orders against the actual order of L and r of its power-series solutions."""
        sols = power_series_solutions(L, max(8, L.order + 2))
        self.cfg.validate_orders(L.order, sols.r)
        logger.info(f"L_C has order {L.order}, r = {sols.r}; closed-form order {self.cfg.closedform_order} suffices")
        return sols

    def closedform(self):
        N = self.cfg.closedform_order
        cmd = f"{REPLAY} verify-closedform --n {N}"

        def body():
            cf = build_closed_form(N)
            self.check_closedform_orders(cf.L_C)
            self._write("C.txt", series_to_text(cf.C, cmd))
            self._write("L_C.txt", operator_to_text(cf.L_C, cmd))
        self._stage("closedform", cmd, body)

    def certify(self) -> Certificate:
        N = self.cfg.closedform_order
        cmd = f"{REPLAY} certify --full --out {self.path('certificate.json')}"

        def body():
            theta = series_from_text(read_artifact(self.path("theta.txt")))
            guessed = None
            if self.path("L_g.txt").exists():
                guessed = operator_from_text(read_artifact(self.path("L_g.txt")))
            return certify_full(N, depth=self.cfg.minimality_depth, guessed=guessed, theta=theta)
        return self._stage("certify", cmd, body)

    def modular(self):
        p, depth = self.cfg.prime, self.cfg.modular_depth
        cmd = f"{REPLAY} guess-alg --q00 --prime {p} --n {depth}"

        def body():
            records = []
            guess, visited = guess_q00(p, depth)
            records.append(CheckRecord(
                name="q00-algebraic-mod-p",
                statement=f"Q(0,0) at a=b=c=1 satisfies a polynomial equation mod {p} up to t^{depth}",
                status=CheckStatus.UNPROVEN, holds=guess is not None,
                orders={"depth": depth, "deg_t": guess.deg_t if guess else -1,
                        "deg_u": guess.deg_u if guess else -1, "cells": len(visited)},
                replay=cmd, detail=str(guess.poly.as_expr()) if guess else "no relation at these bounds"))
            report = c_zero_experiment(p, depth)
            records.append(CheckRecord(
                name="c0-experiment", statement=f"Q(1,1) at a=2, b=3, c=0: {report.outcome}",
                status=CheckStatus.UNPROVEN, holds=True,
                orders={"depth": depth}, replay=f"{REPLAY} guess-alg --c-zero --prime {p} --n {depth}",
                detail=report.model_dump_json()))
            return records
        return self._stage("modular", cmd, body)


def run_pipeline(cfg: PipelineConfig, modular: bool = True) -> Certificate:
    """
    Run every stage and write certificate.json.

    Raises:
        ConfigError: inconsistent orders
        StageError: a stage failed
    """
    pipe = Pipeline(cfg)
    pipe.enumerate_stage()
    pipe.kernel_check()
    pipe.theta()
    guess_record = pipe.guess()
    pipe.closedform()
    cert = pipe.certify()
    if guess_record is not None:
        cert.add(guess_record)
    if modular:
        for record in pipe.modular():
            cert.add(record)
    pipe._write("certificate.json", cert.to_json())
    logger.info(f"verdict: {cert.verdict.statement} -> {'holds' if cert.verdict.holds else 'FAILS'}")
    return cert
