"""
Certificates for Theta = C and for the transcendence of Theta.

Theta = C is certified in four steps:
1. L_C annihilates C (closure construction, re-checked by apply)
2. L_C annihilates Theta on every computed coefficient (EMPIRICAL; stands in
   for a creative-telescoping annihilator of Theta)
3. the power-series solutions of L_C are determined mod t^r
4. Theta = C mod t^N with N >= r, exactly

The transcendence chain then records:
(i)   x -> 3t kills the first hypergeometric term of T
(ii)  the equation of H = 2F1(-1/3,1/3;2;t) has a logarithm at 0
(iii) H has no order-1 equation (EMPIRICAL, staircase exhaustion)
(iv)  closure argument: T algebraic => T(t;3t) algebraic => H algebraic,
      contradicting (ii)+(iii); Theta algebraic => T algebraic
(v)   coefficient identities of the origin factor forcing a = b = 0

Design decisions:
- A failing premise raises CertificateError naming the check and index.
- Supplementary checks (right division by the guessed operator, its rational
  solution, degenerate weights) are recorded but never enter the verdict.
"""

import logging
from typing import Dict, List, Optional

from kreweras import config
from kreweras.closedform import (
    F2, ClosedFormC, a2a3_identity, build_closed_form, closed_form_annihilator, f21_ode, f21_series,
    first_term_vanishes_at_3t, kernel_factor_identity, l1_operator, t_at_3t, theta_in_closed_form_ring,
)
from kreweras.errors import CertificateError
from kreweras.extraction import theta_series
from kreweras.guessing import staircase_search
from kreweras.local import detect_log_at_0, f21_has_log, power_series_solutions
from kreweras.models import Certificate, CheckRecord, CheckStatus, GuessConfig, Verdict
from kreweras.ore import OreOp, apply, rrem
from kreweras.series import TruncSeries
from kreweras.textio import artifact_hash, operator_to_text, series_to_text
from kreweras.walks import (
    StepSet, WeightSpec, coeff_at, degenerate_cases, enumerate_walks, origin_factor_coeffs, weight_identities,
)

logger = logging.getLogger(__name__)

REPLAY = "python -m kreweras.main"

THETA_PREMISES = ("pole-cancellation", "closedform-transcription", "lc-annihilates-c",
                  "lc-annihilates-theta", "solution-space", "theta-equals-c")
TRANSCENDENCE_PREMISES = ("x-to-3t", "h-has-log", "h-order-minimal", "closure-argument",
                          "q00-t3", "weight-relations")

# Hand-expanded low-order coefficients (x-exponent -> coefficient)
HAND_VALUES = {
    "C": {0: {2: -1}, 1: {}, 2: {3: -1}, 3: {2: -1}},
    "T": {0: {2: -1}, 1: {1: -1}, 2: {3: 8, 0: 4}, 3: {2: -6}},
}


def _fail(check: str, message: str, index: Optional[int] = None):
    logger.error(f"check {check} failed: {message}")
    raise CertificateError(check, message, index)


def _hash_series(f: TruncSeries) -> str:
    return artifact_hash(series_to_text(f))


def _hash_operator(L: OreOp) -> str:
    return artifact_hash(operator_to_text(L))


def _matches_hand_values(f: TruncSeries, table: Dict[int, Dict[int, int]]) -> Optional[int]:
    """First t-exponent where f disagrees with the hand-expanded table, or None."""
    R = f.ring
    for n, row in table.items():
        expected = R.from_terms(((e,), c) for e, c in row.items())
        if R.convert(f[n]) != expected:
            return n
    return None


# ===== THETA = C =====

def certify_theta_equals_C(N: int, theta: Optional[TruncSeries] = None, cf: Optional[ClosedFormC] = None,
                           margin: int = config.EMPIRICAL_MARGIN) -> Certificate:
    """
    Certificate section for Theta = C mod t^N.

    Args:
        N: truncation order of Theta and C
        theta: Theta mod t^(>= N); computed when omitted
        cf: closed form with its annihilator; built when omitted
        margin: coefficients the EMPIRICAL check must cover past r + order

    Raises:
        CertificateError: a check failed
    """
    logger.info(f"=== Certifying Theta = C mod t^{N} ===")
    cert = Certificate()
    cf = cf if cf is not None else build_closed_form(N)
    theta = (theta if theta is not None else theta_series(N)).truncate(N)
    C = cf.C.truncate(N)
    L = cf.L_C if cf.L_C is not None else closed_form_annihilator()
    theta_hash, c_hash, op_hash = _hash_series(theta), _hash_series(C), _hash_operator(L)

    # build_closed_form raises on a nonzero t^-3..t^-1 coefficient
    cert.add(CheckRecord(
        name="pole-cancellation", statement="coefficients of t^-3, t^-2, t^-1 in A1 + A2 int A3 T vanish",
        status=CheckStatus.PROVEN, holds=True, inputs={"C": c_hash}, orders={"C": N},
        replay=f"{REPLAY} verify-closedform --n {N}"))

    bad = _matches_hand_values(C, HAND_VALUES["C"])
    if bad is None:
        bad = _matches_hand_values(cf.T, HAND_VALUES["T"])
    if bad is not None:
        _fail("closedform-transcription", "low-order coefficients differ from the hand expansion", bad)
    if not kernel_factor_identity():
        _fail("closedform-transcription", "4t^2x^3 - (x-t)^2 != -x^2 A0^2")
    if not a2a3_identity(cf):
        _fail("closedform-transcription", "A2 A3 W^2 V != R3")
    cert.add(CheckRecord(
        name="closedform-transcription",
        statement="C and T match hand-expanded coefficients; V = -x^2 A0^2; A2 A3 W^2 V = R3",
        status=CheckStatus.PROVEN, holds=True, inputs={"C": c_hash}, orders={"C": N},
        replay=f"{REPLAY} verify-closedform --n {N}"))

    residual = apply(L, C)
    if not residual.is_zero:
        _fail("lc-annihilates-c", "L_C(C) has a nonzero coefficient", residual.valuation)
    cert.add(CheckRecord(
        name="lc-annihilates-c", statement=f"L_C (order {L.order}, closure-built) annihilates C",
        status=CheckStatus.PROVEN, holds=True, inputs={"C": c_hash, "L_C": op_hash},
        orders={"C": N, "checked": residual.prec}, replay=f"{REPLAY} verify-closedform --n {N}",
        detail="order-exact by construction; apply() re-checks the truncation"))

    sols = power_series_solutions(L, max(8, L.order + 2))
    theta_ring = theta_in_closed_form_ring(theta)
    residual = apply(L, theta_ring)
    checked = residual.prec
    if not residual.is_zero:
        _fail("lc-annihilates-theta", "L_C(Theta) has a nonzero coefficient", residual.valuation)
    if checked - sols.r < margin:
        _fail("lc-annihilates-theta", f"only {checked - sols.r} coefficients past r, margin {margin} required")
    cert.add(CheckRecord(
        name="lc-annihilates-theta", statement="L_C annihilates Theta on every computed coefficient",
        status=CheckStatus.EMPIRICAL, holds=True, inputs={"Theta": theta_hash, "L_C": op_hash},
        orders={"Theta": N, "checked": checked, "margin": checked - sols.r},
        replay=f"{REPLAY} theta --n {N}",
        detail="replaces a creative-telescoping annihilator of Theta"))

    cert.add(CheckRecord(
        name="solution-space",
        statement=f"power-series solutions of L_C: dimension {sols.dimension}, determined mod t^{sols.r}",
        status=CheckStatus.PROVEN, holds=True, inputs={"L_C": op_hash}, orders={"r": sols.r},
        replay=f"{REPLAY} ore --solve L_C.txt --n {sols.prec}",
        detail=f"free coefficients at t^{list(sols.parameter_indices)}"))

    diff = theta_ring - C
    if not diff.is_zero:
        _fail("theta-equals-c", "Theta and C differ", diff.valuation)
    if N < sols.r:
        _fail("theta-equals-c", f"comparison order {N} below r = {sols.r}")
    cert.add(CheckRecord(
        name="theta-equals-c", statement=f"Theta = C mod t^{N} (r = {sols.r})",
        status=CheckStatus.PROVEN, holds=True, inputs={"Theta": theta_hash, "C": c_hash},
        orders={"compared": N, "r": sols.r}, replay=f"{REPLAY} verify-closedform --n {N}"))
    return cert


# ===== TRANSCENDENCE =====

def _h_minimality(depth: int) -> CheckRecord:
    """No order-1 operator of t-degree <= bound annihilates H mod t^depth."""
    reserve = config.THETA_RESERVE
    max_degree = (depth - reserve - 1) // 2 - 1
    cfg = GuessConfig(max_order=1, max_degree=max_degree, reserve=reserve)
    h = f21_series(F2, depth)
    guess = staircase_search(h, cfg)
    if guess.operator is not None:
        _fail("h-order-minimal", f"H satisfies an order-1 equation {guess.operator}")
    return CheckRecord(
        name="h-order-minimal",
        statement=f"H = 2F1(-1/3,1/3;2;t) has no order-1 equation of t-degree <= {max_degree}",
        status=CheckStatus.EMPIRICAL, holds=True, inputs={"H": _hash_series(h)},
        orders={"H": depth, "cells": len(guess.visited)}, replay=f"{REPLAY} guess-ode --series H.txt",
        detail="staircase exhausted; stands in for the classification of algebraic 2F1")


def certify_transcendence(depth: int = config.MINIMALITY_DEPTH, prec: int = 30,
                          guessed: Optional[OreOp] = None, closure: Optional[OreOp] = None) -> Certificate:
    """
    Transcendence chain for Theta and for Q(x,y), Q(x,0), Q(0,y).

    Args:
        depth: order of the H series used for the minimality search
        prec: truncation order of the T(t;3t) identity
        guessed: a guessed annihilator of Theta, for the supplementary checks
        closure: L_C, for the right-division replay

    Raises:
        CertificateError: a premise failed
    """
    logger.info("=== Certifying transcendence ===")
    cert = Certificate()

    lhs, rhs = t_at_3t(prec)
    if not first_term_vanishes_at_3t(prec):
        _fail("x-to-3t", "(3t - x) x does not vanish at x = 3t")
    if lhs != rhs:
        _fail("x-to-3t", "T(t;3t) != -8t^2(1-27t^3) F2(27t^3)", (lhs - rhs).valuation)
    cert.add(CheckRecord(
        name="x-to-3t", statement="T(t;3t) = -8t^2 (1 - 27t^3) 2F1(-1/3,1/3;2;27t^3)",
        status=CheckStatus.PROVEN, holds=True, inputs={"T(t;3t)": _hash_series(lhs)}, orders={"T": prec},
        replay=f"{REPLAY} verify-closedform --n {prec}"))

    H_op = f21_ode(F2)
    local = detect_log_at_0(H_op)
    if local.log is not True:
        _fail("h-has-log", f"log flag {local.log} for {H_op}")
    if not f21_has_log(*F2.params):
        _fail("h-has-log", "hypergeometric log criterion disagrees with the Frobenius computation")
    cert.add(CheckRecord(
        name="h-has-log", statement="(9t^2-9t)H'' + (9t-18)H' - H has a logarithmic solution at 0",
        status=CheckStatus.PROVEN, holds=True, inputs={"H_op": _hash_operator(H_op)},
        replay=f"{REPLAY} ore --loganalysis H_op.txt",
        detail=f"exponents {[str(r) for r, _ in local.roots]}, Frobenius dimensions {list(local.group_dimensions)}"))

    cert.add(_h_minimality(depth))

    cert.add(CheckRecord(
        name="closure-argument",
        statement="Theta algebraic => int A3 T algebraic => T algebraic => T(t;3t) algebraic => H algebraic",
        status=CheckStatus.PROVEN, holds=True,
        detail="algebraic functions are closed under the field operations, derivation and x -> 3t; "
               "an algebraic H would have a minimal equation of order 1 or free of logarithms"))

    gf = enumerate_walks(StepSet.kreweras(), WeightSpec.symbolic(), 3)
    q00 = coeff_at(gf, 0, 0)
    R = gf.ring
    a, b, c = R.gen("a"), R.gen("b"), R.gen("c")
    if q00[3] != (a + b) * c:
        _fail("q00-t3", f"[t^3] Q(0,0) = {q00[3]}", 3)
    cert.add(CheckRecord(
        name="q00-t3", statement="Q(0,0) = 1 + (a+b) c t^3 + O(t^4)", status=CheckStatus.PROVEN, holds=True,
        inputs={"Q(0,0)": _hash_series(q00)}, orders={"Q": 4}, replay=f"{REPLAY} enumerate --n 3"))

    rel0, rel3 = origin_factor_coeffs(gf)
    identities = weight_identities(rel0, rel3)
    failed = [i.name for i in identities if not i.holds]
    if failed:
        _fail("weight-relations", f"identities {failed} do not hold")
    cert.add(CheckRecord(
        name="weight-relations",
        statement="[t^0] and [t^3] of ab - (ab - ac - bc + abc) Q(0,0) vanish only if a = b = 0 (c != 0)",
        status=CheckStatus.PROVEN, holds=True, orders={"Q": 4}, replay=f"{REPLAY} enumerate --n 3",
        detail="; ".join(i.statement for i in identities)))

    for record in supplementary_checks(guessed, closure):
        cert.add(record)
    return cert


def supplementary_checks(guessed: Optional[OreOp], closure: Optional[OreOp]) -> List[CheckRecord]:
    """Records outside the verdict: degenerate weights, right division and the rational solution."""
    records = []
    for check in degenerate_cases():
        records.append(CheckRecord(
            name=f"degenerate-{check.name}", statement=check.statement,
            status=CheckStatus.PROVEN if check.holds else CheckStatus.UNPROVEN, holds=check.holds))
    if guessed is not None:
        L1 = l1_operator()
        holds = rrem(guessed, L1).is_zero
        records.append(CheckRecord(
            name="lg-rational-solution",
            statement="the guessed operator annihilates 3x^3/t + 3x^4/t^2 - 2/t + 3x/t^2 - x^2/t^3",
            status=CheckStatus.PROVEN if holds else CheckStatus.UNPROVEN, holds=holds,
            inputs={"L_g": _hash_operator(guessed), "L1": _hash_operator(L1)}))
    if guessed is not None and closure is not None:
        rem = rrem(closure, guessed)
        holds = rem.is_zero
        records.append(CheckRecord(
            name="lg-right-divides-lc", statement="rrem(L_C, L_g) = 0",
            status=CheckStatus.PROVEN if holds else CheckStatus.UNPROVEN, holds=holds,
            inputs={"L_g": _hash_operator(guessed), "L_C": _hash_operator(closure)},
            detail="" if holds else f"remainder of order {rem.order}"))
    return records


# ===== VERDICT =====

def attach_verdict(cert: Certificate, premises=THETA_PREMISES + TRANSCENDENCE_PREMISES) -> Certificate:
    """Theta (hence Q(x,y), Q(x,0), Q(0,y)) transcendental, conditional on the EMPIRICAL premises."""
    names = {c.name for c in cert.checks}
    missing = [p for p in premises if p not in names]
    if missing:
        raise CertificateError("verdict", f"missing premises {missing}")
    used = [cert.check(p) for p in premises]
    empirical = [c.name for c in used if c.status == CheckStatus.EMPIRICAL]
    holds = all(c.holds and c.status != CheckStatus.UNPROVEN for c in used)
    cert.verdict = Verdict(
        statement="Theta transcendental (conditional on listed EMPIRICAL checks); hence Q(x,y), Q(x,0) and "
                  "Q(0,y) are transcendental for a != b, c != 0",
        conditional_on=empirical, holds=holds)
    return cert


def certify_full(N: int = config.CLOSEDFORM_ORDER, depth: int = config.MINIMALITY_DEPTH,
                 guessed: Optional[OreOp] = None, theta: Optional[TruncSeries] = None) -> Certificate:
    """Both certificate sections plus the verdict."""
    cf = build_closed_form(N)
    cert = certify_theta_equals_C(N, theta=theta, cf=cf)
    cert.extend(certify_transcendence(depth=depth, guessed=guessed, closure=cf.L_C))
    return attach_verdict(cert)


