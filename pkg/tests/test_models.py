"""
Tests for the validated records: staircase bounds, reserve reports,
certificates and pipeline configuration.
"""

import json

import pytest
from pydantic import ValidationError

from kreweras.certify import THETA_PREMISES, TRANSCENDENCE_PREMISES, attach_verdict
from kreweras.errors import CertificateError, ConfigError
from kreweras.models import (
    Certificate, CheckRecord, CheckStatus, ExperimentReport, GuessConfig, PipelineConfig, ReserveReport,
)


def record(name, status=CheckStatus.PROVEN, holds=True):
    return CheckRecord(name=name, statement=f"{name} holds", status=status, holds=holds)


def full_certificate(**overrides):
    cert = Certificate()
    for name in THETA_PREMISES + TRANSCENDENCE_PREMISES:
        status, holds = overrides.get(name, (CheckStatus.PROVEN, True))
        cert.add(record(name, status, holds))
    return cert


# ===== GUESS CONFIG =====

def test_staircase_order():
    cfg = GuessConfig(max_order=2, max_degree=2)
    assert list(cfg.cells()) == [(1, 0), (1, 1), (2, 0), (1, 2), (2, 1), (2, 2)]


def test_coefficients_needed():
    cfg = GuessConfig(max_order=4, max_degree=22, reserve=20)
    assert cfg.coefficients_needed() == 5 * 23 + 20 + 4
    assert cfg.cell_coefficients(4, 12) == 65 + 20 + 4
    assert cfg.cell_coefficients(1, 0) == 2 + 20 + 1


def test_guess_config_bounds():
    with pytest.raises(ValidationError):
        GuessConfig(reserve=5)
    with pytest.raises(ValidationError):
        GuessConfig(max_order=0)


def test_reserve_report():
    assert ReserveReport(fit_count=19, reserve=10, passed=10).ok
    assert not ReserveReport(fit_count=19, reserve=10, passed=5, first_failure=24).ok


# ===== CERTIFICATE =====

def test_certificate_json_starts_with_schema():
    cert = Certificate()
    cert.add(record("pole-cancellation"))
    text = cert.to_json()
    assert text.endswith("\n")
    data = json.loads(text)
    assert list(data)[0] == "schema"
    assert data["schema"] == 1
    assert Certificate.from_json(text) == cert


def test_certificate_check_lookup():
    cert = Certificate()
    cert.add(record("x-to-3t"))
    assert cert.check("x-to-3t").holds
    with pytest.raises(KeyError):
        cert.check("h-has-log")


def test_verdict_lists_empirical_premises():
    cert = attach_verdict(full_certificate(**{
        "lc-annihilates-theta": (CheckStatus.EMPIRICAL, True),
        "h-order-minimal": (CheckStatus.EMPIRICAL, True),
    }))
    assert cert.verdict.holds
    assert cert.verdict.conditional_on == ["lc-annihilates-theta", "h-order-minimal"]


def test_verdict_fails_on_unproven_premise():
    cert = attach_verdict(full_certificate(**{"h-has-log": (CheckStatus.UNPROVEN, True)}))
    assert not cert.verdict.holds


def test_verdict_ignores_extra_records():
    cert = full_certificate()
    cert.add(record("lg-guess", CheckStatus.UNPROVEN, False))
    assert attach_verdict(cert).verdict.holds


def test_verdict_needs_every_premise():
    cert = Certificate()
    cert.add(record("pole-cancellation"))
    with pytest.raises(CertificateError) as excinfo:
        attach_verdict(cert)
    assert excinfo.value.check == "verdict"


def test_experiment_outcome():
    report = ExperimentReport(weights={"a": "2", "b": "3", "c": "0"}, prime=45007, depth=200,
                              algebraic_bounds=(6, 3), ode_bounds=(2, 4), algebraic_found=False, ode_found=False)
    assert report.outcome == "inconclusive"
    assert report.model_copy(update={"ode_found": True}).outcome == "relation found"


# ===== PIPELINE CONFIG =====

def small_config(**kw):
    values = dict(theta_order=60, closedform_order=30, guess=GuessConfig(max_order=1, max_degree=2))
    values.update(kw)
    return PipelineConfig(**values)


def test_default_orders_are_consistent():
    assert PipelineConfig().validate_orders().theta_order >= PipelineConfig().closedform_order


def test_small_orders_are_consistent():
    assert small_config().validate_orders().closedform_order == 30


@pytest.mark.parametrize("kw, operator, constraint", [
    ({"margin": 10}, (), "margin"),
    ({"theta_order": 16, "closedform_order": 16}, (), "theta-covers-guess"),
    ({"closedform_order": 26}, (2, 5), "closedform-covers-margin"),
    ({"closedform_order": 70}, (), "closedform-within-theta"),
])
def test_violated_constraint_is_named(kw, operator, constraint):
    with pytest.raises(ConfigError) as excinfo:
        small_config(**kw).validate_orders(*operator)
    assert str(excinfo.value).startswith(constraint)


def test_closedform_margin_follows_operator():
    cfg = small_config(closedform_order=26)
    assert cfg.closedform_min_order(7, 3) == 30
    assert cfg.validate_orders() is cfg
    assert cfg.validate_orders(2, 4) is cfg
    with pytest.raises(ConfigError):
        cfg.validate_orders(7, 0)


def test_prime_must_be_odd_prime():
    with pytest.raises(ValidationError):
        PipelineConfig(prime=45009)
    with pytest.raises(ValidationError):
        PipelineConfig(prime=4)
    assert PipelineConfig(prime=101).prime == 101
