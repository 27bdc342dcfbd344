"""
Data models for the kreweras toolkit.

This module defines the validated records exchanged between stages:
- GuessConfig: staircase bounds and reserve for ODE guessing
- ReserveReport: how far a guessed relation holds beyond its fitting window
- CheckRecord / Verdict / Certificate: the replayable certificate document
- PipelineConfig: orders and parameters of a full certify run

Design decisions:
- Certificates carry no timestamps, so rerunning on the same inputs gives a
  byte-identical JSON file.
- Cross-stage consistency of PipelineConfig is validated up front, and again
  once L_C is built; a violated constraint is reported by name (ConfigError).
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from kreweras import config
from kreweras.errors import ConfigError

CERTIFICATE_SCHEMA = 1


class CheckStatus(str, Enum):
    """
    PROVEN: exact identity or exact computation.
    EMPIRICAL: holds on every computed coefficient, stands in for a proof step.
    UNPROVEN: recorded for information, never part of a verdict.
    """
    PROVEN = "PROVEN"
    EMPIRICAL = "EMPIRICAL"
    UNPROVEN = "UNPROVEN"


class GuessConfig(BaseModel):
    """
    Staircase bounds for guess_min_ode.

    Cells (order, degree) are visited by increasing order + degree, then by
    increasing order. max_x_degree bounds the x-degree of the coefficients
    when the series depends on x.
    """
    max_order: int = Field(default=config.MAX_ORDER, ge=1, description="Largest operator order tried")
    max_degree: int = Field(default=config.MAX_DEGREE, ge=0, description="Largest t-degree of the coefficients")
    max_x_degree: int = Field(default=config.MAX_X_DEGREE, ge=0, description="Largest x-degree (symbolic x only)")
    reserve: int = Field(default=config.RESERVE, ge=10, description="Coefficients withheld for confirmation")
    prime: int = Field(default=config.PRIME, ge=3, description="Prime of the modular prefilter")
    x_points: Tuple[int, ...] = Field(default=config.X_POINTS, description="First specialization points for x")

    def cells(self):
        for s in range(1, self.max_order + self.max_degree + 1):
            for r in range(1, self.max_order + 1):
                d = s - r
                if 0 <= d <= self.max_degree:
                    yield r, d

    def cell_coefficients(self, order: int, degree: int) -> int:
        """Known coefficients needed by cell (order, degree): unknowns + reserve + order."""
        return (order + 1) * (degree + 1) + self.reserve + order

    def coefficients_needed(self) -> int:
        """Known coefficients needed by the largest staircase cell."""
        return self.cell_coefficients(self.max_order, self.max_degree)


class ReserveReport(BaseModel):
    """Outcome of re-applying a candidate to coefficients beyond its fitting window."""
    fit_count: int = Field(..., description="Residual coefficients used for fitting")
    reserve: int = Field(..., description="Residual coefficients withheld")
    passed: int = Field(..., description="Consecutive reserve coefficients annihilated")
    first_failure: Optional[int] = Field(default=None, description="Index of the first nonzero residual coefficient")

    @property
    def ok(self) -> bool:
        return self.first_failure is None and self.passed == self.reserve


class CheckRecord(BaseModel):
    """One named step of a certificate."""
    name: str = Field(..., min_length=1)
    statement: str = Field(..., min_length=1)
    status: CheckStatus
    holds: bool
    inputs: Dict[str, str] = Field(default_factory=dict, description="Artifact name -> sha256")
    orders: Dict[str, int] = Field(default_factory=dict, description="Truncation orders used")
    replay: str = Field(default="", description="Command reproducing the inputs")
    detail: str = Field(default="")


class Verdict(BaseModel):
    statement: str
    conditional_on: List[str] = Field(default_factory=list, description="EMPIRICAL checks the verdict rests on")
    holds: bool


class Certificate(BaseModel):
    """
    Replayable certificate.

    Serialized with `schema: 1` first; the Python attribute is schema_version
    because BaseModel reserves `schema`.
    """
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=CERTIFICATE_SCHEMA, alias="schema")
    checks: List[CheckRecord] = Field(default_factory=list)
    verdict: Optional[Verdict] = None

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def extend(self, other: "Certificate") -> "Certificate":
        self.checks.extend(other.checks)
        return self

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.model_validate_json(text)


class ExperimentReport(BaseModel):
    """Outcome of a modular relation search that is expected to find nothing."""
    weights: Dict[str, str]
    prime: int
    depth: int
    algebraic_bounds: Tuple[int, int]
    ode_bounds: Tuple[int, int]
    algebraic_found: bool
    ode_found: bool

    @property
    def outcome(self) -> str:
        return "relation found" if self.algebraic_found or self.ode_found else "inconclusive"


class PipelineConfig(BaseModel):
    """
    Parameters of a full certify run.

    Constraints (checked by validate_orders):
    - theta-covers-guess: theta_order >= guess.coefficients_needed()
    - margin: margin >= 20
    - closedform-covers-margin: closedform_order >= r + order of L_C + margin
    """
    enumerate_order: int = Field(default=config.ENUMERATE_ORDER, ge=4)
    theta_order: int = Field(default=config.THETA_ORDER, ge=8)
    closedform_order: int = Field(default=config.CLOSEDFORM_ORDER, ge=8)
    guess: GuessConfig = Field(default_factory=lambda: GuessConfig(reserve=config.THETA_RESERVE))
    prime: int = Field(default=config.PRIME, ge=3)
    margin: int = Field(default=config.EMPIRICAL_MARGIN)
    modular_depth: int = Field(default=config.MODULAR_DEPTH, ge=20)
    minimality_depth: int = Field(default=config.MINIMALITY_DEPTH, ge=20)
    output_dir: str = Field(default=config.OUTPUT_DIR)

    @field_validator("prime")
    @classmethod
    def _odd_prime(cls, v: int) -> int:
        if v % 2 == 0 or any(v % k == 0 for k in range(3, int(v ** 0.5) + 1, 2)):
            raise ValueError(f"{v} is not an odd prime")
        return v

    def closedform_min_order(self, operator_order: int, r: int) -> int:
        """Smallest closed-form order leaving `margin` checked coefficients past r for an operator of this order."""
        return r + operator_order + self.margin

    def validate_orders(self, operator_order: Optional[int] = None, r: Optional[int] = None) -> "PipelineConfig":
        """
        closedform-covers-margin depends on the order of L_C and on r from its
        power-series solutions, so it is checked only once both are passed in.
        """
        if self.margin < 20:
            raise ConfigError(f"margin: EMPIRICAL checks need >= 20 coefficients of margin, got {self.margin}")
        need = self.guess.coefficients_needed()
        if self.theta_order < need:
            raise ConfigError(f"theta-covers-guess: theta order {self.theta_order} < {need} needed by the staircase")
        if operator_order is not None and r is not None:
            need = self.closedform_min_order(operator_order, r)
            if self.closedform_order < need:
                raise ConfigError(
                    f"closedform-covers-margin: closed-form order {self.closedform_order} < {need} "
                    f"(r {r} + operator order {operator_order} + margin {self.margin})")
        if self.closedform_order > self.theta_order:
            raise ConfigError(
                f"closedform-within-theta: closed-form order {self.closedform_order} exceeds theta order "
                f"{self.theta_order}")
        return self
