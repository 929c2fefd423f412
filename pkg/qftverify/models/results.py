from __future__ import annotations

from datetime import datetime
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, computed_field

ProtocolName = Literal["TA1", "TA2", "TP1", "TP2", "CP"]
EnsembleMode = Literal["channel_pair", "unitary_inverse", "s1_t2_cp"]

REPORT_FORMAT_VERSION = 1


class ClosenessReport(BaseModel):
    """Exact closeness measures; each ``eta_*`` is one minus its measure.

    The S side is filled when a C channel was given, the T side when a P
    channel was given.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["closeness"] = "closeness"
    n: int
    s1: Optional[float] = None
    s2: Optional[float] = None
    s3: Optional[float] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    t3: Optional[float] = None
    eta_s1: Optional[float] = None
    eta_s2: Optional[float] = None
    eta_s3: Optional[float] = None
    eta_t1: Optional[float] = None
    eta_t2: Optional[float] = None
    eta_t3: Optional[float] = None
    cp_trace: Optional[float] = None
    max_leakage: Optional[float] = None


class ProtocolResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["protocol"] = "protocol"
    protocol: ProtocolName
    estimate: float
    successes: int
    shots_used: int
    seed: int
    accept: bool
    threshold: float
    epsilon: float
    delta: float
    cp_trace: Optional[float] = None


class EnsembleResult(BaseModel):
    """Shift-ensemble outcome of an HHL run compared with a worst-case bound.

    ``metric`` is the per-shift fidelity for ``channel_pair`` and the squared
    trace distance for the unitary modes; ``direction`` says which way the
    bound points.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["ensemble"] = "ensemble"
    mode: EnsembleMode
    metric: Literal["fidelity", "squared_trace_distance"]
    direction: Literal["at_least", "at_most"]
    perfect_case: bool
    per_shift: List[float]
    mean_value: float
    bound: float
    bound_formula: str
    passed: bool
    etas: Dict[str, float]
    K: Optional[int] = None
    checks: Dict[str, float] = Field(default_factory=dict)

    @property
    def mean_fidelity(self) -> float:
        return self.mean_value


class ExpectationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["expectation"] = "expectation"
    mean_abs_error: float
    bound: float
    passed: bool
    etas: Dict[str, float]


class CheckResult(BaseModel):
    """One inequality checked numerically: ``value`` against ``bound``."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["check"] = "check"
    name: str
    value: float
    bound: float
    direction: Literal["at_least", "at_most"]
    passed: bool


Detail = Annotated[
    Union[ClosenessReport, ProtocolResult, EnsembleResult, ExpectationResult, CheckResult],
    Field(discriminator="kind"),
]


class CaseResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    case_id: str
    description: str = ""
    measured: Optional[float] = None
    bound: Optional[float] = None
    eta_inputs: Dict[str, float] = Field(default_factory=dict)
    passed: bool
    details: List[Detail] = Field(default_factory=list)


class Summary(BaseModel):
    model_config = ConfigDict(frozen=True)

    total: int
    passed: int
    failed: int


class ReportRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    format_version: int = REPORT_FORMAT_VERSION
    suite: str
    timestamp: datetime
    config_hash: str
    cases: List[CaseResult]
    summary: Summary

    @computed_field
    @property
    def all_passed(self) -> bool:
        return self.summary.failed == 0
