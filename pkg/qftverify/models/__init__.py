from .experiment import (
    HHL_SUITES,
    SCHEMA_VERSION,
    SUITES,
    DemoSpec,
    ExperimentConfig,
    PairSpec,
    PlanSpec,
    PopulationSpec,
)
from .results import (
    REPORT_FORMAT_VERSION,
    CaseResult,
    CheckResult,
    ClosenessReport,
    EnsembleResult,
    ExpectationResult,
    ProtocolResult,
    ReportRecord,
    Summary,
)
from .specs import InstanceSpec, NoiseSpec

__all__ = [
    "HHL_SUITES",
    "SCHEMA_VERSION",
    "SUITES",
    "DemoSpec",
    "ExperimentConfig",
    "PairSpec",
    "PlanSpec",
    "PopulationSpec",
    "REPORT_FORMAT_VERSION",
    "CaseResult",
    "CheckResult",
    "ClosenessReport",
    "EnsembleResult",
    "ExpectationResult",
    "ProtocolResult",
    "ReportRecord",
    "Summary",
    "InstanceSpec",
    "NoiseSpec",
]
