"""Domain and configuration models (pydantic)."""

from .config import (
    DEFAULT_CLIP_BOUND,
    DEFAULT_RIDGE,
    DistributionSpec,
    FitConfig,
    LinkFunction,
    LinkKind,
    Regime,
    SamplingSpec,
    SyntheticSpec,
)
from .results import (
    ConnectivityReport,
    CurlBootstrapResult,
    CurlDifference,
    CurlReport,
    CurlSummary,
    EvalReport,
    FitResult,
    HoldoutSplit,
    JudgeAgreement,
    MetricInterval,
    RunManifest,
    SweepRow,
)
from .scores import (
    AdditiveParams,
    AgentLabels,
    AgentTag,
    ObservationMask,
    PairwiseJudgeRecord,
    ScoreMatrix,
)

__all__ = [
    "DEFAULT_CLIP_BOUND",
    "DEFAULT_RIDGE",
    "AdditiveParams",
    "AgentLabels",
    "AgentTag",
    "ConnectivityReport",
    "CurlBootstrapResult",
    "CurlDifference",
    "CurlReport",
    "CurlSummary",
    "DistributionSpec",
    "EvalReport",
    "FitConfig",
    "FitResult",
    "HoldoutSplit",
    "JudgeAgreement",
    "LinkFunction",
    "LinkKind",
    "MetricInterval",
    "ObservationMask",
    "PairwiseJudgeRecord",
    "Regime",
    "RunManifest",
    "SamplingSpec",
    "ScoreMatrix",
    "SweepRow",
    "SyntheticSpec",
]
