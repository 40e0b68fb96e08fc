"""Result models returned by estimators, diagnostics and evaluation."""
from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from .scores import AdditiveParams, ObservationMask, ScoreMatrix, frozen_array


class FitResult(BaseModel):
    """Output of any estimator: parameters (additive methods) and the completed matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method_tag: str
    params: AdditiveParams | None = None
    completed: np.ndarray
    objective_trace: tuple[float, ...] = ()
    n_iterations: int = 0
    converged: bool = True
    agent_ids: tuple[str, ...]
    item_ids: tuple[str, ...]
    notes: tuple[str, ...] = ()

    @field_validator("completed", mode="before")
    @classmethod
    def _as_matrix(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v, float)
        if arr.ndim != 2:
            raise ValueError(f"Completed matrix must be 2-dimensional, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("Completed matrix has non-finite entries")
        return arr

    @field_serializer("completed")
    def _dump_completed(self, v: np.ndarray) -> list[list[float]]:
        return v.tolist()

    @model_validator(mode="after")
    def _check_shape(self) -> FitResult:
        if self.completed.shape != (len(self.agent_ids), len(self.item_ids)):
            raise ValueError(
                f"Completed shape {self.completed.shape} does not match "
                f"{len(self.agent_ids)}×{len(self.item_ids)} labels"
            )
        return self

    def as_score_matrix(self) -> ScoreMatrix:
        """Completed predictions as a fully observed, clamped score matrix."""
        n_agents, n_items = self.completed.shape
        return ScoreMatrix(
            values=np.clip(self.completed, -1.0, 1.0),
            mask=ObservationMask.full(n_agents, n_items),
            agent_ids=self.agent_ids,
            item_ids=self.item_ids,
        )


class CurlSummary(BaseModel):
    """Median and P95 of |Δ| over one rectangle sample, plus its ECDF support."""

    model_config = ConfigDict(frozen=True)

    median: float = Field(ge=0.0)
    p95: float = Field(ge=0.0)
    n_rectangles: int = Field(ge=1)
    ecdf: tuple[float, ...]

    @model_validator(mode="after")
    def _ordered(self) -> CurlSummary:
        if self.median > self.p95 + 1e-15:
            raise ValueError(f"median {self.median} exceeds p95 {self.p95}")
        if len(self.ecdf) != self.n_rectangles:
            raise ValueError("ECDF length must equal the rectangle count")
        return self


class CurlDifference(BaseModel):
    """Median-curl difference between two links with a bootstrap interval."""

    model_config = ConfigDict(frozen=True)

    first: str
    second: str
    estimate: float
    lower: float
    upper: float
    widened: bool = False

    @model_validator(mode="after")
    def _contains_estimate(self) -> CurlDifference:
        if not self.lower <= self.estimate <= self.upper:
            raise ValueError(
                f"Interval [{self.lower}, {self.upper}] excludes estimate {self.estimate}"
            )
        return self

    @property
    def significant(self) -> bool:
        """The interval excludes zero."""
        return self.lower > 0.0 or self.upper < 0.0


class CurlBootstrapResult(BaseModel):
    """Bootstrap comparison of median curl across links."""

    model_config = ConfigDict(frozen=True)

    medians: dict[str, float]
    differences: tuple[CurlDifference, ...]
    n_boot: int = Field(ge=1)
    n_retries: int = 0
    bootstrap_medians: dict[str, tuple[float, ...]] = Field(default_factory=dict)


class ConnectivityReport(BaseModel):
    """Degree and component diagnostics of the bipartite observation graph."""

    model_config = ConfigDict(frozen=True)

    min_agent_degree: int
    min_item_degree: int
    n_components: int
    repaired_pairs: int = 0
    d_min: int = 3

    @property
    def satisfied(self) -> bool:
        return (
            self.min_agent_degree >= self.d_min
            and self.min_item_degree >= self.d_min
            and self.n_components == 1
        )


class HoldoutSplit(BaseModel):
    """Reserved test pairs and the complementary training pool."""

    model_config = ConfigDict(frozen=True)

    holdout: ObservationMask
    training_pool: ObservationMask
    fraction: float
    seed: int

    @model_validator(mode="after")
    def _partition(self) -> HoldoutSplit:
        if self.holdout.overlaps(self.training_pool):
            raise ValueError("Holdout and training pool overlap")
        if not (self.holdout.pattern | self.training_pool.pattern).all():
            raise ValueError("Holdout and training pool do not cover all pairs")
        return self


class MetricInterval(BaseModel):
    """Percentile bootstrap interval for one metric."""

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float
    widened: bool = False


class EvalReport(BaseModel):
    """Fidelity metrics for one fit with bootstrap intervals."""

    model_config = ConfigDict(frozen=True)

    method: str
    holdout_rmse: float = Field(ge=0.0)
    spearman_rho: float | None = Field(default=None, ge=-1.0, le=1.0)
    kendall_tau: float | None = Field(default=None, ge=-1.0, le=1.0)
    ranking_auc: float | None = Field(default=None, ge=0.0, le=1.0)
    ci: dict[str, MetricInterval] = Field(default_factory=dict)
    n_boot: int = 0
    realized_coverage: float = Field(ge=0.0, le=1.0)
    n_train: int = 0
    n_holdout_evaluated: int = 0
    n_disconnected_resamples: int = 0
    reference_rmse: float | None = None
    relative_rmse_increase: float | None = None

    def metric(self, name: str) -> float | None:
        return getattr(self, name)


class SweepRow(BaseModel):
    """One (sampling spec, method) cell of a sweep."""

    model_config = ConfigDict(frozen=True)

    regime: str
    alpha: float | None = None
    beta: float | None = None
    c: float | None = None
    d_min: int | None = None
    method: str
    target_pairs: int | None = None
    repaired_pairs: int | None = None
    report: EvalReport | None = None
    error: str | None = None


class JudgeAgreement(BaseModel):
    """Rank agreement between two fits of the same agents and items."""

    model_config = ConfigDict(frozen=True)

    n_shared_agents: int
    n_shared_items: int
    agent_spearman: float
    agent_kendall: float
    item_spearman: float
    item_kendall: float


class RunManifest(BaseModel):
    """Provenance record written next to every CLI output."""

    model_config = ConfigDict(frozen=True)

    command: str
    config: dict[str, Any]
    seeds: dict[str, int] = Field(default_factory=dict)
    input_digests: dict[str, str] = Field(default_factory=dict)
    config_digest: str
    artifact_version: str
    started_at: str
    finished_at: str | None = None
    outputs: tuple[str, ...] = ()


class CurlReport(BaseModel):
    """Everything the curl command measures on one matrix."""

    model_config = ConfigDict(frozen=True)

    source: str = ""
    n_rect: int = Field(ge=1)
    seed: int = 0
    threshold: float = Field(gt=0.0)
    summaries: dict[str, CurlSummary]
    verdicts: dict[str, bool]
    prediction_curl: dict[str, CurlSummary] = Field(default_factory=dict)
    bootstrap: CurlBootstrapResult | None = None
