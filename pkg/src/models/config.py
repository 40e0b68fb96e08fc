"""Configuration models: link functions, fitting, sampling and synthetic data."""
from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

DEFAULT_CLIP_BOUND = 0.99
DEFAULT_RIDGE = 1e-6
FAITHFUL_SHARE = 4 / 30
PROBLEMATIC_SHARE = 0.5


class LinkFunction(str, Enum):
    """Link functions compared by the integrability ablation."""

    IDENTITY = "identity"
    PROBIT = "probit"
    LOGIT = "logit"


class LinkKind(BaseModel):
    """A link function plus the clip bound applied before it."""

    model_config = ConfigDict(frozen=True)

    function: LinkFunction = LinkFunction.IDENTITY
    clip_bound: float = Field(default=DEFAULT_CLIP_BOUND, gt=0.0, lt=1.0)

    @classmethod
    def parse(cls, value: LinkKind | LinkFunction | str) -> LinkKind:
        if isinstance(value, LinkKind):
            return value
        return cls(function=LinkFunction(value))

    @property
    def name(self) -> str:
        return self.function.value


class FitConfig(BaseModel):
    """Estimator settings shared by the additive fit and the baselines."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    ridge: float = Field(default=DEFAULT_RIDGE, ge=0.0, alias="lambda")
    max_iters: int = Field(default=1000, ge=1)
    tol: float = Field(default=1e-10, gt=0.0)
    link: LinkKind = Field(default_factory=LinkKind)
    clip_predictions: bool = True

    # Baseline hyperparameters
    rank: int = Field(default=2, ge=1)
    uv_reg: float = Field(default=1e-3, ge=0.0)
    nuclear_reg: float | None = Field(default=None, gt=0.0)
    nuclear_grid: tuple[float, ...] = (0.01, 0.03, 0.1, 0.3)
    low_rank_tol: float = Field(default=1e-6, gt=0.0)
    validation_fraction: float = Field(default=0.1, gt=0.0, lt=1.0)
    seed: int = Field(default=0, ge=0)

    def with_link(self, function: LinkFunction | str) -> FitConfig:
        """Same settings with a different link function (clip bound kept)."""
        link = LinkKind(function=LinkFunction(function), clip_bound=self.link.clip_bound)
        return self.model_copy(update={"link": link})


class Regime(str, Enum):
    """Training-mask sampling regimes."""

    ROW = "row"
    COLUMN = "column"
    HYBRID = "hybrid"
    NLOGN = "nlogn"


class SamplingSpec(BaseModel):
    """One sampling configuration; only the parameters of its regime are required."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    regime: Regime
    alpha: float | None = Field(default=None, gt=0.0, le=1.0)
    beta: float | None = Field(default=None, gt=0.0, le=1.0)
    c: float | None = Field(default=None, gt=0.0, alias="C")
    d_min: int = Field(default=3, ge=1)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _regime_parameters(self) -> SamplingSpec:
        required = {
            Regime.ROW: ("alpha",),
            Regime.COLUMN: ("beta",),
            Regime.HYBRID: ("alpha", "beta"),
            Regime.NLOGN: ("c",),
        }[self.regime]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"Regime '{self.regime.value}' requires {', '.join(missing)}")
        return self

    def label(self) -> str:
        """Compact identifier used in sweep tables."""
        parts = [self.regime.value]
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.beta is not None:
            parts.append(f"beta={self.beta:g}")
        if self.c is not None:
            parts.append(f"C={self.c:g}")
        return " ".join(parts)


class DistributionSpec(BaseModel):
    """Normal(mean, sd) or Uniform(low, high) descriptor for synthetic parameters."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["normal", "uniform"] = "normal"
    mean: float = 0.0
    sd: float = Field(default=1.0, ge=0.0)
    low: float = 0.0
    high: float = 1.0

    @model_validator(mode="after")
    def _ordered_bounds(self) -> DistributionSpec:
        if self.kind == "uniform" and self.high < self.low:
            raise ValueError(f"Uniform bounds reversed: low={self.low}, high={self.high}")
        return self


class SyntheticSpec(BaseModel):
    """Ground-truth generator; defaults are calibrated to mean 0.18, SD 0.31, 2–3% saturation."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    n_agents: int = Field(default=30, ge=2, alias="K")
    n_items: int = Field(default=200, ge=2, alias="J")
    theta_dist: DistributionSpec = Field(
        default_factory=lambda: DistributionSpec(kind="normal", mean=0.18, sd=0.25)
    )
    b_dist: DistributionSpec = Field(
        default_factory=lambda: DistributionSpec(kind="normal", mean=0.0, sd=0.15)
    )
    noise_sd: float = Field(default=0.12, ge=0.0)
    saturation_push: float = Field(default=0.025, ge=0.0, lt=1.0)
    # None scales with K: 4 faithful and 15 problematic at K=30
    n_faithful: int | None = Field(default=None, ge=0)
    n_problematic: int | None = Field(default=None, ge=0)
    seed: int = Field(default=0, ge=0)

    @property
    def faithful_count(self) -> int:
        if self.n_faithful is not None:
            return self.n_faithful
        return round(FAITHFUL_SHARE * self.n_agents)

    @property
    def problematic_count(self) -> int:
        if self.n_problematic is not None:
            return self.n_problematic
        return round(PROBLEMATIC_SHARE * self.n_agents)

    @model_validator(mode="after")
    def _label_counts(self) -> SyntheticSpec:
        if self.faithful_count + self.problematic_count > self.n_agents:
            raise ValueError(
                f"{self.faithful_count} faithful + {self.problematic_count} problematic agents "
                f"exceed K={self.n_agents}"
            )
        return self
