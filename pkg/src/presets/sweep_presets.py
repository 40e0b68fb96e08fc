"""Named sweep grids for coverage studies.

Provides predefined sampling grids:
- row_alpha: each agent observes a fraction α of items
- column_beta: each item is observed by a fraction β of agents
- hybrid: random subset of a fraction α·β of all pairs
- nlogn_c: C·(K+J)·ln(K+J) random pairs for a range of C
- full_grid: all four regimes above
- coverage_33: the ~33% nlogn operating point with bootstrap intervals
- baselines: every registered estimator at the ~33% operating point
"""
from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from ..models import Regime, SamplingSpec

ROW_ALPHAS = (0.15, 0.30, 0.45)
COLUMN_BETAS = (0.15, 0.30, 0.45)
HYBRID_FRACTIONS = (0.4, 0.55, 0.7)
NLOGN_CS = (0.5, 1.0, 2.0, 3.0, 5.0)
OPERATING_POINT_C = 1.6

BASELINE_METHODS = (
    "clipped_linear",
    "isotonic",
    "rasch_probit",
    "rasch_logit",
    "nuclear_norm",
    "svd",
    "uv",
)


class SweepPreset(BaseModel):
    """A reusable sweep definition: sampling specs, methods and bootstrap size."""

    model_config = ConfigDict(frozen=True)

    name: str
    version: str = "1.0"
    description: str
    use_case: str = ""
    specs: tuple[SamplingSpec, ...]
    methods: tuple[str, ...] = ("clipped_linear",)
    n_boot: int = Field(default=0, ge=0)
    include_dense: bool = True

    def with_seed(self, seed: int) -> SweepPreset:
        """Same grid with every sampling spec reseeded."""
        return self.model_copy(
            update={"specs": tuple(s.model_copy(update={"seed": seed}) for s in self.specs)}
        )


def _row_specs() -> tuple[SamplingSpec, ...]:
    return tuple(SamplingSpec(regime=Regime.ROW, alpha=a) for a in ROW_ALPHAS)


def _column_specs() -> tuple[SamplingSpec, ...]:
    return tuple(SamplingSpec(regime=Regime.COLUMN, beta=b) for b in COLUMN_BETAS)


def _hybrid_specs() -> tuple[SamplingSpec, ...]:
    return tuple(SamplingSpec(regime=Regime.HYBRID, alpha=f, beta=f) for f in HYBRID_FRACTIONS)


def _nlogn_specs() -> tuple[SamplingSpec, ...]:
    return tuple(SamplingSpec(regime=Regime.NLOGN, c=c) for c in NLOGN_CS)


_OPERATING_POINT = (SamplingSpec(regime=Regime.NLOGN, c=OPERATING_POINT_C),)

# Pre-defined sweep presets
SWEEP_PRESETS: dict[str, SweepPreset] = {
    "row_alpha": SweepPreset(
        name="row_alpha",
        description="Row sampling, α ∈ {0.15, 0.30, 0.45}",
        use_case="Per-agent item budgets",
        specs=_row_specs(),
    ),
    "column_beta": SweepPreset(
        name="column_beta",
        description="Column sampling, β ∈ {0.15, 0.30, 0.45}",
        use_case="Per-item agent budgets",
        specs=_column_specs(),
    ),
    "hybrid": SweepPreset(
        name="hybrid",
        description="Hybrid sampling, α = β ∈ {0.4, 0.55, 0.7}",
        use_case="Uniform random pair subsets at 16-49% coverage",
        specs=_hybrid_specs(),
    ),
    "nlogn_c": SweepPreset(
        name="nlogn_c",
        description="C·(K+J)·ln(K+J) pairs, C ∈ {0.5, 1, 2, 3, 5}",
        use_case="Coverage curve in the matrix-completion regime",
        specs=_nlogn_specs(),
    ),
    "full_grid": SweepPreset(
        name="full_grid",
        description="Row, column, hybrid and nlogn grids together",
        use_case="Complete coverage study for one dataset",
        specs=_row_specs() + _column_specs() + _hybrid_specs() + _nlogn_specs(),
    ),
    "coverage_33": SweepPreset(
        name="coverage_33",
        description=f"nlogn with C={OPERATING_POINT_C} (~33% coverage on 30×200), 500 resamples",
        use_case="Dense vs sparse fidelity with bootstrap intervals",
        specs=_OPERATING_POINT,
        n_boot=500,
    ),
    "baselines": SweepPreset(
        name="baselines",
        description="All registered estimators at the ~33% operating point",
        use_case="Baseline comparison on the fixed holdout",
        specs=_OPERATING_POINT,
        methods=BASELINE_METHODS,
        include_dense=False,
    ),
}


def get_preset(name: str) -> SweepPreset:
    """Get sweep preset by name.

    Args:
        name: Preset name

    Returns:
        SweepPreset

    Raises:
        ValueError: Unknown preset name
    """
    if name not in SWEEP_PRESETS:
        available = ", ".join(SWEEP_PRESETS)
        raise ValueError(f"Unknown preset '{name}'. Available: {available}")
    return SWEEP_PRESETS[name]


def list_presets() -> list[dict[str, Any]]:
    """List all available sweep presets.

    Returns:
        List of preset summaries with name, version, description, use_case
    """
    return [
        {
            "name": p.name,
            "version": p.version,
            "description": p.description,
            "use_case": p.use_case,
            "n_specs": len(p.specs),
            "methods": list(p.methods),
            "n_boot": p.n_boot,
        }
        for p in SWEEP_PRESETS.values()
    ]
