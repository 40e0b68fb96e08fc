"""Holdout protocol, fidelity metrics, bootstrap evaluation and sweeps."""

from .bootstrap import bootstrap_eval, resample_weights, score_fit
from .holdout import (
    DEFAULT_HOLDOUT_FRACTION,
    evaluable_cells,
    holdout_rmse,
    make_holdout,
    with_holdout_scores,
)
from .metrics import (
    agent_abilities,
    compare_judges,
    per_agent_scores,
    rank_metrics,
    ranking_auc,
)
from .sweep import DENSE_REGIME, SweepCell, sweep

__all__ = [
    "DEFAULT_HOLDOUT_FRACTION",
    "DENSE_REGIME",
    "SweepCell",
    "agent_abilities",
    "bootstrap_eval",
    "compare_judges",
    "evaluable_cells",
    "holdout_rmse",
    "make_holdout",
    "per_agent_scores",
    "rank_metrics",
    "ranking_auc",
    "resample_weights",
    "score_fit",
    "sweep",
    "with_holdout_scores",
]
