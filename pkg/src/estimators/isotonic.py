"""Clipped-linear fit followed by a monotone calibration of its predictions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import structlog
from scipy.optimize import isotonic_regression

from ..core import predict_values
from ..models import FitConfig, FitResult, ScoreMatrix
from ..models.scores import SCORE_BOUND
from .clipped_linear import fit_clipped_linear, observation_weights

logger = structlog.get_logger(__name__)

METHOD_TAG = "isotonic"


@dataclass(frozen=True)
class IsotonicMap:
    """Non-decreasing step function through (knots, levels)."""

    knots: np.ndarray
    levels: np.ndarray

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        idx = np.searchsorted(self.knots, np.asarray(x, dtype=float), side="right") - 1
        return self.levels[np.clip(idx, 0, len(self.levels) - 1)]


def fit_isotonic_map(
    x: np.ndarray, y: np.ndarray, weights: np.ndarray | None = None
) -> IsotonicMap:
    """Weighted pool-adjacent-violators fit of y on x.

    Tied x values are merged into one weighted point first.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    if len(x) == 0:
        raise ValueError("Isotonic calibration needs at least one point")

    knots, inverse = np.unique(x, return_inverse=True)
    w_sum = np.bincount(inverse, weights=w, minlength=len(knots))
    y_mean = np.bincount(inverse, weights=w * y, minlength=len(knots)) / w_sum
    result = isotonic_regression(y_mean, weights=w_sum, increasing=True)
    return IsotonicMap(knots=knots, levels=np.asarray(result.x, dtype=float))


def fit_isotonic_calibrated(
    m: ScoreMatrix,
    cfg: FitConfig | None = None,
    weights: np.ndarray | None = None,
) -> FitResult:
    """Calibrate clipped-linear predictions with a monotone map g.

    g is fitted on (unclipped prediction, observed score) training pairs and
    the completed matrix is g(θ_i − b_j).
    """
    cfg = cfg or FitConfig()
    base = fit_clipped_linear(m, cfg.model_copy(update={"clip_predictions": False}), weights)
    assert base.params is not None
    raw = predict_values(base.params, clip=False)

    w = observation_weights(m, weights)
    rows, cols = np.nonzero(w > 0)
    g = fit_isotonic_map(raw[rows, cols], m.values[rows, cols], w[rows, cols])
    completed = np.clip(g(raw), -SCORE_BOUND, SCORE_BOUND)
    logger.info("isotonic_calibration_complete", n_knots=len(g.knots))
    return FitResult(
        method_tag=METHOD_TAG,
        params=base.params,
        completed=completed,
        objective_trace=base.objective_trace,
        n_iterations=base.n_iterations,
        converged=base.converged,
        agent_ids=m.agent_ids,
        item_ids=m.item_ids,
        notes=base.notes,
    )
