"""Holdout split and holdout RMSE."""
from __future__ import annotations

import numpy as np
import structlog

from ..errors import UndefinedMetricError
from ..models import FitResult, HoldoutSplit, ObservationMask, ScoreMatrix

logger = structlog.get_logger(__name__)

DEFAULT_HOLDOUT_FRACTION = 0.2


def make_holdout(
    n_agents: int,
    n_items: int,
    fraction: float = DEFAULT_HOLDOUT_FRACTION,
    seed: int = 0,
) -> HoldoutSplit:
    """Reserve round(fraction · K · J) pairs uniformly without replacement.

    Raises:
        ValueError: ``fraction`` outside (0, 1)
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"Holdout fraction must lie in (0, 1), got {fraction}")
    n_pairs = n_agents * n_items
    n_holdout = int(round(fraction * n_pairs))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n_pairs, size=n_holdout, replace=False)
    pattern = np.zeros(n_pairs, dtype=bool)
    pattern[chosen] = True
    holdout = ObservationMask(pattern=pattern.reshape(n_agents, n_items))
    logger.info("holdout_complete", n_holdout=n_holdout, fraction=fraction, seed=seed)
    return HoldoutSplit(
        holdout=holdout,
        training_pool=holdout.complement(),
        fraction=fraction,
        seed=seed,
    )


def evaluable_cells(m: ScoreMatrix, holdout: ObservationMask) -> ObservationMask:
    """Holdout cells that carry an observed score."""
    return holdout.intersect(m.mask)


def holdout_rmse(
    fit: FitResult | np.ndarray, m: ScoreMatrix, holdout: ObservationMask
) -> float:
    """Root mean squared error of the completed matrix on observed holdout cells.

    Holdout cells missing from ``m`` are skipped.

    Raises:
        UndefinedMetricError: No holdout cell is observed
    """
    completed = fit.completed if isinstance(fit, FitResult) else np.asarray(fit, dtype=float)
    if completed.shape != m.shape:
        raise ValueError(f"Prediction shape {completed.shape} does not match {m.shape}")
    cells = evaluable_cells(m, holdout)
    if cells.observed_count == 0:
        raise UndefinedMetricError("Holdout has no observed cells")
    skipped = holdout.observed_count - cells.observed_count
    if skipped:
        logger.debug("holdout_cells_skipped", n_skipped=skipped)
    rows, cols = cells.cells()
    err = completed[rows, cols] - m.values[rows, cols]
    return float(np.sqrt(np.mean(err * err)))


def with_holdout_scores(
    train: ScoreMatrix, test: ScoreMatrix, holdout: ObservationMask
) -> ScoreMatrix:
    """Training scores everywhere except the holdout, where ``test`` supplies them.

    Used when aggregation computed holdout scores separately from the training
    matrix, so both enter one evaluation matrix.

    Raises:
        ValueError: Labels or shapes of the two matrices differ
    """
    if train.agent_ids != test.agent_ids or train.item_ids != test.item_ids:
        raise ValueError("Training and test matrices have different agent or item labels")
    if holdout.shape != train.shape:
        raise ValueError(f"Holdout shape {holdout.shape} does not match {train.shape}")
    held = holdout.pattern
    pattern = np.where(held, test.mask.pattern, train.mask.pattern)
    return ScoreMatrix(
        values=np.where(held, test.values, train.values),
        mask=ObservationMask(pattern=pattern),
        agent_ids=train.agent_ids,
        item_ids=train.item_ids,
    )
