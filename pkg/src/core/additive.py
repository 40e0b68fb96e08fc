"""Additive prediction s_ij = θ_i − b_j."""
from __future__ import annotations

import numpy as np

from ..models import AdditiveParams, ObservationMask, ScoreMatrix
from ..models.scores import SCORE_BOUND, frozen_array


def predict_values(params: AdditiveParams, clip: bool = True) -> np.ndarray:
    """Full K×J array of θ_i − b_j, clamped to [-1, 1] when ``clip`` is set."""
    values = params.theta[:, None] - params.b[None, :]
    if clip:
        values = np.clip(values, -SCORE_BOUND, SCORE_BOUND)
    return values


def predict(params: AdditiveParams, clip: bool = True) -> ScoreMatrix:
    """Fully observed matrix of θ_i − b_j, clamped to [-1, 1] when ``clip`` is set.

    Unclipped predictions are returned as computed, even outside [-1, 1].
    """
    values = predict_values(params, clip=clip)
    mask = ObservationMask.full(*values.shape)
    if clip:
        return ScoreMatrix(
            values=values, mask=mask, agent_ids=params.agent_ids, item_ids=params.item_ids
        )
    # shape and ids come from validated params; only the score bound is skipped
    return ScoreMatrix.model_construct(
        values=frozen_array(values, float),
        mask=mask,
        agent_ids=params.agent_ids,
        item_ids=params.item_ids,
    )
