"""Synthetic additive score matrices with known ground truth."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
import structlog

from ..models import (
    AdditiveParams,
    AgentLabels,
    AgentTag,
    DistributionSpec,
    ObservationMask,
    ScoreMatrix,
    SyntheticSpec,
)
from ..models.scores import SCORE_BOUND, default_ids

logger = structlog.get_logger(__name__)


class SyntheticDataset(NamedTuple):
    matrix: ScoreMatrix
    truth: AdditiveParams
    labels: AgentLabels


def draw(dist: DistributionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    if dist.kind == "uniform":
        return rng.uniform(dist.low, dist.high, size)
    return rng.normal(dist.mean, dist.sd, size)


def generate_synthetic(spec: SyntheticSpec | None = None) -> SyntheticDataset:
    """Draw θ and b, add Gaussian noise, clamp, then saturate the most extreme cells.

    The ``saturation_push`` fraction of cells with the largest |s| is set to
    exactly ±1. Truth is returned gauge-fixed (∑ b = 0). The top
    ``n_faithful`` agents by true θ are tagged faithful, the bottom
    ``n_problematic`` problematic.
    """
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(spec.seed)
    n_agents, n_items = spec.n_agents, spec.n_items

    theta = draw(spec.theta_dist, n_agents, rng)
    b = draw(spec.b_dist, n_items, rng)
    noise = rng.normal(0.0, spec.noise_sd, (n_agents, n_items)) if spec.noise_sd > 0 else 0.0
    values = np.clip(theta[:, None] - b[None, :] + noise, -SCORE_BOUND, SCORE_BOUND)

    n_push = int(round(spec.saturation_push * values.size))
    if n_push:
        flat = values.ravel()
        extreme = np.argsort(-np.abs(flat), kind="stable")[:n_push]
        flat[extreme] = np.where(flat[extreme] < 0, -SCORE_BOUND, SCORE_BOUND)
        values = flat.reshape(values.shape)

    agent_ids = default_ids("a", n_agents)
    item_ids = default_ids("q", n_items)
    order = np.argsort(-theta, kind="stable")
    tags = [AgentTag.UNLABELED] * n_agents
    for i in order[: spec.faithful_count]:
        tags[i] = AgentTag.FAITHFUL
    if spec.problematic_count:
        for i in order[-spec.problematic_count :]:
            tags[i] = AgentTag.PROBLEMATIC

    matrix = ScoreMatrix(
        values=values,
        mask=ObservationMask.full(n_agents, n_items),
        agent_ids=agent_ids,
        item_ids=item_ids,
    )
    truth = AdditiveParams(theta=theta, b=b, agent_ids=agent_ids, item_ids=item_ids).gauge_fixed()
    saturated = float(np.mean(np.abs(values) >= SCORE_BOUND))
    logger.info(
        "synthetic_complete",
        n_agents=n_agents,
        n_items=n_items,
        mean=float(values.mean()),
        sd=float(values.std()),
        saturation=saturated,
        seed=spec.seed,
    )
    return SyntheticDataset(
        matrix=matrix,
        truth=truth,
        labels=AgentLabels(agent_ids=agent_ids, tags=tuple(tags)),
    )
