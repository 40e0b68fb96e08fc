"""Aggregate pairwise judge records into a TVD-MI score matrix.

Cell (i, k) is the mean of TPR − FPR over the partners j that agent i was
discriminated against on item k. Records are directed: agent i's score only
uses records with i as ``agent_i``.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import structlog

from ..models import ObservationMask, PairwiseJudgeRecord, ScoreMatrix
from ..models.scores import SCORE_BOUND

logger = structlog.get_logger(__name__)


def record_universe(
    records: Sequence[PairwiseJudgeRecord],
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Agent and item labels in order of first appearance."""
    agents: dict[str, None] = {}
    items: dict[str, None] = {}
    for r in records:
        agents.setdefault(r.agent_i)
        agents.setdefault(r.agent_j)
        items.setdefault(r.item_k)
    return tuple(agents), tuple(items)


def _index(labels: Sequence[str]) -> dict[str, int]:
    return {label: k for k, label in enumerate(labels)}


def aggregate_tvdmi(
    records: Iterable[PairwiseJudgeRecord],
    holdout: ObservationMask | None = None,
    agent_ids: Sequence[str] | None = None,
    item_ids: Sequence[str] | None = None,
    exclude_partner_holdout: bool = False,
) -> ScoreMatrix:
    """Average discrimination signals into a K×J training matrix.

    Args:
        records: Directed judge records
        holdout: Pairs reserved for testing; their cells stay unobserved and
            their terms are dropped
        agent_ids: Agent order (default: first appearance in records)
        item_ids: Item order (default: first appearance in records)
        exclude_partner_holdout: Also drop term (i, j, k) when the partner
            cell (j, k) is held out

    Returns:
        Score matrix; cells with no included partner are unobserved

    Raises:
        ValueError: A record names an agent or item outside the given universe,
            or the holdout shape does not match
    """
    records = list(records)
    seen_agents, seen_items = record_universe(records)
    agents = tuple(agent_ids) if agent_ids is not None else seen_agents
    items = tuple(item_ids) if item_ids is not None else seen_items
    a_idx = _index(agents)
    q_idx = _index(items)
    n_agents, n_items = len(agents), len(items)

    held = np.zeros((n_agents, n_items), dtype=bool)
    if holdout is not None:
        if holdout.shape != (n_agents, n_items):
            raise ValueError(
                f"Holdout shape {holdout.shape} does not match {n_agents}×{n_items} universe"
            )
        held = holdout.pattern

    logger.info(
        "aggregate_started",
        n_records=len(records),
        n_agents=n_agents,
        n_items=n_items,
        exclude_partner_holdout=exclude_partner_holdout,
    )
    total = np.zeros((n_agents, n_items))
    count = np.zeros((n_agents, n_items), dtype=int)
    n_dropped = 0
    for r in records:
        for label, index in ((r.agent_i, a_idx), (r.agent_j, a_idx)):
            if label not in index:
                raise ValueError(f"Record references unknown agent '{label}'")
        if r.item_k not in q_idx:
            raise ValueError(f"Record references unknown item '{r.item_k}'")
        i, j, k = a_idx[r.agent_i], a_idx[r.agent_j], q_idx[r.item_k]
        if held[i, k] or (exclude_partner_holdout and held[j, k]):
            n_dropped += 1
            continue
        total[i, k] += r.signal
        count[i, k] += 1

    observed = count > 0
    values = np.clip(
        np.divide(total, count, out=np.zeros_like(total), where=observed),
        -SCORE_BOUND,
        SCORE_BOUND,
    )
    empty = ~observed & ~held
    if empty.any():
        logger.warning("cells_without_partners", n_cells=int(empty.sum()))
    logger.info(
        "aggregate_complete",
        n_observed=int(observed.sum()),
        n_terms_dropped=n_dropped,
    )
    return ScoreMatrix(
        values=values,
        mask=ObservationMask(pattern=observed),
        agent_ids=agents,
        item_ids=items,
    )
