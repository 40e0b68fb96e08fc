"""Rank agreement and ranking-AUC metrics."""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import stats

from ..errors import UndefinedMetricError
from ..models import AdditiveParams, AgentLabels, AgentTag, FitResult, JudgeAgreement


def rank_metrics(
    theta_dense: Sequence[float] | np.ndarray, theta_sparse: Sequence[float] | np.ndarray
) -> tuple[float, float]:
    """Spearman ρ (average ranks) and Kendall τ-b between two ability vectors.

    Raises:
        ValueError: Lengths differ or fewer than two entries
        UndefinedMetricError: Either vector is constant
    """
    a = np.asarray(theta_dense, dtype=float)
    b = np.asarray(theta_sparse, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"Rank vectors must be 1-D of equal length, got {a.shape} and {b.shape}")
    if len(a) < 2:
        raise ValueError("Rank correlation needs at least two entries")
    if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
        raise UndefinedMetricError("Rank correlation is undefined for a constant vector")
    rho = stats.spearmanr(a, b).statistic
    tau = stats.kendalltau(a, b).statistic
    return float(np.clip(rho, -1.0, 1.0)), float(np.clip(tau, -1.0, 1.0))


def ranking_auc(per_agent_scores: Sequence[float] | np.ndarray, labels: AgentLabels) -> float:
    """P(faithful score > problematic score) + ½ P(tie) over all faithful/problematic pairs.

    Unlabeled agents are ignored.

    Raises:
        UndefinedMetricError: No faithful or no problematic agent
    """
    scores = np.asarray(per_agent_scores, dtype=float)
    if len(scores) != len(labels.tags):
        raise ValueError(f"{len(scores)} scores for {len(labels.tags)} labelled agents")
    pos = scores[labels.index_of(AgentTag.FAITHFUL)]
    neg = scores[labels.index_of(AgentTag.PROBLEMATIC)]
    if len(pos) == 0 or len(neg) == 0:
        raise UndefinedMetricError(
            "Ranking AUC needs at least one faithful and one problematic agent"
        )
    diff = pos[:, None] - neg[None, :]
    return float((diff > 0).mean() + 0.5 * (diff == 0).mean())


def per_agent_scores(fit: FitResult) -> np.ndarray:
    """Mean completed score of each agent over all items."""
    return fit.completed.mean(axis=1)


def agent_abilities(fit: FitResult) -> np.ndarray:
    """θ for additive fits; per-agent mean completion for the other baselines."""
    if fit.params is not None:
        return np.asarray(fit.params.theta)
    return per_agent_scores(fit)


def compare_judges(
    params_a: AdditiveParams, params_b: AdditiveParams
) -> JudgeAgreement:
    """Rank agreement of θ and b between two fits over shared agent and item labels.

    Raises:
        ValueError: Fewer than two shared agents or items
        UndefinedMetricError: A shared parameter vector is constant
    """
    agents = [a for a in params_a.agent_ids if a in set(params_b.agent_ids)]
    items = [q for q in params_a.item_ids if q in set(params_b.item_ids)]
    idx_a = {a: k for k, a in enumerate(params_a.agent_ids)}
    idx_b = {a: k for k, a in enumerate(params_b.agent_ids)}
    jdx_a = {q: k for k, q in enumerate(params_a.item_ids)}
    jdx_b = {q: k for k, q in enumerate(params_b.item_ids)}

    theta_a = params_a.theta[[idx_a[a] for a in agents]]
    theta_b = params_b.theta[[idx_b[a] for a in agents]]
    b_a = params_a.b[[jdx_a[q] for q in items]]
    b_b = params_b.b[[jdx_b[q] for q in items]]

    agent_rho, agent_tau = rank_metrics(theta_a, theta_b)
    item_rho, item_tau = rank_metrics(b_a, b_b)
    return JudgeAgreement(
        n_shared_agents=len(agents),
        n_shared_items=len(items),
        agent_spearman=agent_rho,
        agent_kendall=agent_tau,
        item_spearman=item_rho,
        item_kendall=item_tau,
    )
