"""Fidelity evaluation of one training mask with bootstrap intervals.

Training pairs are resampled with replacement and refitted with
multiplicity weights; every resample is scored on the fixed holdout set.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np
import structlog

from ..core import percentile_interval
from ..errors import LeakageError, UndefinedMetricError
from ..estimators import fit_method
from ..models import (
    AgentLabels,
    EvalReport,
    FitConfig,
    FitResult,
    MetricInterval,
    ObservationMask,
    ScoreMatrix,
)
from ..parallel import parallel_map
from ..sampling import count_components
from .holdout import evaluable_cells, holdout_rmse
from .metrics import agent_abilities, per_agent_scores, rank_metrics, ranking_auc

logger = structlog.get_logger(__name__)

METRICS = ("holdout_rmse", "spearman_rho", "kendall_tau", "ranking_auc")
DEFAULT_N_BOOT = 500


@dataclass(frozen=True)
class EvalContext:
    """Everything a bootstrap worker needs; picklable."""

    matrix: ScoreMatrix
    holdout: ObservationMask
    train: ObservationMask
    method: str
    cfg: FitConfig
    reference_theta: np.ndarray
    labels: AgentLabels | None = None


def score_fit(
    fit: FitResult,
    m: ScoreMatrix,
    holdout: ObservationMask,
    reference_theta: np.ndarray,
    labels: AgentLabels | None = None,
) -> dict[str, float | None]:
    """All fidelity metrics of one fit; undefined rank metrics come back as None."""
    scores: dict[str, float | None] = {"holdout_rmse": holdout_rmse(fit, m, holdout)}
    try:
        scores["spearman_rho"], scores["kendall_tau"] = rank_metrics(
            reference_theta, agent_abilities(fit)
        )
    except UndefinedMetricError:
        scores["spearman_rho"] = scores["kendall_tau"] = None
    scores["ranking_auc"] = None
    if labels is not None:
        try:
            scores["ranking_auc"] = ranking_auc(per_agent_scores(fit), labels)
        except UndefinedMetricError:
            pass
    return scores


def resample_weights(train: ObservationMask, rng: np.random.Generator) -> np.ndarray:
    """Multiplicity weights of one with-replacement resample of the training pairs."""
    rows, cols = train.cells()
    n_train = len(rows)
    counts = np.bincount(rng.integers(0, n_train, n_train), minlength=n_train)
    weights = np.zeros(train.shape)
    weights[rows, cols] = counts
    return weights


def _bootstrap_iteration(index: int, ctx: EvalContext, seed: int) -> tuple[dict, bool]:
    rng = np.random.default_rng([seed, index])
    weights = resample_weights(ctx.train, rng)
    if (weights[ctx.holdout.pattern] > 0).any():
        raise LeakageError(f"Bootstrap resample {index} drew holdout pairs")
    disconnected = count_components(weights > 0) > 1
    fit = fit_method(ctx.method, ctx.matrix.restrict(ctx.train), ctx.cfg, weights)
    scores = score_fit(fit, ctx.matrix, ctx.holdout, ctx.reference_theta, ctx.labels)
    return scores, disconnected


def bootstrap_eval(
    m: ScoreMatrix,
    holdout: ObservationMask,
    train_mask: ObservationMask,
    method: str = "clipped_linear",
    n_boot: int = DEFAULT_N_BOOT,
    seed: int = 0,
    cfg: FitConfig | None = None,
    labels: AgentLabels | None = None,
    n_jobs: int | None = 1,
) -> EvalReport:
    """Evaluate ``method`` trained on ``train_mask`` against the holdout set.

    The dense reference is the same method fitted on every observed
    non-holdout pair; its abilities anchor the rank metrics and its RMSE
    gives the relative increase. With ``n_boot == 0`` only point metrics are
    reported.

    Args:
        m: Full score matrix (holdout cells included)
        holdout: Reserved test pairs
        train_mask: Training pairs; must not touch the holdout
        method: Registered estimator name
        n_boot: Bootstrap iterations
        seed: Iteration ``b`` resamples with ``default_rng([seed, b])``
        cfg: Fit configuration
        labels: Agent tags for the ranking AUC
        n_jobs: Worker processes for the bootstrap loop

    Raises:
        LeakageError: Training mask or a resample overlaps the holdout
    """
    cfg = cfg or FitConfig()
    if train_mask.overlaps(holdout):
        raise LeakageError("Training mask overlaps the holdout set")
    if labels is not None and not labels.covers(m.agent_ids):
        raise ValueError("Labels do not cover the agents of the score matrix")
    train = train_mask.intersect(m.mask)
    if train.observed_count == 0:
        raise ValueError("Training mask has no observed cells")
    if evaluable_cells(m, holdout).observed_count == 0:
        raise UndefinedMetricError("Holdout has no observed cells")

    logger.info(
        "eval_started",
        method=method,
        n_train=train.observed_count,
        coverage=train.coverage,
        n_boot=n_boot,
        seed=seed,
    )
    pool = holdout.complement().intersect(m.mask)
    reference = fit_method(method, m.restrict(pool), cfg)
    reference_theta = agent_abilities(reference)
    reference_rmse = holdout_rmse(reference, m, holdout)

    point_fit = fit_method(method, m.restrict(train), cfg)
    point = score_fit(point_fit, m, holdout, reference_theta, labels)

    ci: dict[str, MetricInterval] = {}
    n_disconnected = 0
    if n_boot > 0:
        ctx = EvalContext(
            matrix=m,
            holdout=holdout,
            train=train,
            method=method,
            cfg=cfg,
            reference_theta=reference_theta,
            labels=labels,
        )
        worker = partial(_bootstrap_iteration, ctx=ctx, seed=seed)
        results = parallel_map(worker, range(n_boot), n_jobs)
        n_disconnected = sum(1 for _, flag in results if flag)
        if n_disconnected:
            logger.warning("bootstrap_resamples_disconnected", count=n_disconnected, n_boot=n_boot)
        for name in METRICS:
            estimate = point[name]
            samples = np.array(
                [np.nan if r[name] is None else r[name] for r, _ in results], dtype=float
            )
            if estimate is None or np.isnan(samples).all():
                continue
            lower, upper, widened = percentile_interval(samples, estimate)
            ci[name] = MetricInterval(lower=lower, upper=upper, widened=widened)

    rmse = point["holdout_rmse"]
    report = EvalReport(
        method=method,
        holdout_rmse=rmse,
        spearman_rho=point["spearman_rho"],
        kendall_tau=point["kendall_tau"],
        ranking_auc=point["ranking_auc"],
        ci=ci,
        n_boot=n_boot,
        realized_coverage=train.coverage,
        n_train=train.observed_count,
        n_holdout_evaluated=evaluable_cells(m, holdout).observed_count,
        n_disconnected_resamples=n_disconnected,
        reference_rmse=reference_rmse,
        relative_rmse_increase=rmse / reference_rmse - 1.0 if reference_rmse > 0 else None,
    )
    logger.info("eval_complete", method=method, holdout_rmse=rmse, n_boot=n_boot)
    return report
