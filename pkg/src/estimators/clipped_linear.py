"""Clipped-linear additive estimator.

Minimizes

    ∑_{(i,j)∈Ω} w_ij (s_ij − (θ_i − b_j))² + λ(‖θ‖² + ‖b‖²)

by exact alternating row and column solves, reports parameters under the gauge
∑_j b_j = 0, and clamps predictions to [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import structlog

from ..core import predict_values
from ..models import AdditiveParams, FitConfig, FitResult, ScoreMatrix
from ..sampling.connectivity import count_components

logger = structlog.get_logger(__name__)

METHOD_TAG = "clipped_linear"


@dataclass(frozen=True)
class AdditiveSolution:
    """Raw output of the alternating solver (before gauge recentering)."""

    theta: np.ndarray
    b: np.ndarray
    objective_trace: list[float]
    n_iterations: int
    converged: bool
    pinned_agents: list[int] = field(default_factory=list)
    pinned_items: list[int] = field(default_factory=list)


def observation_weights(m: ScoreMatrix, weights: np.ndarray | None = None) -> np.ndarray:
    """K×J multiplicity weights; defaults to 1 on observed cells and 0 elsewhere.

    Raises:
        ValueError: Weights have the wrong shape, are negative, or sit on unobserved cells
    """
    if weights is None:
        return m.mask.pattern.astype(float)
    w = np.asarray(weights, dtype=float)
    if w.shape != m.shape:
        raise ValueError(f"Weights shape {w.shape} does not match matrix shape {m.shape}")
    if (w < 0).any() or not np.isfinite(w).all():
        raise ValueError("Weights must be finite and non-negative")
    if (w[~m.mask.pattern] > 0).any():
        raise ValueError("Weights assign mass to unobserved cells")
    return w


def additive_objective(
    rows: np.ndarray,
    cols: np.ndarray,
    vals: np.ndarray,
    w: np.ndarray,
    theta: np.ndarray,
    b: np.ndarray,
    ridge: float,
) -> float:
    r = vals - theta[rows] + b[cols]
    return float(np.dot(w, r * r) + ridge * (theta @ theta + b @ b))


def solve_additive(
    rows: np.ndarray,
    cols: np.ndarray,
    vals: np.ndarray,
    w: np.ndarray,
    n_agents: int,
    n_items: int,
    ridge: float,
    max_iters: int,
    tol: float,
) -> AdditiveSolution:
    """Alternating exact solves on COO observations; each sweep is O(|Ω|).

    After every sweep the common shift (θ + c, b + c) minimizing the ridge
    term is applied exactly, so the gauge direction never stalls convergence.
    Agents or items without observations stay at 0.
    """
    if len(rows) == 0 or float(w.sum()) <= 0.0:
        raise ValueError("No observed cells to fit")

    deg_a = np.bincount(rows, weights=w, minlength=n_agents)
    deg_b = np.bincount(cols, weights=w, minlength=n_items)
    free_a = deg_a > 0
    free_b = deg_b > 0
    n_free = int(free_a.sum() + free_b.sum())
    denom_a = deg_a + ridge
    denom_b = deg_b + ridge

    # θ starts at weighted row means, b at zero
    theta = np.divide(
        np.bincount(rows, weights=w * vals, minlength=n_agents),
        deg_a,
        out=np.zeros(n_agents),
        where=free_a,
    )
    b = np.zeros(n_items)

    trace = [additive_objective(rows, cols, vals, w, theta, b, ridge)]
    converged = False
    iteration = 0
    for iteration in range(1, max_iters + 1):
        theta_new = np.divide(
            np.bincount(rows, weights=w * (vals + b[cols]), minlength=n_agents),
            denom_a,
            out=np.zeros(n_agents),
            where=free_a,
        )
        b_new = np.divide(
            np.bincount(cols, weights=w * (theta_new[rows] - vals), minlength=n_items),
            denom_b,
            out=np.zeros(n_items),
            where=free_b,
        )
        shift = -(theta_new.sum() + b_new.sum()) / n_free
        theta_new[free_a] += shift
        b_new[free_b] += shift

        delta = max(
            float(np.max(np.abs(theta_new - theta), initial=0.0)),
            float(np.max(np.abs(b_new - b), initial=0.0)),
        )
        theta, b = theta_new, b_new
        trace.append(additive_objective(rows, cols, vals, w, theta, b, ridge))
        if delta < tol:
            converged = True
            break

    return AdditiveSolution(
        theta=theta,
        b=b,
        objective_trace=trace,
        n_iterations=iteration,
        converged=converged,
        pinned_agents=np.flatnonzero(~free_a).tolist(),
        pinned_items=np.flatnonzero(~free_b).tolist(),
    )


def fit_additive_model(
    m: ScoreMatrix,
    targets: np.ndarray,
    cfg: FitConfig,
    method_tag: str,
    weights: np.ndarray | None = None,
) -> tuple[AdditiveParams, AdditiveSolution]:
    """Fit θ − b to ``targets`` (raw or link scale) on the observed cells of ``m``."""
    w = observation_weights(m, weights)
    support = w > 0
    rows, cols = np.nonzero(support)
    n_agents, n_items = m.shape

    logger.info(
        "fit_started",
        method=method_tag,
        n_agents=n_agents,
        n_items=n_items,
        n_observed=len(rows),
        ridge=cfg.ridge,
    )
    if len(rows) and count_components(support) > 1:
        logger.warning("observation_graph_disconnected", method=method_tag)

    sol = solve_additive(
        rows,
        cols,
        targets[rows, cols],
        w[rows, cols],
        n_agents,
        n_items,
        cfg.ridge,
        cfg.max_iters,
        cfg.tol,
    )
    if sol.pinned_agents or sol.pinned_items:
        logger.warning(
            "parameters_pinned",
            method=method_tag,
            agents=[m.agent_ids[i] for i in sol.pinned_agents],
            items=[m.item_ids[j] for j in sol.pinned_items],
        )
    if not sol.converged:
        logger.warning("fit_not_converged", method=method_tag, n_iterations=sol.n_iterations)

    params = AdditiveParams(
        theta=sol.theta,
        b=sol.b,
        ridge=cfg.ridge,
        agent_ids=m.agent_ids,
        item_ids=m.item_ids,
    ).gauge_fixed(sol.pinned_agents, sol.pinned_items)
    logger.info(
        "fit_complete",
        method=method_tag,
        n_iterations=sol.n_iterations,
        converged=sol.converged,
        objective=sol.objective_trace[-1],
    )
    return params, sol


def solution_notes(m: ScoreMatrix, sol: AdditiveSolution) -> tuple[str, ...]:
    notes = []
    if sol.pinned_agents:
        notes.append("pinned agents: " + ", ".join(m.agent_ids[i] for i in sol.pinned_agents))
    if sol.pinned_items:
        notes.append("pinned items: " + ", ".join(m.item_ids[j] for j in sol.pinned_items))
    if not sol.converged:
        notes.append(f"not converged after {sol.n_iterations} iterations")
    return tuple(notes)


def fit_clipped_linear(
    m: ScoreMatrix,
    cfg: FitConfig | None = None,
    weights: np.ndarray | None = None,
) -> FitResult:
    """Fit the additive model on raw scores.

    Args:
        m: Training matrix; only observed cells enter the objective
        cfg: Ridge weight, iteration cap, tolerance and prediction clipping
        weights: Optional K×J multiplicity weights (bootstrap refits)

    Returns:
        FitResult with gauge-fixed parameters and the completed matrix

    Raises:
        ValueError: No observed cells
    """
    cfg = cfg or FitConfig()
    params, sol = fit_additive_model(m, m.values, cfg, METHOD_TAG, weights)
    return FitResult(
        method_tag=METHOD_TAG,
        params=params,
        completed=predict_values(params, clip=cfg.clip_predictions),
        objective_trace=tuple(sol.objective_trace),
        n_iterations=sol.n_iterations,
        converged=sol.converged,
        agent_ids=m.agent_ids,
        item_ids=m.item_ids,
        notes=solution_notes(m, sol),
    )
