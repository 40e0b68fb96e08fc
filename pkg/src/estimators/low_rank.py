"""Low-rank completion baselines: soft-impute, mean-imputed SVD and UV factorization.

None of these constrain the completion to θ_i − b_j; they return a completed
matrix without additive parameters.
"""
from __future__ import annotations

import numpy as np
import structlog

from ..errors import ConvergenceError
from ..models import FitConfig, FitResult, ScoreMatrix
from ..models.scores import SCORE_BOUND
from .clipped_linear import observation_weights

logger = structlog.get_logger(__name__)


def _weighted_mean(values: np.ndarray, w: np.ndarray) -> float:
    total = float(w.sum())
    if total <= 0.0:
        raise ValueError("No observed cells to fit")
    return float((w * values).sum() / total)


def soft_impute(
    values: np.ndarray,
    w: np.ndarray,
    reg: float,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, list[float], int, bool]:
    """Singular-value soft-thresholding with observed entries restored each step.

    With multiplicity weights the restore step moves each cell toward its
    observation by w_ij / max(w), and the threshold is reg / max(w); for 0/1
    weights this is plain soft-impute.

    Returns:
        (best iterate, objective trace, iterations, converged)
    """
    w_max = float(w.max())
    if w_max <= 0.0:
        raise ValueError("No observed cells to fit")
    step = w / w_max
    threshold = reg / w_max

    x = np.zeros_like(values, dtype=float)
    best = x
    best_obj = np.inf
    trace: list[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, max_iters + 1):
        z = x + step * (values - x)
        u, sv, vt = np.linalg.svd(z, full_matrices=False)
        sv = np.maximum(sv - threshold, 0.0)
        x_new = (u * sv) @ vt

        residual = values - x_new
        obj = 0.5 * float((w * residual * residual).sum()) + reg * float(sv.sum())
        trace.append(obj)
        if obj < best_obj:
            best, best_obj = x_new, obj

        norm = np.linalg.norm(x)
        change = np.linalg.norm(x_new - x) / norm if norm > 0 else np.inf
        x = x_new
        if change < tol:
            converged = True
            break
    return best, trace, iteration, converged


def select_nuclear_reg(m: ScoreMatrix, w: np.ndarray, cfg: FitConfig) -> float:
    """Pick the grid value with the lowest RMSE on a validation split of the observed cells."""
    rows, cols = np.nonzero(w > 0)
    n_val = max(1, round(cfg.validation_fraction * len(rows)))
    if len(rows) < 2:
        return cfg.nuclear_grid[0]

    rng = np.random.default_rng([cfg.seed, 2])
    pick = rng.choice(len(rows), size=n_val, replace=False)
    vr, vc = rows[pick], cols[pick]
    w_train = w.copy()
    w_train[vr, vc] = 0.0
    if w_train.sum() <= 0.0:
        return cfg.nuclear_grid[0]

    scores = []
    for reg in cfg.nuclear_grid:
        x, _, _, _ = soft_impute(m.values, w_train, reg, cfg.max_iters, cfg.low_rank_tol)
        err = np.clip(x[vr, vc], -SCORE_BOUND, SCORE_BOUND) - m.values[vr, vc]
        scores.append(float(np.sqrt(np.mean(err * err))))
    chosen = float(cfg.nuclear_grid[int(np.argmin(scores))])
    logger.info("nuclear_reg_selected", reg=chosen, grid=list(cfg.nuclear_grid), rmse=scores)
    return chosen


def fit_nuclear_norm(
    m: ScoreMatrix,
    cfg: FitConfig | None = None,
    weights: np.ndarray | None = None,
    reg: float | None = None,
) -> FitResult:
    """Soft-impute completion.

    Args:
        m: Training matrix
        cfg: ``nuclear_reg`` (or the validation grid), ``max_iters``, ``low_rank_tol``
        weights: Optional multiplicity weights
        reg: Explicit threshold, overriding ``cfg``

    Returns:
        FitResult holding the best iterate; a warning is logged when the
        relative change never fell below tolerance
    """
    cfg = cfg or FitConfig()
    w = observation_weights(m, weights)
    if reg is None:
        reg = cfg.nuclear_reg if cfg.nuclear_reg is not None else select_nuclear_reg(m, w, cfg)

    logger.info("fit_started", method="nuclear_norm", reg=reg, n_observed=int((w > 0).sum()))
    x, trace, n_iter, converged = soft_impute(m.values, w, reg, cfg.max_iters, cfg.low_rank_tol)
    if not converged:
        logger.warning("fit_not_converged", method="nuclear_norm", n_iterations=n_iter)
    logger.info("fit_complete", method="nuclear_norm", n_iterations=n_iter, converged=converged)
    return FitResult(
        method_tag="nuclear_norm",
        completed=np.clip(x, -SCORE_BOUND, SCORE_BOUND),
        objective_trace=tuple(trace),
        n_iterations=n_iter,
        converged=converged,
        agent_ids=m.agent_ids,
        item_ids=m.item_ids,
        notes=(f"reg={reg:g}",),
    )


def fit_svd_baseline(
    m: ScoreMatrix,
    cfg: FitConfig | None = None,
    weights: np.ndarray | None = None,
    rank: int | None = None,
) -> FitResult:
    """Impute unobserved cells with the observed mean and truncate the SVD."""
    cfg = cfg or FitConfig()
    rank = rank or cfg.rank
    w = observation_weights(m, weights)
    mean = _weighted_mean(m.values, w)
    filled = np.where(w > 0, m.values, mean)

    u, sv, vt = np.linalg.svd(filled, full_matrices=False)
    r = min(rank, len(sv))
    x = (u[:, :r] * sv[:r]) @ vt[:r]
    logger.info("fit_complete", method="svd", rank=r, fill_value=mean)
    return FitResult(
        method_tag="svd",
        completed=np.clip(x, -SCORE_BOUND, SCORE_BOUND),
        n_iterations=1,
        agent_ids=m.agent_ids,
        item_ids=m.item_ids,
    )


def _uv_objective(
    values: np.ndarray, w: np.ndarray, u: np.ndarray, v: np.ndarray, reg: float
) -> float:
    residual = values - u @ v.T
    return float((w * residual * residual).sum() + reg * ((u * u).sum() + (v * v).sum()))


def _ridge_rows(w: np.ndarray, ws: np.ndarray, other: np.ndarray, reg: float) -> np.ndarray:
    """Solve every row's r×r ridge system against the fixed factor ``other``."""
    r = other.shape[1]
    gram = np.einsum("ij,jk,jl->ikl", w, other, other) + reg * np.eye(r)
    rhs = ws @ other
    return np.linalg.solve(gram, rhs[..., None])[..., 0]


def fit_uv(
    m: ScoreMatrix,
    cfg: FitConfig | None = None,
    weights: np.ndarray | None = None,
    rank: int | None = None,
    reg: float | None = None,
) -> FitResult:
    """Alternating ridge least squares for S ≈ U Vᵀ over observed cells.

    Raises:
        ConvergenceError: The objective increased between sweeps
    """
    cfg = cfg or FitConfig()
    rank = rank or cfg.rank
    reg = cfg.uv_reg if reg is None else reg
    w = observation_weights(m, weights)
    if w.sum() <= 0.0:
        raise ValueError("No observed cells to fit")
    solve_reg = max(reg, 1e-12)

    rng = np.random.default_rng(cfg.seed)
    n_agents, n_items = m.shape
    u = rng.normal(0.0, 0.1, size=(n_agents, rank))
    v = rng.normal(0.0, 0.1, size=(n_items, rank))
    ws = w * m.values

    logger.info("fit_started", method="uv", rank=rank, reg=reg, seed=cfg.seed)
    trace = [_uv_objective(m.values, w, u, v, reg)]
    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iters + 1):
        u = _ridge_rows(w, ws, v, solve_reg)
        v = _ridge_rows(w.T, ws.T, u, solve_reg)
        obj = _uv_objective(m.values, w, u, v, reg)
        prev = trace[-1]
        trace.append(obj)
        if obj > prev + 1e-9 * max(1.0, prev):
            raise ConvergenceError(
                f"UV objective increased from {prev:.6g} to {obj:.6g} at iteration {iteration}"
            )
        if obj <= 1e-20 or (prev - obj) / prev < cfg.low_rank_tol:
            converged = True
            break

    if not converged:
        logger.warning("fit_not_converged", method="uv", n_iterations=iteration)
    logger.info("fit_complete", method="uv", n_iterations=iteration, objective=trace[-1])
    return FitResult(
        method_tag="uv",
        completed=np.clip(u @ v.T, -SCORE_BOUND, SCORE_BOUND),
        objective_trace=tuple(trace),
        n_iterations=iteration,
        converged=converged,
        agent_ids=m.agent_ids,
        item_ids=m.item_ids,
    )
