"""Training-mask construction under row, column, hybrid and (n log n) regimes.

Every generated mask avoids the forbidden pairs (holdout and naturally
missing cells) and is repaired until each agent and item has at least
``d_min`` observations and the bipartite observation graph is connected.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
import structlog

from ..errors import InfeasibleError
from ..models import ConnectivityReport, ObservationMask, Regime, SamplingSpec
from .connectivity import check_connectivity, component_labels

logger = structlog.get_logger(__name__)


def nlogn_target(n_agents: int, n_items: int, c: float) -> int:
    """round(C · (K + J) · ln(K + J))."""
    n = n_agents + n_items
    return int(round(c * n * math.log(n)))


def target_pairs(n_agents: int, n_items: int, spec: SamplingSpec) -> int:
    """Pairs the regime asks for before repair (expected count for hybrid)."""
    if spec.regime is Regime.ROW:
        return n_agents * round(spec.alpha * n_items)
    if spec.regime is Regime.COLUMN:
        return n_items * round(spec.beta * n_agents)
    if spec.regime is Regime.HYBRID:
        return int(round(spec.alpha * spec.beta * n_agents * n_items))
    return nlogn_target(n_agents, n_items, spec.c)


def _free_pattern(
    n_agents: int, n_items: int, forbidden: ObservationMask | None
) -> np.ndarray:
    if forbidden is None:
        return np.ones((n_agents, n_items), dtype=bool)
    if forbidden.shape != (n_agents, n_items):
        raise ValueError(
            f"Forbidden mask shape {forbidden.shape} does not match {n_agents}×{n_items}"
        )
    return ~forbidden.pattern


def _starved(free: np.ndarray, d_min: int) -> tuple[list[int], list[int]]:
    return (
        np.flatnonzero(free.sum(axis=1) < d_min).tolist(),
        np.flatnonzero(free.sum(axis=0) < d_min).tolist(),
    )


def _check_feasible(free: np.ndarray, d_min: int) -> None:
    rows, cols = _starved(free, d_min)
    if rows or cols:
        raise InfeasibleError(
            f"d_min={d_min} unreachable: agents {rows} and items {cols} "
            f"have fewer than {d_min} non-forbidden pairs"
        )


def _sample_rows(free: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Exactly min(size, available) free cells per row, without replacement."""
    pattern = np.zeros_like(free)
    for i in range(free.shape[0]):
        candidates = np.flatnonzero(free[i])
        take = min(size, len(candidates))
        if take:
            pattern[i, rng.choice(candidates, size=take, replace=False)] = True
    return pattern


def _sample_pattern(free: np.ndarray, spec: SamplingSpec, rng: np.random.Generator) -> np.ndarray:
    n_agents, n_items = free.shape
    if spec.regime is Regime.ROW:
        return _sample_rows(free, round(spec.alpha * n_items), rng)
    if spec.regime is Regime.COLUMN:
        return _sample_rows(free.T, round(spec.beta * n_agents), rng).T
    if spec.regime is Regime.HYBRID:
        return (rng.random(free.shape) < spec.alpha * spec.beta) & free

    target = nlogn_target(n_agents, n_items, spec.c)
    candidates = np.flatnonzero(free.ravel())
    if target > len(candidates):
        logger.warning("nlogn_target_truncated", target=target, available=len(candidates))
    chosen = rng.choice(candidates, size=min(target, len(candidates)), replace=False)
    pattern = np.zeros(free.size, dtype=bool)
    pattern[chosen] = True
    return pattern.reshape(free.shape)


def repair_mask(
    mask: ObservationMask,
    d_min: int = 3,
    forbidden: ObservationMask | None = None,
    seed: int | Sequence[int] = 0,
) -> ObservationMask:
    """Add random non-forbidden pairs until degrees reach ``d_min`` and the graph is connected.

    Starved agents then starved items receive uniformly random free pairs in
    their row or column; remaining components are bridged by uniformly random
    free pairs joining two different components. A mask that already
    satisfies both constraints is returned unchanged.

    Raises:
        InfeasibleError: A starved node or a split graph has no free candidate left
    """
    n_agents, n_items = mask.shape
    free = _free_pattern(n_agents, n_items, forbidden)
    if (mask.pattern & ~free).any():
        raise ValueError("Mask already contains forbidden pairs")

    pattern = mask.pattern.copy()
    rng = np.random.default_rng(seed)

    for axis_pattern, axis_free, kind in (
        (pattern, free, "agent"),
        (pattern.T, free.T, "item"),
    ):
        degrees = axis_pattern.sum(axis=1)
        for node in np.flatnonzero(degrees < d_min):
            candidates = np.flatnonzero(axis_free[node] & ~axis_pattern[node])
            need = int(d_min - degrees[node])
            if len(candidates) < need:
                raise InfeasibleError(
                    f"Cannot raise {kind} {int(node)} to degree {d_min}: "
                    f"only {len(candidates)} free pairs remain"
                )
            axis_pattern[node, rng.choice(candidates, size=need, replace=False)] = True

    agent_comp, item_comp = component_labels(pattern)
    while len(set(agent_comp.tolist()) | set(item_comp.tolist())) > 1:
        cross = free & ~pattern & (agent_comp[:, None] != item_comp[None, :])
        candidates = np.flatnonzero(cross.ravel())
        if len(candidates) == 0:
            raise InfeasibleError("Observation graph cannot be connected: no free bridging pair")
        i, j = divmod(int(rng.choice(candidates)), n_items)
        pattern[i, j] = True
        agent_comp, item_comp = component_labels(pattern)

    return ObservationMask(pattern=pattern)


def make_mask(
    n_agents: int,
    n_items: int,
    spec: SamplingSpec,
    forbidden: ObservationMask | None = None,
) -> tuple[ObservationMask, ConnectivityReport]:
    """Sample a training mask for ``spec`` and repair it.

    Args:
        n_agents: K
        n_items: J
        spec: Regime, its parameters, d_min and seed
        forbidden: Pairs that must never be observed (holdout, missing scores)

    Returns:
        Repaired mask and its connectivity report; ``repaired_pairs`` counts
        pairs added after regime sampling

    Raises:
        InfeasibleError: Some agent or item has fewer than d_min free pairs
    """
    free = _free_pattern(n_agents, n_items, forbidden)
    _check_feasible(free, spec.d_min)

    logger.info("mask_started", regime=spec.regime.value, label=spec.label(), seed=spec.seed)
    rng = np.random.default_rng(spec.seed)
    sampled = ObservationMask(pattern=_sample_pattern(free, spec, rng))
    repaired = repair_mask(
        sampled,
        d_min=spec.d_min,
        forbidden=ObservationMask(pattern=~free),
        seed=[spec.seed, 1],
    )
    added = repaired.observed_count - sampled.observed_count
    report = check_connectivity(repaired, d_min=spec.d_min, repaired_pairs=added)
    logger.info(
        "mask_complete",
        regime=spec.regime.value,
        sampled_pairs=sampled.observed_count,
        repaired_pairs=added,
        coverage=repaired.coverage,
        n_components=report.n_components,
    )
    return repaired, report
