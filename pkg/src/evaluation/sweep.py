"""Coverage sweeps: sampling specs × methods, each evaluated on the fixed holdout."""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Sequence

import structlog

from ..errors import ScoreRecoveryError
from ..models import (
    AgentLabels,
    FitConfig,
    ObservationMask,
    SamplingSpec,
    ScoreMatrix,
    SweepRow,
)
from ..parallel import parallel_map
from ..sampling import make_mask, target_pairs
from .bootstrap import bootstrap_eval

logger = structlog.get_logger(__name__)

DENSE_REGIME = "dense"


@dataclass(frozen=True)
class SweepCell:
    """One unit of sweep work; ``spec`` is None for the dense reference row."""

    spec: SamplingSpec | None
    method: str


@dataclass(frozen=True)
class SweepContext:
    matrix: ScoreMatrix
    holdout: ObservationMask
    cfg: FitConfig
    labels: AgentLabels | None
    n_boot: int
    seed: int


def _row_fields(spec: SamplingSpec | None) -> dict:
    if spec is None:
        return {"regime": DENSE_REGIME}
    return {
        "regime": spec.regime.value,
        "alpha": spec.alpha,
        "beta": spec.beta,
        "c": spec.c,
        "d_min": spec.d_min,
    }


def run_cell(cell: SweepCell, ctx: SweepContext) -> SweepRow:
    """Build the cell's mask, fit and evaluate; failures become error rows."""
    m = ctx.matrix
    fields = _row_fields(cell.spec)
    forbidden = ctx.holdout.union(m.mask.complement())
    try:
        if cell.spec is None:
            train = forbidden.complement()
            fields["target_pairs"] = train.observed_count
            fields["repaired_pairs"] = 0
        else:
            train, connectivity = make_mask(m.n_agents, m.n_items, cell.spec, forbidden)
            fields["target_pairs"] = target_pairs(m.n_agents, m.n_items, cell.spec)
            fields["repaired_pairs"] = connectivity.repaired_pairs
        report = bootstrap_eval(
            m,
            ctx.holdout,
            train,
            method=cell.method,
            n_boot=ctx.n_boot,
            seed=ctx.seed,
            cfg=ctx.cfg,
            labels=ctx.labels,
            n_jobs=1,
        )
    except (ScoreRecoveryError, ValueError) as e:
        logger.warning(
            "sweep_cell_failed", regime=fields["regime"], method=cell.method, error=str(e)
        )
        return SweepRow(method=cell.method, error=f"{type(e).__name__}: {e}", **fields)
    return SweepRow(method=cell.method, report=report, **fields)


def sweep(
    m: ScoreMatrix,
    holdout: ObservationMask,
    specs: Sequence[SamplingSpec],
    methods: Sequence[str] = ("clipped_linear",),
    seed: int = 0,
    cfg: FitConfig | None = None,
    labels: AgentLabels | None = None,
    n_boot: int = 0,
    include_dense: bool = True,
    n_jobs: int | None = 1,
) -> list[SweepRow]:
    """Evaluate every (spec, method) pair, plus a dense row per method.

    Forbidden pairs are the holdout plus cells missing from ``m``. Rows come
    back in (dense rows, then specs in order) × methods order regardless of
    ``n_jobs``; a failing cell is recorded with its error and the sweep
    continues.
    """
    cfg = cfg or FitConfig()
    cells: list[SweepCell] = []
    if include_dense:
        cells.extend(SweepCell(spec=None, method=name) for name in methods)
    cells.extend(SweepCell(spec=spec, method=name) for spec in specs for name in methods)

    ctx = SweepContext(
        matrix=m, holdout=holdout, cfg=cfg, labels=labels, n_boot=n_boot, seed=seed
    )
    logger.info("sweep_started", n_cells=len(cells), n_boot=n_boot, n_jobs=n_jobs)
    rows = parallel_map(partial(run_cell, ctx=ctx), cells, n_jobs)
    n_failed = sum(1 for row in rows if row.error)
    logger.info("sweep_complete", n_cells=len(rows), n_failed=n_failed)
    return rows
