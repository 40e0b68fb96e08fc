"""Rectangle deviation (discrete curl) on score matrices.

For agents i ≠ i′ and items j ≠ j′ the deviation is

    Δ = s_ij − s_i′j − s_ij′ + s_i′j′

which vanishes on every rectangle exactly when the matrix is additive.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np
import structlog

from ..errors import InfeasibleError, RectangleError
from ..models import CurlSummary, ObservationMask, ScoreMatrix

logger = structlog.get_logger(__name__)

MatrixLike = ScoreMatrix | np.ma.MaskedArray | np.ndarray

# Draw cap relative to the requested rectangle count
REJECTION_CAP = 100


class Rectangle(NamedTuple):
    """Agents (i, i2) and items (j, j2) spanning four cells."""

    i: int
    i2: int
    j: int
    j2: int


@dataclass(frozen=True)
class RectangleSet:
    """Column-oriented batch of rectangles."""

    i: np.ndarray
    i2: np.ndarray
    j: np.ndarray
    j2: np.ndarray

    def __len__(self) -> int:
        return len(self.i)

    def __iter__(self) -> Iterator[Rectangle]:
        for k in range(len(self)):
            yield self[k]

    def __getitem__(self, k: int) -> Rectangle:
        return Rectangle(int(self.i[k]), int(self.i2[k]), int(self.j[k]), int(self.j2[k]))

    @classmethod
    def from_rectangles(cls, rects: Sequence[Rectangle]) -> RectangleSet:
        arr = np.array([tuple(r) for r in rects], dtype=int).reshape(-1, 4)
        return cls(i=arr[:, 0], i2=arr[:, 1], j=arr[:, 2], j2=arr[:, 3])


def observed_view(m: MatrixLike) -> tuple[np.ndarray, np.ndarray]:
    """(values, observed) for a score matrix, masked array, or plain array (NaN = unobserved)."""
    if isinstance(m, ScoreMatrix):
        return m.values, m.mask.pattern
    if isinstance(m, np.ma.MaskedArray):
        return np.ma.getdata(m).astype(float), ~np.ma.getmaskarray(m)
    values = np.asarray(m, dtype=float)
    return values, np.isfinite(values)


def _as_rectangle_set(rects: RectangleSet | Sequence[Rectangle]) -> RectangleSet:
    if isinstance(rects, RectangleSet):
        return rects
    return RectangleSet.from_rectangles(rects)


def signed_curl(values: np.ndarray, rects: RectangleSet) -> np.ndarray:
    """Vectorized Δ without validation."""
    return (
        values[rects.i, rects.j]
        - values[rects.i2, rects.j]
        - values[rects.i, rects.j2]
        + values[rects.i2, rects.j2]
    )


def curl_values(m: MatrixLike, rects: RectangleSet | Sequence[Rectangle]) -> np.ndarray:
    """Signed Δ for every rectangle.

    Raises:
        RectangleError: A rectangle is degenerate, out of range or touches an unobserved cell
    """
    values, observed = observed_view(m)
    rs = _as_rectangle_set(rects)
    if len(rs) == 0:
        return np.zeros(0)

    n_agents, n_items = values.shape
    in_range = (
        (rs.i >= 0) & (rs.i < n_agents) & (rs.i2 >= 0) & (rs.i2 < n_agents)
        & (rs.j >= 0) & (rs.j < n_items) & (rs.j2 >= 0) & (rs.j2 < n_items)
    )
    if not in_range.all():
        bad = rs[int(np.flatnonzero(~in_range)[0])]
        raise RectangleError(f"Rectangle {tuple(bad)} outside a {n_agents}×{n_items} matrix")
    distinct = (rs.i != rs.i2) & (rs.j != rs.j2)
    if not distinct.all():
        bad = rs[int(np.flatnonzero(~distinct)[0])]
        raise RectangleError(f"Rectangle {tuple(bad)} repeats an agent or item position")
    valid = (
        observed[rs.i, rs.j] & observed[rs.i2, rs.j]
        & observed[rs.i, rs.j2] & observed[rs.i2, rs.j2]
    )
    if not valid.all():
        bad = rs[int(np.flatnonzero(~valid)[0])]
        raise RectangleError(f"Rectangle {tuple(bad)} touches an unobserved cell")
    return signed_curl(values, rs)


def curl(m: MatrixLike, r: Rectangle) -> float:
    """Signed deviation s_ij − s_i′j − s_ij′ + s_i′j′ of one rectangle."""
    return float(curl_values(m, [Rectangle(*r)])[0])


def admits_rectangle(pattern: np.ndarray) -> bool:
    """True when two agents share at least two observed items."""
    occ = pattern.astype(np.int64)
    shared = occ @ occ.T
    np.fill_diagonal(shared, 0)
    return bool(shared.size) and int(shared.max()) >= 2


def sample_rectangles(
    mask: ObservationMask | np.ndarray,
    n: int,
    seed: int = 0,
    rng: np.random.Generator | None = None,
) -> RectangleSet:
    """Draw ``n`` rectangles uniformly over those whose four cells are observed.

    Proposals pair two observed cells (i, j) and (i′, j′) drawn uniformly;
    each valid ordered rectangle corresponds to exactly one proposal, and a
    proposal is accepted when (i′, j) and (i, j′) are observed too.

    Args:
        mask: Observation pattern (positions may repeat agents or items)
        n: Number of rectangles
        seed: Seed for a fresh generator when ``rng`` is not given
        rng: Generator to draw from

    Returns:
        Rectangle batch, deterministic given the seed

    Raises:
        InfeasibleError: No valid rectangle exists, or fewer than ``n`` were
            accepted within the draw cap
    """
    pattern = mask.pattern if isinstance(mask, ObservationMask) else np.asarray(mask, dtype=bool)
    if n < 1:
        raise ValueError(f"Rectangle count must be positive, got {n}")
    if pattern.ndim != 2 or not admits_rectangle(pattern):
        raise InfeasibleError("Mask admits no rectangle with four observed cells")

    if rng is None:
        rng = np.random.default_rng(seed)
    rows, cols = np.nonzero(pattern)
    n_obs = len(rows)
    budget = REJECTION_CAP * n

    chunks: list[np.ndarray] = []
    accepted = 0
    drawn = 0
    while accepted < n and drawn < budget:
        size = min(budget - drawn, max(4 * (n - accepted), 1024))
        u = rng.integers(0, n_obs, size)
        v = rng.integers(0, n_obs, size)
        i, j = rows[u], cols[u]
        i2, j2 = rows[v], cols[v]
        ok = (i != i2) & (j != j2)
        ok &= pattern[i2, j] & pattern[i, j2]
        batch = np.stack([i[ok], i2[ok], j[ok], j2[ok]], axis=1)
        chunks.append(batch)
        accepted += len(batch)
        drawn += size

    if accepted < n:
        raise InfeasibleError(
            f"Only {accepted} of {n} valid rectangles found in {drawn} draws"
        )
    out = np.concatenate(chunks)[:n]
    return RectangleSet(i=out[:, 0], i2=out[:, 1], j=out[:, 2], j2=out[:, 3])


def curl_summary(m: MatrixLike, rects: RectangleSet | Sequence[Rectangle]) -> CurlSummary:
    """Median and P95 of |Δ| with the sorted |Δ| sample kept as ECDF support.

    Raises:
        RectangleError: ``rects`` is empty or invalid for ``m``
    """
    rs = _as_rectangle_set(rects)
    if len(rs) == 0:
        raise RectangleError("Cannot summarize an empty rectangle sample")
    magnitudes = np.abs(curl_values(m, rs))
    return CurlSummary(
        median=float(np.median(magnitudes)),
        p95=float(np.percentile(magnitudes, 95)),
        n_rectangles=len(rs),
        ecdf=tuple(np.sort(magnitudes).tolist()),
    )
