"""Link transforms between the bounded score scale and an unbounded link scale.

Scores s in [-1, 1] are clamped to [-c, c] and rescaled to p = (s + 1) / 2
before probit or logit; identity returns the clamped score itself.
"""
from __future__ import annotations

import numpy as np
from scipy import special, stats

from ..models import LinkFunction, LinkKind, ObservationMask, ScoreMatrix
from ..models.scores import default_ids

LinkLike = LinkKind | LinkFunction | str


def to_link_scale(values: np.ndarray, link: LinkLike) -> np.ndarray:
    """Map raw scores elementwise onto the link scale."""
    link = LinkKind.parse(link)
    bound = link.clip_bound
    s = np.clip(np.asarray(values, dtype=float), -bound, bound)
    if link.function is LinkFunction.IDENTITY:
        return s
    p = (s + 1.0) / 2.0
    if link.function is LinkFunction.PROBIT:
        return stats.norm.ppf(p)
    return special.logit(p)


def from_link_scale(values: np.ndarray, link: LinkLike) -> np.ndarray:
    """Inverse of :func:`to_link_scale`; output lies in [-clip_bound, clip_bound]."""
    link = LinkKind.parse(link)
    bound = link.clip_bound
    t = np.asarray(values, dtype=float)
    if link.function is LinkFunction.IDENTITY:
        s = t
    elif link.function is LinkFunction.PROBIT:
        s = 2.0 * stats.norm.cdf(t) - 1.0
    else:
        s = 2.0 * special.expit(t) - 1.0
    return np.clip(s, -bound, bound)


def apply_link(m: ScoreMatrix, link: LinkLike) -> np.ma.MaskedArray:
    """Transform the observed cells of ``m``; unobserved cells stay masked.

    Args:
        m: Score matrix on the raw scale
        link: Link function, optionally with a custom clip bound

    Returns:
        Masked array on the link scale, masked where ``m`` is unobserved
    """
    transformed = np.where(m.mask.pattern, to_link_scale(m.values, link), 0.0)
    return np.ma.MaskedArray(transformed, mask=~m.mask.pattern)


def inverse_link(
    t: np.ndarray | np.ma.MaskedArray,
    link: LinkLike,
    like: ScoreMatrix | None = None,
) -> ScoreMatrix:
    """Map link-scale values back to a score matrix.

    Masked cells of ``t`` become unobserved. Labels are copied from ``like``
    when given.
    """
    if isinstance(t, np.ma.MaskedArray):
        observed = ~np.ma.getmaskarray(t)
        data = np.ma.getdata(t)
    else:
        data = np.asarray(t, dtype=float)
        observed = np.isfinite(data)
    if data.ndim != 2:
        raise ValueError(f"Expected a 2-dimensional array, got shape {data.shape}")

    values = np.where(observed, from_link_scale(np.where(observed, data, 0.0), link), 0.0)
    n_agents, n_items = values.shape
    return ScoreMatrix(
        values=values,
        mask=ObservationMask(pattern=observed),
        agent_ids=like.agent_ids if like is not None else default_ids("a", n_agents),
        item_ids=like.item_ids if like is not None else default_ids("q", n_items),
    )
