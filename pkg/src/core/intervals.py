"""Percentile bootstrap intervals."""
from __future__ import annotations

import numpy as np


def percentile_interval(
    samples: np.ndarray, estimate: float, level: float = 0.95
) -> tuple[float, float, bool]:
    """Percentile interval of ``samples`` widened to contain ``estimate``.

    NaN samples are ignored. The flag is set when widening was needed.

    Raises:
        ValueError: Every sample is NaN
    """
    values = np.asarray(samples, dtype=float)
    if values.size == 0 or np.isnan(values).all():
        raise ValueError("No finite bootstrap samples")
    tail = (1.0 - level) / 2.0 * 100.0
    lower, upper = (float(v) for v in np.nanpercentile(values, [tail, 100.0 - tail]))
    widened = not lower <= estimate <= upper
    return min(lower, estimate), max(upper, estimate), widened
