"""Additive prediction and link-transform primitives."""

from .additive import predict, predict_values
from .intervals import percentile_interval
from .links import apply_link, from_link_scale, inverse_link, to_link_scale

__all__ = [
    "apply_link",
    "from_link_scale",
    "inverse_link",
    "percentile_interval",
    "predict",
    "predict_values",
    "to_link_scale",
]
