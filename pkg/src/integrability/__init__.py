"""Rectangle-deviation (curl) diagnostics and link ablation."""

from .ablation import (
    ADDITIVITY_THRESHOLD,
    ALL_LINKS,
    DEFAULT_N_BOOT,
    DEFAULT_N_RECT,
    additivity_verdict,
    curl_bootstrap,
    curl_link_ablation,
    normalize_links,
    prediction_curl,
    reconstruct_additive,
)
from .rectangles import (
    Rectangle,
    RectangleSet,
    admits_rectangle,
    curl,
    curl_summary,
    curl_values,
    sample_rectangles,
)

__all__ = [
    "ADDITIVITY_THRESHOLD",
    "ALL_LINKS",
    "DEFAULT_N_BOOT",
    "DEFAULT_N_RECT",
    "Rectangle",
    "RectangleSet",
    "additivity_verdict",
    "admits_rectangle",
    "curl",
    "curl_bootstrap",
    "curl_link_ablation",
    "curl_summary",
    "curl_values",
    "normalize_links",
    "prediction_curl",
    "reconstruct_additive",
    "sample_rectangles",
]
