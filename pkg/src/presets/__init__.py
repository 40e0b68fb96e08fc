"""Named sweep presets."""

from .sweep_presets import (
    BASELINE_METHODS,
    OPERATING_POINT_C,
    SWEEP_PRESETS,
    SweepPreset,
    get_preset,
    list_presets,
)

__all__ = [
    "BASELINE_METHODS",
    "OPERATING_POINT_C",
    "SWEEP_PRESETS",
    "SweepPreset",
    "get_preset",
    "list_presets",
]
