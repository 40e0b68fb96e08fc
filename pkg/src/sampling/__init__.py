"""Sparse training-mask generation and connectivity repair."""

from .connectivity import (
    bipartite_graph,
    check_connectivity,
    component_labels,
    count_components,
)
from .masks import make_mask, nlogn_target, repair_mask, target_pairs

__all__ = [
    "bipartite_graph",
    "check_connectivity",
    "component_labels",
    "count_components",
    "make_mask",
    "nlogn_target",
    "repair_mask",
    "target_pairs",
]
