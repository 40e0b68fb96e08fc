"""Additive estimator and baseline completion methods."""

from .clipped_linear import fit_clipped_linear, observation_weights, solve_additive
from .isotonic import IsotonicMap, fit_isotonic_calibrated, fit_isotonic_map
from .low_rank import fit_nuclear_norm, fit_svd_baseline, fit_uv, soft_impute
from .rasch import fit_rasch_link
from .registry import ESTIMATORS, EstimatorSpec, fit_method, get_estimator, list_methods

__all__ = [
    "ESTIMATORS",
    "EstimatorSpec",
    "IsotonicMap",
    "fit_clipped_linear",
    "fit_isotonic_calibrated",
    "fit_isotonic_map",
    "fit_method",
    "fit_nuclear_norm",
    "fit_rasch_link",
    "fit_svd_baseline",
    "fit_uv",
    "get_estimator",
    "list_methods",
    "observation_weights",
    "soft_impute",
    "solve_additive",
]
