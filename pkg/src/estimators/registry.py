"""Estimator registry: method name → fitting function.

Provides the estimators compared in the baseline table:
- clipped_linear: additive model on raw scores (the primary estimator)
- isotonic: clipped-linear with monotone calibration of predictions
- rasch_probit / rasch_logit: additive model in link space
- nuclear_norm: soft-impute completion
- svd: mean-imputed truncated SVD
- uv: unconstrained rank-r factorization
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..models import FitConfig, FitResult, LinkFunction, ScoreMatrix
from .clipped_linear import fit_clipped_linear
from .isotonic import fit_isotonic_calibrated
from .low_rank import fit_nuclear_norm, fit_svd_baseline, fit_uv
from .rasch import fit_rasch_link


class EstimatorSpec(BaseModel):
    """Registered estimator."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    version: str = "1.0"
    description: str
    additive: bool
    link: LinkFunction | None = None
    fit: Callable[..., FitResult]


ESTIMATORS: dict[str, EstimatorSpec] = {
    "clipped_linear": EstimatorSpec(
        name="clipped_linear",
        description="Ridge least-squares θ_i − b_j on raw scores, clamped predictions",
        additive=True,
        link=LinkFunction.IDENTITY,
        fit=fit_clipped_linear,
    ),
    "isotonic": EstimatorSpec(
        name="isotonic",
        description="Clipped-linear followed by a monotone (PAVA) calibration map",
        additive=True,
        fit=fit_isotonic_calibrated,
    ),
    "rasch_probit": EstimatorSpec(
        name="rasch_probit",
        description="Additive fit on probit-transformed scores, mapped back to raw scale",
        additive=True,
        link=LinkFunction.PROBIT,
        fit=fit_rasch_link,
    ),
    "rasch_logit": EstimatorSpec(
        name="rasch_logit",
        description="Additive fit on logit-transformed scores, mapped back to raw scale",
        additive=True,
        link=LinkFunction.LOGIT,
        fit=fit_rasch_link,
    ),
    "nuclear_norm": EstimatorSpec(
        name="nuclear_norm",
        description="Soft-impute with singular-value soft-thresholding",
        additive=False,
        fit=fit_nuclear_norm,
    ),
    "svd": EstimatorSpec(
        name="svd",
        description="Global-mean imputation then rank-r truncated SVD",
        additive=False,
        fit=fit_svd_baseline,
    ),
    "uv": EstimatorSpec(
        name="uv",
        description="Alternating ridge least squares S ≈ U Vᵀ without additive constraint",
        additive=False,
        fit=fit_uv,
    ),
}


def list_methods() -> list[dict[str, str | bool]]:
    """List registered estimators with their descriptions."""
    return [
        {"name": spec.name, "description": spec.description, "additive": spec.additive}
        for spec in ESTIMATORS.values()
    ]


def get_estimator(name: str) -> EstimatorSpec:
    """Look up an estimator by name.

    Raises:
        ValueError: Unknown method name
    """
    if name not in ESTIMATORS:
        available = ", ".join(ESTIMATORS.keys())
        raise ValueError(f"Unknown method '{name}'. Available: {available}")
    return ESTIMATORS[name]


def fit_method(
    name: str,
    m: ScoreMatrix,
    cfg: FitConfig | None = None,
    weights: np.ndarray | None = None,
) -> FitResult:
    """Fit ``m`` with the named estimator; link-space methods override ``cfg.link``."""
    spec = get_estimator(name)
    cfg = cfg or FitConfig()
    if spec.link is not None and spec.link is not cfg.link.function:
        cfg = cfg.with_link(spec.link)
    return spec.fit(m, cfg, weights)
