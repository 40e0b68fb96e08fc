"""Shared fixtures."""
from pathlib import Path

import numpy as np
import pytest

from src.data_io import SyntheticDataset, generate_synthetic
from src.models import AdditiveParams, DistributionSpec, ScoreMatrix, SyntheticSpec

FIXTURES = Path(__file__).parent / "fixtures"


def additive_values(theta, b) -> np.ndarray:
    return np.asarray(theta, dtype=float)[:, None] - np.asarray(b, dtype=float)[None, :]


def noiseless_spec(n_agents: int = 30, n_items: int = 200, seed: int = 0) -> SyntheticSpec:
    """Exactly additive data with |s| ≤ 0.8, so nothing is clamped."""
    return SyntheticSpec(
        K=n_agents,
        J=n_items,
        theta_dist=DistributionSpec(kind="uniform", low=-0.4, high=0.5),
        b_dist=DistributionSpec(kind="uniform", low=-0.3, high=0.3),
        noise_sd=0.0,
        saturation_push=0.0,
        n_faithful=0,
        n_problematic=0,
        seed=seed,
    )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def small_additive() -> tuple[ScoreMatrix, AdditiveParams]:
    """Fully observed 4×6 additive matrix and its parameters."""
    params = AdditiveParams(
        theta=[0.4, 0.1, -0.2, 0.3],
        b=[0.1, -0.2, 0.0, 0.25, -0.05, -0.1],
    ).gauge_fixed()
    return ScoreMatrix.from_array(additive_values(params.theta, params.b)), params


@pytest.fixture
def noiseless() -> SyntheticDataset:
    return generate_synthetic(noiseless_spec())


@pytest.fixture
def synthetic_small() -> SyntheticDataset:
    """Calibrated 12×40 synthetic matrix with labels."""
    return generate_synthetic(
        SyntheticSpec(K=12, J=40, noise_sd=0.1, n_faithful=3, n_problematic=5, seed=7)
    )


@pytest.fixture
def synthetic_default() -> SyntheticDataset:
    """Calibrated 30×200 synthetic matrix."""
    return generate_synthetic(SyntheticSpec(seed=11))
