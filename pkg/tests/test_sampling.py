"""Tests for training-mask sampling and connectivity repair."""
import numpy as np
import pytest

from src.errors import InfeasibleError
from src.evaluation import make_holdout
from src.models import ObservationMask, Regime, SamplingSpec
from src.sampling import (
    bipartite_graph,
    check_connectivity,
    component_labels,
    count_components,
    make_mask,
    nlogn_target,
    repair_mask,
    target_pairs,
)

K, J = 30, 200

REGIME_SPECS = {
    "row": dict(regime="row", alpha=0.15),
    "column": dict(regime="column", beta=0.15),
    "hybrid": dict(regime="hybrid", alpha=0.4, beta=0.4),
    "nlogn": dict(regime="nlogn", C=0.5),
}


@pytest.fixture
def holdout() -> ObservationMask:
    return make_holdout(K, J, 0.2, seed=42).holdout


def block_diagonal() -> np.ndarray:
    pattern = np.zeros((4, 6), dtype=bool)
    pattern[:2, :3] = True
    pattern[2:, 3:] = True
    return pattern


class TestTargets:
    """Tests for requested pair counts."""

    def test_nlogn_operating_point(self):
        """K=30, J=200, C=1.6 asks for 2001 pairs (≈33% of 6000)."""
        assert nlogn_target(30, 200, 1.6) == 2001
        assert nlogn_target(30, 200, 1.6) / 6000 == pytest.approx(0.3335, abs=1e-4)

    def test_row_target(self):
        """Row regime α=0.30 asks for 60 items per agent."""
        spec = SamplingSpec(regime="row", alpha=0.3)
        assert target_pairs(K, J, spec) == 30 * 60

    def test_column_and_hybrid_targets(self):
        """Column takes round(β·K) per item; hybrid the expected α·β·K·J."""
        assert target_pairs(K, J, SamplingSpec(regime="column", beta=0.3)) == 200 * 9
        assert target_pairs(K, J, SamplingSpec(regime="hybrid", alpha=0.5, beta=0.4)) == 1200


class TestCheckConnectivity:
    """Tests for connectivity diagnostics."""

    def test_full_mask(self):
        """A full mask has degrees (J, K) and one component."""
        report = check_connectivity(ObservationMask.full(5, 7))
        assert (report.min_agent_degree, report.min_item_degree) == (7, 5)
        assert report.n_components == 1
        assert report.satisfied

    def test_block_diagonal_has_two_components(self):
        """Two disjoint blocks give two components."""
        report = check_connectivity(block_diagonal(), d_min=2)
        assert report.n_components == 2
        assert not report.satisfied

    def test_isolated_nodes_count_as_components(self):
        """An unobserved agent is its own component."""
        pattern = np.ones((3, 3), dtype=bool)
        pattern[1] = False
        assert count_components(pattern) == 2

    def test_bipartite_graph_shape(self):
        """One node per agent and item, one edge per observed cell."""
        graph = bipartite_graph(block_diagonal())
        assert graph.number_of_nodes() == 10
        assert graph.number_of_edges() == 12

    def test_component_labels(self):
        """Agents and items in one block share a label."""
        agent_comp, item_comp = component_labels(block_diagonal())
        assert agent_comp[0] == agent_comp[1] == item_comp[0]
        assert agent_comp[2] == item_comp[5]
        assert agent_comp[0] != agent_comp[2]


class TestRepairMask:
    """Tests for degree and connectivity repair."""

    def test_empty_mask_repaired(self):
        """An empty 5×5 mask with d_min=1 becomes connected with ≥ 5 pairs."""
        repaired = repair_mask(ObservationMask.empty(5, 5), d_min=1, seed=0)
        report = check_connectivity(repaired, d_min=1)

        assert repaired.observed_count >= 5
        assert report.satisfied

    def test_satisfied_mask_unchanged(self):
        """A mask already meeting the constraints is a fixed point."""
        mask = ObservationMask.full(4, 4)
        assert repair_mask(mask, d_min=3, seed=1) == mask

    def test_idempotent(self):
        """Repairing twice equals repairing once."""
        sparse = ObservationMask(pattern=np.random.default_rng(0).random((8, 12)) < 0.1)
        once = repair_mask(sparse, d_min=2, seed=3)
        assert repair_mask(once, d_min=2, seed=9) == once

    def test_bridges_components(self):
        """A block-diagonal mask is joined into one component."""
        repaired = repair_mask(ObservationMask(pattern=block_diagonal()), d_min=1, seed=0)
        assert count_components(repaired.pattern) == 1

    def test_starved_agent(self):
        """An agent whose whole row is forbidden cannot be repaired."""
        forbidden = np.zeros((4, 5), dtype=bool)
        forbidden[2] = True
        with pytest.raises(InfeasibleError, match="agent 2"):
            repair_mask(
                ObservationMask.empty(4, 5), d_min=1, forbidden=ObservationMask(pattern=forbidden)
            )

    def test_forbidden_pairs_in_input(self):
        """The input mask may not contain forbidden pairs."""
        with pytest.raises(ValueError, match="forbidden"):
            repair_mask(
                ObservationMask.full(2, 2), d_min=1, forbidden=ObservationMask.full(2, 2)
            )


class TestMakeMask:
    """Tests for regime sampling."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize("regime", list(REGIME_SPECS))
    def test_invariants(self, regime, seed, holdout):
        """Masks avoid the holdout, reach d_min=3 and are connected."""
        spec = SamplingSpec(seed=seed, **REGIME_SPECS[regime])
        mask, report = make_mask(K, J, spec, forbidden=holdout)

        assert not mask.overlaps(holdout)
        assert report.satisfied
        assert report == check_connectivity(mask, 3, report.repaired_pairs)

    def test_nlogn_count(self, holdout):
        """nlogn draws exactly the target; repair explains any excess."""
        spec = SamplingSpec(regime="nlogn", C=1.6, seed=5)
        mask, report = make_mask(K, J, spec, forbidden=holdout)

        assert mask.observed_count == 2001 + report.repaired_pairs
        assert mask.coverage == pytest.approx(2001 / 6000, abs=0.01)

    def test_row_regime_degrees(self):
        """Row sampling gives every agent at least round(α·J) items."""
        spec = SamplingSpec(regime="row", alpha=0.3, seed=1)
        mask, report = make_mask(K, J, spec)

        assert mask.pattern.sum(axis=1).min() >= 60
        assert mask.observed_count == 1800 + report.repaired_pairs

    def test_column_regime_degrees(self):
        """Column sampling gives every item at least round(β·K) agents."""
        spec = SamplingSpec(regime="column", beta=0.3, seed=1)
        mask, _ = make_mask(K, J, spec)
        assert mask.pattern.sum(axis=0).min() >= 9

    def test_deterministic(self, holdout):
        """Same inputs, same mask; another seed differs."""
        spec = SamplingSpec(regime="hybrid", alpha=0.5, beta=0.5, seed=8)
        a, _ = make_mask(K, J, spec, forbidden=holdout)
        b, _ = make_mask(K, J, spec, forbidden=holdout)
        c, _ = make_mask(K, J, spec.model_copy(update={"seed": 9}), forbidden=holdout)

        assert a == b
        assert a != c

    def test_infeasible_d_min(self):
        """A starved row is reported before sampling."""
        forbidden = np.zeros((5, 10), dtype=bool)
        forbidden[3, 2:] = True
        with pytest.raises(InfeasibleError, match=r"agents \[3\]"):
            make_mask(
                5,
                10,
                SamplingSpec(regime="nlogn", C=1.0),
                forbidden=ObservationMask(pattern=forbidden),
            )

    def test_forbidden_shape(self):
        """Forbidden mask must match the dimensions."""
        with pytest.raises(ValueError, match="does not match"):
            make_mask(4, 4, SamplingSpec(regime="nlogn", C=1.0), ObservationMask.full(3, 3))

    def test_regime_enum(self):
        """All four regimes are available."""
        assert {r.value for r in Regime} == set(REGIME_SPECS)
