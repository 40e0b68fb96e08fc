"""Tests for the holdout protocol, metrics, bootstrap evaluation and sweeps."""
from itertools import combinations

import numpy as np
import pytest

from src.errors import LeakageError, UndefinedMetricError
from src.estimators import fit_clipped_linear
from src.evaluation import (
    DENSE_REGIME,
    agent_abilities,
    bootstrap_eval,
    compare_judges,
    holdout_rmse,
    make_holdout,
    per_agent_scores,
    rank_metrics,
    ranking_auc,
    sweep,
    with_holdout_scores,
)
from src.models import (
    AdditiveParams,
    AgentLabels,
    AgentTag,
    FitResult,
    ObservationMask,
    SamplingSpec,
    ScoreMatrix,
)
from src.sampling import make_mask


def average_ranks(x: np.ndarray) -> np.ndarray:
    return np.array([(x < v).sum() + ((x == v).sum() + 1) / 2 for v in x])


def brute_spearman(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.corrcoef(average_ranks(a), average_ranks(b))[0, 1])


def brute_kendall_b(a: np.ndarray, b: np.ndarray) -> float:
    concordant = discordant = ties_a = ties_b = 0
    for i, j in combinations(range(len(a)), 2):
        da, db = np.sign(a[i] - a[j]), np.sign(b[i] - b[j])
        if da == 0 and db == 0:
            continue
        if da == 0:
            ties_a += 1
        elif db == 0:
            ties_b += 1
        elif da == db:
            concordant += 1
        else:
            discordant += 1
    untied_a = concordant + discordant + ties_b
    untied_b = concordant + discordant + ties_a
    return (concordant - discordant) / np.sqrt(untied_a * untied_b)


def brute_auc(scores: np.ndarray, labels: AgentLabels) -> float:
    pos = scores[labels.index_of(AgentTag.FAITHFUL)]
    neg = scores[labels.index_of(AgentTag.PROBLEMATIC)]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def fit_with(completed: np.ndarray, m: ScoreMatrix) -> FitResult:
    return FitResult(
        method_tag="fixed", completed=completed, agent_ids=m.agent_ids, item_ids=m.item_ids
    )


@pytest.fixture
def split():
    return make_holdout(12, 40, 0.2, seed=3)


class TestHoldout:
    """Tests for the holdout split."""

    def test_size(self):
        """20% of 30×200 is exactly 1200 pairs."""
        s = make_holdout(30, 200, 0.2, seed=0)
        assert s.holdout.observed_count == 1200
        assert s.training_pool.observed_count == 4800
        assert not s.holdout.overlaps(s.training_pool)

    def test_deterministic(self):
        """Same seed, same split."""
        assert make_holdout(10, 20, seed=5).holdout == make_holdout(10, 20, seed=5).holdout
        assert make_holdout(10, 20, seed=5).holdout != make_holdout(10, 20, seed=6).holdout

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.1])
    def test_fraction_bounds(self, fraction):
        """Fraction must lie strictly inside (0, 1)."""
        with pytest.raises(ValueError, match="fraction"):
            make_holdout(5, 5, fraction)


class TestHoldoutRmse:
    """Tests for holdout RMSE."""

    def test_perfect_predictions(self, synthetic_small, split):
        """Predicting the observed scores gives zero error."""
        m = synthetic_small.matrix
        assert holdout_rmse(fit_with(m.values, m), m, split.holdout) == 0.0

    def test_constant_zero_predictor(self, synthetic_small, split):
        """A zero predictor has RMSE equal to the holdout root mean square."""
        m = synthetic_small.matrix
        rows, cols = split.holdout.cells()
        expected = np.sqrt(np.mean(m.values[rows, cols] ** 2))
        assert holdout_rmse(np.zeros(m.shape), m, split.holdout) == pytest.approx(expected)

    def test_unobserved_holdout_cells_skipped(self):
        """Only holdout cells with scores count; none is an error."""
        m = ScoreMatrix.from_array([[0.2, np.nan], [0.4, 0.0]])
        holdout = ObservationMask(pattern=[[0, 1], [1, 0]])
        assert holdout_rmse(np.zeros((2, 2)), m, holdout) == pytest.approx(0.4)

        with pytest.raises(UndefinedMetricError):
            holdout_rmse(np.zeros((2, 2)), m, ObservationMask(pattern=[[0, 1], [0, 0]]))

    def test_shape_mismatch(self, synthetic_small, split):
        """Predictions must match the matrix shape."""
        with pytest.raises(ValueError, match="does not match"):
            holdout_rmse(np.zeros((2, 2)), synthetic_small.matrix, split.holdout)

    def test_with_holdout_scores(self):
        """Holdout cells take the test matrix, the rest the training matrix."""
        train = ScoreMatrix.from_array([[0.1, np.nan], [0.3, 0.4]])
        test = ScoreMatrix.from_array([[np.nan, 0.9], [np.nan, np.nan]])
        holdout = ObservationMask(pattern=[[0, 1], [0, 0]])
        merged = with_holdout_scores(train, test, holdout)

        assert merged.mask.pattern.all()
        np.testing.assert_allclose(merged.values, [[0.1, 0.9], [0.3, 0.4]])

    def test_with_holdout_scores_label_mismatch(self):
        """Both matrices must share labels."""
        train = ScoreMatrix.from_array([[0.1]])
        test = ScoreMatrix.from_array([[0.1]], agent_ids=["other"])
        with pytest.raises(ValueError, match="labels"):
            with_holdout_scores(train, test, ObservationMask.full(1, 1))


class TestRankMetrics:
    """Tests for Spearman ρ and Kendall τ-b."""

    def test_identical(self):
        """Identical vectors give (1, 1)."""
        assert rank_metrics([1, 2, 3, 4], [1, 2, 3, 4]) == pytest.approx((1.0, 1.0))

    def test_reversed(self):
        """Reversed vectors give (−1, −1)."""
        assert rank_metrics([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx((-1.0, -1.0))

    def test_one_swap(self):
        """(1,2,3,4) vs (1,2,4,3) gives Spearman 0.8 and Kendall 2/3."""
        rho, tau = rank_metrics([1, 2, 3, 4], [1, 2, 4, 3])
        assert rho == pytest.approx(0.8)
        assert tau == pytest.approx(2 / 3)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_matches_pair_counting_with_ties(self, seed):
        """Tie-aware results match brute-force oracles."""
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 5, 15).astype(float)
        b = rng.integers(0, 5, 15).astype(float)
        rho, tau = rank_metrics(a, b)

        assert rho == pytest.approx(brute_spearman(a, b), abs=1e-12)
        assert tau == pytest.approx(brute_kendall_b(a, b), abs=1e-12)

    def test_constant_vector(self):
        """A constant vector has no rank correlation."""
        with pytest.raises(UndefinedMetricError):
            rank_metrics([1, 1, 1], [1, 2, 3])

    def test_length_checks(self):
        """Vectors must have equal length ≥ 2."""
        with pytest.raises(ValueError):
            rank_metrics([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            rank_metrics([1], [1])


class TestRankingAuc:
    """Tests for the ranking AUC."""

    @pytest.fixture
    def labels(self) -> AgentLabels:
        return AgentLabels.from_mapping(
            {"a0": "faithful", "a1": "faithful", "a2": "problematic", "a3": "problematic"},
            ["a0", "a1", "a2", "a3", "a4"],
        )

    def test_perfect_separation(self, labels):
        """Faithful scores above all problematic scores give 1."""
        assert ranking_auc([0.9, 0.8, 0.1, 0.2, 5.0], labels) == 1.0

    def test_ties_count_half(self, labels):
        """All-equal scores give 0.5."""
        assert ranking_auc([0.3, 0.3, 0.3, 0.3, 0.3], labels) == 0.5

    def test_invariant_under_increasing_transform(self, labels):
        """3x + 1 and exp leave the AUC unchanged."""
        scores = np.array([0.2, -0.1, 0.0, -0.1, 0.4])
        base = ranking_auc(scores, labels)

        assert base == pytest.approx(brute_auc(scores, labels))
        assert ranking_auc(3 * scores + 1, labels) == base
        assert ranking_auc(np.exp(scores), labels) == base

    def test_missing_class(self):
        """Both classes are required."""
        labels = AgentLabels.from_mapping({"a0": "faithful"}, ["a0", "a1"])
        with pytest.raises(UndefinedMetricError):
            ranking_auc([0.1, 0.2], labels)

    def test_length_mismatch(self, labels):
        """One score per labelled agent."""
        with pytest.raises(ValueError):
            ranking_auc([0.1, 0.2], labels)


class TestFitSummaries:
    """Tests for per-agent summaries and judge comparison."""

    def test_per_agent_scores(self, small_additive):
        """Per-agent score is the row mean of the completed matrix."""
        m, _ = small_additive
        fit = fit_with(m.values, m)
        np.testing.assert_allclose(per_agent_scores(fit), m.values.mean(axis=1))
        np.testing.assert_allclose(agent_abilities(fit), m.values.mean(axis=1))

    def test_abilities_from_params(self, small_additive):
        """Additive fits report θ as abilities."""
        m, _ = small_additive
        fit = fit_clipped_linear(m)
        np.testing.assert_array_equal(agent_abilities(fit), fit.params.theta)

    def test_compare_identical_judges(self):
        """Two identical fits agree perfectly."""
        params = AdditiveParams(theta=[0.1, 0.3, -0.2], b=[0.0, 0.2, -0.1, 0.05])
        agreement = compare_judges(params, params)

        assert agreement.n_shared_agents == 3
        assert agreement.agent_spearman == pytest.approx(1.0)
        assert agreement.item_kendall == pytest.approx(1.0)

    def test_compare_uses_shared_labels(self):
        """Only agents and items present in both fits are compared."""
        a = AdditiveParams(
            theta=[0.1, 0.3, -0.2], b=[0.0, 0.2, -0.1], agent_ids=("x", "y", "z")
        )
        b = AdditiveParams(
            theta=[0.5, -0.4, 0.7, 0.0], b=[0.1, 0.3, -0.2], agent_ids=("y", "z", "w", "x")
        )
        agreement = compare_judges(a, b)

        assert agreement.n_shared_agents == 3
        assert agreement.agent_spearman == pytest.approx(1.0)


class TestBootstrapEval:
    """Tests for bootstrap evaluation."""

    @pytest.fixture
    def train(self, synthetic_small, split) -> ObservationMask:
        spec = SamplingSpec(regime="nlogn", C=1.6, seed=0)
        mask, _ = make_mask(12, 40, spec, forbidden=split.holdout)
        return mask

    def test_intervals_contain_point_estimates(self, synthetic_small, split, train):
        """Every reported interval contains its point estimate."""
        report = bootstrap_eval(
            synthetic_small.matrix,
            split.holdout,
            train,
            n_boot=20,
            seed=1,
            labels=synthetic_small.labels,
        )

        assert report.n_boot == 20
        assert set(report.ci) == {"holdout_rmse", "spearman_rho", "kendall_tau", "ranking_auc"}
        for name, interval in report.ci.items():
            assert interval.lower <= report.metric(name) <= interval.upper
        assert report.ranking_auc is not None

    def test_point_metrics_match_direct_fit(self, synthetic_small, split, train):
        """Point RMSE equals a plain fit on the training mask."""
        m = synthetic_small.matrix
        report = bootstrap_eval(m, split.holdout, train, n_boot=0)
        fit = fit_clipped_linear(m.restrict(train))

        assert report.ci == {}
        assert report.holdout_rmse == pytest.approx(holdout_rmse(fit, m, split.holdout))
        assert report.realized_coverage == pytest.approx(train.coverage)
        assert report.n_train == train.observed_count
        assert report.n_holdout_evaluated == split.holdout.observed_count
        assert report.relative_rmse_increase == pytest.approx(
            report.holdout_rmse / report.reference_rmse - 1.0
        )

    def test_dense_training_matches_reference(self, synthetic_small, split):
        """Training on the whole pool reproduces the dense reference."""
        report = bootstrap_eval(
            synthetic_small.matrix, split.holdout, split.training_pool, n_boot=0
        )
        assert report.holdout_rmse == pytest.approx(report.reference_rmse)
        assert report.spearman_rho == pytest.approx(1.0)

    def test_deterministic(self, synthetic_small, split, train):
        """Same seed, same intervals."""
        a = bootstrap_eval(synthetic_small.matrix, split.holdout, train, n_boot=5, seed=4)
        b = bootstrap_eval(synthetic_small.matrix, split.holdout, train, n_boot=5, seed=4)
        assert a == b

    def test_leakage_rejected(self, synthetic_small, split):
        """A training mask touching the holdout is refused."""
        with pytest.raises(LeakageError):
            bootstrap_eval(
                synthetic_small.matrix, split.holdout, ObservationMask.full(12, 40), n_boot=0
            )

    def test_labels_must_cover_agents(self, synthetic_small, split, train):
        """Labels for another agent set are rejected."""
        labels = AgentLabels.from_mapping({"x": "faithful"}, ["x"])
        with pytest.raises(ValueError, match="Labels"):
            bootstrap_eval(synthetic_small.matrix, split.holdout, train, n_boot=0, labels=labels)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_sparse_rank_agreement(self, seed):
        """At ~33% coverage the sparse abilities rank like the dense ones."""
        from src.data_io import generate_synthetic
        from src.models import SyntheticSpec

        data = generate_synthetic(SyntheticSpec(seed=seed))
        holdout = make_holdout(30, 200, 0.2, seed=seed).holdout
        train, _ = make_mask(
            30, 200, SamplingSpec(regime="nlogn", C=1.6, seed=seed), forbidden=holdout
        )
        report = bootstrap_eval(data.matrix, holdout, train, n_boot=0)

        assert report.spearman_rho >= 0.95
        assert report.realized_coverage == pytest.approx(1 / 3, abs=0.01)

    def test_interval_width_shrinks_with_coverage(self):
        """Mean RMSE interval width falls as coverage rises from ~15% to ~75%."""
        from src.data_io import generate_synthetic
        from src.models import SyntheticSpec

        widths = {c: [] for c in (0.72, 1.92, 3.6)}
        coverages = {c: [] for c in widths}
        for seed in (0, 1):
            data = generate_synthetic(SyntheticSpec(seed=seed))
            holdout = make_holdout(30, 200, 0.2, seed=seed).holdout
            for c in widths:
                train, _ = make_mask(
                    30, 200, SamplingSpec(regime="nlogn", C=c, seed=seed), forbidden=holdout
                )
                report = bootstrap_eval(data.matrix, holdout, train, n_boot=40, seed=seed)
                interval = report.ci["holdout_rmse"]
                widths[c].append(interval.upper - interval.lower)
                coverages[c].append(report.realized_coverage)

        mean_widths = [np.mean(widths[c]) for c in widths]
        mean_coverages = [np.mean(coverages[c]) for c in coverages]
        assert mean_coverages[0] < 0.2 and mean_coverages[-1] > 0.7
        assert mean_widths[0] > mean_widths[1] > mean_widths[2]


class TestSweep:
    """Tests for regime sweeps."""

    def test_row_order_and_dense_rows(self, synthetic_small, split):
        """Dense rows come first, then specs × methods in order."""
        specs = [
            SamplingSpec(regime="nlogn", C=1.0),
            SamplingSpec(regime="row", alpha=0.45),
        ]
        rows = sweep(
            synthetic_small.matrix,
            split.holdout,
            specs,
            methods=("clipped_linear", "svd"),
        )

        assert [(r.regime, r.method) for r in rows] == [
            (DENSE_REGIME, "clipped_linear"),
            (DENSE_REGIME, "svd"),
            ("nlogn", "clipped_linear"),
            ("nlogn", "svd"),
            ("row", "clipped_linear"),
            ("row", "svd"),
        ]
        dense = rows[0].report
        assert dense.holdout_rmse == pytest.approx(dense.reference_rmse)
        assert dense.realized_coverage == pytest.approx(0.8)
        assert all(r.error is None for r in rows)

    def test_failed_cell_recorded(self, synthetic_small, split):
        """An infeasible spec becomes an error row and the sweep continues."""
        specs = [
            SamplingSpec(regime="nlogn", C=1.0, d_min=100),
            SamplingSpec(regime="nlogn", C=1.0),
        ]
        rows = sweep(synthetic_small.matrix, split.holdout, specs, include_dense=False)

        assert len(rows) == 2
        assert rows[0].error.startswith("InfeasibleError")
        assert rows[0].report is None
        assert rows[1].report is not None

    def test_parallel_matches_inline(self, synthetic_small, split):
        """Worker count does not change the rows."""
        specs = [SamplingSpec(regime="hybrid", alpha=0.6, beta=0.6)]
        inline = sweep(synthetic_small.matrix, split.holdout, specs, n_jobs=1)
        pooled = sweep(synthetic_small.matrix, split.holdout, specs, n_jobs=2)
        assert inline == pooled
