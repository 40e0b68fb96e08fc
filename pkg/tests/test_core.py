"""Tests for additive prediction, link transforms and percentile intervals."""
import numpy as np
import pytest

from src.core import (
    apply_link,
    from_link_scale,
    inverse_link,
    percentile_interval,
    predict,
    predict_values,
    to_link_scale,
)
from src.models import AdditiveParams, LinkKind, ScoreMatrix


class TestPredict:
    """Tests for additive prediction."""

    def test_predict_two_by_two(self):
        """θ=(0.5, −0.5), b=(0.2, −0.2) gives [[0.3, 0.7], [−0.7, −0.3]]."""
        params = AdditiveParams(theta=[0.5, -0.5], b=[0.2, -0.2])
        m = predict(params)

        np.testing.assert_allclose(m.values, [[0.3, 0.7], [-0.7, -0.3]], atol=1e-15)
        assert m.mask.coverage == 1.0
        assert m.agent_ids == params.agent_ids

    def test_predictions_are_clamped(self):
        """Out-of-range predictions are clamped to ±1."""
        params = AdditiveParams(theta=[0.9, -0.9], b=[-0.5, 0.5])
        np.testing.assert_allclose(predict(params).values, [[1.0, 0.4], [-0.4, -1.0]])

    def test_unclipped_predictions_kept(self):
        """Without clipping, out-of-range predictions are returned as computed."""
        params = AdditiveParams(theta=[0.9, -0.9], b=[-0.5, 0.5])
        m = predict(params, clip=False)

        np.testing.assert_allclose(m.values, [[1.4, 0.4], [-0.4, -1.4]], atol=1e-15)
        assert m.mask.coverage == 1.0
        assert m.item_ids == params.item_ids
        assert not m.values.flags.writeable

    def test_gauge_shift_leaves_predictions(self):
        """Adding c to every θ and b changes nothing."""
        params = AdditiveParams(theta=[0.2, -0.1, 0.4], b=[0.1, 0.0, -0.3, 0.2])
        shifted = AdditiveParams(theta=params.theta + 0.37, b=params.b + 0.37)
        np.testing.assert_allclose(
            predict_values(shifted, clip=False), predict_values(params, clip=False), atol=1e-15
        )


class TestLinks:
    """Tests for link transforms."""

    def test_identity_clamps_to_bound(self):
        """Identity returns the clamped score."""
        np.testing.assert_allclose(
            to_link_scale(np.array([-1.0, 0.3, 1.0]), "identity"), [-0.99, 0.3, 0.99]
        )

    def test_logit_at_clip_bound(self):
        """A saturated score maps to logit(0.995) ≈ 5.2933."""
        assert to_link_scale(np.array([1.0]), "logit")[0] == pytest.approx(np.log(199.0))
        assert to_link_scale(np.array([1.0]), "logit")[0] == pytest.approx(5.2933, abs=1e-4)

    def test_probit_at_clip_bound(self):
        """A saturated score maps to Φ⁻¹(0.995) ≈ 2.5758."""
        assert to_link_scale(np.array([-1.0]), "probit")[0] == pytest.approx(-2.5758, abs=1e-4)

    @pytest.mark.parametrize("link", ["identity", "probit", "logit"])
    def test_zero_is_fixed(self, link):
        """Every link maps 0 to 0 and back."""
        assert to_link_scale(np.array([0.0]), link)[0] == pytest.approx(0.0, abs=1e-15)
        assert from_link_scale(np.array([0.0]), link)[0] == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("link", ["probit", "logit"])
    def test_inverse_and_monotone(self, link):
        """Inside the clip bound the inverse recovers the score, and order is preserved."""
        s = np.linspace(-0.98, 0.98, 41)
        t = to_link_scale(s, link)

        assert np.all(np.diff(t) > 0)
        np.testing.assert_allclose(from_link_scale(t, link), s, atol=1e-12)

    def test_custom_clip_bound(self):
        """A custom bound changes the clamp."""
        link = LinkKind(function="identity", clip_bound=0.9)
        assert to_link_scale(np.array([0.95]), link)[0] == pytest.approx(0.9)
        assert from_link_scale(np.array([5.0]), LinkKind(function="logit", clip_bound=0.9))[
            0
        ] == pytest.approx(0.9)

    def test_apply_link_keeps_mask(self):
        """Unobserved cells stay masked after the transform."""
        m = ScoreMatrix.from_array([[0.5, np.nan], [np.nan, -0.5]])
        t = apply_link(m, "logit")

        assert np.ma.getmaskarray(t).tolist() == [[False, True], [True, False]]
        assert t[0, 0] == pytest.approx(np.log(0.75 / 0.25))

    def test_inverse_link_round_trip(self):
        """inverse_link undoes apply_link and copies labels."""
        m = ScoreMatrix.from_array(
            [[0.5, np.nan], [np.nan, -0.25]], agent_ids=["x", "y"], item_ids=["p", "q"]
        )
        back = inverse_link(apply_link(m, "probit"), "probit", like=m)

        assert back.mask == m.mask
        assert back.agent_ids == ("x", "y")
        np.testing.assert_allclose(back.values, m.values, atol=1e-12)


class TestPercentileInterval:
    """Tests for percentile bootstrap intervals."""

    def test_interval_of_uniform_grid(self):
        """2.5/97.5 percentiles of 0..100."""
        lower, upper, widened = percentile_interval(np.arange(101.0), 50.0)
        assert lower == pytest.approx(2.5)
        assert upper == pytest.approx(97.5)
        assert not widened

    def test_widened_to_contain_estimate(self):
        """The interval is widened when the estimate falls outside."""
        lower, upper, widened = percentile_interval(np.arange(101.0), 200.0)
        assert upper == 200.0
        assert lower == pytest.approx(2.5)
        assert widened

    def test_nan_samples_ignored(self):
        """NaN samples are dropped; all-NaN is an error."""
        lower, upper, _ = percentile_interval(np.array([np.nan, 1.0, 1.0]), 1.0)
        assert lower == upper == 1.0
        with pytest.raises(ValueError, match="finite"):
            percentile_interval(np.array([np.nan, np.nan]), 0.0)
