"""End-to-end tests for the command-line interface."""
import json
from pathlib import Path

import pytest

from src import __version__
from src.cli import EXIT_DATA, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main
from src.data_io import read_mask, read_matrix, read_sweep_csv


def load(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture
def synth_dir(tmp_path, fixtures_dir) -> Path:
    """A small synthetic dataset written by the synth command."""
    out = tmp_path / "synth"
    spec = fixtures_dir / "synthetic_small.yaml"
    code = main(["synth", "--spec", str(spec), "--seed", "5", "--out", str(out)])
    assert code == EXIT_OK
    return out


class TestSynthAndMask:
    """Tests for data generation commands."""

    def test_synth_outputs(self, synth_dir):
        """synth writes matrix, truth, labels, holdout and manifest."""
        for name in ("matrix.csv", "truth.json", "labels.csv", "holdout.csv", "manifest.json"):
            assert (synth_dir / name).is_file()

        m = read_matrix(synth_dir / "matrix.csv")
        held = read_mask(synth_dir / "holdout.csv", m.agent_ids, m.item_ids)
        manifest = load(synth_dir / "manifest.json")

        assert m.shape == (12, 40)
        assert held.observed_count == 96
        assert manifest["command"] == "synth"
        assert manifest["seeds"]["synthetic"] == 5
        assert manifest["artifact_version"] == __version__
        assert manifest["config_digest"].startswith("sha256:")

    def test_options_override_spec_file(self, tmp_path, fixtures_dir):
        """--K overrides the spec file; without one the label counts scale with K."""
        spec = str(fixtures_dir / "synthetic_small.yaml")
        out = tmp_path / "out"

        assert main(["synth", "--spec", spec, "--K", "10", "--out", str(out)]) == EXIT_OK
        assert read_matrix(out / "matrix.csv").shape == (10, 40)
        small = tmp_path / "small"
        assert main(["synth", "--K", "10", "--J", "20", "--out", str(small)]) == EXIT_OK
        assert read_matrix(small / "matrix.csv").shape == (10, 20)

    def test_mask_avoids_holdout(self, tmp_path, synth_dir):
        """mask samples around the holdout and reports connectivity."""
        out = tmp_path / "mask"
        code = main(
            [
                "mask",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--holdout", str(synth_dir / "holdout.csv"),
                "--regime", "nlogn",
                "--C", "1.6",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK

        m = read_matrix(synth_dir / "matrix.csv")
        sampled = read_mask(out / "mask.csv", m.agent_ids, m.item_ids)
        held = read_mask(synth_dir / "holdout.csv", m.agent_ids, m.item_ids)
        connectivity = load(out / "connectivity.json")

        assert not sampled.overlaps(held)
        assert connectivity["n_components"] == 1
        assert connectivity["manifest"] == "manifest.json"

    def test_mask_needs_dimensions(self, tmp_path):
        """Without --matrix both --K and --J are required."""
        code = main(["mask", "--K", "5", "--regime", "nlogn", "--C", "1", "--out", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_mask_missing_regime_parameter(self, tmp_path):
        """nlogn without --C is a usage error."""
        code = main(["mask", "--K", "5", "--J", "5", "--regime", "nlogn", "--out", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_infeasible_mask(self, tmp_path):
        """Degree 3 on a 2×2 matrix cannot be met."""
        args = ["mask", "--K", "2", "--J", "2", "--regime", "nlogn", "--C", "1"]
        code = main([*args, "--out", str(tmp_path)])
        assert code == EXIT_INFEASIBLE


class TestFitAndCurl:
    """Tests for fitting and curl diagnostics."""

    def test_fit(self, tmp_path, synth_dir):
        """fit writes parameters, completed matrix and the fit record."""
        out = tmp_path / "fit"
        code = main(["fit", "--matrix", str(synth_dir / "matrix.csv"), "--out", str(out)])
        assert code == EXIT_OK

        params = load(out / "params.json")
        fit = load(out / "fit.json")
        assert len(params["theta"]) == 12
        assert abs(sum(params["b"])) < 1e-9
        assert fit["completed_path"] == "completed.csv"
        assert read_matrix(out / "completed.csv").mask.coverage == 1.0

    def test_fit_link(self, tmp_path, synth_dir):
        """--link logit selects the logit Rasch fit."""
        out = tmp_path / "fit"
        matrix = str(synth_dir / "matrix.csv")
        code = main(["fit", "--matrix", matrix, "--link", "logit", "--out", str(out)])
        assert code == EXIT_OK
        assert load(out / "fit.json")["method_tag"].startswith("rasch_logit")

    def test_fit_link_with_other_method(self, tmp_path, synth_dir):
        """--link only combines with clipped_linear."""
        code = main(
            [
                "fit",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--method", "svd",
                "--link", "probit",
                "--out", str(tmp_path),
            ]
        )
        assert code == EXIT_USAGE

    def test_bad_score(self, tmp_path):
        """An out-of-range score is a data error."""
        path = tmp_path / "bad.csv"
        path.write_text("agent,p\nx,1.5\n", encoding="utf-8")
        code = main(["fit", "--matrix", str(path), "--out", str(tmp_path / "out")])
        assert code == EXIT_DATA

    def test_curl(self, tmp_path, synth_dir):
        """curl reports every link with verdicts and a bootstrap."""
        out = tmp_path / "curl"
        code = main(
            [
                "curl",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--n-rect", "500",
                "--n-boot", "5",
                "--jobs", "1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK

        report = load(out / "curl.json")
        assert set(report["summaries"]) == {"identity", "probit", "logit"}
        assert set(report["verdicts"]) == {"identity", "probit", "logit"}
        assert report["bootstrap"]["n_boot"] == 5
        assert report["summaries"]["identity"]["n_rectangles"] == 500


class TestEvaluation:
    """Tests for eval and sweep."""

    def test_eval(self, tmp_path, synth_dir):
        """eval scores the dense pool with intervals and AUC."""
        out = tmp_path / "eval"
        code = main(
            [
                "eval",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--holdout", str(synth_dir / "holdout.csv"),
                "--labels", str(synth_dir / "labels.csv"),
                "--n-boot", "5",
                "--jobs", "1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK

        report = load(out / "eval.json")
        assert report["n_boot"] == 5
        assert report["ranking_auc"] is not None
        assert report["realized_coverage"] == pytest.approx(0.8)
        assert report["config_digest"] == load(out / "manifest.json")["config_digest"]

    def test_sweep_custom_grid(self, tmp_path, synth_dir):
        """A custom nlogn grid gives a dense row and one sparse row."""
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--holdout", str(synth_dir / "holdout.csv"),
                "--regime", "nlogn",
                "--C", "1",
                "--jobs", "1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK

        records = read_sweep_csv(out / "sweep.csv")
        assert [r["regime"] for r in records] == ["dense", "nlogn"]
        assert all(r["error"] == "" for r in records)
        assert len(load(out / "sweep.json")["rows"]) == 2

    def test_sweep_preset_file(self, tmp_path, synth_dir, fixtures_dir):
        """A preset file drives the grid."""
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--holdout", str(synth_dir / "holdout.csv"),
                "--preset-file", str(fixtures_dir / "sweep_small.yaml"),
                "--jobs", "1",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        assert [r["regime"] for r in read_sweep_csv(out / "sweep.csv")] == [
            "dense",
            "nlogn",
            "row",
        ]

    def test_sweep_conflicting_sources(self, tmp_path, synth_dir):
        """--preset and --regime together is a usage error."""
        code = main(
            [
                "sweep",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--holdout", str(synth_dir / "holdout.csv"),
                "--preset", "nlogn_c",
                "--regime", "nlogn",
                "--C", "1",
                "--out", str(tmp_path),
            ]
        )
        assert code == EXIT_USAGE

    def test_unknown_preset(self, tmp_path, synth_dir):
        """An unknown preset is a data error."""
        code = main(
            [
                "sweep",
                "--matrix", str(synth_dir / "matrix.csv"),
                "--holdout", str(synth_dir / "holdout.csv"),
                "--preset", "nonexistent",
                "--out", str(tmp_path),
            ]
        )
        assert code == EXIT_DATA


class TestReportAndTools:
    """Tests for report, aggregate, compare and presets."""

    def test_report_is_deterministic(self, tmp_path, synth_dir):
        """The same inputs render identical report bytes."""
        curl_out = tmp_path / "curl"
        assert (
            main(
                [
                    "curl",
                    "--matrix", str(synth_dir / "matrix.csv"),
                    "--n-rect", "200",
                    "--n-boot", "0",
                    "--no-predictions",
                    "--out", str(curl_out),
                ]
            )
            == EXIT_OK
        )
        args = ["report", "--curl", f"synthetic={curl_out / 'curl.json'}"]
        assert main([*args, "--out", str(tmp_path / "r1")]) == EXIT_OK
        assert main([*args, "--out", str(tmp_path / "r2")]) == EXIT_OK

        first = (tmp_path / "r1" / "report.md").read_bytes()
        assert first == (tmp_path / "r2" / "report.md").read_bytes()
        assert b"## Rectangle curl: synthetic" in first

    def test_report_needs_inputs(self, tmp_path):
        """report without inputs is a usage error."""
        assert main(["report", "--out", str(tmp_path)]) == EXIT_USAGE

    def test_aggregate(self, tmp_path, fixtures_dir):
        """Fixture records aggregate to the expected cell."""
        out = tmp_path / "agg"
        code = main(
            [
                "aggregate",
                "--records", str(fixtures_dir / "judge_records.csv"),
                "--holdout-fraction", "0",
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK

        m = read_matrix(out / "matrix.csv")
        assert m.agent_ids == ("a", "b", "c")
        assert m.values[0, 0] == pytest.approx(0.6)
        assert not (out / "holdout.csv").exists()

    def test_aggregate_with_holdout(self, tmp_path, fixtures_dir):
        """A random holdout splits cells between the two matrices."""
        out = tmp_path / "agg"
        code = main(
            ["aggregate", "--records", str(fixtures_dir / "judge_records.csv"), "--out", str(out)]
        )
        assert code == EXIT_OK

        train = read_matrix(out / "matrix.csv")
        test = read_matrix(out / "test_matrix.csv")
        assert train.mask.observed_count + test.mask.observed_count == 9
        assert not train.mask.overlaps(test.mask)

    def test_compare_same_fit(self, tmp_path, synth_dir):
        """A fit compared with itself agrees perfectly."""
        params = synth_dir / "truth.json"
        out = tmp_path / "cmp"
        code = main(["compare", "--first", str(params), "--second", str(params), "--out", str(out)])
        assert code == EXIT_OK

        agreement = load(out / "agreement.json")
        assert agreement["agent_spearman"] == pytest.approx(1.0)
        assert agreement["item_kendall"] == pytest.approx(1.0)

    def test_presets(self, capsys):
        """presets prints presets and methods as JSON."""
        assert main(["presets"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)

        assert "full_grid" in {p["name"] for p in payload["presets"]}
        assert "clipped_linear" in {m["name"] for m in payload["methods"]}

    def test_version(self, capsys):
        """--version prints the version and exits 0."""
        assert main(["--version"]) == EXIT_OK
        assert __version__ in capsys.readouterr().out
