"""Collate curl reports and sweep tables into one Markdown report.

The output contains no timestamps, so the same inputs always render to the
same bytes.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import structlog

from ..models import CurlReport
from .tables import (
    format_estimate,
    format_number,
    format_percent,
    markdown_table,
    parse_number,
)

logger = structlog.get_logger(__name__)

REFERENCE_METHOD = "clipped_linear"
DENSE_REGIME = "dense"

_METRIC_COLUMNS = (
    ("holdout_rmse", "Holdout RMSE"),
    ("spearman_rho", "Spearman ρ"),
    ("kendall_tau", "Kendall τ"),
    ("ranking_auc", "Ranking AUC"),
)


def setting_label(record: Mapping[str, str]) -> str:
    """Human-readable sampling setting of one sweep record."""
    regime = record["regime"]
    if regime == DENSE_REGIME:
        return "dense"
    parts = [regime]
    for key, symbol in (("alpha", "α"), ("beta", "β"), ("c", "C")):
        value = parse_number(record.get(key))
        if value is not None:
            parts.append(f"{symbol}={value:g}")
    return " ".join(parts)


def _setting_key(record: Mapping[str, str]) -> tuple[str, ...]:
    return tuple(record.get(k, "") for k in ("regime", "alpha", "beta", "c", "d_min"))


def _metric_cell(record: Mapping[str, str], name: str, digits: int) -> str:
    return format_estimate(
        parse_number(record.get(name)),
        parse_number(record.get(f"{name}_lo")),
        parse_number(record.get(f"{name}_hi")),
        digits,
    )


class MarkdownReportBuilder:
    """Builds the Markdown report from curl reports and sweep records.

    Sections appear only for the inputs provided:
    - curl table per dataset, with the additivity verdict
    - bootstrap table of median-curl differences between links
    - cross-domain table when more than one dataset is given
    - fidelity table (dense vs sparse) for the reference method
    - baseline table when a sweep holds several methods
    """

    def __init__(
        self,
        curl_reports: Mapping[str, CurlReport] | None = None,
        sweep_records: Sequence[Mapping[str, str]] = (),
        manifest_ref: str = "manifest.json",
        config_digest: str = "",
        digits: int = 3,
        title: str = "Score recovery report",
    ):
        """Initialize builder.

        Args:
            curl_reports: Curl reports keyed by dataset label
            sweep_records: Rows read back from sweep CSV files
            manifest_ref: Manifest file the report is produced under
            config_digest: Digest of the producing configuration
            digits: Decimal places for metrics
            title: Report heading
        """
        self.curl_reports = dict(curl_reports or {})
        self.sweep_records = list(sweep_records)
        self.manifest_ref = manifest_ref
        self.config_digest = config_digest
        self.digits = digits
        self.title = title

    def render(self) -> str:
        """Render the full report."""
        lines: list[str] = [f"# {self.title}", ""]
        lines.append(f"Manifest: `{self.manifest_ref}`")
        if self.config_digest:
            lines.append(f"Config digest: `{self.config_digest}`")
        lines.append("")

        for dataset, report in self.curl_reports.items():
            lines.extend(self.curl_section(dataset, report))
        if len(self.curl_reports) > 1:
            lines.extend(self.cross_domain_section())
        if self.sweep_records:
            lines.extend(self.fidelity_section())
            if len({r["method"] for r in self.sweep_records}) > 1:
                lines.extend(self.baseline_section())

        logger.info(
            "report_rendered",
            n_curl_reports=len(self.curl_reports),
            n_sweep_records=len(self.sweep_records),
        )
        return "\n".join(lines).rstrip("\n") + "\n"

    def curl_section(self, dataset: str, report: CurlReport) -> list[str]:
        d = self.digits
        lines = [f"## Rectangle curl: {dataset}", ""]
        lines.append(
            f"{report.n_rect} rectangles, seed {report.seed}; "
            f"additive when median |Δ| < {report.threshold:g}."
        )
        lines.append("")
        rows = []
        for link, summary in report.summaries.items():
            predicted = report.prediction_curl.get(link)
            rows.append(
                [
                    link,
                    format_number(summary.median, d),
                    format_number(summary.p95, d),
                    format_number(predicted.median, d) if predicted else "–",
                    "yes" if report.verdicts.get(link) else "no",
                ]
            )
        lines.extend(
            markdown_table(
                ["Link", "Median |Δ|", "P95 |Δ|", "Median |Δ| (predictions)", "Additive"],
                rows,
            )
        )
        lines.append("")

        if report.bootstrap is not None:
            boot = report.bootstrap
            lines.append(f"Bootstrap over agents and items ({boot.n_boot} resamples):")
            lines.append("")
            diff_rows = [
                [
                    f"{diff.first} − {diff.second}",
                    format_estimate(diff.estimate, diff.lower, diff.upper, d),
                    "yes" if diff.significant else "no",
                ]
                for diff in boot.differences
            ]
            lines.extend(
                markdown_table(["Comparison", "Δ median [95% CI]", "Excludes 0"], diff_rows)
            )
            lines.append("")
        return lines

    def cross_domain_section(self) -> list[str]:
        links: list[str] = []
        for report in self.curl_reports.values():
            links.extend(name for name in report.summaries if name not in links)
        rows = [
            [dataset]
            + [
                format_number(report.summaries[name].median, self.digits)
                if name in report.summaries
                else "–"
                for name in links
            ]
            for dataset, report in self.curl_reports.items()
        ]
        lines = ["## Median curl across datasets", ""]
        lines.extend(markdown_table(["Dataset", *links], rows))
        lines.append("")
        return lines

    def fidelity_section(self, method: str = REFERENCE_METHOD) -> list[str]:
        records = [r for r in self.sweep_records if r["method"] == method]
        if not records:
            method = self.sweep_records[0]["method"]
            records = [r for r in self.sweep_records if r["method"] == method]
        rows = []
        for record in records:
            if record.get("error"):
                rows.append(
                    [setting_label(record), "–", f"error: {record['error']}", "", "", "", ""]
                )
                continue
            rows.append(
                [
                    setting_label(record),
                    format_percent(parse_number(record.get("realized_coverage"))),
                    *(_metric_cell(record, name, self.digits) for name, _ in _METRIC_COLUMNS),
                    format_percent(parse_number(record.get("relative_rmse_increase"))),
                ]
            )
        lines = [f"## Fidelity: {method}", ""]
        lines.extend(
            markdown_table(
                [
                    "Setting",
                    "Coverage",
                    *(label for _, label in _METRIC_COLUMNS),
                    "RMSE vs dense",
                ],
                rows,
            )
        )
        lines.append("")
        return lines

    def baseline_section(self) -> list[str]:
        reference = {
            _setting_key(r): parse_number(r.get("holdout_rmse"))
            for r in self.sweep_records
            if r["method"] == REFERENCE_METHOD and not r.get("error")
        }
        rows = []
        for record in self.sweep_records:
            if record.get("error"):
                rows.append([record["method"], setting_label(record), "error", "–", "–"])
                continue
            rmse = parse_number(record.get("holdout_rmse"))
            base = reference.get(_setting_key(record))
            ratio = rmse / base - 1.0 if rmse is not None and base else None
            rows.append(
                [
                    record["method"],
                    setting_label(record),
                    _metric_cell(record, "holdout_rmse", self.digits),
                    _metric_cell(record, "spearman_rho", self.digits),
                    format_percent(ratio),
                ]
            )
        lines = ["## Baselines", ""]
        lines.extend(
            markdown_table(
                ["Method", "Setting", "Holdout RMSE", "Spearman ρ", f"RMSE vs {REFERENCE_METHOD}"],
                rows,
                align=["left", "left", "right", "right", "right"],
            )
        )
        lines.append("")
        return lines
