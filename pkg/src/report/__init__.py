"""Markdown report tables."""

from .markdown_report import MarkdownReportBuilder, setting_label
from .tables import (
    format_estimate,
    format_interval,
    format_number,
    format_percent,
    markdown_table,
    parse_number,
)

__all__ = [
    "MarkdownReportBuilder",
    "format_estimate",
    "format_interval",
    "format_number",
    "format_percent",
    "markdown_table",
    "parse_number",
    "setting_label",
]
