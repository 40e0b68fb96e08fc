"""Markdown table primitives and number formatting."""
from __future__ import annotations

import math
from typing import Literal, Sequence

Align = Literal["left", "right"]

_RULES = {"left": ":---", "right": "---:"}


def parse_number(text: str | float | None) -> float | None:
    """Float from a CSV field; empty or missing fields give None."""
    if text is None:
        return None
    if isinstance(text, (int, float)):
        return float(text)
    text = text.strip()
    if not text:
        return None
    return float(text)


def format_number(value: float | None, digits: int = 3) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "–"
    return f"{value:.{digits}f}"


def format_interval(lower: float | None, upper: float | None, digits: int = 3) -> str:
    if lower is None or upper is None:
        return ""
    return f"[{lower:.{digits}f}, {upper:.{digits}f}]"


def format_estimate(
    value: float | None, lower: float | None, upper: float | None, digits: int = 3
) -> str:
    """``0.117 [0.113, 0.122]``, or just the value when no interval is available."""
    interval = format_interval(lower, upper, digits)
    text = format_number(value, digits)
    return f"{text} {interval}" if interval else text


def format_percent(value: float | None, digits: int = 1) -> str:
    if value is None:
        return "–"
    return f"{100.0 * value:.{digits}f}%"


def markdown_table(
    headers: Sequence[str],
    rows: Sequence[Sequence[str]],
    align: Sequence[Align] | None = None,
) -> list[str]:
    """Pipe-table lines; the first column is left-aligned, the rest right by default."""
    if align is None:
        align = ["left"] + ["right"] * (len(headers) - 1)
    if len(align) != len(headers):
        raise ValueError(f"{len(align)} alignments for {len(headers)} columns")
    lines = [
        "| " + " | ".join(headers) + " |",
        "| " + " | ".join(_RULES[a] for a in align) + " |",
    ]
    for row in rows:
        if len(row) != len(headers):
            raise ValueError(f"Row has {len(row)} cells, expected {len(headers)}")
        lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |")
    return lines
