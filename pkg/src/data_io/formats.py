"""File formats for matrices, masks, labels, judge records and results.

Grammars:

- Matrix CSV: header ``agent,<item_1>,…,<item_J>``; one row per agent, first
  field the agent label; an empty cell is unobserved. Floats are written with
  ``repr`` so a write/read cycle is exact.
- Matrix JSON: ``{"agent_ids", "item_ids", "values", "mask"}`` with ``null``
  for unobserved values.
- Mask CSV: header ``agent,item``; one observed pair per row.
- Labels CSV: header ``agent,tag`` with tag in faithful|problematic|unlabeled.
- Records CSV: header ``agent_i,agent_j,item,tpr,fpr``.

Every parser error is a DataFormatError naming ``file:line:column``; columns
count CSV fields from 1.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence, TypeVar

import numpy as np
import structlog
import yaml
from pydantic import BaseModel, ValidationError

from ..errors import DataFormatError
from ..models import (
    AdditiveParams,
    AgentLabels,
    AgentTag,
    FitResult,
    ObservationMask,
    PairwiseJudgeRecord,
    ScoreMatrix,
    SweepRow,
)
from ..models.scores import SCORE_BOUND

logger = structlog.get_logger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

MATRIX_HEADER = "agent"
MASK_HEADER = ("agent", "item")
LABELS_HEADER = ("agent", "tag")
RECORDS_HEADER = ("agent_i", "agent_j", "item", "tpr", "fpr")
SWEEP_COLUMNS = (
    "regime",
    "alpha",
    "beta",
    "c",
    "d_min",
    "method",
    "target_pairs",
    "repaired_pairs",
    "realized_coverage",
    "n_train",
    "n_holdout_evaluated",
    "holdout_rmse",
    "holdout_rmse_lo",
    "holdout_rmse_hi",
    "spearman_rho",
    "spearman_rho_lo",
    "spearman_rho_hi",
    "kendall_tau",
    "kendall_tau_lo",
    "kendall_tau_hi",
    "ranking_auc",
    "ranking_auc_lo",
    "ranking_auc_hi",
    "reference_rmse",
    "relative_rmse_increase",
    "n_boot",
    "n_disconnected_resamples",
    "error",
)


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _is_json(path: Path) -> bool:
    return path.suffix.lower() == ".json"


def _rows(path: Path) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, fields) for every non-blank CSV row."""
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"Cannot open file: {e.strerror}", path) from e
    with handle:
        reader = csv.reader(handle)
        try:
            for fields in reader:
                if not fields or all(not f.strip() for f in fields):
                    continue
                yield reader.line_num, [f.strip() for f in fields]
        except csv.Error as e:
            raise DataFormatError(f"Malformed CSV: {e}", path, reader.line_num) from e


def _header(rows: Iterator[tuple[int, list[str]]], path: Path) -> tuple[int, list[str]]:
    try:
        return next(rows)
    except StopIteration:
        raise DataFormatError("File is empty", path, 1, 1) from None


def _expect_header(
    rows: Iterator[tuple[int, list[str]]], path: Path, expected: Sequence[str]
) -> None:
    line, fields = _header(rows, path)
    for col, name in enumerate(expected, start=1):
        if col > len(fields) or fields[col - 1] != name:
            found = fields[col - 1] if col <= len(fields) else "end of line"
            raise DataFormatError(
                f"Expected header '{','.join(expected)}', found '{found}' for '{name}'",
                path,
                line,
                col,
            )
    if len(fields) > len(expected):
        raise DataFormatError("Unexpected extra header field", path, line, len(expected) + 1)


def _expect_width(fields: list[str], width: int, path: Path, line: int) -> None:
    if len(fields) != width:
        raise DataFormatError(
            f"Expected {width} fields, found {len(fields)}",
            path,
            line,
            min(len(fields), width) + 1,
        )


def _parse_float(text: str, path: Path, line: int, col: int, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"Non-numeric {what} '{text}'", path, line, col) from None
    if not math.isfinite(value):
        raise DataFormatError(f"Non-finite {what} '{text}'", path, line, col)
    return value


def _lookup(index: dict[str, int], label: str, kind: str, path: Path, line: int, col: int) -> int:
    if label not in index:
        raise DataFormatError(f"Unknown {kind} '{label}'", path, line, col)
    return index[label]


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_value(v) for v in row])


# --- score matrices ---------------------------------------------------------


def read_matrix(path: str | Path) -> ScoreMatrix:
    """Read a score matrix from CSV, or JSON when the suffix is ``.json``.

    Raises:
        DataFormatError: Duplicate or missing labels, wrong row width, a
            non-numeric cell or a score outside [-1, 1]
    """
    path = Path(path)
    if _is_json(path):
        return _read_matrix_json(path)

    rows = _rows(path)
    line, header = _header(rows, path)
    if header[0] != MATRIX_HEADER:
        raise DataFormatError(f"First header field must be '{MATRIX_HEADER}'", path, line, 1)
    item_ids = header[1:]
    if not item_ids:
        raise DataFormatError("Header names no items", path, line, 2)
    seen_items: set[str] = set()
    for col, item in enumerate(item_ids, start=2):
        if not item:
            raise DataFormatError("Empty item label", path, line, col)
        if item in seen_items:
            raise DataFormatError(f"Duplicate item '{item}'", path, line, col)
        seen_items.add(item)

    agent_ids: list[str] = []
    value_rows: list[list[float]] = []
    width = len(header)
    for line, fields in rows:
        _expect_width(fields, width, path, line)
        agent = fields[0]
        if not agent:
            raise DataFormatError("Empty agent label", path, line, 1)
        if agent in agent_ids:
            raise DataFormatError(f"Duplicate agent '{agent}'", path, line, 1)
        values = []
        for col, text in enumerate(fields[1:], start=2):
            if not text:
                values.append(math.nan)
                continue
            value = _parse_float(text, path, line, col, "score")
            if abs(value) > SCORE_BOUND:
                raise DataFormatError(f"Score {text} outside [-1, 1]", path, line, col)
            values.append(value)
        agent_ids.append(agent)
        value_rows.append(values)

    if not agent_ids:
        raise DataFormatError("Matrix has no agent rows", path, line + 1, 1)
    matrix = ScoreMatrix.from_array(
        np.array(value_rows, dtype=float), agent_ids=agent_ids, item_ids=item_ids
    )
    logger.debug("matrix_read", path=str(path), shape=matrix.shape)
    return matrix


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"Cannot open file: {e.strerror}", path) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DataFormatError(e.msg, path, e.lineno, e.colno) from e


def _read_matrix_json(path: Path) -> ScoreMatrix:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise DataFormatError("Matrix JSON must be an object", path, 1, 1)
    for key in ("agent_ids", "item_ids", "values"):
        if key not in data:
            raise DataFormatError(f"Matrix JSON is missing '{key}'", path)
    for key in ("agent_ids", "item_ids"):
        if not isinstance(data[key], list):
            raise DataFormatError(f"'{key}' must be a list of labels", path)
    raw = data["values"]
    n_items = len(data["item_ids"])
    if not isinstance(raw, list) or len(raw) != len(data["agent_ids"]):
        raise DataFormatError("'values' must have one row per agent", path)
    values = np.full((len(raw), n_items), np.nan)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != n_items:
            raise DataFormatError(f"values[{i}] must have {n_items} entries", path)
        for j, cell in enumerate(row):
            if cell is None:
                continue
            if isinstance(cell, bool) or not isinstance(cell, (int, float)):
                raise DataFormatError(f"values[{i}][{j}] is not a number", path)
            if not abs(cell) <= SCORE_BOUND:
                raise DataFormatError(f"values[{i}][{j}] = {cell!r} outside [-1, 1]", path)
            values[i, j] = cell
    pattern = None
    if data.get("mask") is not None:
        try:
            pattern = np.asarray(data["mask"], dtype=bool)
        except (TypeError, ValueError) as e:
            raise DataFormatError(f"'mask' is not a boolean matrix: {e}", path) from e
        if pattern.shape != values.shape:
            raise DataFormatError(
                f"'mask' shape {pattern.shape} does not match values {values.shape}", path
            )
        missing = pattern & np.isnan(values)
        if missing.any():
            i, j = map(int, np.argwhere(missing)[0])
            raise DataFormatError(f"values[{i}][{j}] is null but marked observed", path)
    try:
        return ScoreMatrix.from_array(
            values, mask=pattern, agent_ids=data["agent_ids"], item_ids=data["item_ids"]
        )
    except ValidationError as e:
        raise DataFormatError(f"Invalid matrix: {e}", path) from e


def write_matrix(m: ScoreMatrix, path: str | Path) -> Path:
    """Write ``m`` as CSV, or JSON when the suffix is ``.json``."""
    path = Path(path)
    if _is_json(path):
        rows, cols = m.shape
        payload = {
            "agent_ids": list(m.agent_ids),
            "item_ids": list(m.item_ids),
            "values": [
                [float(m.values[i, j]) if m.mask.pattern[i, j] else None for j in range(cols)]
                for i in range(rows)
            ],
            "mask": m.mask.pattern.tolist(),
        }
        return write_json(payload, path)

    pattern = m.mask.pattern
    _write_csv(
        path,
        [MATRIX_HEADER, *m.item_ids],
        (
            [agent, *(float(v) if seen else None for v, seen in zip(m.values[i], pattern[i]))]
            for i, agent in enumerate(m.agent_ids)
        ),
    )
    logger.debug("matrix_written", path=str(path), shape=m.shape)
    return path


# --- masks, labels, records -------------------------------------------------


def read_mask(
    path: str | Path, agent_ids: Sequence[str], item_ids: Sequence[str]
) -> ObservationMask:
    """Read an ``agent,item`` pair list against the given label universe."""
    path = Path(path)
    a_idx = {a: k for k, a in enumerate(agent_ids)}
    q_idx = {q: k for k, q in enumerate(item_ids)}
    pattern = np.zeros((len(agent_ids), len(item_ids)), dtype=bool)
    rows = _rows(path)
    _expect_header(rows, path, MASK_HEADER)
    for line, fields in rows:
        _expect_width(fields, 2, path, line)
        i = _lookup(a_idx, fields[0], "agent", path, line, 1)
        j = _lookup(q_idx, fields[1], "item", path, line, 2)
        pattern[i, j] = True
    return ObservationMask(pattern=pattern)


def write_mask(
    mask: ObservationMask, path: str | Path, agent_ids: Sequence[str], item_ids: Sequence[str]
) -> Path:
    """Write observed pairs in row-major order."""
    path = Path(path)
    rows, cols = mask.cells()
    _write_csv(
        path, MASK_HEADER, ((agent_ids[i], item_ids[j]) for i, j in zip(rows, cols))
    )
    return path


def read_labels(path: str | Path, agent_ids: Sequence[str]) -> AgentLabels:
    """Read ``agent,tag`` rows; agents absent from the file are unlabeled."""
    path = Path(path)
    known = set(agent_ids)
    mapping: dict[str, AgentTag] = {}
    rows = _rows(path)
    _expect_header(rows, path, LABELS_HEADER)
    for line, fields in rows:
        _expect_width(fields, 2, path, line)
        agent, tag = fields
        if agent not in known:
            raise DataFormatError(f"Unknown agent '{agent}'", path, line, 1)
        if agent in mapping:
            raise DataFormatError(f"Duplicate agent '{agent}'", path, line, 1)
        try:
            mapping[agent] = AgentTag(tag)
        except ValueError:
            choices = "|".join(t.value for t in AgentTag)
            raise DataFormatError(
                f"Unknown tag '{tag}' (expected {choices})", path, line, 2
            ) from None
    return AgentLabels.from_mapping(mapping, agent_ids)


def write_labels(labels: AgentLabels, path: str | Path) -> Path:
    path = Path(path)
    _write_csv(
        path, LABELS_HEADER, ((a, t.value) for a, t in zip(labels.agent_ids, labels.tags))
    )
    return path


_RECORD_COLUMNS = {"agent_i": 1, "agent_j": 2, "item_k": 3, "item": 3, "tpr": 4, "fpr": 5}


def read_records(path: str | Path) -> list[PairwiseJudgeRecord]:
    """Read directed judge records."""
    path = Path(path)
    records: list[PairwiseJudgeRecord] = []
    rows = _rows(path)
    _expect_header(rows, path, RECORDS_HEADER)
    for line, fields in rows:
        _expect_width(fields, len(RECORDS_HEADER), path, line)
        agent_i, agent_j, item, tpr_text, fpr_text = fields
        tpr = _parse_float(tpr_text, path, line, 4, "tpr")
        fpr = _parse_float(fpr_text, path, line, 5, "fpr")
        try:
            records.append(
                PairwiseJudgeRecord(agent_i=agent_i, agent_j=agent_j, item=item, tpr=tpr, fpr=fpr)
            )
        except ValidationError as e:
            error = e.errors()[0]
            field = str(error["loc"][0]) if error["loc"] else "agent_j"
            raise DataFormatError(
                error["msg"], path, line, _RECORD_COLUMNS.get(field, 1)
            ) from e
    logger.debug("records_read", path=str(path), n_records=len(records))
    return records


def write_records(records: Iterable[PairwiseJudgeRecord], path: str | Path) -> Path:
    path = Path(path)
    _write_csv(
        path,
        RECORDS_HEADER,
        ((r.agent_i, r.agent_j, r.item_k, r.tpr, r.fpr) for r in records),
    )
    return path


# --- JSON and YAML models ---------------------------------------------------


def write_json(payload: Any, path: str | Path) -> Path:
    """Write ``payload`` (a dict or pydantic model) as indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", by_alias=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def read_json_model(path: str | Path, model: type[ModelT]) -> ModelT:
    """Validate a JSON file against ``model``."""
    path = Path(path)
    data = _read_json(path)
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise DataFormatError(f"Invalid {model.__name__}: {e}", path) from e


def load_yaml_model(path: str | Path, model: type[ModelT]) -> ModelT:
    """Validate a YAML file against ``model``; an empty file gives the defaults."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFormatError(f"Cannot open file: {e.strerror}", path) from e
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        column = mark.column + 1 if mark is not None else None
        reason = getattr(e, "problem", None) or str(e)
        raise DataFormatError(f"Invalid YAML: {reason}", path, line, column) from e
    if not isinstance(data, dict):
        raise DataFormatError("YAML document must be a mapping", path, 1, 1)
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise DataFormatError(f"Invalid {model.__name__}: {e}", path) from e


def write_params(params: AdditiveParams, path: str | Path) -> Path:
    return write_json(params, path)


def read_params(path: str | Path) -> AdditiveParams:
    return read_json_model(path, AdditiveParams)


def write_fit_result(
    result: FitResult, path: str | Path, completed_path: str | None = None
) -> Path:
    """Write a fit as JSON; ``completed_path`` records where the completed CSV lives."""
    payload = result.model_dump(mode="json", by_alias=True)
    if completed_path is not None:
        payload["completed_path"] = completed_path
    return write_json(payload, path)


def read_fit_result(path: str | Path) -> FitResult:
    return read_json_model(path, FitResult)


# --- sweep tables -----------------------------------------------------------


def sweep_record(row: SweepRow) -> dict[str, Any]:
    """Flatten one sweep row into the CSV columns."""
    record: dict[str, Any] = {name: None for name in SWEEP_COLUMNS}
    record.update(
        regime=row.regime,
        alpha=row.alpha,
        beta=row.beta,
        c=row.c,
        d_min=row.d_min,
        method=row.method,
        target_pairs=row.target_pairs,
        repaired_pairs=row.repaired_pairs,
        error=row.error,
    )
    report = row.report
    if report is None:
        return record
    for name in (
        "realized_coverage",
        "n_train",
        "n_holdout_evaluated",
        "holdout_rmse",
        "spearman_rho",
        "kendall_tau",
        "ranking_auc",
        "reference_rmse",
        "relative_rmse_increase",
        "n_boot",
        "n_disconnected_resamples",
    ):
        record[name] = getattr(report, name)
    for name, interval in report.ci.items():
        record[f"{name}_lo"] = interval.lower
        record[f"{name}_hi"] = interval.upper
    return record


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> Path:
    path = Path(path)
    _write_csv(
        path,
        SWEEP_COLUMNS,
        ([sweep_record(row)[name] for name in SWEEP_COLUMNS] for row in rows),
    )
    logger.debug("sweep_csv_written", path=str(path), n_rows=len(rows))
    return path


def read_sweep_csv(path: str | Path) -> list[dict[str, str]]:
    """Read a sweep CSV back as string-valued records keyed by column."""
    path = Path(path)
    rows = _rows(path)
    line, header = _header(rows, path)
    missing = [name for name in ("regime", "method", "holdout_rmse") if name not in header]
    if missing:
        raise DataFormatError(f"Sweep CSV is missing columns {missing}", path, line, 1)
    records = []
    for line, fields in rows:
        _expect_width(fields, len(header), path, line)
        records.append(dict(zip(header, fields)))
    return records
