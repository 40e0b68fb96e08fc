"""Judge-record aggregation, synthetic data and file formats."""

from .aggregate import aggregate_tvdmi, record_universe
from .formats import (
    SWEEP_COLUMNS,
    load_yaml_model,
    read_fit_result,
    read_json_model,
    read_labels,
    read_mask,
    read_matrix,
    read_params,
    read_records,
    read_sweep_csv,
    sweep_record,
    write_fit_result,
    write_json,
    write_labels,
    write_mask,
    write_matrix,
    write_params,
    write_records,
    write_sweep_csv,
)
from .synthetic import SyntheticDataset, generate_synthetic

__all__ = [
    "SWEEP_COLUMNS",
    "SyntheticDataset",
    "aggregate_tvdmi",
    "generate_synthetic",
    "load_yaml_model",
    "read_fit_result",
    "read_json_model",
    "read_labels",
    "read_mask",
    "read_matrix",
    "read_params",
    "read_records",
    "read_sweep_csv",
    "record_universe",
    "sweep_record",
    "write_fit_result",
    "write_json",
    "write_labels",
    "write_mask",
    "write_matrix",
    "write_params",
    "write_records",
    "write_sweep_csv",
]
