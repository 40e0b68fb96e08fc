"""Command-line front end for the score-recovery pipeline.

Every subcommand that produces files writes them, plus ``manifest.json``,
into the directory given by ``--out``.

Exit status: 0 success, 1 unexpected failure, 2 usage error, 3 invalid data
or configuration, 4 infeasible structural constraint.
"""
from __future__ import annotations

import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from itertools import product
from pathlib import Path
from typing import Any, Sequence

import click
import structlog
from pydantic import BaseModel, ValidationError

from . import __version__
from .data_io import (
    aggregate_tvdmi,
    generate_synthetic,
    load_yaml_model,
    read_json_model,
    read_labels,
    read_mask,
    read_matrix,
    read_params,
    read_records,
    read_sweep_csv,
    record_universe,
    write_fit_result,
    write_json,
    write_labels,
    write_mask,
    write_matrix,
    write_params,
    write_sweep_csv,
)
from .errors import InfeasibleError, ScoreRecoveryError
from .estimators import ESTIMATORS, fit_method, list_methods
from .evaluation import (
    DEFAULT_HOLDOUT_FRACTION,
    bootstrap_eval,
    compare_judges,
    make_holdout,
    sweep,
    with_holdout_scores,
)
from .integrability import (
    ADDITIVITY_THRESHOLD,
    ALL_LINKS,
    DEFAULT_N_BOOT,
    DEFAULT_N_RECT,
    additivity_verdict,
    curl_bootstrap,
    curl_link_ablation,
    prediction_curl,
)
from .models import (
    AgentLabels,
    CurlReport,
    FitConfig,
    LinkFunction,
    ObservationMask,
    Regime,
    RunManifest,
    SamplingSpec,
    ScoreMatrix,
    SyntheticSpec,
)
from .models.scores import default_ids
from .presets import SweepPreset, get_preset, list_presets
from .report import MarkdownReportBuilder
from .sampling import make_mask

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4

MANIFEST_NAME = "manifest.json"

LINK_CHOICES = click.Choice([link.value for link in LinkFunction])
METHOD_CHOICES = click.Choice(list(ESTIMATORS))
REGIME_CHOICES = click.Choice([regime.value for regime in Regime])

existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)


def configure_logging(level: int = logging.INFO) -> None:
    """JSON logs with ISO timestamps on stderr."""
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(level)


def digest_bytes(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def digest_file(path: Path) -> str:
    return digest_bytes(path.read_bytes())


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class RunContext:
    """Configuration, inputs and outputs of one command run, ending in its manifest."""

    def __init__(
        self,
        command: str,
        out_dir: Path,
        config: dict[str, Any],
        seeds: dict[str, int] | None = None,
    ):
        self.command = command
        self.out_dir = out_dir
        self.config = config
        self.seeds = seeds or {}
        self.input_digests: dict[str, str] = {}
        self.outputs: list[str] = []
        self.started_at = _now()
        self.config_digest = digest_bytes(
            json.dumps(config, sort_keys=True, default=str).encode("utf-8")
        )
        out_dir.mkdir(parents=True, exist_ok=True)
        logger.info(
            "run_config",
            command=command,
            config=config,
            seeds=self.seeds,
            config_digest=self.config_digest,
            version=__version__,
        )

    def add_input(self, path: Path | None) -> None:
        if path is not None:
            self.input_digests[str(path)] = digest_file(path)

    def output(self, name: str) -> Path:
        """Register ``name`` as an output and return its path."""
        if name not in self.outputs:
            self.outputs.append(name)
        return self.out_dir / name

    def write_model(self, name: str, model: BaseModel | dict[str, Any]) -> Path:
        """Write a JSON output that names its manifest and config digest."""
        if isinstance(model, BaseModel):
            payload = model.model_dump(mode="json", by_alias=True)
        else:
            payload = dict(model)
        payload["manifest"] = MANIFEST_NAME
        payload["config_digest"] = self.config_digest
        return write_json(payload, self.output(name))

    def finish(self) -> RunManifest:
        manifest = RunManifest(
            command=self.command,
            config=self.config,
            seeds=self.seeds,
            input_digests=self.input_digests,
            config_digest=self.config_digest,
            artifact_version=__version__,
            started_at=self.started_at,
            finished_at=_now(),
            outputs=tuple(self.outputs),
        )
        write_json(manifest, self.out_dir / MANIFEST_NAME)
        logger.info("run_complete", command=self.command, outputs=list(self.outputs))
        return manifest


def fit_config(config_path: Path | None, **overrides: Any) -> FitConfig:
    """FitConfig from an optional YAML file with non-None command-line overrides."""
    base = load_yaml_model(config_path, FitConfig) if config_path else FitConfig()
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return base
    return FitConfig.model_validate({**base.model_dump(), **updates})


def _labels_or_none(path: Path | None, m: ScoreMatrix) -> AgentLabels | None:
    return read_labels(path, m.agent_ids) if path is not None else None


def _evaluation_matrix(
    matrix: Path, test_matrix: Path | None, holdout_path: Path
) -> tuple[ScoreMatrix, ObservationMask]:
    m = read_matrix(matrix)
    holdout = read_mask(holdout_path, m.agent_ids, m.item_ids)
    if test_matrix is not None:
        m = with_holdout_scores(m, read_matrix(test_matrix), holdout)
    return m, holdout


def grid_specs(
    regime: str | None,
    alphas: Sequence[float],
    betas: Sequence[float],
    cs: Sequence[float],
    d_min: int,
    seed: int,
) -> list[SamplingSpec]:
    """Sampling specs for one regime over the given parameter values."""
    if regime is None:
        return []
    kind = Regime(regime)
    if kind is Regime.ROW:
        combos = [{"alpha": a} for a in alphas]
    elif kind is Regime.COLUMN:
        combos = [{"beta": b} for b in betas]
    elif kind is Regime.HYBRID:
        combos = [{"alpha": a, "beta": b} for a, b in product(alphas, betas)]
    else:
        combos = [{"c": c} for c in cs]
    if not combos:
        raise click.UsageError(f"Regime '{regime}' needs values for its grid parameters")
    return [SamplingSpec(regime=kind, d_min=d_min, seed=seed, **params) for params in combos]


# Shared options
opt_out = click.option(
    "--out",
    "out_dir",
    type=click.Path(file_okay=False, path_type=Path),
    required=True,
    help="Output directory",
)
opt_seed = click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
opt_jobs = click.option(
    "--jobs",
    "n_jobs",
    type=int,
    default=None,
    help="Worker processes (default: all available cores)",
)
opt_matrix = click.option(
    "--matrix", type=existing_file, required=True, help="Score matrix (CSV or JSON)"
)
opt_config = click.option(
    "--config", "config_path", type=existing_file, default=None, help="FitConfig YAML"
)
opt_lambda = click.option(
    "--lambda", "ridge", type=float, default=None, help="Ridge weight (default 1e-6)"
)
opt_method = click.option(
    "--method", type=METHOD_CHOICES, default="clipped_linear", show_default=True
)
opt_n_boot = click.option(
    "--n-boot", type=int, default=DEFAULT_N_BOOT, show_default=True, help="Bootstrap resamples"
)
opt_labels = click.option(
    "--labels", type=existing_file, default=None, help="Agent labels CSV for the ranking AUC"
)
opt_test_matrix = click.option(
    "--test-matrix",
    type=existing_file,
    default=None,
    help="Matrix supplying the scores of holdout cells",
)
opt_d_min = click.option(
    "--d-min", type=int, default=3, show_default=True, help="Minimum degree per agent and item"
)


@click.group()
@click.version_option(__version__, prog_name="additive-scores")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.option("--quiet", "-q", is_flag=True, help="Warnings and errors only")
def cli(verbose: bool, quiet: bool) -> None:
    """Additive score recovery, integrability diagnostics and sparse sampling."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    configure_logging(level)


@cli.command()
@click.option(
    "--records",
    type=existing_file,
    required=True,
    help="Judge records CSV (agent_i,agent_j,item,tpr,fpr)",
)
@click.option("--holdout", type=existing_file, default=None, help="Holdout pairs CSV")
@click.option(
    "--holdout-fraction",
    type=float,
    default=DEFAULT_HOLDOUT_FRACTION,
    show_default=True,
    help="Fraction of pairs to reserve when no --holdout file is given; 0 disables",
)
@click.option(
    "--exclude-partner-holdout",
    is_flag=True,
    help="Also drop terms whose partner cell is held out",
)
@opt_seed
@opt_out
def aggregate(
    records: Path,
    holdout: Path | None,
    holdout_fraction: float,
    exclude_partner_holdout: bool,
    seed: int,
    out_dir: Path,
) -> None:
    """Aggregate judge records into training and test score matrices."""
    config = {
        "records": str(records),
        "holdout": str(holdout) if holdout else None,
        "holdout_fraction": holdout_fraction,
        "exclude_partner_holdout": exclude_partner_holdout,
    }
    run = RunContext("aggregate", out_dir, config, seeds={"holdout": seed})
    run.add_input(records)
    run.add_input(holdout)

    recs = read_records(records)
    agents, items = record_universe(recs)
    held: ObservationMask | None = None
    if holdout is not None:
        held = read_mask(holdout, agents, items)
    elif holdout_fraction > 0:
        held = make_holdout(len(agents), len(items), holdout_fraction, seed).holdout

    train = aggregate_tvdmi(recs, held, agents, items, exclude_partner_holdout)
    write_matrix(train, run.output("matrix.csv"))
    if held is not None:
        full = aggregate_tvdmi(recs, None, agents, items)
        write_matrix(full.restrict(held), run.output("test_matrix.csv"))
        write_mask(held, run.output("holdout.csv"), agents, items)
    run.finish()


@cli.command()
@click.option("--spec", "spec_path", type=existing_file, default=None, help="SyntheticSpec YAML")
@click.option("--K", "n_agents", type=int, default=None, help="Agents (default 30)")
@click.option("--J", "n_items", type=int, default=None, help="Items (default 200)")
@click.option("--noise-sd", type=float, default=None, help="Gaussian noise SD (default 0.12)")
@click.option(
    "--saturation", type=float, default=None, help="Fraction of cells pushed to ±1 (default 0.025)"
)
@click.option(
    "--holdout-fraction",
    type=float,
    default=DEFAULT_HOLDOUT_FRACTION,
    show_default=True,
    help="Fraction of pairs written to holdout.csv; 0 disables",
)
@opt_seed
@opt_out
def synth(
    spec_path: Path | None,
    n_agents: int | None,
    n_items: int | None,
    noise_sd: float | None,
    saturation: float | None,
    holdout_fraction: float,
    seed: int,
    out_dir: Path,
) -> None:
    """Generate a synthetic additive matrix with ground truth and agent labels."""
    base = load_yaml_model(spec_path, SyntheticSpec) if spec_path else SyntheticSpec()
    overrides = {
        "n_agents": n_agents,
        "n_items": n_items,
        "noise_sd": noise_sd,
        "saturation_push": saturation,
        "seed": seed,
    }
    spec = SyntheticSpec.model_validate(
        {**base.model_dump(), **{k: v for k, v in overrides.items() if v is not None}}
    )
    config = {
        "spec": spec.model_dump(mode="json"),
        "holdout_fraction": holdout_fraction,
    }
    run = RunContext("synth", out_dir, config, seeds={"synthetic": seed, "holdout": seed})
    run.add_input(spec_path)

    data = generate_synthetic(spec)
    write_matrix(data.matrix, run.output("matrix.csv"))
    write_params(data.truth, run.output("truth.json"))
    write_labels(data.labels, run.output("labels.csv"))
    if holdout_fraction > 0:
        split = make_holdout(spec.n_agents, spec.n_items, holdout_fraction, seed)
        write_mask(
            split.holdout, run.output("holdout.csv"), data.matrix.agent_ids, data.matrix.item_ids
        )
    run.finish()


@cli.command()
@click.option("--matrix", type=existing_file, default=None, help="Score matrix giving dimensions")
@click.option("--K", "n_agents", type=int, default=None, help="Agents (without --matrix)")
@click.option("--J", "n_items", type=int, default=None, help="Items (without --matrix)")
@click.option("--holdout", type=existing_file, default=None, help="Holdout pairs to avoid")
@click.option("--regime", type=REGIME_CHOICES, required=True)
@click.option("--alpha", type=float, default=None, help="Row fraction (row, hybrid)")
@click.option("--beta", type=float, default=None, help="Column fraction (column, hybrid)")
@click.option("--C", "c", type=float, default=None, help="nlogn multiplier")
@opt_d_min
@opt_seed
@opt_out
def mask(
    matrix: Path | None,
    n_agents: int | None,
    n_items: int | None,
    holdout: Path | None,
    regime: str,
    alpha: float | None,
    beta: float | None,
    c: float | None,
    d_min: int,
    seed: int,
    out_dir: Path,
) -> None:
    """Sample a training mask with degree and connectivity repair."""
    try:
        spec = SamplingSpec(regime=regime, alpha=alpha, beta=beta, c=c, d_min=d_min, seed=seed)
    except ValidationError as e:
        raise click.UsageError(str(e)) from e

    forbidden: ObservationMask | None = None
    if matrix is not None:
        m = read_matrix(matrix)
        agent_ids, item_ids = m.agent_ids, m.item_ids
        forbidden = m.mask.complement()
    elif n_agents is not None and n_items is not None:
        agent_ids, item_ids = default_ids("a", n_agents), default_ids("q", n_items)
    else:
        raise click.UsageError("Give --matrix or both --K and --J")

    config = {
        "matrix": str(matrix) if matrix else None,
        "shape": [len(agent_ids), len(item_ids)],
        "holdout": str(holdout) if holdout else None,
        "spec": spec.model_dump(mode="json", by_alias=True),
    }
    run = RunContext("mask", out_dir, config, seeds={"mask": seed})
    run.add_input(matrix)
    run.add_input(holdout)
    if holdout is not None:
        held = read_mask(holdout, agent_ids, item_ids)
        forbidden = held if forbidden is None else forbidden.union(held)

    sampled, report = make_mask(len(agent_ids), len(item_ids), spec, forbidden)
    write_mask(sampled, run.output("mask.csv"), agent_ids, item_ids)
    run.write_model(
        "connectivity.json",
        {**report.model_dump(mode="json"), "coverage": sampled.coverage},
    )
    run.finish()


@cli.command()
@opt_matrix
@click.option("--mask", "mask_path", type=existing_file, default=None, help="Training pairs CSV")
@opt_method
@click.option(
    "--link",
    type=LINK_CHOICES,
    default=None,
    help="Fit clipped_linear in this link space instead (probit or logit)",
)
@opt_lambda
@click.option("--max-iters", type=int, default=None)
@click.option("--tol", type=float, default=None)
@click.option("--rank", type=int, default=None, help="Rank of the svd and uv baselines")
@opt_config
@opt_seed
@opt_out
def fit(
    matrix: Path,
    mask_path: Path | None,
    method: str,
    link: str | None,
    ridge: float | None,
    max_iters: int | None,
    tol: float | None,
    rank: int | None,
    config_path: Path | None,
    seed: int,
    out_dir: Path,
) -> None:
    """Fit one estimator and write its parameters and completed matrix."""
    if link is not None and link != LinkFunction.IDENTITY.value:
        if method != "clipped_linear":
            raise click.UsageError("--link applies to --method clipped_linear only")
        method = f"rasch_{link}"
    cfg = fit_config(
        config_path, ridge=ridge, max_iters=max_iters, tol=tol, rank=rank, seed=seed
    )
    config = {
        "matrix": str(matrix),
        "mask": str(mask_path) if mask_path else None,
        "method": method,
        "fit": cfg.model_dump(mode="json", by_alias=True),
    }
    run = RunContext("fit", out_dir, config, seeds={"fit": seed})
    run.add_input(matrix)
    run.add_input(mask_path)
    run.add_input(config_path)

    m = read_matrix(matrix)
    if mask_path is not None:
        m = m.restrict(read_mask(mask_path, m.agent_ids, m.item_ids))
    result = fit_method(method, m, cfg)

    write_matrix(result.as_score_matrix(), run.output("completed.csv"))
    if result.params is not None:
        write_params(result.params, run.output("params.json"))
    write_fit_result(result, run.output("fit.json"), completed_path="completed.csv")
    run.finish()


@cli.command()
@opt_matrix
@click.option(
    "--link",
    "links",
    type=LINK_CHOICES,
    multiple=True,
    help="Link to compare (repeatable; default identity, probit, logit)",
)
@click.option(
    "--n-rect", type=int, default=DEFAULT_N_RECT, show_default=True, help="Rectangles sampled"
)
@click.option(
    "--n-boot",
    type=int,
    default=DEFAULT_N_BOOT,
    show_default=True,
    help="Bootstrap resamples; 0 skips the bootstrap",
)
@click.option(
    "--threshold",
    type=float,
    default=ADDITIVITY_THRESHOLD,
    show_default=True,
    help="Median |Δ| below which a link counts as additive",
)
@click.option(
    "--predictions/--no-predictions",
    default=True,
    show_default=True,
    help="Also measure the curl of each link's fitted predictions",
)
@opt_config
@opt_seed
@opt_jobs
@opt_out
def curl(
    matrix: Path,
    links: tuple[str, ...],
    n_rect: int,
    n_boot: int,
    threshold: float,
    predictions: bool,
    config_path: Path | None,
    seed: int,
    n_jobs: int | None,
    out_dir: Path,
) -> None:
    """Rectangle curl per link, with bootstrap intervals for the differences."""
    kinds = list(links) or [link.value for link in ALL_LINKS]
    cfg = fit_config(config_path)
    config = {
        "matrix": str(matrix),
        "links": kinds,
        "n_rect": n_rect,
        "n_boot": n_boot,
        "threshold": threshold,
        "predictions": predictions,
        "fit": cfg.model_dump(mode="json", by_alias=True),
    }
    run = RunContext("curl", out_dir, config, seeds={"rectangles": seed, "bootstrap": seed})
    run.add_input(matrix)
    run.add_input(config_path)

    m = read_matrix(matrix)
    summaries = curl_link_ablation(m, kinds, n_rect=n_rect, seed=seed)
    report = CurlReport(
        source=matrix.name,
        n_rect=n_rect,
        seed=seed,
        threshold=threshold,
        summaries=summaries,
        verdicts={name: additivity_verdict(s, threshold) for name, s in summaries.items()},
        prediction_curl=prediction_curl(m, kinds, n_rect, seed, cfg) if predictions else {},
        bootstrap=(
            curl_bootstrap(m, kinds, n_boot=n_boot, n_rect=n_rect, seed=seed, n_jobs=n_jobs)
            if n_boot > 0
            else None
        ),
    )
    run.write_model("curl.json", report)
    run.finish()


@cli.command(name="eval")
@opt_matrix
@opt_test_matrix
@click.option("--holdout", type=existing_file, required=True, help="Holdout pairs CSV")
@click.option(
    "--mask",
    "mask_path",
    type=existing_file,
    default=None,
    help="Training pairs CSV (default: every non-holdout pair)",
)
@opt_method
@opt_n_boot
@opt_labels
@opt_lambda
@opt_config
@opt_seed
@opt_jobs
@opt_out
def evaluate(
    matrix: Path,
    test_matrix: Path | None,
    holdout: Path,
    mask_path: Path | None,
    method: str,
    n_boot: int,
    labels: Path | None,
    ridge: float | None,
    config_path: Path | None,
    seed: int,
    n_jobs: int | None,
    out_dir: Path,
) -> None:
    """Evaluate one training mask on the holdout with bootstrap intervals."""
    cfg = fit_config(config_path, ridge=ridge)
    config = {
        "matrix": str(matrix),
        "test_matrix": str(test_matrix) if test_matrix else None,
        "holdout": str(holdout),
        "mask": str(mask_path) if mask_path else None,
        "method": method,
        "n_boot": n_boot,
        "labels": str(labels) if labels else None,
        "fit": cfg.model_dump(mode="json", by_alias=True),
    }
    run = RunContext("eval", out_dir, config, seeds={"bootstrap": seed})
    for path in (matrix, test_matrix, holdout, mask_path, labels, config_path):
        run.add_input(path)

    m, held = _evaluation_matrix(matrix, test_matrix, holdout)
    if mask_path is not None:
        train = read_mask(mask_path, m.agent_ids, m.item_ids)
    else:
        train = held.complement()
    report = bootstrap_eval(
        m,
        held,
        train,
        method=method,
        n_boot=n_boot,
        seed=seed,
        cfg=cfg,
        labels=_labels_or_none(labels, m),
        n_jobs=n_jobs,
    )
    run.write_model("eval.json", report)
    run.finish()


@cli.command(name="sweep")
@opt_matrix
@opt_test_matrix
@click.option("--holdout", type=existing_file, required=True, help="Holdout pairs CSV")
@click.option("--preset", default=None, help="Named sweep preset (see `presets`)")
@click.option(
    "--preset-file", type=existing_file, default=None, help="SweepPreset YAML with a custom grid"
)
@click.option("--regime", type=REGIME_CHOICES, default=None, help="Regime for a custom grid")
@click.option("--alpha", "alphas", type=float, multiple=True, help="Row fractions (repeatable)")
@click.option("--beta", "betas", type=float, multiple=True, help="Column fractions (repeatable)")
@click.option("--C", "cs", type=float, multiple=True, help="nlogn multipliers (repeatable)")
@opt_d_min
@click.option(
    "--method", "methods", type=METHOD_CHOICES, multiple=True, help="Methods (repeatable)"
)
@click.option("--n-boot", type=int, default=None, help="Bootstrap resamples per cell")
@click.option("--dense/--no-dense", default=None, help="Include the dense reference rows")
@opt_labels
@opt_lambda
@opt_config
@opt_seed
@opt_jobs
@opt_out
def sweep_command(
    matrix: Path,
    test_matrix: Path | None,
    holdout: Path,
    preset: str | None,
    preset_file: Path | None,
    regime: str | None,
    alphas: tuple[float, ...],
    betas: tuple[float, ...],
    cs: tuple[float, ...],
    d_min: int,
    methods: tuple[str, ...],
    n_boot: int | None,
    dense: bool | None,
    labels: Path | None,
    ridge: float | None,
    config_path: Path | None,
    seed: int,
    n_jobs: int | None,
    out_dir: Path,
) -> None:
    """Evaluate a grid of sampling specs × methods on a fixed holdout."""
    sources = [s for s in (preset, preset_file, regime) if s is not None]
    if len(sources) != 1:
        raise click.UsageError("Give exactly one of --preset, --preset-file or --regime")

    if regime is not None:
        specs = grid_specs(regime, alphas, betas, cs, d_min, seed)
        grid_methods, grid_n_boot, grid_dense = ("clipped_linear",), 0, True
    else:
        chosen = get_preset(preset) if preset else load_yaml_model(preset_file, SweepPreset)
        chosen = chosen.with_seed(seed)
        specs = list(chosen.specs)
        grid_methods, grid_n_boot, grid_dense = chosen.methods, chosen.n_boot, chosen.include_dense

    methods = methods or grid_methods
    n_boot = grid_n_boot if n_boot is None else n_boot
    dense = grid_dense if dense is None else dense
    cfg = fit_config(config_path, ridge=ridge)
    config = {
        "matrix": str(matrix),
        "test_matrix": str(test_matrix) if test_matrix else None,
        "holdout": str(holdout),
        "preset": preset,
        "preset_file": str(preset_file) if preset_file else None,
        "specs": [s.model_dump(mode="json", by_alias=True) for s in specs],
        "methods": list(methods),
        "n_boot": n_boot,
        "include_dense": dense,
        "labels": str(labels) if labels else None,
        "fit": cfg.model_dump(mode="json", by_alias=True),
    }
    run = RunContext("sweep", out_dir, config, seeds={"masks": seed, "bootstrap": seed})
    for path in (matrix, test_matrix, holdout, preset_file, labels, config_path):
        run.add_input(path)

    m, held = _evaluation_matrix(matrix, test_matrix, holdout)
    rows = sweep(
        m,
        held,
        specs,
        methods=methods,
        seed=seed,
        cfg=cfg,
        labels=_labels_or_none(labels, m),
        n_boot=n_boot,
        include_dense=dense,
        n_jobs=n_jobs,
    )
    write_sweep_csv(rows, run.output("sweep.csv"))
    run.write_model("sweep.json", {"rows": [row.model_dump(mode="json") for row in rows]})
    run.finish()


def _curl_inputs(values: Sequence[str]) -> dict[str, Path]:
    """``LABEL=PATH`` or ``PATH`` (label taken from the parent directory)."""
    out: dict[str, Path] = {}
    for value in values:
        label, sep, raw = value.partition("=")
        path = Path(raw if sep else value)
        if not path.is_file():
            raise click.BadParameter(f"File '{path}' does not exist", param_hint="--curl")
        if not sep:
            label = path.parent.name or path.stem
        if label in out:
            raise click.BadParameter(f"Duplicate dataset label '{label}'", param_hint="--curl")
        out[label] = path
    return out


@cli.command()
@click.option(
    "--curl",
    "curl_inputs",
    multiple=True,
    help="curl.json to tabulate, optionally as LABEL=PATH (repeatable)",
)
@click.option(
    "--sweep", "sweep_inputs", type=existing_file, multiple=True, help="sweep.csv (repeatable)"
)
@click.option("--digits", type=int, default=3, show_default=True)
@click.option("--title", default="Score recovery report", show_default=True)
@opt_out
def report(
    curl_inputs: tuple[str, ...],
    sweep_inputs: tuple[Path, ...],
    digits: int,
    title: str,
    out_dir: Path,
) -> None:
    """Render curl reports and sweep tables as Markdown."""
    curl_paths = _curl_inputs(curl_inputs)
    if not curl_paths and not sweep_inputs:
        raise click.UsageError("Give at least one --curl or --sweep input")
    config = {
        "curl": {label: str(path) for label, path in curl_paths.items()},
        "sweep": [str(p) for p in sweep_inputs],
        "digits": digits,
        "title": title,
    }
    run = RunContext("report", out_dir, config)
    for path in [*curl_paths.values(), *sweep_inputs]:
        run.add_input(path)

    builder = MarkdownReportBuilder(
        curl_reports={label: read_json_model(p, CurlReport) for label, p in curl_paths.items()},
        sweep_records=[record for p in sweep_inputs for record in read_sweep_csv(p)],
        manifest_ref=MANIFEST_NAME,
        config_digest=run.config_digest,
        digits=digits,
        title=title,
    )
    run.output("report.md").write_text(builder.render(), encoding="utf-8")
    run.finish()


@cli.command()
@click.option("--first", type=existing_file, required=True, help="params.json of one judge")
@click.option("--second", type=existing_file, required=True, help="params.json of another")
@opt_out
def compare(first: Path, second: Path, out_dir: Path) -> None:
    """Rank agreement of abilities and difficulties between two fits."""
    run = RunContext("compare", out_dir, {"first": str(first), "second": str(second)})
    run.add_input(first)
    run.add_input(second)
    agreement = compare_judges(read_params(first), read_params(second))
    run.write_model("agreement.json", agreement)
    run.finish()


@cli.command()
def presets() -> None:
    """List sweep presets and registered estimators as JSON."""
    payload = {"presets": list_presets(), "methods": list_methods()}
    click.echo(json.dumps(payload, indent=2))


def _fail(error: BaseException) -> None:
    click.echo(f"Error: {error}", err=True)


def main(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit status."""
    try:
        rv = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="additive-scores",
            standalone_mode=False,
        )
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_FAILURE
    except click.Abort:
        _fail(RuntimeError("Aborted"))
        return EXIT_FAILURE
    except InfeasibleError as e:
        logger.error("command_infeasible", error=str(e))
        _fail(e)
        return EXIT_INFEASIBLE
    except (ScoreRecoveryError, ValueError) as e:
        logger.error("command_invalid_data", error=str(e), error_type=type(e).__name__)
        _fail(e)
        return EXIT_DATA
    except Exception as e:
        logger.exception("command_failed", error=str(e))
        _fail(e)
        return EXIT_FAILURE
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
