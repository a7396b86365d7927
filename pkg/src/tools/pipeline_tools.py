"""Pipeline tools, one per command-line subcommand.

Each tool validates its arguments with a pydantic ``args_schema`` and
returns a JSON summary of the artifacts it wrote. The validated arguments
are embedded in every artifact as ``run_config``.
"""

import json
import logging
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Tuple, Type

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from src.config.settings import (
    DEFAULT_SIZES,
    DATA_DIR,
    DESK_SCALE,
    LINDBLAD_DEFAULTS,
    CIRCUIT_DEFAULTS,
    NETWORK_DEFAULTS,
    ADAM_DEFAULTS,
    OUTPUT_DIR,
    RECONSTRUCTION_DEFAULTS,
    TRAINING_PRESETS,
    TSNE_DEFAULTS,
    TWONN_DEFAULTS,
)
from src.errors import ArgumentError
from src.data import generators, store
from src.learning import autoencoder
from src.analysis.correlation import latent_observable_correlation
from src.analysis.embedding import tsne
from src.analysis.intrinsic_dim import twonn_id, two_slope_analysis
from src.models.dataset import Dataset
from src.models.network import NetworkConfig, SweepPoint, SweepResult
from src.plotting.svg import emit_svg
from src.plotting.tables import Table, table_from_columns
from src.reconstruction.hamiltonian import reconstruct
from src.utils.files import atomic_write_text

logger = logging.getLogger(__name__)


class RunInput(BaseModel):
    """Arguments shared by every subcommand."""
    seed: int = Field(0, description="Master random seed")
    output_dir: str = Field(OUTPUT_DIR, description="Directory for all artifacts")
    jobs: int = Field(1, ge=1, description="Worker threads")
    quiet: bool = Field(False, description="Hide progress bars")


class PipelineTool:
    """Validate arguments with ``args_schema`` and run ``_run``."""

    name: ClassVar[str] = ""
    description: ClassVar[str] = ""
    args_schema: ClassVar[Type[BaseModel]] = RunInput

    def run(self, **kwargs) -> str:
        try:
            args = self.args_schema(**kwargs)
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            raise ArgumentError(f"{self.name}: invalid {where}: {first['msg']}") from exc
        self.run_config = {"tool": self.name, **args.model_dump()}
        Path(args.output_dir).mkdir(parents=True, exist_ok=True)
        result = self._run(**args.model_dump())
        return json.dumps(result, indent=2, default=str)

    def _run(self, **kwargs) -> Dict[str, Any]:
        raise NotImplementedError

    def provenance(self, **extra) -> Dict[str, Any]:
        return {"run_config": self.run_config, **extra}


def _input_path(path: str, output_dir: str, suffix: str = "") -> Path:
    """Resolve an input as given, then under the output and data directories."""
    for candidate in (Path(path), Path(output_dir) / path, Path(DATA_DIR) / path):
        probe = candidate.with_suffix(suffix) if suffix and candidate.suffix != suffix else candidate
        if probe.exists():
            return candidate
    raise ArgumentError(f"input file not found: {path}")


def _load_dataset(path: str, output_dir: str) -> Dataset:
    stem = Path(path)
    if stem.suffix in (".obs", ".meta", ".split"):
        stem = stem.with_suffix("")
    return store.load(_input_path(str(stem), output_dir, ".obs"))


def _latents(ds: Dataset, checkpoint: Optional[str], output_dir: str) -> np.ndarray:
    if checkpoint is None:
        return ds.values
    params, config, _ = autoencoder.load_checkpoint(_input_path(checkpoint, output_dir))
    return autoencoder.encode_dataset(params, config, ds.values)


def _ensure_split(ds: Dataset, fraction: float, seed: int) -> Dataset:
    return ds if ds.split is not None else store.split(ds, fraction, seed)


def _save_dataset(ds: Dataset, run_config: Dict[str, Any], output_dir: str, name: str) -> Path:
    ds.metadata["run_config"] = run_config
    return store.save(ds, Path(output_dir) / name)


# ---------------------------------------------------------------------------
# Dataset generation
# ---------------------------------------------------------------------------

class GenGgeInput(RunInput):
    """Input schema for GGE dataset generation."""
    n_charges: int = Field(1, ge=1, le=4, description="Number of Ising charges N_C")
    n: int = Field(TRAINING_PRESETS["gge"]["n_data"], ge=10, description="Number of states")
    L: int = Field(DEFAULT_SIZES["gge_L"], ge=2, le=12, description="Chain length")
    support: int = Field(DEFAULT_SIZES["support"], ge=1, le=4)
    J: float = Field(1.0)
    h_x: float = Field(0.6)
    train_fraction: float = Field(NETWORK_DEFAULTS["train_fraction"], gt=0, lt=1)
    name: str = Field("gge", description="Dataset file stem")


class GenGgeTool(PipelineTool):
    name = "gen-gge"
    description = "Sample (generalized) Gibbs ensembles and record Pauli-string observations."
    args_schema = GenGgeInput

    def _run(self, n_charges, n, L, support, J, h_x, train_fraction, name,
             seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = generators.sample_gge_dataset(n_charges, n, L, support, seed, J, h_x, jobs, quiet)
        ds = store.split(ds, train_fraction, seed)
        path = _save_dataset(ds, self.run_config, output_dir, name)
        return {"dataset": str(path), "rows": ds.n_rows, "dim": ds.dim,
                "n_charges": n_charges, "seed": seed}


class GenLindbladInput(RunInput):
    """Input schema for steady-state dataset generation."""
    kind: str = Field("rotated", pattern="^(rotated|structured)$")
    n: int = Field(TRAINING_PRESETS["lindblad"]["n_data"], ge=1)
    N: int = Field(DEFAULT_SIZES["lindblad_N"], ge=2, le=7)
    model: str = Field("chaotic", pattern="^(tfim|chaotic|structured)$")
    epsilon: float = Field(LINDBLAD_DEFAULTS["epsilon"], ge=0)
    support: int = Field(DEFAULT_SIZES["support"], ge=1, le=4)
    train_fraction: float = Field(NETWORK_DEFAULTS["train_fraction"], gt=0, lt=1)
    name: str = Field("lindblad")


class GenLindbladTool(PipelineTool):
    name = "gen-lindblad"
    description = "Solve Lindblad steady states for random bath realizations."
    args_schema = GenLindbladInput

    def _run(self, kind, n, N, model, epsilon, support, train_fraction, name,
             seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = generators.sample_lindblad_dataset(kind, n, N, model, epsilon, support, seed, jobs, quiet)
        ds = store.split(ds, train_fraction, seed)
        path = _save_dataset(ds, self.run_config, output_dir, name)
        return {"dataset": str(path), "rows": ds.n_rows, "dim": ds.dim, "kind": kind,
                "epsilon": epsilon, "seed": seed}


class GenCircuitInput(RunInput):
    """Input schema for random-circuit datasets."""
    n_initial: int = Field(CIRCUIT_DEFAULTS["n_initial"], ge=1)
    steps: int = Field(CIRCUIT_DEFAULTS["steps"], ge=1)
    L: int = Field(DEFAULT_SIZES["circuit_L"], ge=4, le=20)
    support: int = Field(DEFAULT_SIZES["support"], ge=1, le=4)
    record_steps: Optional[List[int]] = Field(None, description="Steps to record (default: dense then log)")
    fresh_odd_gate: bool = Field(CIRCUIT_DEFAULTS["fresh_odd_gate"])
    train_fraction: float = Field(NETWORK_DEFAULTS["train_fraction"], gt=0, lt=1)
    name: str = Field("circuit")


class GenCircuitTool(PipelineTool):
    name = "gen-circuit"
    description = "Evolve product states with random U(1) brickwork circuits; one dataset per recorded step."
    args_schema = GenCircuitInput

    def _run(self, n_initial, steps, L, support, record_steps, fresh_odd_gate, train_fraction,
             name, seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        datasets = generators.sample_circuit_datasets(
            n_initial, steps, L, support, seed, record_steps, fresh_odd_gate, jobs, quiet
        )
        index = Table(columns=["step", "time", "dataset"], provenance=self.provenance())
        for step, ds in datasets.items():
            ds = store.split(ds, train_fraction, seed)
            path = _save_dataset(ds, self.run_config, output_dir, f"{name}_t{step:04d}")
            index.append(step, step * CIRCUIT_DEFAULTS["dt"], path.name)
        index_path = index.save(Path(output_dir) / f"{name}_index.csv")
        return {"index": str(index_path), "datasets": len(datasets), "rows": n_initial, "seed": seed}


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

class NetworkInput(RunInput):
    """Network and optimizer settings shared by train and sweep."""
    dataset: str = Field(..., description="Dataset stem or .obs path")
    width: int = Field(DESK_SCALE["width"], ge=1)
    depth: int = Field(len(NETWORK_DEFAULTS["encoder_widths"]), ge=0)
    output_activation: str = Field(NETWORK_DEFAULTS["output_activation"], pattern="^(linear|tanh)$")
    batch_size: Optional[int] = Field(None, ge=1, description="Default: preset of the data source")
    steps: Optional[int] = Field(None, ge=1, description="Default: desk-scale step count")
    eval_every: int = Field(NETWORK_DEFAULTS["eval_every"], ge=1)
    lr: float = Field(ADAM_DEFAULTS["lr"], gt=0)
    train_fraction: float = Field(NETWORK_DEFAULTS["train_fraction"], gt=0, lt=1)


def _training_setup(ds: Dataset, width, depth, output_activation, batch_size, steps):
    preset = TRAINING_PRESETS.get(ds.source.value, TRAINING_PRESETS["gge"])
    config = NetworkConfig(
        input_dim=ds.dim,
        latent_dim=0,
        encoder_widths=(width,) * depth,
        decoder_widths=(width,) * depth,
        output_activation=output_activation,
    )
    batch = batch_size or preset["batch_size"]
    n_steps = steps or min(preset["steps"], DESK_SCALE["steps"])
    return config, batch, n_steps


class TrainInput(NetworkInput):
    latent_dim: int = Field(1, ge=0)
    name: str = Field("model", description="Checkpoint file stem")


class TrainTool(PipelineTool):
    name = "train"
    description = "Train one bottleneck autoencoder with early stopping."
    args_schema = TrainInput

    def _run(self, dataset, width, depth, output_activation, batch_size, steps, eval_every, lr,
             train_fraction, latent_dim, name, seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = _ensure_split(_load_dataset(dataset, output_dir), train_fraction, seed)
        config, batch, n_steps = _training_setup(ds, width, depth, output_activation, batch_size, steps)
        report = autoencoder.train(ds, config.with_latent(latent_dim), batch, n_steps,
                                   eval_every, seed, lr, quiet)
        out = Path(output_dir)
        checkpoint = out / f"{name}.npz"
        autoencoder.save_checkpoint(checkpoint, report.best_params, report.config, report,
                                    {"run_config": self.run_config})
        curve = table_from_columns(
            {"step": report.eval_steps, "train_loss": report.train_losses,
             "test_loss": report.test_losses},
            self.provenance(),
        )
        curve.save(out / f"{name}_curve.csv")
        emit_svg(curve, "line", out / f"{name}_curve.svg", "step", "test_loss", log_y=True,
                 title=f"N_L={latent_dim}")
        return {"checkpoint": str(checkpoint), "best_test_loss": report.best_test_loss,
                "best_step": report.best_step, "baseline_loss": autoencoder.mean_baseline_loss(ds)}


class SweepInput(NetworkInput):
    latent_dims: List[int] = Field(default_factory=lambda: list(range(0, 6)))
    seeds: Optional[List[int]] = Field(None, description="Training seeds (default: the master seed)")
    name: str = Field("sweep")


def sweep_table(result: SweepResult, provenance: Dict[str, Any]) -> Table:
    seeds = result.points[0].seeds
    table = Table(columns=["latent_dim", "median_test_loss"] + [f"loss_seed{s}" for s in seeds],
                  provenance=provenance)
    for point in result.points:
        table.append(point.latent_dim, point.median, *point.losses)
    return table


def sweep_from_table(table: Table) -> SweepResult:
    seed_columns = [c for c in table.columns if c.startswith("loss_seed")]
    seeds = [int(c[len("loss_seed"):]) for c in seed_columns]
    points = []
    for row in table.rows:
        record = dict(zip(table.columns, row))
        losses = [float(record[c]) for c in seed_columns] or [float(record["median_test_loss"])]
        points.append(SweepPoint(int(record["latent_dim"]), losses, seeds or [0]))
    return SweepResult(points)


class SweepTool(PipelineTool):
    name = "sweep"
    description = "Train one network per latent width and record the best test losses."
    args_schema = SweepInput

    def _run(self, dataset, width, depth, output_activation, batch_size, steps, eval_every, lr,
             train_fraction, latent_dims, seeds, name, seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = _ensure_split(_load_dataset(dataset, output_dir), train_fraction, seed)
        config, batch, n_steps = _training_setup(ds, width, depth, output_activation, batch_size, steps)
        result, _ = autoencoder.latent_sweep(ds, latent_dims, config, batch, n_steps,
                                             seeds or [seed], eval_every, lr, jobs, quiet)
        baseline = autoencoder.mean_baseline_loss(ds)
        source = {"source": ds.source.value, "dataset": dataset,
                  **{k: ds.metadata[k] for k in ("time", "step", "n_charges", "epsilon")
                     if k in ds.metadata}}
        table = sweep_table(result, self.provenance(baseline_loss=baseline, data=source))
        out = Path(output_dir)
        table.save(out / f"{name}.csv")
        emit_svg(table, "line", out / f"{name}.svg", "latent_dim", "median_test_loss",
                 log_y=True, title="test error vs latent variables")
        return {"table": str(out / f"{name}.csv"), "curve": result.curve(), "baseline_loss": baseline}


# ---------------------------------------------------------------------------
# Latent analysis
# ---------------------------------------------------------------------------

class IntrinsicDimInput(RunInput):
    dataset: str = Field(...)
    checkpoint: Optional[str] = Field(None, description="Estimate on encoder latents instead of raw rows")
    discard_fraction: float = Field(TWONN_DEFAULTS["discard_fraction"], ge=0, lt=1)
    windows: Optional[List[Tuple[float, float]]] = Field(None, description="mu windows for slopes")
    min_window_points: int = Field(TWONN_DEFAULTS["min_window_points"], ge=1)
    name: str = Field("intrinsic_dim")


class IntrinsicDimTool(PipelineTool):
    name = "intrinsic-dim"
    description = "TwoNN intrinsic dimension and windowed power-law slopes."
    args_schema = IntrinsicDimInput

    def _run(self, dataset, checkpoint, discard_fraction, windows, min_window_points, name,
             seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = _load_dataset(dataset, output_dir)
        points = _latents(ds, checkpoint, output_dir)
        estimate = twonn_id(points, discard_fraction)
        summary: Dict[str, Any] = {"twonn": estimate.to_dict()}
        table = Table(columns=["quantity", "mu_lo", "mu_hi", "value", "n_points"],
                      provenance=self.provenance())
        table.append("twonn", 1.0, "inf", estimate.intrinsic_dim, estimate.n_points)
        if windows != []:
            try:
                slopes = two_slope_analysis(windows=windows, min_points=min_window_points,
                                            mu=estimate.mu)
            except ArgumentError as exc:
                if windows is not None:
                    raise
                logger.warning("skipping default slope windows: %s", exc)
                slopes = []
            for s in slopes:
                table.append("slope", s.window[0], s.window[1], s.slope, s.n_points)
            summary["slopes"] = [s.to_dict() for s in slopes]
        path = table.save(Path(output_dir) / f"{name}.csv")
        summary["table"] = str(path)
        return summary


class EmbedInput(RunInput):
    dataset: str = Field(...)
    checkpoint: Optional[str] = Field(None, description="Embed encoder latents instead of raw rows")
    perplexity: float = Field(TSNE_DEFAULTS["perplexity"], gt=0)
    iterations: int = Field(TSNE_DEFAULTS["iterations"], ge=1)
    color: List[str] = Field(default_factory=lambda: ["energy_density"],
                             description="Annotations used to colour the embedding")
    name: str = Field("embedding")


class EmbedTool(PipelineTool):
    name = "embed"
    description = "Exact t-SNE of latents, coloured by physical observables."
    args_schema = EmbedInput

    def _run(self, dataset, checkpoint, perplexity, iterations, color, name,
             seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = _load_dataset(dataset, output_dir)
        embedding = tsne(_latents(ds, checkpoint, output_dir), perplexity, iterations, seed,
                         quiet=quiet)
        columns: Dict[str, Any] = {"x": embedding.points[:, 0], "y": embedding.points[:, 1]}
        for key in color:
            if key in ds.annotations:
                columns[key] = ds.annotation(key)
            else:
                logger.warning("dataset has no annotation %r; not coloured", key)
        table = table_from_columns(columns, self.provenance(tsne=embedding.config))
        out = Path(output_dir)
        table.save(out / f"{name}.csv")
        plots = [
            emit_svg(table, "scatter", out / f"{name}_{key}.svg", "x", "y", color=key)["path"]
            for key in columns if key not in ("x", "y")
        ]
        return {"table": str(out / f"{name}.csv"), "plots": plots, "final_kl": embedding.final_kl}


class CorrelateInput(RunInput):
    dataset: str = Field(...)
    checkpoint: str = Field(..., description="Trained network providing the latents")
    observable: str = Field("energy_density", description="Annotation to correlate with")
    direction: Optional[int] = Field(None, ge=0, description="PCA direction of multi-dimensional latents")
    name: str = Field("correlation")


class CorrelateTool(PipelineTool):
    name = "correlate"
    description = "Spearman correlation between a latent coordinate and an observable."
    args_schema = CorrelateInput

    def _run(self, dataset, checkpoint, observable, direction, name,
             seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = _load_dataset(dataset, output_dir)
        latents = _latents(ds, checkpoint, output_dir)
        result = latent_observable_correlation(latents, ds.annotation(observable), direction)
        summary = {"observable": observable, **result.to_dict()}
        path = Path(output_dir) / f"{name}.json"
        atomic_write_text(path, json.dumps({**summary, **self.provenance()}, indent=2))
        summary["report"] = str(path)
        return summary


# ---------------------------------------------------------------------------
# Reconstruction and reports
# ---------------------------------------------------------------------------

class ReconstructInput(RunInput):
    dataset: str = Field(...)
    checkpoint: Optional[str] = Field(None, description="Network whose latents rank the candidates")
    sweep: Optional[str] = Field(None, description="Sweep table proving one latent suffices")
    force: bool = Field(False, description="Skip the latent-sweep evidence check")
    mode: str = Field("tangent", pattern="^(tangent|pca1)$")
    top_m: int = Field(RECONSTRUCTION_DEFAULTS["top_m"], ge=1,
                       le=RECONSTRUCTION_DEFAULTS["max_candidates"])
    candidates: Optional[List[str]] = Field(None, description="Fixed candidate labels")
    L_oracle: Optional[int] = Field(None, ge=2, le=12, description="Default: dataset chain length")
    k_neighbors: int = Field(RECONSTRUCTION_DEFAULTS["k_neighbors"], ge=1)
    max_rows: Optional[int] = Field(None, ge=1)
    name: str = Field("reconstruction")


class ReconstructTool(PipelineTool):
    name = "reconstruct"
    description = "Rank candidate terms and fit relative Hamiltonian couplings by Newton's method."
    args_schema = ReconstructInput

    def _run(self, dataset, checkpoint, sweep, force, mode, top_m, candidates, L_oracle,
             k_neighbors, max_rows, name, seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        ds = _load_dataset(dataset, output_dir)
        evidence = sweep_from_table(Table.load(_input_path(sweep, output_dir))) if sweep else None
        L = L_oracle or int(ds.metadata.get("L", ds.metadata.get("N", DEFAULT_SIZES["gge_L"])))
        result = reconstruct(
            ds, _latents(ds, checkpoint, output_dir), L, mode, top_m, candidates,
            evidence, force, k_neighbors, max_rows=max_rows, jobs=jobs, quiet=quiet,
        )
        out = Path(output_dir)
        report = {**result.to_dict(), **self.provenance()}
        atomic_write_text(out / f"{name}.json", json.dumps(report, indent=2, default=str))
        table = Table(columns=["label", "coefficient", "spread", "eliminated"],
                      provenance=self.provenance(reference=result.reference))
        for label, value in result.coefficients.items():
            table.append(label, value, result.spread.get(label, 0.0), label in result.eliminated)
        table.save(out / f"{name}.csv")
        return {"report": str(out / f"{name}.json"), "coefficients": result.coefficients,
                "reference": result.reference, "eliminated": result.eliminated,
                "converged_rows": result.n_converged, "rows": result.n_rows}


class ReportInput(RunInput):
    sweeps: List[str] = Field(..., min_length=1, description="Sweep tables to aggregate")
    labels: Optional[List[str]] = Field(None, description="Series names (default: file stems)")
    name: str = Field("report")


class ReportTool(PipelineTool):
    name = "report"
    description = "Overlay sweep curves and build the error-vs-time heatmap."
    args_schema = ReportInput

    def _run(self, sweeps, labels, name, seed, output_dir, jobs, quiet) -> Dict[str, Any]:
        if labels is not None and len(labels) != len(sweeps):
            raise ArgumentError("one label per sweep table is required")
        tables = [Table.load(_input_path(p, output_dir)) for p in sweeps]
        names = labels or [Path(p).stem for p in sweeps]
        out = Path(output_dir)
        summary: Dict[str, Any] = {}

        curves = Table(columns=["series", "latent_dim", "test_loss"],
                       provenance=self.provenance(sources=sweeps))
        timed = Table(columns=["time", "latent_dim", "test_loss"],
                      provenance=self.provenance(sources=sweeps))
        for series, table in zip(names, tables):
            time = table.provenance.get("data", {}).get("time")
            for latent_dim, loss in zip(table.column("latent_dim"), table.column("median_test_loss")):
                curves.append(series, int(latent_dim), float(loss))
                if time is not None:
                    timed.append(float(time), int(latent_dim), float(loss))

        curves.save(out / f"{name}_curves.csv")
        emit_svg(curves, "line", out / f"{name}_curves.svg", "latent_dim", "test_loss",
                 group="series", log_y=True, title="test error vs latent variables")
        summary["curves"] = str(out / f"{name}_curves.svg")

        if len(timed):
            log_time = bool(np.all(timed.column("time").astype(float) > 0))
            timed.save(out / f"{name}_heatmap.csv")
            emit_svg(timed, "heatmap", out / f"{name}_heatmap.svg", "time", "latent_dim",
                     color="test_loss", log_x=log_time, title="test error vs time")
            summary["heatmap"] = str(out / f"{name}_heatmap.svg")
        return summary


TOOLS: Dict[str, Type[PipelineTool]] = {
    tool.name: tool
    for tool in (GenGgeTool, GenLindbladTool, GenCircuitTool, TrainTool, SweepTool,
                 IntrinsicDimTool, EmbedTool, CorrelateTool, ReconstructTool, ReportTool)
}
