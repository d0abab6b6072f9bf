"""Experiment harnesses: Monte-Carlo error curves, one-vs-all tasks, bound runs.

Every cell of an experiment derives its PRNG seed from the master seed and
the cell coordinates, so grids can grow without disturbing existing cells and
two runs of the same configuration are reproducible byte for byte.  Within a
replicate all embedding variants share one sampled graph, which keeps
variant comparisons paired.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import logging
import time
from pathlib import Path

import numpy as np

from . import bounds
from .clustering import assign_blocks
from .errors import PreconditionError
from .graphio import load_model
from .inference import adjusted_rand_index, misclassification
from .rng import derive_seed
from .sbm import (
    BlockAssignment,
    BlockModel,
    Graph,
    compute_constants,
    edge_probability_matrix,
    factorize_p,
    sample_graph,
    sample_tau,
)
from .spectral import embed_adjacency, embed_laplacian, embed_matrix, augment_diagonal

log = logging.getLogger(__name__)

# variant name -> (matrix kind, scaled coordinates?)
VARIANTS = {
    "adjacency_scaled": ("adjacency", True),
    "adjacency_unscaled": ("adjacency", False),
    "laplacian_scaled": ("laplacian", True),
    "laplacian_unscaled": ("laplacian", False),
}

MC_CSV_HEADER = "n,replicate,variant,error_count,error_rate,runtime_ms"
MC_SUMMARY_HEADER = "n,variant,mean_error_count,mean_error_rate"
ONE_VS_ALL_HEADER = "category,size,error_count,error_rate,ari"


@dataclass(eq=False)
class ExperimentConfig:
    """A model plus the grid, replication and pipeline choices of one run."""

    model: BlockModel
    n_grid: tuple[int, ...]
    replicates: int
    seed: int
    variants: tuple[str, ...] = ("adjacency_scaled",)
    tau_mode: str = "exact"
    diagonal_augment: bool = False

    def __post_init__(self):
        self.n_grid = tuple(int(n) for n in self.n_grid)
        self.variants = tuple(self.variants)
        if not self.n_grid or list(self.n_grid) != sorted(set(self.n_grid)):
            raise PreconditionError("n_grid must be nonempty and ascending")
        if self.replicates < 1:
            raise PreconditionError("replicates must be >= 1")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if not self.variants or unknown:
            raise PreconditionError(f"unknown variants: {unknown}")
        if self.tau_mode not in ("exact", "multinomial"):
            raise PreconditionError(f"unknown tau mode {self.tau_mode!r}")

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        with open(path) as fh:
            payload = json.load(fh)
        model = BlockModel(
            p=np.asarray(payload["model"]["P"], dtype=np.float64),
            rho=np.asarray(payload["model"]["rho"], dtype=np.float64),
            directed=bool(payload["model"]["directed"]),
        )
        return cls(
            model=model,
            n_grid=tuple(payload["n_grid"]),
            replicates=int(payload["replicates"]),
            seed=int(payload["seed"]),
            variants=tuple(payload.get("variants", ("adjacency_scaled",))),
            tau_mode=payload.get("tau_mode", "exact"),
            diagonal_augment=bool(payload.get("diagonal_augment", False)),
        )


@dataclass(frozen=True)
class McCell:
    n: int
    replicate: int
    variant: str
    error_count: int
    error_rate: float
    runtime_ms: float


def _clustering_coordinates(variant: str, undirected: bool) -> str:
    _, scaled = VARIANTS[variant]
    side = "left" if undirected else "concat"
    return f"{'scaled' if scaled else 'unscaled'}_{side}"


def _embed_variant(g: Graph, variant: str, d: int, diagonal_augment: bool):
    kind, _ = VARIANTS[variant]
    if kind == "laplacian":
        return embed_laplacian(g, d)
    if diagonal_augment:
        return embed_matrix(augment_diagonal(g), d)
    return embed_adjacency(g, d)


def _sample_replicate(
    cfg: ExperimentConfig, n: int, replicate: int
) -> tuple[BlockAssignment, Graph]:
    tau = sample_tau(
        cfg.model, n, cfg.tau_mode, derive_seed(cfg.seed, "tau", n, replicate)
    )
    g = sample_graph(cfg.model, tau, derive_seed(cfg.seed, "graph", n, replicate))
    return tau, g


def run_mc_experiment(
    cfg: ExperimentConfig, collect_timings: bool = False
) -> list[McCell]:
    """Error rate of each (n, replicate, variant) cell of the configuration.

    Each replicate samples labels and one graph, embeds it per variant,
    clusters with the true block count, and scores the permutation-minimized
    misclassification.  A failing cell is logged and skipped rather than
    aborting the run.  ``runtime_ms`` is 0 unless ``collect_timings`` is set,
    keeping default outputs reproducible.
    """
    k = cfg.model.k
    d = cfg.model.d
    cells: list[McCell] = []
    for n in cfg.n_grid:
        for rep in range(cfg.replicates):
            tau, g = _sample_replicate(cfg, n, rep)
            for variant in cfg.variants:
                started = time.perf_counter()
                try:
                    emb = _embed_variant(g, variant, d, cfg.diagonal_augment)
                    clustering = assign_blocks(
                        emb,
                        _clustering_coordinates(variant, not cfg.model.directed),
                        k,
                        seed=derive_seed(cfg.seed, "cluster", n, rep, variant),
                    )
                    score = misclassification(tau.tau, clustering.labels, k)
                except Exception:
                    log.exception(
                        "cell failed: n=%d replicate=%d variant=%s", n, rep, variant
                    )
                    continue
                elapsed = (time.perf_counter() - started) * 1e3
                cells.append(
                    McCell(
                        n=n,
                        replicate=rep,
                        variant=variant,
                        error_count=score.errors,
                        error_rate=score.rate,
                        runtime_ms=round(elapsed, 3) if collect_timings else 0.0,
                    )
                )
    return cells


def summarize_mc(cells: list[McCell]) -> list[tuple[int, str, float, float]]:
    """Per-(n, variant) means, ordered as first encountered."""
    groups: dict[tuple[int, str], list[McCell]] = {}
    for cell in cells:
        groups.setdefault((cell.n, cell.variant), []).append(cell)
    out = []
    for (n, variant), members in groups.items():
        out.append(
            (
                n,
                variant,
                float(np.mean([c.error_count for c in members])),
                float(np.mean([c.error_rate for c in members])),
            )
        )
    return out


def mc_cells_to_csv(cells: list[McCell], path: str | Path) -> None:
    lines = [MC_CSV_HEADER + "\n"]
    for c in cells:
        lines.append(
            f"{c.n},{c.replicate},{c.variant},{c.error_count},"
            f"{repr(float(c.error_rate))},{repr(float(c.runtime_ms))}\n"
        )
    Path(path).write_text("".join(lines))


def mc_summary_to_csv(cells: list[McCell], path: str | Path) -> None:
    lines = [MC_SUMMARY_HEADER + "\n"]
    for n, variant, mean_count, mean_rate in summarize_mc(cells):
        lines.append(
            f"{n},{variant},{repr(mean_count)},{repr(mean_rate)}\n"
        )
    Path(path).write_text("".join(lines))


@dataclass(eq=False)
class LabeledGraph:
    """A graph with per-node category names."""

    graph: Graph
    labels: list[str]
    label_names: list[str]

    def __post_init__(self):
        if len(self.labels) != self.graph.n:
            raise PreconditionError("labels must cover every node")
        if any(lab not in self.label_names for lab in self.labels):
            raise PreconditionError("labels must come from label_names")


def run_one_vs_all(
    lg: LabeledGraph, variant: str, d: int, seed: int = 0
) -> list[tuple[str, int, int, float, float]]:
    """Two-way clustering scored against each category-vs-rest split.

    The graph is embedded once at dimension ``d`` and clustered with k=2;
    each category's binarized truth is then compared to the clustering by
    misclassification count and adjusted Rand index.  Rows are
    ``(category, size, error_count, error_rate, ari)``.
    """
    if len(lg.label_names) < 2:
        raise PreconditionError("one-vs-all needs at least two categories")
    if variant not in VARIANTS:
        raise PreconditionError(f"unknown variant {variant!r}")
    g = lg.graph
    emb = _embed_variant(g, variant, d, diagonal_augment=False)
    clustering = assign_blocks(
        emb,
        _clustering_coordinates(variant, not g.directed),
        2,
        seed=derive_seed(seed, "one_vs_all", variant),
    )
    labels_arr = np.asarray(lg.labels, dtype=object)
    rows = []
    for name in lg.label_names:
        truth = np.where(labels_arr == name, 0, 1).astype(np.int64)
        score = misclassification(truth, clustering.labels, 2)
        ari = adjusted_rand_index(truth, clustering.labels)
        rows.append(
            (name, int((truth == 0).sum()), score.errors, score.rate, float(ari))
        )
    return rows


def one_vs_all_to_csv(rows, path: str | Path) -> None:
    lines = [ONE_VS_ALL_HEADER + "\n"]
    for name, size, errors, rate, ari in rows:
        lines.append(f"{name},{size},{errors},{repr(float(rate))},{repr(float(ari))}\n")
    Path(path).write_text("".join(lines))


def run_bound_verification(cfg: ExperimentConfig) -> list[bounds.BoundReport]:
    """Evaluate every bound check over the configured grid and replicates.

    Each replicate pairs a sampled graph with the edge-probability matrix
    that generated it.  Requires every grid point to satisfy the
    concentration check's minimum size.
    """
    for n in cfg.n_grid:
        if n < bounds.MIN_CONCENTRATION_N:
            raise PreconditionError(
                f"bound verification needs n >= {bounds.MIN_CONCENTRATION_N}, got {n}"
            )
    model = cfg.model
    factors = factorize_p(model)
    consts = compute_constants(model, factors)
    reports: list[bounds.BoundReport] = []
    for n in cfg.n_grid:
        for rep in range(cfg.replicates):
            tau, g = _sample_replicate(cfg, n, rep)
            q = edge_probability_matrix(factors, tau)
            ctx = {
                "seed": derive_seed(cfg.seed, "graph", n, rep),
                "model": model.digest,
            }
            reports.append(bounds.check_gram_concentration(g, q, ctx))
            reports.extend(
                bounds.check_singular_value_bounds(g, q, consts, model.d, ctx)
            )
            reports.extend(bounds.check_singular_value_transfer(g, q, model.d, ctx))
            if model.d >= 1:
                emb_q = embed_matrix(q, model.d)
                reports.append(bounds.check_row_separation(emb_q, tau.tau, consts, ctx))
                reports.append(bounds.check_subspace_alignment(g, q, model.d, ctx))
    return reports


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    return ExperimentConfig.from_json(path)


__all__ = [
    "ExperimentConfig",
    "LabeledGraph",
    "McCell",
    "VARIANTS",
    "MC_CSV_HEADER",
    "MC_SUMMARY_HEADER",
    "ONE_VS_ALL_HEADER",
    "load_experiment_config",
    "load_model",
    "mc_cells_to_csv",
    "mc_summary_to_csv",
    "one_vs_all_to_csv",
    "run_bound_verification",
    "run_mc_experiment",
    "run_one_vs_all",
    "summarize_mc",
]
