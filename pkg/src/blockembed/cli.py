"""Command-line entry points.

Subcommands: ``sample``, ``embed``, ``cluster``, ``estimate``, ``mc-sim``,
``one-vs-all``, ``verify-bounds``, ``estimate-rank``.  Global flags
``--seed``, ``--config`` and ``--out`` apply to every subcommand; outputs
land in the ``--out`` directory with fixed file names.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import graphio
from .clustering import assign_blocks
from .errors import BlockEmbedError
from .experiments import (
    ExperimentConfig,
    LabeledGraph,
    mc_cells_to_csv,
    mc_summary_to_csv,
    one_vs_all_to_csv,
    run_bound_verification,
    run_mc_experiment,
    run_one_vs_all,
)
from .inference import estimate_params
from .sbm import sample_graph, sample_tau
from .spectral import (
    augment_diagonal,
    embed_adjacency,
    embed_laplacian,
    embed_matrix,
    estimate_rank,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockembed",
        description="Spectral embedding and clustering for blockmodel graphs",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--config", type=Path, help="JSON config (model or experiment)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a graph from a model config")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau-mode", choices=["exact", "multinomial"], default="exact")
    p.add_argument("--keep-prob", type=float, default=1.0, help="edge thinning")

    def add_graph_args(q):
        q.add_argument("--graph", type=Path, required=True, help="edge list file")
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--directed", action="store_true")

    p = sub.add_parser("embed", help="embed a graph, write coordinates CSV")
    add_graph_args(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--laplacian", action="store_true")
    p.add_argument("--augment-diagonal", action="store_true")

    p = sub.add_parser("cluster", help="embed and cluster a graph")
    add_graph_args(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--laplacian", action="store_true")
    p.add_argument(
        "--coords",
        choices=["scaled_left", "unscaled_left", "scaled_concat", "unscaled_concat"],
        default="scaled_left",
    )

    p = sub.add_parser("estimate", help="estimate parameters from labels")
    add_graph_args(p)
    p.add_argument("--labels", type=Path, required=True, help="node,label CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=None)

    p = sub.add_parser("estimate-rank", help="rank estimate from the spectrum")
    add_graph_args(p)

    sub.add_parser("mc-sim", help="Monte-Carlo error grid (needs --config)").add_argument(
        "--timings",
        action="store_true",
        help="record wall-clock runtimes (makes output nondeterministic)",
    )

    p = sub.add_parser("one-vs-all", help="category-vs-rest evaluation")
    add_graph_args(p)
    p.add_argument("--labels", type=Path, required=True, help="node_id label file")
    p.add_argument("--d", type=int, required=True)
    p.add_argument(
        "--variant",
        choices=[
            "adjacency_scaled",
            "adjacency_unscaled",
            "laplacian_scaled",
            "laplacian_unscaled",
        ],
        default="adjacency_scaled",
    )

    sub.add_parser("verify-bounds", help="bound checks over a grid (needs --config)")
    return parser


def _require_config(args) -> Path:
    if args.config is None:
        raise BlockEmbedError("this subcommand needs --config")
    return args.config


def _load_graph(args):
    return graphio.load_edge_list(args.graph, args.n, args.directed)


def _cmd_sample(args, out: Path) -> None:
    model = graphio.load_model(_require_config(args))
    tau = sample_tau(model, args.n, args.tau_mode, args.seed)
    g = sample_graph(model, tau, args.seed, edge_keep_prob=args.keep_prob)
    graphio.save_edge_list(g, out / "graph.txt")
    (out / "assignments.csv").write_text(
        "node,label\n"
        + "".join(f"{i},{int(b)}\n" for i, b in enumerate(tau.tau))
    )
    print(f"wrote {out / 'graph.txt'} and {out / 'assignments.csv'}")


def _cmd_embed(args, out: Path) -> None:
    g = _load_graph(args)
    if args.laplacian:
        emb = embed_laplacian(g, args.d)
    elif args.augment_diagonal:
        emb = embed_matrix(augment_diagonal(g), args.d)
    else:
        emb = embed_adjacency(g, args.d)
    graphio.embedding_to_csv(emb, out / "embedding.csv")
    print(f"wrote {out / 'embedding.csv'}")


def _cmd_cluster(args, out: Path) -> None:
    g = _load_graph(args)
    emb = embed_laplacian(g, args.d) if args.laplacian else embed_adjacency(g, args.d)
    clustering = assign_blocks(emb, args.coords, args.k, seed=args.seed)
    graphio.clustering_to_csv(clustering, out / "clustering.csv")
    summary = graphio.clustering_summary(clustering)
    (out / "cluster_summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n"
    )
    print(f"wrote {out / 'clustering.csv'} (objective {summary['objective']!r})")


def _cmd_estimate(args, out: Path) -> None:
    g = _load_graph(args)
    labels = graphio.load_label_column(args.labels, args.n)
    report = estimate_params(g, labels, args.k, d=args.d)
    graphio.estimation_to_json(report, out / "estimates.json")
    print(f"wrote {out / 'estimates.json'}")


def _cmd_estimate_rank(args, out: Path) -> None:
    g = _load_graph(args)
    d_hat, threshold = estimate_rank(g)
    print(f"d_hat={d_hat} threshold={threshold!r}")


def _cmd_mc_sim(args, out: Path) -> None:
    cfg = ExperimentConfig.from_json(_require_config(args))
    cells = run_mc_experiment(cfg, collect_timings=args.timings)
    mc_cells_to_csv(cells, out / "mc_results.csv")
    mc_summary_to_csv(cells, out / "mc_summary.csv")
    print(f"wrote {out / 'mc_results.csv'} and {out / 'mc_summary.csv'}")


def _cmd_one_vs_all(args, out: Path) -> None:
    g = _load_graph(args)
    labels, names = graphio.load_labels(args.labels, args.n)
    rows = run_one_vs_all(
        LabeledGraph(graph=g, labels=labels, label_names=names),
        args.variant,
        args.d,
        seed=args.seed,
    )
    one_vs_all_to_csv(rows, out / "one_vs_all.csv")
    print(f"wrote {out / 'one_vs_all.csv'}")


def _cmd_verify_bounds(args, out: Path) -> None:
    cfg = ExperimentConfig.from_json(_require_config(args))
    reports = run_bound_verification(cfg)
    graphio.bound_reports_to_csv(reports, out / "bounds.csv")
    held = sum(r.holds for r in reports)
    print(f"wrote {out / 'bounds.csv'} ({held}/{len(reports)} bounds held)")


_COMMANDS = {
    "sample": _cmd_sample,
    "embed": _cmd_embed,
    "cluster": _cmd_cluster,
    "estimate": _cmd_estimate,
    "estimate-rank": _cmd_estimate_rank,
    "mc-sim": _cmd_mc_sim,
    "one-vs-all": _cmd_one_vs_all,
    "verify-bounds": _cmd_verify_bounds,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        _COMMANDS[args.command](args, out)
    except BlockEmbedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
