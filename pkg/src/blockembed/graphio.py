"""File formats: model JSON, edge lists, label files, CSV/JSON exports.

Edge lists hold one ``u v`` pair per line (0-based ids, ``#`` comments);
undirected files store each edge once.  Saving canonicalizes to sorted unique
pairs with ``u < v`` for undirected graphs, so a load/save round trip is
byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bounds import BoundReport
from .clustering import Clustering
from .errors import (
    DuplicateNode,
    MissingNode,
    OutOfRange,
    ParseError,
    PreconditionError,
    SelfLoop,
)
from .inference import EstimationReport
from .sbm import BlockModel, Graph
from .spectral import Embedding


def load_model(path: str | Path) -> BlockModel:
    """Read a model file: JSON with keys ``P``, ``rho``, ``directed``."""
    with open(path) as fh:
        payload = json.load(fh)
    try:
        return BlockModel(
            p=np.asarray(payload["P"], dtype=np.float64),
            rho=np.asarray(payload["rho"], dtype=np.float64),
            directed=bool(payload["directed"]),
        )
    except KeyError as exc:
        raise ParseError(f"model file missing key {exc}") from exc


def save_model(model: BlockModel, path: str | Path) -> None:
    payload = {
        "P": model.p.tolist(),
        "rho": model.rho.tolist(),
        "directed": model.directed,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _parse_pair(line: str, lineno: int) -> tuple[int, int]:
    tokens = line.split()
    if len(tokens) != 2:
        raise ParseError(f"expected 'u v', got {line!r}", lineno)
    try:
        return int(tokens[0]), int(tokens[1])
    except ValueError:
        raise ParseError(f"non-integer node id in {line!r}", lineno) from None


def load_edge_list(path: str | Path, n: int, directed: bool) -> Graph:
    """Read an edge list into a dense graph.

    Duplicate edges are idempotent; self-loops and out-of-range ids raise.
    """
    a = np.zeros((n, n), dtype=np.uint8)
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            u, v = _parse_pair(line, lineno)
            if u == v:
                raise SelfLoop(f"line {lineno}: self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise OutOfRange(f"line {lineno}: node id outside [0, {n})")
            a[u, v] = 1
            if not directed:
                a[v, u] = 1
    return Graph(n=n, a=a, directed=directed)


def save_edge_list(g: Graph, path: str | Path) -> None:
    """Write the canonical edge list: sorted unique pairs, ``u < v`` if undirected."""
    if g.directed:
        rows, cols = np.nonzero(g.a)
    else:
        rows, cols = np.nonzero(np.triu(g.a, k=1))
    lines = [f"{int(u)} {int(v)}\n" for u, v in zip(rows, cols)]
    Path(path).write_text("".join(lines))


def load_labels(path: str | Path, n: int) -> tuple[list[str], list[str]]:
    """Read per-node category labels: one ``node_id label`` pair per line.

    Every node in ``[0, n)`` must appear exactly once.  Returns the label
    vector and the distinct names in first-appearance order.
    """
    labels: list[str | None] = [None] * n
    names: list[str] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ParseError(f"expected 'node label', got {line!r}", lineno)
            try:
                node = int(tokens[0])
            except ValueError:
                raise ParseError(f"non-integer node id in {line!r}", lineno) from None
            if not 0 <= node < n:
                raise OutOfRange(f"line {lineno}: node id outside [0, {n})")
            if labels[node] is not None:
                raise DuplicateNode(f"line {lineno}: node {node} labeled twice")
            labels[node] = tokens[1]
            if tokens[1] not in names:
                names.append(tokens[1])
    missing = [i for i, lab in enumerate(labels) if lab is None]
    if missing:
        raise MissingNode(f"nodes without a label: {missing[:5]}")
    return labels, names


def save_labels(labels: list[str], path: str | Path) -> None:
    Path(path).write_text(
        "".join(f"{i} {lab}\n" for i, lab in enumerate(labels))
    )


def embedding_to_csv(emb: Embedding, path: str | Path) -> None:
    """Scaled concatenated coordinates, one row per node."""
    width = 2 * emb.d
    header = "node," + ",".join(f"coord_{j + 1}" for j in range(width))
    z = emb.z
    lines = [header + "\n"]
    for node in range(emb.n):
        coords = ",".join(repr(float(val)) for val in z[node])
        lines.append(f"{node},{coords}\n")
    Path(path).write_text("".join(lines))


def clustering_to_csv(clustering: Clustering, path: str | Path) -> None:
    lines = ["node,label\n"]
    lines += [f"{i},{int(lab)}\n" for i, lab in enumerate(clustering.labels)]
    Path(path).write_text("".join(lines))


def clustering_summary(clustering: Clustering) -> dict:
    return {
        "objective": float(clustering.objective),
        "iterations": clustering.iterations,
        "restart": clustering.restart,
        "k": clustering.k,
        "empty_clusters": list(clustering.empty_clusters),
    }


def bound_reports_to_csv(reports: list[BoundReport], path: str | Path) -> None:
    """Schema: ``bound,n,seed,lhs,rhs,holds``."""
    lines = ["bound,n,seed,lhs,rhs,holds\n"]
    for rep in reports:
        n = rep.context.get("n", "")
        seed = rep.context.get("seed", "")
        lines.append(
            f"{rep.name},{n},{seed},{repr(float(rep.lhs))},"
            f"{repr(float(rep.rhs))},{str(rep.holds).lower()}\n"
        )
    Path(path).write_text("".join(lines))


def estimation_to_json(report: EstimationReport, path: str | Path) -> None:
    payload = {
        "rho_hat": report.rho_hat.tolist(),
        "P_hat": report.p_hat.tolist(),
        "nu_hat": report.nu_hat.tolist(),
        "mu_hat": report.mu_hat.tolist(),
        "n_hat": report.n_hat.tolist(),
        "d": report.d,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def require_columns(header: str, expected: str, path: str | Path) -> None:
    if header.rstrip("\n") != expected:
        raise PreconditionError(f"{path}: expected header {expected!r}")


def load_label_column(path: str | Path, n: int) -> np.ndarray:
    """Integer labels from a ``node,label`` CSV (as written by clustering)."""
    out = np.full(n, -1, dtype=np.int64)
    with open(path) as fh:
        require_columns(fh.readline(), "node,label", path)
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            try:
                node_s, lab_s = line.split(",")
                node, lab = int(node_s), int(lab_s)
            except ValueError:
                raise ParseError(f"bad row {line!r}", lineno) from None
            if not 0 <= node < n:
                raise OutOfRange(f"line {lineno}: node id outside [0, {n})")
            out[node] = lab
    if np.any(out < 0):
        raise MissingNode("label CSV does not cover every node")
    return out
