"""Square-error clustering of embedded node coordinates.

The target criterion is the within-cluster sum of squared distances
(centroids free, labels free).  ``cluster_mse`` approaches it with Lloyd
iterations restarted from k-means++ seeds; ``cluster_exact`` solves it
globally by enumeration for small instances and certifies the quality of the
iterative path in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import PreconditionError, TooLarge
from .spectral import Embedding

DEFAULT_RESTARTS = 50
DEFAULT_MAX_ITERS = 300
DEFAULT_TOL = 1e-10
EXACT_GUARD = 10_000_000


@dataclass(eq=False)
class Clustering:
    """Labels, centroids and the realized square-error objective.

    Centroids equal the mean of their assigned rows; clusters left empty by
    the optimizer are listed in ``empty_clusters`` (their centroid rows are
    zero).  ``objective_trace`` records the per-iteration objective of the
    winning restart and is nonincreasing.
    """

    labels: np.ndarray
    centroids: np.ndarray
    objective: float
    empty_clusters: tuple[int, ...] = ()
    iterations: int = 0
    restart: int = 0
    objective_trace: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        self.labels = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        self.centroids = np.ascontiguousarray(
            np.asarray(self.centroids, dtype=np.float64)
        )
        self.labels.setflags(write=False)
        self.centroids.setflags(write=False)

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])


def _direct_objective(z: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(((z - centroids[labels]) ** 2).sum())


def _centroids_from_labels(z: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, tuple[int, ...]]:
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros((k, z.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, z)
    empty = tuple(int(c) for c in np.flatnonzero(counts == 0))
    safe = np.maximum(counts, 1)[:, None]
    return sums / safe, empty


def _kmeans_pp_init(z: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Standard distance-squared seeding; degenerate mass falls back to uniform."""
    n = z.shape[0]
    centroids = np.empty((k, z.shape[1]), dtype=np.float64)
    centroids[0] = z[rng.integers(n)]
    d2 = ((z - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        mass = d2.sum()
        if mass > 0:
            idx = rng.choice(n, p=d2 / mass)
        else:
            idx = rng.integers(n)
        centroids[i] = z[idx]
        d2 = np.minimum(d2, ((z - centroids[i]) ** 2).sum(axis=1))
    return centroids


def _lloyd_single(z, k, max_iters, tol, rng):
    """One restart; returns (objective, labels, centroids, trace)."""
    centroids = _kmeans_pp_init(z, k, rng)
    prev_labels = None
    prev_obj = np.inf
    trace = []
    for _ in range(max_iters):
        labels, counts, sums, _ = kernels.lloyd_iteration(z, centroids)
        if np.any(counts == 0):
            # revive each empty cluster with the point farthest from its
            # current centroid; deterministic (lowest cluster, lowest node)
            labels = np.asarray(labels).copy()
            d2 = ((z - centroids[labels]) ** 2).sum(axis=1)
            for c in np.flatnonzero(counts == 0):
                far = int(np.argmax(d2))
                labels[far] = c
                d2[far] = -1.0
            centroids, _ = _centroids_from_labels(z, labels, k)
        else:
            centroids = sums / counts[:, None]
        obj = _direct_objective(z, labels, centroids)
        trace.append(obj)
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        if prev_obj - obj <= tol * max(prev_obj, 1.0):
            break
        prev_labels = labels
        prev_obj = obj
    return trace[-1], labels, centroids, tuple(trace)


def cluster_mse(
    z: np.ndarray,
    k: int,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> Clustering:
    """Best-of-restarts Lloyd minimization of the square-error criterion.

    Each restart draws its k-means++ seeds from an independent child stream
    of ``seed``, so the result is deterministic and restarts may run in any
    order; the winner is the lexicographically smallest
    ``(objective, restart index)``.
    """
    z = np.ascontiguousarray(np.asarray(z, dtype=np.float64))
    if z.ndim != 2:
        raise PreconditionError("z must be 2-D")
    n = z.shape[0]
    if not 1 <= k <= n:
        raise PreconditionError(f"need 1 <= k <= {n}, got {k}")
    if restarts < 1:
        raise PreconditionError("restarts must be >= 1")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(r,))
        )
        obj, labels, centroids, trace = _lloyd_single(z, k, max_iters, tol, rng)
        if best is None or obj < best[0]:
            best = (obj, r, labels, centroids, trace)
    obj, r, labels, centroids, trace = best
    centroids, empty = _centroids_from_labels(z, labels, k)
    return Clustering(
        labels=labels,
        centroids=centroids,
        objective=_direct_objective(z, labels, centroids),
        empty_clusters=empty,
        iterations=len(trace),
        restart=r,
        objective_trace=trace,
    )


def cluster_exact(z: np.ndarray, k: int) -> Clustering:
    """Global minimum of the square-error criterion by full enumeration.

    Guarded by ``k ** n <= EXACT_GUARD`` (raises :class:`TooLarge`).  Among
    tied optima, returns the first in enumeration order, where node 0 is the
    most significant base-``k`` digit and label 0 sorts first.
    """
    z = np.ascontiguousarray(np.asarray(z, dtype=np.float64))
    if z.ndim != 2:
        raise PreconditionError("z must be 2-D")
    n = z.shape[0]
    if n < 1 or k < 1:
        raise PreconditionError("need n >= 1 and k >= 1")
    if k**n > EXACT_GUARD:
        raise TooLarge(f"{k}**{n} labelings exceed the {EXACT_GUARD} guard")
    labels, _ = kernels.exact_min_sse(z, k)
    labels = np.asarray(labels, dtype=np.int64)
    centroids, empty = _centroids_from_labels(z, labels, k)
    return Clustering(
        labels=labels,
        centroids=centroids,
        objective=_direct_objective(z, labels, centroids),
        empty_clusters=empty,
    )


def assign_blocks(emb: Embedding, variant: str, k: int, seed: int = 0) -> Clustering:
    """Cluster one of the embedding coordinate matrices into ``k`` blocks.

    ``variant`` picks the coordinates: ``unscaled_concat`` / ``scaled_concat``
    use the concatenated left+right matrices (the natural choice for directed
    graphs), ``unscaled_left`` / ``scaled_left`` the left factor alone (which
    suffices for undirected graphs).
    """
    if k < 2:
        raise PreconditionError("block assignment needs k >= 2")
    return cluster_mse(emb.coordinates(variant), k, seed=seed)
