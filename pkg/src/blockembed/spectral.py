"""Singular value decompositions and spectral node embeddings.

The rank-``d`` truncation of the SVD of an adjacency matrix is the best
rank-``d`` approximation in Frobenius norm, and its singular vectors (raw, or
scaled by the square root of their singular values) are the node coordinates
everything downstream clusters.  The same machinery embeds arbitrary
edge-probability matrices and the degree-normalized Laplacian.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, IsolatedNode, PreconditionError
from .sbm import Graph

_DEGENERATE_RTOL = 1e-12


@dataclass(eq=False)
class SvdResult:
    """Full SVD with nonincreasing singular values and canonical signs."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for arr in (self.u, self.sigma, self.v):
            arr.setflags(write=False)

    def truncation_error(self, d: int) -> float:
        """Frobenius error of the best rank-``d`` approximation."""
        return float(math.sqrt(np.sum(self.sigma[d:] ** 2)))


@dataclass(eq=False)
class EdgeProbMatrix:
    """A square matrix of edge probabilities, entries in [0, 1]."""

    q: np.ndarray

    def __post_init__(self):
        self.q = np.ascontiguousarray(np.asarray(self.q, dtype=np.float64))
        if self.q.ndim != 2 or self.q.shape[0] != self.q.shape[1]:
            raise PreconditionError("q must be square")
        if self.q.size and (self.q.min() < -1e-9 or self.q.max() > 1.0 + 1e-9):
            raise PreconditionError("entries of q must lie in [0, 1]")
        self.q = np.clip(self.q, 0.0, 1.0)
        self.q.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.q.shape[0])


@dataclass(eq=False)
class Embedding:
    """Rank-``d`` spectral coordinates of a square matrix.

    ``u``/``v`` hold the unscaled left/right singular vectors, ``x``/``y``
    the same columns scaled by the square root of their singular value.
    ``w`` and ``z`` are the row-wise concatenations ``[u | v]`` and
    ``[x | y]``.
    """

    d: int
    sigma: np.ndarray
    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        # slack covers column reordering inside degenerate sigma clusters
        slack = 1e-9 * max(float(self.sigma[0]) if self.sigma.size else 0.0, 1.0)
        if np.any(np.diff(self.sigma) > slack) or np.any(self.sigma < 0):
            raise PreconditionError("sigma must be nonincreasing and nonnegative")
        for arr in (self.sigma, self.u, self.v, self.x, self.y):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.u.shape[0])

    @property
    def w(self) -> np.ndarray:
        return np.hstack([self.u, self.v])

    @property
    def z(self) -> np.ndarray:
        return np.hstack([self.x, self.y])

    def coordinates(self, variant: str) -> np.ndarray:
        """Coordinate matrix for one of the clustering variants."""
        table = {
            "unscaled_concat": self.w,
            "scaled_concat": self.z,
            "unscaled_left": self.u,
            "scaled_left": self.x,
        }
        try:
            return table[variant]
        except KeyError:
            raise PreconditionError(f"unknown embedding variant {variant!r}") from None


def _canonicalize(u: np.ndarray, sigma: np.ndarray, v: np.ndarray):
    """Deterministic column order and signs for an SVD.

    Columns inside a cluster of (numerically) equal singular values are
    ordered by the row index of their largest-magnitude left entry; then each
    column pair is flipped so that entry is positive.  Ties pick the lowest
    row index via argmax.
    """
    r = sigma.shape[0]
    if r == 0:
        return u, sigma, v
    tol = _DEGENERATE_RTOL * max(float(sigma[0]), 1.0)
    anchors = np.abs(u).argmax(axis=0)
    start = 0
    order = np.arange(r)
    while start < r:
        stop = start + 1
        while stop < r and sigma[stop - 1] - sigma[stop] <= tol:
            stop += 1
        if stop - start > 1:
            cluster = order[start:stop]
            keys = np.lexsort((cluster, anchors[cluster]))
            order[start:stop] = cluster[keys]
        start = stop
    u, v, anchors = u[:, order], v[:, order], anchors[order]
    flip = u[anchors, np.arange(r)] < 0
    u = np.where(flip, -u, u)
    v = np.where(flip, -v, v)
    return u, sigma[order], v


def svd(m: np.ndarray) -> SvdResult:
    """Full SVD with descending singular values and canonical signs.

    Symmetric inputs go through the (faster, equally accurate) symmetric
    eigendecomposition; the singular values are then the absolute
    eigenvalues and the right vectors carry the eigenvalue signs.  Solver
    breakdowns surface as :class:`ConvergenceFailure`.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise PreconditionError("svd expects a matrix")
    if not np.all(np.isfinite(m)):
        raise PreconditionError("svd expects finite entries")
    if m.shape[0] == m.shape[1] and np.array_equal(m, m.T):
        try:
            lam, vecs = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure("symmetric eigensolver failed") from exc
        # descending |eigenvalue|; positive member first inside +/- ties
        order = np.lexsort((np.arange(lam.size), -np.sign(lam), -np.abs(lam)))
        lam = lam[order]
        u = vecs[:, order]
        signs = np.where(lam < 0, -1.0, 1.0)
        u, sigma, v = _canonicalize(u, np.abs(lam), u * signs)
    else:
        try:
            u, sigma, vt = np.linalg.svd(m, full_matrices=False)
        except np.linalg.LinAlgError:
            try:
                u, sigma, vt = scipy.linalg.svd(
                    m, full_matrices=False, lapack_driver="gesvd"
                )
            except Exception as exc:
                raise ConvergenceFailure("SVD did not converge") from exc
        u, sigma, v = _canonicalize(u, sigma, vt.T)
    return SvdResult(u=u, sigma=sigma, v=v)


def singular_values(m: np.ndarray) -> np.ndarray:
    """All singular values, descending, without forming singular vectors."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape[0] == m.shape[1] and np.array_equal(m, m.T):
        lam = np.linalg.eigvalsh(m)
        return np.sort(np.abs(lam))[::-1]
    return np.linalg.svd(m, compute_uv=False)


def _embed(m: np.ndarray, d: int) -> Embedding:
    n = m.shape[0]
    if not 1 <= d <= n:
        raise PreconditionError(f"need 1 <= d <= {n}, got {d}")
    res = svd(m)
    sigma = res.sigma[:d].copy()
    u = res.u[:, :d].copy()
    v = res.v[:, :d].copy()
    root = np.sqrt(sigma)
    return Embedding(d=d, sigma=sigma, u=u, v=v, x=u * root, y=v * root)


def embed_adjacency(g: Graph, d: int) -> Embedding:
    """Rank-``d`` spectral embedding of the adjacency matrix.

    The scaled coordinate pair ``(x, y)`` minimizes the Frobenius error
    ``||A - x @ y.T||`` over all rank-``d`` factorizations.
    """
    return _embed(g.dense(), d)


def embed_matrix(q: EdgeProbMatrix | np.ndarray, d: int) -> Embedding:
    """Spectral embedding of a real matrix (probability matrices included)."""
    m = q.q if isinstance(q, EdgeProbMatrix) else np.asarray(q, dtype=np.float64)
    return _embed(m, d)


def normalized_laplacian(g: Graph) -> np.ndarray:
    """``D^{-1/2} A D^{-1/2}`` for an undirected graph without isolated nodes."""
    if g.directed:
        raise PreconditionError("the normalized Laplacian needs an undirected graph")
    deg = g.degrees().astype(np.float64)
    if np.any(deg == 0):
        bad = int(np.argmax(deg == 0))
        raise IsolatedNode(f"node {bad} has degree 0")
    inv_root = 1.0 / np.sqrt(deg)
    return g.dense() * np.outer(inv_root, inv_root)


def embed_laplacian(g: Graph, d: int) -> Embedding:
    """Rank-``d`` embedding of the degree-normalized Laplacian."""
    return _embed(normalized_laplacian(g), d)


def rank_threshold(n: int) -> float:
    """Singular-value cutoff ``3^(1/4) n^(3/4) (ln n)^(1/4)``."""
    return 3.0 ** 0.25 * float(n) ** 0.75 * math.log(n) ** 0.25


def estimate_rank(g: Graph) -> tuple[int, float]:
    """Estimated latent rank: singular values strictly above the cutoff.

    The cutoff grows like ``n^(3/4)`` while the signal singular values of a
    blockmodel grow linearly in ``n``, so the count converges to the rank of
    the probability matrix.  Returns ``(d_hat, threshold)``.
    """
    if g.n < 2:
        raise PreconditionError("rank estimation needs n >= 2")
    threshold = rank_threshold(g.n)
    sigma = singular_values(g.dense())
    return int(np.count_nonzero(sigma > threshold)), threshold


def augment_diagonal(g: Graph) -> EdgeProbMatrix:
    """Adjacency with diagonal entry ``deg(u) / (n - 1)``.

    A bounded diagonal modification that tends to improve the embedding of
    the (loop-free) adjacency matrix.
    """
    q = g.dense()
    np.fill_diagonal(q, g.degrees() / max(g.n - 1, 1))
    return EdgeProbMatrix(q)
