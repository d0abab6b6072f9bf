"""Blockmodel parameter types, latent factorization, and graph sampling.

A blockmodel is a pair ``(P, rho)``: a K-by-K matrix of edge probabilities
and a vector of block membership probabilities.  Because ``P`` has some rank
``d``, it factors as ``P = nu @ mu.T`` with ``nu, mu`` of width ``d``; rows of
``nu``/``mu`` act as latent positions whose dot products are edge
probabilities.  This module derives that factorization, the separation
constants of the latent geometry, and samples adjacency matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import hashlib
import math

import numpy as np

from .errors import DegenerateModel, DegenerateRank, PreconditionError
from .rng import generator, uniform_matrix

RANK_RTOL = 1e-10  # singular value counted nonzero iff > RANK_RTOL * sigma_1
_ATOL = 1e-12


def numerical_rank(p: np.ndarray) -> int:
    """Number of singular values above ``RANK_RTOL`` relative tolerance."""
    sigma = np.linalg.svd(p, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > RANK_RTOL * sigma[0]))


@dataclass(eq=False)
class BlockModel:
    """Edge-probability matrix ``p``, block probabilities ``rho``, rank ``d``.

    ``d`` defaults to the numerical rank of ``p``; declaring a larger value
    raises :class:`DegenerateRank`.  Construction also rejects models with a
    pair of blocks whose rows *and* columns of ``p`` coincide, since such
    blocks are statistically indistinguishable.
    """

    p: np.ndarray
    rho: np.ndarray
    directed: bool
    d: int = -1

    def __post_init__(self):
        self.p = np.ascontiguousarray(np.asarray(self.p, dtype=np.float64))
        self.rho = np.ascontiguousarray(np.asarray(self.rho, dtype=np.float64))
        k = self.k
        if self.p.shape != (k, k):
            raise PreconditionError(f"p must be {k}x{k}, got {self.p.shape}")
        if np.any(self.p < 0.0) or np.any(self.p > 1.0):
            raise PreconditionError("entries of p must lie in [0, 1]")
        if np.any(self.rho <= 0.0):
            raise PreconditionError("entries of rho must be strictly positive")
        if abs(float(self.rho.sum()) - 1.0) > _ATOL:
            raise PreconditionError(f"rho must sum to 1, got {self.rho.sum()!r}")
        if not self.directed and np.abs(self.p - self.p.T).max(initial=0.0) > _ATOL:
            raise PreconditionError("undirected models need a symmetric p")
        for i in range(k):
            for j in range(i + 1, k):
                row_gap = np.abs(self.p[i] - self.p[j]).max()
                col_gap = np.abs(self.p[:, i] - self.p[:, j]).max()
                if row_gap <= _ATOL and col_gap <= _ATOL:
                    raise DegenerateModel(f"blocks {i} and {j} are indistinguishable")
        rank = numerical_rank(self.p)
        if self.d < 0:
            self.d = rank
        elif self.d != rank:
            raise DegenerateRank(f"declared rank {self.d} but numerical rank is {rank}")
        self.p.setflags(write=False)
        self.rho.setflags(write=False)

    @property
    def k(self) -> int:
        return int(self.rho.shape[0])

    @cached_property
    def digest(self) -> str:
        """Short content hash used to tag reports produced from this model."""
        h = hashlib.blake2b(digest_size=6)
        h.update(self.p.tobytes())
        h.update(self.rho.tobytes())
        h.update(b"1" if self.directed else b"0")
        return h.hexdigest()


@dataclass(eq=False)
class RdpgFactors:
    """Latent factor pair with ``nu @ mu.T`` equal to the model's ``p``."""

    nu: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        self.nu = np.ascontiguousarray(np.asarray(self.nu, dtype=np.float64))
        self.mu = np.ascontiguousarray(np.asarray(self.mu, dtype=np.float64))
        if self.nu.shape != self.mu.shape:
            raise PreconditionError("nu and mu must share a shape")
        self.nu.setflags(write=False)
        self.mu.setflags(write=False)

    @property
    def d(self) -> int:
        return int(self.nu.shape[1])


@dataclass(frozen=True)
class ModelConstants:
    """Separation constants of the latent geometry.

    ``alpha``: smallest eigenvalue over the two factor Gram matrices.
    ``beta``: smallest over block pairs of the larger of the two latent row
    gaps; ``inf`` with ``beta_defined=False`` when only one block exists.
    ``gamma``: smallest block probability.
    """

    alpha: float
    beta: float
    gamma: float
    beta_defined: bool = True


@dataclass(eq=False)
class BlockAssignment:
    """Block labels for ``n`` nodes plus their per-block counts."""

    tau: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.tau = np.ascontiguousarray(np.asarray(self.tau, dtype=np.int64))
        self.counts = np.ascontiguousarray(np.asarray(self.counts, dtype=np.int64))
        k = self.counts.shape[0]
        if self.tau.size and (self.tau.min() < 0 or self.tau.max() >= k):
            raise PreconditionError(f"labels must lie in [0, {k})")
        expected = np.bincount(self.tau, minlength=k)
        if not np.array_equal(expected, self.counts):
            raise PreconditionError("counts do not match tau")
        self.tau.setflags(write=False)
        self.counts.setflags(write=False)

    @classmethod
    def from_tau(cls, tau: np.ndarray, k: int) -> "BlockAssignment":
        tau = np.asarray(tau, dtype=np.int64)
        return cls(tau, np.bincount(tau, minlength=k))

    @property
    def n(self) -> int:
        return int(self.tau.shape[0])


@dataclass(eq=False)
class Graph:
    """Dense loop-free 0/1 adjacency matrix on ``n`` nodes."""

    n: int
    a: np.ndarray
    directed: bool

    def __post_init__(self):
        self.a = np.ascontiguousarray(np.asarray(self.a, dtype=np.uint8))
        if self.a.shape != (self.n, self.n):
            raise PreconditionError(f"adjacency must be {self.n}x{self.n}")
        if np.any(self.a > 1):
            raise PreconditionError("adjacency entries must be 0 or 1")
        if np.any(np.diagonal(self.a)):
            raise PreconditionError("graphs carry no self-loops")
        if not self.directed and not np.array_equal(self.a, self.a.T):
            raise PreconditionError("undirected adjacency must be symmetric")
        self.a.setflags(write=False)

    def dense(self) -> np.ndarray:
        """Adjacency as a fresh float64 matrix."""
        return self.a.astype(np.float64)

    def degrees(self) -> np.ndarray:
        return self.a.sum(axis=1).astype(np.int64)


def factorize_probability_matrix(p: np.ndarray, d: int) -> RdpgFactors:
    """Rank-``d`` factorization ``p = nu @ mu.T`` via the truncated SVD.

    Raises :class:`DegenerateRank` when ``p`` has numerical rank below ``d``.
    """
    p = np.asarray(p, dtype=np.float64)
    u, sigma, vt = np.linalg.svd(p)
    if d > 0:
        if sigma[0] == 0.0 or sigma[min(d, len(sigma)) - 1] <= RANK_RTOL * sigma[0]:
            raise DegenerateRank(f"numerical rank of p is below the declared {d}")
    root = np.sqrt(sigma[:d])
    return RdpgFactors(u[:, :d] * root, vt[:d].T * root)


def factorize_p(model: BlockModel) -> RdpgFactors:
    """Latent factors of a model, so ``nu @ mu.T`` reconstructs ``model.p``."""
    return factorize_probability_matrix(model.p, model.d)


def compute_constants(model: BlockModel, factors: RdpgFactors) -> ModelConstants:
    """Tight separation constants for a factorized model.

    Raises :class:`DegenerateModel` when two latent rows coincide in both
    factors (``beta`` would be zero).  With a single block there is no row
    pair, so ``beta`` is the ``inf`` sentinel flagged as undefined.
    """
    nu, mu = factors.nu, factors.mu
    if factors.d == 0:
        alpha = 0.0
    else:
        alpha = float(
            min(
                np.linalg.eigvalsh(nu.T @ nu).min(),
                np.linalg.eigvalsh(mu.T @ mu).min(),
            )
        )
    k = nu.shape[0]
    beta = math.inf
    for i in range(k):
        for j in range(i + 1, k):
            gap = max(
                float(np.linalg.norm(nu[i] - nu[j])),
                float(np.linalg.norm(mu[i] - mu[j])),
            )
            beta = min(beta, gap)
    if k > 1 and beta == 0.0:
        raise DegenerateModel("two blocks share identical latent rows")
    return ModelConstants(
        alpha=alpha,
        beta=beta,
        gamma=float(model.rho.min()),
        beta_defined=k > 1,
    )


def largest_remainder_counts(rho: np.ndarray, n: int) -> np.ndarray:
    """Apportion ``n`` among blocks by largest remainder, low index on ties."""
    exact = np.asarray(rho, dtype=np.float64) * n
    base = np.floor(exact).astype(np.int64)
    leftover = n - int(base.sum())
    order = np.argsort(-(exact - base), kind="stable")
    base[order[:leftover]] += 1
    return base


def sample_tau(model: BlockModel, n: int, mode: str, seed: int) -> BlockAssignment:
    """Draw block labels for ``n`` nodes.

    ``multinomial`` draws labels independently with probabilities ``rho``;
    ``exact`` fixes the counts to the largest-remainder rounding of
    ``rho * n`` and shuffles the label order.
    """
    if n < 1:
        raise PreconditionError(f"need n >= 1, got {n}")
    rng = generator(seed)
    if mode == "multinomial":
        edges = np.cumsum(model.rho)
        tau = np.searchsorted(edges, rng.random(n), side="right")
        tau = np.minimum(tau, model.k - 1).astype(np.int64)
    elif mode == "exact":
        counts = largest_remainder_counts(model.rho, n)
        tau = np.repeat(np.arange(model.k, dtype=np.int64), counts)
        rng.shuffle(tau)
    else:
        raise PreconditionError(f"unknown tau mode {mode!r}")
    return BlockAssignment.from_tau(tau, model.k)


def sample_graph(
    model: BlockModel,
    tau: BlockAssignment,
    seed: int,
    edge_keep_prob: float = 1.0,
) -> Graph:
    """Sample an adjacency matrix conditioned on the block labels.

    Directed models draw every ordered pair independently; undirected models
    draw each unordered pair once and mirror it.  ``edge_keep_prob`` thins
    edges, equivalent to sampling from the model with ``p`` scaled by it.
    """
    if not 0.0 < edge_keep_prob <= 1.0:
        raise PreconditionError("edge_keep_prob must lie in (0, 1]")
    n = tau.n
    thresholds = edge_keep_prob * model.p[np.ix_(tau.tau, tau.tau)]
    hits = uniform_matrix(seed, n) < thresholds
    a = np.zeros((n, n), dtype=np.uint8)
    if model.directed:
        a[hits] = 1
        np.fill_diagonal(a, 0)
    else:
        upper = np.triu(hits, k=1)
        a[upper] = 1
        a |= a.T
    return Graph(n=n, a=a, directed=model.directed)


def latent_positions(factors: RdpgFactors, tau: BlockAssignment) -> tuple[np.ndarray, np.ndarray]:
    """Per-node latent rows ``(x, y)`` induced by the block labels."""
    return factors.nu[tau.tau], factors.mu[tau.tau]


def edge_probability_matrix(factors: RdpgFactors, tau: BlockAssignment) -> np.ndarray:
    """The n-by-n matrix of pairwise edge probabilities ``x @ y.T``."""
    x, y = latent_positions(factors, tau)
    q = x @ y.T
    return np.clip(q, 0.0, 1.0)
