"""Post-clustering estimation and evaluation.

Once nodes carry (estimated) block labels, the model parameters follow by
counting: block proportions from label frequencies and edge probabilities
from block-pair edge densities.  Evaluation against reference labels uses
the permutation-minimized disagreement count and the adjusted Rand index;
subspace comparisons use orthogonal Procrustes alignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
import warnings

import numpy as np
import scipy.optimize

from .errors import (
    DegenerateWarning,
    EmptyBlock,
    PreconditionError,
    SingletonBlock,
)
from .sbm import Graph
from .spectral import EdgeProbMatrix, embed_matrix, estimate_rank

_EXHAUSTIVE_K = 8


@dataclass(eq=False)
class EstimationReport:
    """Plug-in estimates derived from a labeled graph."""

    rho_hat: np.ndarray
    p_hat: np.ndarray
    nu_hat: np.ndarray
    mu_hat: np.ndarray
    n_hat: np.ndarray
    d: int


@dataclass(frozen=True)
class MisclassificationResult:
    """Minimal disagreement count over all relabelings of the estimate.

    ``best_perm[j]`` is the reference label matched to estimated label ``j``.
    """

    errors: int
    rate: float
    best_perm: tuple[int, ...]


@dataclass(eq=False)
class ProcrustesResult:
    """Orthogonal matrix ``r`` minimizing ``||w @ r - w_tilde||_F``."""

    r: np.ndarray
    residual: float


def estimate_params(
    g: Graph, tau_hat: np.ndarray, k: int, d: int | None = None
) -> EstimationReport:
    """Estimate block proportions, edge probabilities and latent factors.

    ``p_hat[i, j]`` averages adjacency entries over ordered pairs across the
    estimated blocks; the within-block denominator excludes the (always-zero)
    diagonal.  Latent factors come from the spectral embedding of ``p_hat``
    at dimension ``d`` (estimated from the graph spectrum when omitted).
    Raises :class:`EmptyBlock` / :class:`SingletonBlock` when a block has
    fewer than the two members the denominators need.
    """
    tau_hat = np.asarray(tau_hat, dtype=np.int64)
    if tau_hat.shape != (g.n,):
        raise PreconditionError("tau_hat must assign every node")
    if tau_hat.size and (tau_hat.min() < 0 or tau_hat.max() >= k):
        raise PreconditionError(f"labels must lie in [0, {k})")
    n_hat = np.bincount(tau_hat, minlength=k).astype(np.int64)
    if np.any(n_hat == 0):
        raise EmptyBlock(f"block {int(np.argmax(n_hat == 0))} received no nodes")
    if np.any(n_hat == 1):
        raise SingletonBlock(
            f"block {int(np.argmax(n_hat == 1))} has a single node"
        )
    onehot = np.zeros((g.n, k), dtype=np.float64)
    onehot[np.arange(g.n), tau_hat] = 1.0
    block_sums = onehot.T @ g.dense() @ onehot
    denom = np.outer(n_hat, n_hat).astype(np.float64)
    np.fill_diagonal(denom, n_hat * (n_hat - 1))
    p_hat = np.clip(block_sums / denom, 0.0, 1.0)
    if d is None:
        d = max(estimate_rank(g)[0], 1)
    emb = embed_matrix(EdgeProbMatrix(p_hat), d)
    return EstimationReport(
        rho_hat=n_hat / g.n,
        p_hat=p_hat,
        nu_hat=emb.x,
        mu_hat=emb.y,
        n_hat=n_hat,
        d=d,
    )


def _confusion(tau: np.ndarray, tau_hat: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(tau * k + tau_hat, minlength=k * k).reshape(k, k)


def misclassification(
    tau: np.ndarray, tau_hat: np.ndarray, k: int
) -> MisclassificationResult:
    """Exact minimum disagreement count over label permutations.

    Small ``k`` enumerates all permutations; larger ``k`` solves the
    equivalent assignment problem on the confusion matrix.  Both are exact.
    """
    tau = np.asarray(tau, dtype=np.int64)
    tau_hat = np.asarray(tau_hat, dtype=np.int64)
    if tau.shape != tau_hat.shape or tau.ndim != 1:
        raise PreconditionError("label vectors must share a length")
    for vec in (tau, tau_hat):
        if vec.size and (vec.min() < 0 or vec.max() >= k):
            raise PreconditionError(f"labels must lie in [0, {k})")
    n = tau.shape[0]
    c = _confusion(tau, tau_hat, k)
    if k <= _EXHAUSTIVE_K:
        best_perm, best_agree = None, -1
        for perm in permutations(range(k)):
            agree = int(sum(c[perm[j], j] for j in range(k)))
            if agree > best_agree:
                best_perm, best_agree = perm, agree
    else:
        rows, cols = scipy.optimize.linear_sum_assignment(-c)
        perm = [0] * k
        for r, col in zip(rows, cols):
            perm[col] = int(r)
        best_perm, best_agree = tuple(perm), int(c[rows, cols].sum())
    errors = n - best_agree
    return MisclassificationResult(
        errors=errors, rate=errors / n if n else 0.0, best_perm=tuple(best_perm)
    )


def adjusted_rand_index(x: np.ndarray, y: np.ndarray) -> float:
    """Chance-corrected partition agreement: 1 is perfect, 0 is chance.

    When both partitions are trivial the formula is 0/0; the partitions are
    then identical, so 1.0 is returned with a :class:`DegenerateWarning`.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape or x.ndim != 1 or x.shape[0] < 2:
        raise PreconditionError("need two equal-length label vectors, n >= 2")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    kx, ky = int(xi.max()) + 1, int(yi.max()) + 1
    table = np.bincount(xi * ky + yi, minlength=kx * ky).reshape(kx, ky)

    def comb2(v):
        return (v * (v - 1) / 2.0).sum()

    pairs = comb2(table.astype(np.float64))
    a = comb2(table.sum(axis=1).astype(np.float64))
    b = comb2(table.sum(axis=0).astype(np.float64))
    total = comb2(np.array([x.shape[0]], dtype=np.float64))
    expected = a * b / total
    max_index = (a + b) / 2.0
    if max_index == expected:
        warnings.warn(
            "both partitions are trivial; returning 1 by convention",
            DegenerateWarning,
            stacklevel=2,
        )
        return 1.0
    return float((pairs - expected) / (max_index - expected))


def procrustes_align(w: np.ndarray, w_tilde: np.ndarray) -> ProcrustesResult:
    """Closest orthogonal alignment of ``w`` onto ``w_tilde``.

    The minimizer of ``||w @ r - w_tilde||_F`` over orthogonal ``r`` is
    ``u @ vt`` from the SVD of ``w.T @ w_tilde``.
    """
    w = np.asarray(w, dtype=np.float64)
    w_tilde = np.asarray(w_tilde, dtype=np.float64)
    if w.shape != w_tilde.shape:
        raise PreconditionError("matrices must share a shape")
    u, _, vt = np.linalg.svd(w.T @ w_tilde)
    r = u @ vt
    residual = float(np.linalg.norm(w @ r - w_tilde))
    return ProcrustesResult(r=r, residual=residual)


def align_factors(nu_hat: np.ndarray, nu: np.ndarray) -> ProcrustesResult:
    """Residual of the estimated factor after optimal rotation of the truth."""
    return procrustes_align(nu, nu_hat)
