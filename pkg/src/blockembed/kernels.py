"""Clustering hot-loop kernels with a compiled core and a NumPy fallback.

The Lloyd assignment pass and the exhaustive square-error minimizer dominate
clustering runtime, so they have twin implementations: a Cython extension
(:mod:`blockembed._speedups`) and the NumPy versions below.  The compiled
core is preferred when importable; set ``BLOCKEMBED_PURE=1`` to force the
fallback.  Both obey the same contracts: nearest-centroid ties resolve to the
lowest index, and the exhaustive search returns the first optimum with node 0
as the most significant base-K digit of the enumeration order.

``benchmarks/bench_kernels.py`` compares the two backends.
"""

from __future__ import annotations

import os

import numpy as np

_EXACT_CHUNK = 1 << 14


def lloyd_iteration_numpy(z: np.ndarray, centroids: np.ndarray):
    """Labels, counts, per-cluster sums and objective for fixed centroids."""
    d2 = ((z[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1).astype(np.int64)
    objective = float(d2[np.arange(z.shape[0]), labels].sum())
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    sums = np.zeros((k, z.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, z)
    return labels, counts, sums, objective


def exact_min_sse_numpy(z: np.ndarray, k: int):
    """First globally optimal labeling in enumeration order, plus its SSE.

    Enumerates all ``k**n`` labelings in chunks; per chunk the objective is
    ``sum(|z_u|^2) - sum_c |cluster sum|^2 / cluster size``.
    """
    n, m = z.shape
    total = k**n
    sq_total = float((z * z).sum())
    powers = (k ** np.arange(n - 1, -1, -1)).astype(np.int64)
    arange_k = np.arange(k)
    best_sse = np.inf
    best_labels = None
    for start in range(0, total, _EXACT_CHUNK):
        codes = np.arange(start, min(start + _EXACT_CHUNK, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % k
        onehot = (digits[:, :, None] == arange_k).astype(np.float64)
        sums = np.einsum("cnk,nm->ckm", onehot, z)
        counts = onehot.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            contrib = np.where(counts > 0, (sums**2).sum(axis=2) / counts, 0.0)
        sse = sq_total - contrib.sum(axis=1)
        i = int(np.argmin(sse))  # lowest code on ties
        if sse[i] < best_sse:
            best_sse = float(sse[i])
            best_labels = digits[i].astype(np.int64)
    return best_labels, best_sse


if os.environ.get("BLOCKEMBED_PURE", "") not in ("", "0"):
    _speedups = None
else:
    try:
        from . import _speedups
    except ImportError:
        _speedups = None

if _speedups is not None:
    BACKEND = "compiled"
    lloyd_iteration = _speedups.lloyd_iteration
    exact_min_sse = _speedups.exact_min_sse
else:
    BACKEND = "numpy"
    lloyd_iteration = lloyd_iteration_numpy
    exact_min_sse = exact_min_sse_numpy


def available_backends() -> dict[str, dict]:
    """Kernel functions per importable backend, for tests and benchmarks."""
    backends = {
        "numpy": {
            "lloyd_iteration": lloyd_iteration_numpy,
            "exact_min_sse": exact_min_sse_numpy,
        }
    }
    try:
        from . import _speedups as compiled
    except ImportError:
        pass
    else:
        backends["compiled"] = {
            "lloyd_iteration": compiled.lloyd_iteration,
            "exact_min_sse": compiled.exact_min_sse,
        }
    return backends
