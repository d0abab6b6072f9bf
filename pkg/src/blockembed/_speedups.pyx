# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops for square-error clustering.

Twin implementations live in :mod:`blockembed.kernels`; both must agree on
tie-breaking (lowest index wins) and enumeration order (node 0 is the most
significant base-K digit).
"""

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

import numpy as np


def lloyd_iteration(const double[:, ::1] z, const double[:, ::1] centroids):
    """One assignment pass: labels, counts, per-cluster sums, objective.

    The objective is the squared-distance sum to the *input* centroids.
    """
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t m = z.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]
    labels_arr = np.empty(n, dtype=np.int64)
    counts_arr = np.zeros(k, dtype=np.int64)
    sums_arr = np.zeros((k, m), dtype=np.float64)
    cdef long long[::1] labels = labels_arr
    cdef long long[::1] counts = counts_arr
    cdef double[:, ::1] sums = sums_arr
    cdef double best, dist, diff, objective = 0.0
    cdef Py_ssize_t u, c, j, best_c
    for u in range(n):
        best = INFINITY
        best_c = 0
        for c in range(k):
            dist = 0.0
            for j in range(m):
                diff = z[u, j] - centroids[c, j]
                dist += diff * diff
            if dist < best:
                best = dist
                best_c = c
        labels[u] = best_c
        counts[best_c] += 1
        for j in range(m):
            sums[best_c, j] += z[u, j]
        objective += best
    return labels_arr, counts_arr, sums_arr, objective


cdef double _sse_from_labels(const double[:, ::1] z, long long* labels,
                             double* sums, double* counts,
                             Py_ssize_t k, double sq_total) nogil:
    """Exact objective for a labeling, refreshing sums/counts in place."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t m = z.shape[1]
    cdef Py_ssize_t u, c, j
    cdef double t = 0.0, norm
    for c in range(k):
        counts[c] = 0.0
        for j in range(m):
            sums[c * m + j] = 0.0
    for u in range(n):
        c = labels[u]
        counts[c] += 1.0
        for j in range(m):
            sums[c * m + j] += z[u, j]
    for c in range(k):
        if counts[c] > 0.0:
            norm = 0.0
            for j in range(m):
                norm += sums[c * m + j] * sums[c * m + j]
            t += norm / counts[c]
    return sq_total - t


def exact_min_sse(const double[:, ::1] z, Py_ssize_t k):
    """Globally minimal square-error labeling by exhaustive enumeration.

    Walks all k**n labelings in odometer order (last node cycles fastest),
    maintaining per-cluster sums incrementally; candidate improvements are
    re-scored from scratch so accumulated rounding never selects a wrong
    optimum.  Returns the first optimum in enumeration order.
    """
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t m = z.shape[1]
    cdef Py_ssize_t u, c, j, a
    cdef double sq_total = 0.0
    for u in range(n):
        for j in range(m):
            sq_total += z[u, j] * z[u, j]

    best_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] best_view = best_arr
    cdef long long* labels = <long long*> malloc(n * sizeof(long long))
    cdef double* sums = <double*> malloc(k * m * sizeof(double))
    cdef double* counts = <double*> malloc(k * sizeof(double))
    cdef double* contrib = <double*> malloc(k * sizeof(double))
    if labels == NULL or sums == NULL or counts == NULL or contrib == NULL:
        free(labels); free(sums); free(counts); free(contrib)
        raise MemoryError()

    cdef double total_contrib, norm, candidate, best_sse, margin
    cdef unsigned long long step = 0
    cdef bint done = False
    with nogil:
        for u in range(n):
            labels[u] = 0
        best_sse = _sse_from_labels(z, labels, sums, counts, k, sq_total)
        total_contrib = 0.0
        for c in range(k):
            contrib[c] = 0.0
            if counts[c] > 0.0:
                norm = 0.0
                for j in range(m):
                    norm += sums[c * m + j] * sums[c * m + j]
                contrib[c] = norm / counts[c]
            total_contrib += contrib[c]
        margin = 1e-9 * (1.0 + sq_total)

        while not done:
            # odometer increment: move trailing max-digit nodes back to 0
            u = n - 1
            while u >= 0 and labels[u] == k - 1:
                _move(z, labels, sums, counts, contrib, &total_contrib, u, 0, m)
                u -= 1
            if u < 0:
                done = True
                break
            _move(z, labels, sums, counts, contrib, &total_contrib,
                  u, labels[u] + 1, m)
            step += 1
            if (step & 0xFFFF) == 0:
                # periodic refresh bounds incremental rounding drift
                candidate = _sse_from_labels(z, labels, sums, counts, k, sq_total)
                total_contrib = 0.0
                for c in range(k):
                    contrib[c] = 0.0
                    if counts[c] > 0.0:
                        norm = 0.0
                        for j in range(m):
                            norm += sums[c * m + j] * sums[c * m + j]
                        contrib[c] = norm / counts[c]
                    total_contrib += contrib[c]
            else:
                candidate = sq_total - total_contrib
            if candidate < best_sse + margin:
                candidate = _sse_from_labels(z, labels, sums, counts, k, sq_total)
                total_contrib = 0.0
                for c in range(k):
                    contrib[c] = 0.0
                    if counts[c] > 0.0:
                        norm = 0.0
                        for j in range(m):
                            norm += sums[c * m + j] * sums[c * m + j]
                        contrib[c] = norm / counts[c]
                    total_contrib += contrib[c]
                if candidate < best_sse:
                    best_sse = candidate
                    with gil:
                        for u in range(n):
                            best_view[u] = labels[u]

    free(labels); free(sums); free(counts); free(contrib)
    return best_arr, best_sse


cdef inline void _move(const double[:, ::1] z, long long* labels, double* sums,
                       double* counts, double* contrib, double* total_contrib,
                       Py_ssize_t u, long long to, Py_ssize_t m) nogil:
    """Move node ``u`` to cluster ``to``, updating sums and contributions."""
    cdef Py_ssize_t j
    cdef long long frm = labels[u]
    cdef double norm
    total_contrib[0] -= contrib[frm] + contrib[to]
    counts[frm] -= 1.0
    counts[to] += 1.0
    for j in range(m):
        sums[frm * m + j] -= z[u, j]
        sums[to * m + j] += z[u, j]
    labels[u] = to
    if counts[frm] > 0.0:
        norm = 0.0
        for j in range(m):
            norm += sums[frm * m + j] * sums[frm * m + j]
        contrib[frm] = norm / counts[frm]
    else:
        contrib[frm] = 0.0
    norm = 0.0
    for j in range(m):
        norm += sums[to * m + j] * sums[to * m + j]
    contrib[to] = norm / counts[to]
    total_contrib[0] += contrib[frm] + contrib[to]
