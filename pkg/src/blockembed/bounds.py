"""Closed-form error bounds and their empirical verification on samples.

Each check pairs a measured quantity (``lhs``) with a theoretical value
(``rhs``) and records whether the stated inequality holds.  The bounds are
finite-``n`` evaluations of asymptotic guarantees, so individual failures at
small ``n`` are possible and are reported rather than hidden; several become
vacuous (``rhs`` exceeding trivial limits) at desk scale and carry a flag for
that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np
import scipy.spatial.distance

from .errors import PreconditionError
from .inference import procrustes_align
from .sbm import Graph, ModelConstants
from .spectral import Embedding, embed_adjacency, embed_matrix, rank_threshold, singular_values

MIN_CONCENTRATION_N = 25


@dataclass(eq=False)
class BoundReport:
    """One measured-vs-theoretical comparison.

    ``relation`` orients the inequality (``"<="`` for upper bounds, ``">="``
    for lower bounds); ``holds`` states whether it is satisfied.  ``context``
    carries identifying metadata such as ``n``, the sampling seed and a model
    digest.
    """

    name: str
    lhs: float
    rhs: float
    relation: str
    holds: bool = field(init=False)
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.relation not in ("<=", ">="):
            raise PreconditionError(f"unknown relation {self.relation!r}")
        if self.relation == "<=":
            self.holds = self.lhs <= self.rhs
        else:
            self.holds = self.lhs >= self.rhs

    @property
    def vacuous(self) -> bool:
        """An upper bound so large it cannot bind (beyond the trivial n)."""
        n = self.context.get("n")
        return self.relation == "<=" and n is not None and self.rhs >= n


def gram_difference_norm(g: Graph, q: np.ndarray) -> float:
    """``||A A^T - Q Q^T||_F`` between a sample and its edge probabilities."""
    a = g.dense()
    return float(np.linalg.norm(a @ a.T - q @ q.T))


def concentration_limit(n: int) -> float:
    """High-probability ceiling ``sqrt(3) n^(3/2) sqrt(ln n)`` for the Gram gap."""
    return math.sqrt(3.0) * float(n) ** 1.5 * math.sqrt(math.log(n))


def check_gram_concentration(
    g: Graph, q: np.ndarray, context: dict | None = None
) -> BoundReport:
    """Check the Gram-difference concentration bound on one sample.

    Valid for ``n >= MIN_CONCENTRATION_N``; below that the finite-size slack
    absorbed into the constant is not yet in force.
    """
    if g.n < MIN_CONCENTRATION_N:
        raise PreconditionError(
            f"concentration check needs n >= {MIN_CONCENTRATION_N}, got {g.n}"
        )
    return BoundReport(
        name="gram_concentration",
        lhs=gram_difference_norm(g, q),
        rhs=concentration_limit(g.n),
        relation="<=",
        context=dict(context or {}, n=g.n),
    )


def check_singular_value_bounds(
    g: Graph, q: np.ndarray, consts: ModelConstants, d: int, context: dict | None = None
) -> list[BoundReport]:
    """Four singular-value checks tying the sample to its noiseless part.

    The top singular value of a 0/1 matrix never exceeds ``n``; the ``d``-th
    singular values of both the sample and the probability matrix stay above
    ``alpha * gamma * n``; and the ``(d+1)``-th of the sample stays below the
    rank-estimation cutoff.
    """
    n = g.n
    ctx = dict(context or {}, n=n)
    sig_a = singular_values(g.dense())
    sig_q = singular_values(np.asarray(q, dtype=np.float64))
    floor = consts.alpha * consts.gamma * n
    sigma_d_a = float(sig_a[d - 1]) if d >= 1 else 0.0
    sigma_d_q = float(sig_q[d - 1]) if d >= 1 else 0.0
    sigma_next = float(sig_a[d]) if d < n else 0.0
    return [
        BoundReport("sigma_1_max", float(sig_a[0]), float(n), "<=", context=ctx),
        BoundReport("sigma_d_floor", sigma_d_a, floor, ">=", context=ctx),
        BoundReport("sigma_next_ceiling", sigma_next, rank_threshold(n), "<=", context=ctx),
        BoundReport("sigma_d_noiseless_floor", sigma_d_q, floor, ">=", context=ctx),
    ]


def check_row_separation(
    emb_q: Embedding,
    tau: np.ndarray,
    consts: ModelConstants,
    context: dict | None = None,
) -> BoundReport:
    """Minimum cross-block row gap of the noiseless embedding vs its floor.

    Rows of the concatenated unscaled coordinates of the probability matrix
    are compared across distinct blocks; the floor is
    ``beta * sqrt(alpha * gamma) / sqrt(n)``.  With fewer than two populated
    blocks the check is vacuous and holds with an infinite gap.
    """
    tau = np.asarray(tau, dtype=np.int64)
    w = emb_q.w
    n = emb_q.n
    ctx = dict(context or {}, n=n)
    blocks = np.unique(tau)
    if blocks.size < 2:
        return BoundReport("row_separation", math.inf, 0.0, ">=", context=ctx)
    lhs = math.inf
    groups = [w[tau == b] for b in blocks]
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            gap = scipy.spatial.distance.cdist(groups[i], groups[j]).min()
            lhs = min(lhs, float(gap))
    rhs = consts.beta * math.sqrt(consts.alpha * consts.gamma) / math.sqrt(n)
    return BoundReport("row_separation", lhs, rhs, ">=", context=ctx)


def misclassification_count_bound(
    consts: ModelConstants, n: int, undirected: bool = False
) -> float:
    """Ceiling on mis-assigned nodes for clustering the unscaled coordinates.

    ``432 / (alpha^5 beta^2 gamma^5) * ln n``, halved to a 216 constant in
    the undirected case.  Often vacuous (far above ``n``) at desk scale.
    """
    if n < 2:
        raise PreconditionError("bound needs n >= 2")
    constant = 216.0 if undirected else 432.0
    denom = consts.alpha**5 * consts.beta**2 * consts.gamma**5
    return constant / denom * math.log(n)


def misclassification_count_bound_scaled(
    consts: ModelConstants, n: int, undirected: bool = False
) -> float:
    """Same ceiling for the scaled coordinates: exponents rise to 6."""
    if n < 2:
        raise PreconditionError("bound needs n >= 2")
    constant = 216.0 if undirected else 432.0
    denom = consts.alpha**6 * consts.beta**2 * consts.gamma**6
    return constant / denom * math.log(n)


def check_singular_value_transfer(
    g: Graph, q: np.ndarray, d: int, context: dict | None = None
) -> list[BoundReport]:
    """Gap between squared singular values is bounded by the Gram difference.

    Checked for indices ``1 .. d+1`` (singular values beyond the spectrum
    count as zero).
    """
    n = g.n
    ctx = dict(context or {}, n=n)
    sig_a = singular_values(g.dense())
    sig_q = singular_values(np.asarray(q, dtype=np.float64))
    rhs = gram_difference_norm(g, q)
    reports = []
    for i in range(1, min(d + 1, n) + 1):
        sa = float(sig_a[i - 1]) if i <= sig_a.size else 0.0
        sq = float(sig_q[i - 1]) if i <= sig_q.size else 0.0
        reports.append(
            BoundReport(f"singular_transfer_{i}", abs(sa**2 - sq**2), rhs, "<=", context=ctx)
        )
    return reports


def check_subspace_alignment(
    g: Graph, q: np.ndarray, d: int, context: dict | None = None
) -> BoundReport:
    """Procrustes residual between sample and noiseless left subspaces.

    The eigenvector perturbation ceiling is ``sqrt(2) * gram gap / delta``
    with ``delta`` the measured ``d``-th eigenvalue of ``Q Q^T`` (its
    ``(d+1)``-th eigenvalue is zero, so this is the actual eigengap rather
    than a looser a-priori floor).
    """
    if d < 1:
        raise PreconditionError("subspace alignment needs d >= 1")
    q = np.asarray(q, dtype=np.float64)
    emb_a = embed_adjacency(g, d)
    emb_q = embed_matrix(q, d)
    residual = procrustes_align(emb_q.u, emb_a.u).residual
    sigma_d_q = float(singular_values(q)[d - 1])
    delta = sigma_d_q**2
    rhs = math.sqrt(2.0) * gram_difference_norm(g, q) / delta if delta > 0 else math.inf
    return BoundReport(
        name="subspace_alignment",
        lhs=residual,
        rhs=rhs,
        relation="<=",
        context=dict(context or {}, n=g.n),
    )
