import math

import numpy as np
import pytest

from blockembed.errors import IsolatedNode, PreconditionError
from blockembed.sbm import (
    Graph,
    compute_constants,
    edge_probability_matrix,
    factorize_p,
    sample_graph,
    sample_tau,
)
from blockembed.spectral import (
    EdgeProbMatrix,
    augment_diagonal,
    embed_adjacency,
    embed_laplacian,
    embed_matrix,
    estimate_rank,
    normalized_laplacian,
    rank_threshold,
    singular_values,
    svd,
)


def _graph_from_dense(a, directed=False):
    a = np.asarray(a, dtype=np.uint8)
    return Graph(n=a.shape[0], a=a, directed=directed)


def _complete_graph(n):
    a = np.ones((n, n), dtype=np.uint8)
    np.fill_diagonal(a, 0)
    return _graph_from_dense(a)


def _sampled_two_block(model, n, seed):
    tau = sample_tau(model, n, "exact", seed)
    return tau, sample_graph(model, tau, seed + 1)


# ----------------------------------------------------------------------- svd


def test_svd_identity():
    res = svd(np.eye(3))
    assert res.sigma == pytest.approx([1.0, 1.0, 1.0])


def test_svd_rank_one_outer_product():
    x = np.array([1.0, 2.0])
    y = np.array([3.0, 4.0])
    res = svd(np.outer(x, y))
    assert res.sigma[0] == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y))
    assert res.sigma[1] == pytest.approx(0.0, abs=1e-12)


def test_svd_reconstructs_and_is_orthonormal():
    rng = np.random.default_rng(3)
    for directed in (True, False):
        m = (rng.random((12, 12)) < 0.4).astype(np.float64)
        if not directed:
            m = np.triu(m, 1)
            m = m + m.T
        res = svd(m)
        assert np.abs(res.u.T @ res.u - np.eye(12)).max() < 1e-8
        assert np.abs(res.v.T @ res.v - np.eye(12)).max() < 1e-8
        rebuilt = res.u @ np.diag(res.sigma) @ res.v.T
        assert np.linalg.norm(rebuilt - m) < 1e-8


def test_svd_truncation_error_matches_tail():
    rng = np.random.default_rng(5)
    m = (rng.random((5, 5)) < 0.5).astype(np.float64)
    res = svd(m)
    rank2 = res.u[:, :2] @ np.diag(res.sigma[:2]) @ res.v[:, :2].T
    assert np.linalg.norm(m - rank2) == pytest.approx(
        math.sqrt((res.sigma[2:] ** 2).sum()), abs=1e-10
    )


def test_svd_rejects_non_finite():
    with pytest.raises(PreconditionError):
        svd(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_svd_deterministic_signs():
    rng = np.random.default_rng(8)
    m = rng.normal(size=(10, 10))
    first = svd(m)
    second = svd(m.copy())
    assert np.array_equal(first.u, second.u)
    assert np.array_equal(first.v, second.v)
    # canonical orientation: the dominant entry of each left column is positive
    anchors = np.abs(first.u).argmax(axis=0)
    assert (first.u[anchors, np.arange(10)] >= 0).all()


# ----------------------------------------------------------------- embeddings


def test_embed_empty_graph_is_zero():
    g = _graph_from_dense(np.zeros((5, 5)))
    emb = embed_adjacency(g, 1)
    assert emb.sigma == pytest.approx([0.0])
    assert not emb.x.any() and not emb.y.any()


def test_embed_complete_graph_top_singular_value():
    emb = embed_adjacency(_complete_graph(4), 1)
    assert emb.sigma[0] == pytest.approx(3.0)


def test_embed_requires_valid_dimension():
    g = _complete_graph(4)
    with pytest.raises(PreconditionError):
        embed_adjacency(g, 0)
    with pytest.raises(PreconditionError):
        embed_adjacency(g, 5)


def test_embed_scaling_is_exact(two_block_model):
    _, g = _sampled_two_block(two_block_model, 120, seed=21)
    emb = embed_adjacency(g, 2)
    assert np.array_equal(emb.x, emb.u * np.sqrt(emb.sigma))
    assert np.array_equal(emb.y, emb.v * np.sqrt(emb.sigma))
    assert emb.w.shape == (120, 4) and emb.z.shape == (120, 4)


def test_embed_truncation_is_eckart_young_optimal(two_block_model):
    _, g = _sampled_two_block(two_block_model, 2000, seed=31)
    emb = embed_adjacency(g, 2)
    a = g.dense()
    sigma = singular_values(a)
    resid = np.linalg.norm(a - emb.x @ emb.y.T) ** 2
    assert resid == pytest.approx(float((sigma[2:] ** 2).sum()), rel=1e-10)


def test_eckart_young_beats_random_factorizations():
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.integers(5, 31))
        d = int(rng.integers(1, 4))
        a = (rng.random((n, n)) < rng.uniform(0.2, 0.8)).astype(np.float64)
        np.fill_diagonal(a, 0)
        emb = embed_matrix(a, d)
        best = np.linalg.norm(a - emb.x @ emb.y.T)
        for _ in range(100):
            b = rng.normal(size=(n, d))
            c = rng.normal(size=(n, d))
            assert best <= np.linalg.norm(a - b @ c.T) + 1e-9


def test_embed_probability_matrix_full_rank_is_exact(two_block_model):
    emb = embed_matrix(EdgeProbMatrix(two_block_model.p.copy()), 2)
    assert np.abs(emb.x @ emb.y.T - two_block_model.p).max() < 1e-10


def test_embed_zero_matrix():
    emb = embed_matrix(np.zeros((4, 4)), 2)
    assert not emb.z.any()


def test_noiseless_matrix_singular_floor(two_block_model):
    factors = factorize_p(two_block_model)
    consts = compute_constants(two_block_model, factors)
    tau = sample_tau(two_block_model, 1000, "exact", seed=3)
    q = edge_probability_matrix(factors, tau)
    emb = embed_matrix(q, 2)
    assert emb.sigma[1] >= consts.alpha * consts.gamma * 1000


def test_symmetric_embedding_left_right_agree(two_block_model):
    _, g = _sampled_two_block(two_block_model, 150, seed=41)
    emb = embed_adjacency(g, 2)
    for j in range(2):
        assert np.linalg.norm(emb.u[:, j]) == pytest.approx(1.0, abs=1e-8)
        assert np.linalg.norm(emb.v[:, j]) == pytest.approx(1.0, abs=1e-8)
        assert abs(emb.u[:, j] @ emb.v[:, j]) == pytest.approx(1.0, abs=1e-8)


def test_embedding_variant_selection(two_block_model):
    _, g = _sampled_two_block(two_block_model, 30, seed=51)
    emb = embed_adjacency(g, 2)
    assert np.array_equal(emb.coordinates("unscaled_left"), emb.u)
    assert np.array_equal(emb.coordinates("scaled_left"), emb.x)
    assert np.array_equal(emb.coordinates("unscaled_concat"), emb.w)
    assert np.array_equal(emb.coordinates("scaled_concat"), emb.z)
    with pytest.raises(PreconditionError):
        emb.coordinates("nope")


# ------------------------------------------------------------------ laplacian


def test_laplacian_complete_graph():
    g = _complete_graph(4)
    lap = normalized_laplacian(g)
    expected = (np.ones((4, 4)) - np.eye(4)) / 3.0
    assert np.abs(lap - expected).max() < 1e-12
    emb = embed_laplacian(g, 1)
    assert emb.sigma[0] == pytest.approx(1.0)


def test_laplacian_rejects_isolated_node():
    a = np.zeros((3, 3), dtype=np.uint8)
    a[0, 1] = a[1, 0] = 1
    with pytest.raises(IsolatedNode):
        embed_laplacian(_graph_from_dense(a), 1)


def test_laplacian_rejects_directed():
    a = np.zeros((3, 3), dtype=np.uint8)
    a[0, 1] = a[1, 2] = a[2, 0] = 1
    with pytest.raises(PreconditionError):
        embed_laplacian(_graph_from_dense(a, directed=True), 1)


def test_laplacian_spectrum_bounded_by_one(two_block_model):
    _, g = _sampled_two_block(two_block_model, 2000, seed=61)
    sigma = singular_values(normalized_laplacian(g))
    assert sigma.max() <= 1.0 + 1e-9


# -------------------------------------------------------------- rank estimate


def test_rank_threshold_value():
    n = 2000
    expected = 3**0.25 * n**0.75 * math.log(n) ** 0.25
    assert rank_threshold(n) == pytest.approx(expected)
    assert expected == pytest.approx(653.5, abs=0.2)


def test_estimate_rank_empty_graph():
    g = _graph_from_dense(np.zeros((10, 10)))
    d_hat, _ = estimate_rank(g)
    assert d_hat == 0


def test_estimate_rank_complete_graph_is_one():
    d_hat, threshold = estimate_rank(_complete_graph(2000))
    assert d_hat == 1
    assert 1999 > threshold > 1


def test_estimate_rank_monotone_in_edges(two_block_model):
    _, g = _sampled_two_block(two_block_model, 300, seed=71)
    sparse = g.a.copy()
    sparse[5] = 0
    sparse[:, 5] = 0
    sigma_sparse = singular_values(sparse.astype(np.float64))
    sigma_full = singular_values(g.dense())
    assert sigma_full[0] >= sigma_sparse[0]
    assert estimate_rank(g)[1] == rank_threshold(300)


def test_sigma_one_bounded_by_n():
    rng = np.random.default_rng(81)
    for _ in range(10):
        n = int(rng.integers(3, 40))
        a = (rng.random((n, n)) < rng.uniform(0, 1)).astype(np.uint8)
        np.fill_diagonal(a, 0)
        assert singular_values(a.astype(np.float64))[0] <= n


# ---------------------------------------------------------------- diag augment


def test_augment_empty_graph():
    g = _graph_from_dense(np.zeros((4, 4)))
    assert not augment_diagonal(g).q.any()


def test_augment_complete_graph():
    q = augment_diagonal(_complete_graph(4)).q
    assert np.diagonal(q) == pytest.approx([1.0] * 4)


def test_augment_star_graph():
    a = np.zeros((4, 4), dtype=np.uint8)
    a[0, 1:] = 1
    a[1:, 0] = 1
    q = augment_diagonal(_graph_from_dense(a)).q
    assert np.diagonal(q) == pytest.approx([1.0, 1 / 3, 1 / 3, 1 / 3])
    assert np.array_equal(q - np.diag(np.diagonal(q)), a.astype(np.float64))
