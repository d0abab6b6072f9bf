"""End-to-end acceptance checks.

Each test prints one ``acceptance N (<name>): PASS/FAIL`` line (run pytest
with ``-s`` to see them as they execute) and then asserts.  These runs use
sampled graphs at realistic sizes, so the module takes a few minutes.
"""

import math

import numpy as np
import pytest

from blockembed.bounds import (
    check_gram_concentration,
    check_subspace_alignment,
    misclassification_count_bound,
    misclassification_count_bound_scaled,
)
from blockembed.clustering import cluster_exact, cluster_mse
from blockembed.experiments import (
    ExperimentConfig,
    LabeledGraph,
    run_mc_experiment,
    run_one_vs_all,
)
from blockembed.inference import adjusted_rand_index, estimate_params, misclassification
from blockembed.rng import derive_seed
from blockembed.sbm import (
    BlockModel,
    ModelConstants,
    edge_probability_matrix,
    factorize_p,
    sample_graph,
    sample_tau,
)
from blockembed.spectral import rank_threshold, singular_values


def _report(number: int, name: str, ok: bool, detail: str) -> None:
    print(f"acceptance {number} ({name}): {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {number} ({name}): {detail}"


def _sample(model, n, seed_tag, rep):
    tau = sample_tau(model, n, "exact", derive_seed(0, seed_tag, "tau", n, rep))
    g = sample_graph(model, tau, derive_seed(0, seed_tag, "graph", n, rep))
    return tau, g


def test_criterion_1_error_rate_trend(two_block_model):
    """Scaled adjacency error decays over the grid and ends at or below 5%."""
    cfg = ExperimentConfig(
        model=two_block_model,
        n_grid=(500, 1000, 1500, 2000),
        replicates=20,
        seed=101,
        variants=("adjacency_scaled",),
    )
    cells = run_mc_experiment(cfg)
    means = {
        n: float(np.mean([c.error_rate for c in cells if c.n == n]))
        for n in cfg.n_grid
    }
    ordered = [means[n] for n in cfg.n_grid]
    monotone = all(a >= b - 1e-12 for a, b in zip(ordered, ordered[1:]))
    endpoint = means[2000] <= 0.05
    detail = "means=" + ", ".join(f"n={n}: {means[n]:.4f}" for n in cfg.n_grid)
    _report(1, "error rate trend", monotone and endpoint, detail)


def test_criterion_2_adjacency_dominates_laplacian(two_block_model):
    """Scaled adjacency beats scaled Laplacian in >=90% of paired replicates."""
    cfg = ExperimentConfig(
        model=two_block_model,
        n_grid=(1400, 1700, 2000),
        replicates=20,
        seed=202,
        variants=("adjacency_scaled", "laplacian_scaled"),
    )
    cells = run_mc_experiment(cfg)
    by_cell = {(c.n, c.replicate, c.variant): c.error_rate for c in cells}
    wins = total = 0
    for n in cfg.n_grid:
        for rep in range(cfg.replicates):
            adj = by_cell[(n, rep, "adjacency_scaled")]
            lap = by_cell[(n, rep, "laplacian_scaled")]
            wins += adj <= lap
            total += 1
    ok = wins >= math.ceil(0.9 * total)
    _report(2, "adjacency vs laplacian", ok, f"paired wins {wins}/{total}")


def test_criterion_3_gram_concentration(two_block_model):
    """The Gram-difference bound holds in 200/200 independent samples at n=200."""
    factors = factorize_p(two_block_model)
    held = 0
    for rep in range(200):
        tau, g = _sample(two_block_model, 200, "conc", rep)
        q = edge_probability_matrix(factors, tau)
        held += check_gram_concentration(g, q).holds
    _report(3, "gram concentration", held == 200, f"held {held}/200")


def test_criterion_4_singular_value_bounds(two_block_model, two_block_constants):
    """Singular-value bounds at n=2000 over 50 seeds."""
    n = 2000
    floor = two_block_constants.alpha * two_block_constants.gamma * n
    ceiling = rank_threshold(n)
    top_ok = next_ok = floor_ok = 0
    for rep in range(50):
        _, g = _sample(two_block_model, n, "sing", rep)
        sigma = singular_values(g.dense())
        top_ok += sigma[0] <= n
        next_ok += sigma[2] <= ceiling
        floor_ok += sigma[1] >= floor
    ok = top_ok == 50 and next_ok == 50 and floor_ok >= 49
    detail = (
        f"sigma1<=n {top_ok}/50, sigma3<=~{ceiling:.1f} {next_ok}/50, "
        f"sigma2>=~{floor:.1f} {floor_ok}/50"
    )
    _report(4, "singular value bounds", ok, detail)


def test_criterion_5_subspace_alignment(two_block_model):
    """Perturbation residual bound holds in 50/50 runs at n=500."""
    factors = factorize_p(two_block_model)
    held = 0
    for rep in range(50):
        tau, g = _sample(two_block_model, 500, "align", rep)
        q = edge_probability_matrix(factors, tau)
        held += check_subspace_alignment(g, q, d=2).holds
    _report(5, "subspace alignment", held == 50, f"held {held}/50")


def test_criterion_6_clustering_oracle_equivalence():
    """Restarted Lloyd matches the exhaustive optimum on >=95/100 small cases."""
    rng = np.random.default_rng(606)
    hits = 0
    for _ in range(100):
        z = rng.normal(size=(9, 2))
        exact = cluster_exact(z, 2)
        # independent closed-form check: centroids are member means
        for c in range(2):
            members = z[exact.labels == c]
            if len(members):
                assert exact.centroids[c] == pytest.approx(
                    members.mean(axis=0), abs=1e-9
                )
        approx = cluster_mse(z, 2, restarts=50, seed=int(rng.integers(1 << 31)))
        hits += abs(approx.objective - exact.objective) <= 1e-9
    _report(6, "clustering oracle equivalence", hits >= 95, f"matched {hits}/100")


def test_criterion_7_estimator_consistency(two_block_model):
    """Plug-in estimates land within tolerance in >=95/100 seeds at n=2000."""
    n = 2000
    good = 0
    for rep in range(100):
        tau, g = _sample(two_block_model, n, "est", rep)
        report = estimate_params(g, tau.tau, 2, d=2)
        p_ok = np.abs(report.p_hat - two_block_model.p).max() <= 0.02
        rho_ok = np.abs(report.rho_hat - two_block_model.rho).max() <= 0.03
        good += p_ok and rho_ok
    _report(7, "estimator consistency", good >= 95, f"within tolerance {good}/100")


def test_criterion_8_exact_value_unit_suite():
    """Closed-form bound values and the evaluation metric examples."""
    unit = ModelConstants(alpha=1.0, beta=1.0, gamma=1.0)
    checks = [
        misclassification_count_bound(unit, math.e) == pytest.approx(432.0),
        misclassification_count_bound(unit, math.e, undirected=True)
        == pytest.approx(216.0),
        misclassification_count_bound_scaled(unit, math.e) == pytest.approx(432.0),
        misclassification([0, 0, 1, 1], [0, 0, 1, 1], 2).errors == 0,
        misclassification([0, 0, 1, 1], [1, 1, 0, 0], 2).errors == 0,
        misclassification([0, 0, 1, 1], [0, 1, 0, 1], 2).errors == 2,
        adjusted_rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5),
        adjusted_rand_index([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0),
    ]
    rng = np.random.default_rng(808)
    x = rng.integers(0, 3, size=30)
    checks.append(adjusted_rand_index(x, x) == pytest.approx(1.0))
    ok = all(checks)
    _report(8, "exact value unit suite", ok, f"{sum(checks)}/{len(checks)} identities")


def test_criterion_9_one_vs_all_planted():
    """Planted two-block task scores error 0 / full agreement in >=95/100 seeds."""
    model = BlockModel(
        p=np.array([[0.9, 0.05], [0.05, 0.9]]),
        rho=np.array([0.5, 0.5]),
        directed=False,
    )
    perfect = 0
    for rep in range(100):
        tau, g = _sample(model, 400, "planted", rep)
        labels = ["inside" if b == 0 else "outside" for b in tau.tau]
        lg = LabeledGraph(graph=g, labels=labels, label_names=["inside", "outside"])
        rows = run_one_vs_all(lg, "adjacency_scaled", d=2, seed=rep)
        perfect += any(
            err == 0 and ari == pytest.approx(1.0) for _, _, err, _, ari in rows
        )
    _report(9, "one-vs-all planted", perfect >= 95, f"perfect {perfect}/100")


def test_criterion_10_pipeline_determinism(two_block_model, tmp_path):
    """Two identical simulation runs emit byte-identical CSV files."""
    import json

    from blockembed.cli import main

    payload = {
        "model": {
            "P": two_block_model.p.tolist(),
            "rho": two_block_model.rho.tolist(),
            "directed": False,
        },
        "n_grid": [100, 150],
        "replicates": 2,
        "seed": 10,
        "variants": ["adjacency_scaled", "laplacian_unscaled"],
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(payload))
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / run
        assert main(["--config", str(cfg), "--out", str(out), "mc-sim"]) == 0
        outputs.append(
            (
                (out / "mc_results.csv").read_bytes(),
                (out / "mc_summary.csv").read_bytes(),
            )
        )
    ok = outputs[0] == outputs[1]
    _report(10, "pipeline determinism", ok, "byte-identical mc_results + mc_summary")
