"""Acceptance suite.

Each test covers one numbered criterion at its stated tolerance and prints a
single PASS/FAIL line (visible with ``pytest -s`` or on failure).
"""

import time

import numpy as np
import pytest

from cossc.baseline import spectral_cluster
from cossc.data import (
    IDEAL_CLUSTERS,
    Shape,
    SyntheticSpec,
    generate,
    sample_mustlinks_within,
)
from cossc.extract import extract_clusters
from cossc.graph import (
    build_knn_similarity,
    connected_components,
    scale_must_links,
)
from cossc.linalg import laplacian, numerical_rank
from cossc.metrics import accuracy, nmi, rmv
from cossc.model import EdgeIndicator, grad_z, objective
from cossc.oracle import brute_force_mip
from cossc.solver import SolverConfig, Termination, check_blockwise, cossc_solve

from _helpers import random_graph, random_mustlinks, random_orthonormal
from test_metrics import brute_force_accuracy

DATASET_SEED = 7

N_PER_CLUSTER = {
    Shape.THREE_CIRCLES: 120,
    Shape.SMILE_FACES: 110,
    Shape.THREE_PARTS: 110,
    Shape.TWO_BLOCKS_IN_CIRCLE: 110,
    Shape.TWO_MOONS: 170,
    Shape.FOUR_BLOCKS_NOISE: 80,
}


def _verdict(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {status}: {name}{suffix}")
    assert ok, f"{name}{suffix}"


@pytest.fixture(scope="module")
def datasets():
    """Seed-fixed dataset, truth, and similarity graph per shape."""
    built = {}
    for shape in Shape:
        spec = SyntheticSpec(shape, N_PER_CLUSTER[shape], 0.05, seed=DATASET_SEED)
        points, truth = generate(spec)
        assert 300 <= len(points) <= 600
        built[shape] = (points, truth, build_knn_similarity(points))
    return built


def _solve_defaults(graph, d, beta=None, eps=1e-3):
    config = SolverConfig(d=d, beta=beta, p=10.0, eps=eps)
    z, H, trace = cossc_solve(graph, config)
    return z, H, trace, extract_clusters(graph, z)


def test_criterion_1_d_insensitivity(datasets):
    worst_acc, worst_time = 1.0, 0.0
    ok = True
    for shape, (_, truth, graph) in datasets.items():
        k_star = IDEAL_CLUSTERS[shape]
        for d in range(k_star, k_star + 6):
            t0 = time.perf_counter()
            _, _, _, assignment = _solve_defaults(graph, d)
            elapsed = time.perf_counter() - t0
            acc = accuracy(assignment.labels, truth)
            worst_acc = min(worst_acc, acc)
            worst_time = max(worst_time, elapsed)
            ok &= acc >= 0.99 and assignment.num_clusters == k_star and elapsed < 10.0
    _verdict(
        "1 d-insensitivity: ACC >= 0.99 and exactly k* clusters for d in k*..k*+5",
        ok, f"worst acc {worst_acc:.4f}, worst time {worst_time:.2f}s",
    )


def test_criterion_2_beta_selection(datasets):
    rules = ("1/10n", "1/n", "auto", "0.1")

    def resolve(rule, n, d):
        return {"1/10n": 1 / (10 * n), "1/n": 1 / n,
                "auto": (d - 1) / n, "0.1": 0.1}[rule]

    means = {}
    for rule in rules:
        accs = []
        for shape, (_, truth, graph) in datasets.items():
            k_star = IDEAL_CLUSTERS[shape]
            for d in range(k_star, k_star + 6):
                beta = resolve(rule, graph.n, d)
                _, _, _, assignment = _solve_defaults(graph, d, beta=beta)
                accs.append(accuracy(assignment.labels, truth))
        means[rule] = float(np.mean(accs))
    ok = all(means["auto"] >= means[rule] - 1e-12 for rule in rules)
    _verdict(
        "2 beta selection: (d-1)/n attains the best mean ACC on the grid",
        ok, ", ".join(f"{r}={means[r]:.4f}" for r in rules),
    )


def test_criterion_3_mustlink_rmv_zero(datasets):
    violations = 0
    runs = 0
    for shape, (_, truth, graph) in datasets.items():
        k_star = IDEAL_CLUSTERS[shape]
        for s in (5.0, 25.0, 50.0):
            for seed in range(10):
                mustlinks = sample_mustlinks_within(truth, graph, s, seed=seed)
                scaled = scale_must_links(graph, mustlinks, p=10.0)
                config = SolverConfig(d=k_star, beta=None, p=10.0, eps=1e-3, seed=seed)
                z, _, _ = cossc_solve(scaled, config)
                runs += 1
                if rmv(scaled, z, mustlinks) != 0.0:
                    violations += 1
    _verdict(
        "3 must-link satisfaction: RMV == 0 at s in {5, 25, 50}% over 10 seeds",
        violations == 0, f"{runs} runs, {violations} violations",
    )


def test_criterion_4_baseline_contrast(datasets):
    strict_wins = 0
    details = []
    for shape, (_, truth, graph) in datasets.items():
        k_star = IDEAL_CLUSTERS[shape]
        sca_acc = accuracy(
            spectral_cluster(graph, k_star + 1, seed=DATASET_SEED).labels, truth
        )
        _, _, _, assignment = _solve_defaults(graph, k_star + 1)
        our_acc = accuracy(assignment.labels, truth)
        strict_wins += sca_acc < our_acc
        details.append(f"{shape.value}: {sca_acc:.3f} vs {our_acc:.3f}")
    _verdict(
        "4 baseline contrast: SCA at k*+1 below COSSC at d=k*+1 on >= 5 of 6 shapes",
        strict_wins >= 5, f"strict wins {strict_wins}/6; " + "; ".join(details),
    )


def test_criterion_5_monotone_descent_finite_termination():
    rng = np.random.default_rng(50)
    ok = True
    multi_pass = 0
    for _ in range(200):
        G = random_graph(rng, n_min=4, n_max=60)
        _, c_full = connected_components(G.n, G.rows, G.cols)
        d = min(G.n - 1, c_full + int(rng.integers(0, 4)))
        d = max(1, d)
        beta = float(rng.uniform(0.005, 0.5))
        _, _, trace = cossc_solve(G, SolverConfig(d=d, beta=beta, eps=1e-3))
        hist = np.asarray(trace.f_history)
        slack = 1e-9 * (1.0 + abs(hist[0]))
        ok &= bool(np.all(np.diff(hist) <= slack))
        ok &= trace.termination is Termination.EPS_DECREASE
        ok &= trace.iterations < 500
        multi_pass += trace.iterations > 1
    _verdict(
        "5 monotone descent and finite termination on 200 random instances",
        ok, f"{multi_pass} instances took multiple passes",
    )


def test_criterion_6_oracle_gate():
    rng = np.random.default_rng(60)
    t0 = time.perf_counter()
    ok_trichotomy = ok_large_beta = ok_small_beta = ok_solver = True
    for _ in range(30):
        G = random_graph(rng, n_min=4, n_max=7, density=0.9, w_lo=0.2, max_edges=14)
        _, c_full = connected_components(G.n, G.rows, G.cols)
        d = min(G.n - 1, c_full + int(rng.integers(0, 2)))
        beta = float(rng.uniform(0.05, 1.0))
        result = brute_force_mip(G, beta=beta, d=d)

        # (a) every enumerated global minimizer has rank >= n - d, i.e. either
        # strictly more than n - d or exactly n - d with a binary indicator
        for z in result.minimizers:
            rank = numerical_rank(laplacian(G.adjacency(z=z.values)))
            ok_trichotomy &= rank >= G.n - d and z.is_binary

        # (b) beta = 1.5 leaves the all-ones indicator as unique minimizer
        large = result.rescored(1.5)
        ok_large_beta &= large.num_minimizers == 1
        ok_large_beta &= bool(np.all(large.minimizers[0].values == 1.0))

        # (c) below the computed threshold every minimizer has rank n - d
        small = result.rescored(result.beta_bar / 2.0)
        for z in small.minimizers:
            rank = numerical_rank(laplacian(G.adjacency(z=z.values)))
            ok_small_beta &= rank == G.n - d

        # (d) the descent solver stays above the global value and certifies
        z, H, trace = cossc_solve(G, SolverConfig(d=d, beta=beta, eps=1e-3))
        ok_solver &= trace.f_history[-1] >= result.global_value - 1e-9
        ok_solver &= check_blockwise(G, z, H, beta, 1e-3).passed
    elapsed = time.perf_counter() - t0
    ok = ok_trichotomy and ok_large_beta and ok_small_beta and ok_solver and elapsed < 300
    _verdict(
        "6 oracle gate: minimizer structure, beta extremes, solver lower bound",
        ok,
        f"trichotomy={ok_trichotomy} large-beta={ok_large_beta} "
        f"small-beta={ok_small_beta} solver={ok_solver} time={elapsed:.0f}s",
    )


def test_criterion_7_mustlink_iterates():
    rng = np.random.default_rng(70)
    ok = True
    flips = 0
    for _ in range(50):
        G = random_graph(rng, n_min=5, n_max=40)
        mustlinks = random_mustlinks(rng, G)
        # small beta cuts aggressively while beta * p still exceeds 2
        beta = float(rng.uniform(0.005, 0.1))
        p = (2.0 + float(rng.uniform(0.2, 4.0))) / beta
        scaled = scale_must_links(G, mustlinks, p)
        _, c_full = connected_components(scaled.n, scaled.rows, scaled.cols)
        d = min(scaled.n - 1, c_full + int(rng.integers(1, 4)))
        z, _, trace = cossc_solve(
            scaled, SolverConfig(d=d, beta=beta, p=p, eps=1e-3),
            record_iterates=True,
        )
        flips += sum(trace.z_changes)
        ml = scaled.mustlink
        for iterate in trace.z_history:
            ok &= bool(np.all(iterate[ml] == 1.0))
        ok &= rmv(scaled, z, mustlinks) == 0.0
    _verdict(
        "7 must-link closure: iterates keep every must-link edge when beta*p > 2",
        ok, f"{flips} edge flips across runs",
    )


def test_criterion_8_rank_component_identity():
    rng = np.random.default_rng(80)
    ok = True
    for _ in range(100):
        G = random_graph(rng, n_min=3, n_max=40)
        z = rng.integers(0, 2, G.num_edges).astype(float)
        keep = z > 0.5
        _, count = connected_components(G.n, G.rows[keep], G.cols[keep])
        rank = numerical_rank(laplacian(G.adjacency(z=z)))
        ok &= count == G.n - rank
    _verdict("8 rank-component identity on 100 random masked graphs", ok)


def test_criterion_9_linear_model_exactness():
    rng = np.random.default_rng(90)
    ok = True
    for _ in range(100):
        G = random_graph(rng, n_min=4, n_max=50)
        d = int(rng.integers(1, min(G.n, 6)))
        H = random_orthonormal(rng, G.n, d)
        beta = float(rng.uniform(0.01, 2.0))
        z0 = EdgeIndicator(rng.uniform(0, 1, G.num_edges))
        z1 = EdgeIndicator(rng.uniform(0, 1, G.num_edges))
        lhs = objective(G, z1, H, beta) - objective(G, z0, H, beta)
        rhs = float(grad_z(G, H, beta) @ (z1.values - z0.values))
        ok &= abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))
    _verdict("9 linear-model exactness of the edge gradient on 100 triples", ok)


def test_criterion_10_metrics_oracle():
    rng = np.random.default_rng(100)
    ok = True
    for _ in range(500):
        n = int(rng.integers(1, 9))
        pred = rng.integers(0, 3, n)
        truth = rng.integers(0, 3, n)
        ok &= accuracy(pred, truth) == pytest.approx(brute_force_accuracy(pred, truth))
    for _ in range(500):
        n = int(rng.integers(2, 20))
        pred = rng.integers(0, 4, n)
        truth = rng.integers(0, 4, n)
        value = nmi(pred, truth)
        ok &= value == pytest.approx(nmi(truth, pred))
        relabeled = (pred * 5 + 2) % 13
        ok &= nmi(relabeled, truth) == pytest.approx(value)
    _verdict("10 metrics oracle: assignment ACC vs permutations, NMI invariances", ok)
