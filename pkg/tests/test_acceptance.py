"""Acceptance suite: one test per criterion, each printing a PASS line with its
measured margin. Tolerances are fixed here, not configurable."""

import json
import time
from itertools import combinations
from math import comb

import numpy as np
import pytest

from poolscale.cli import main as cli_main
from poolscale.enumeration import brute_force_enumerate, enumerate_pruned
from poolscale.fitting import fit_scaling_law, residual_jacobian, residuals
from poolscale.oracle import build_min_vector, oracle_loss
from poolscale.pareto import FrontierPoint, pareto_front
from poolscale.synth import SynthConfig, synth_curve_points, synth_pool
from poolscale.diversity import pairwise_frontiers_and_fits
from conftest import make_matrix, random_matrix

BUDGETS = [2.0**i for i in range(11)]  # 11 log-spaced budgets


def _recovery(A, alpha, L_inf):
    start = time.monotonic()
    clean = fit_scaling_law(synth_curve_points(A, alpha, L_inf, BUDGETS))
    assert abs(clean.A - A) / A <= 1e-3
    assert abs(clean.alpha - alpha) / alpha <= 1e-3
    assert abs(clean.L_inf - L_inf) / L_inf <= 1e-3

    alpha_errs, floor_errs = [], []
    for seed in range(20):
        noisy = fit_scaling_law(synth_curve_points(A, alpha, L_inf, BUDGETS, noise_sigma=0.01, seed=seed))
        alpha_errs.append(abs(noisy.alpha - alpha) / alpha)
        floor_errs.append(abs(noisy.L_inf - L_inf))
    med_alpha, med_floor = float(np.median(alpha_errs)), float(np.median(floor_errs))
    elapsed = time.monotonic() - start
    assert med_alpha <= 0.05
    assert med_floor <= 0.02
    assert elapsed < 5.0
    return med_alpha, med_floor, elapsed


def test_fit_recovery_ensemble_parameters():
    med_alpha, med_floor, elapsed = _recovery(2.02, 0.3502, 1.25)
    print(
        f"\nPASS: fit recovery (ensemble curve): noise-free within 1e-3 rel; "
        f"median alpha err {med_alpha:.4f} <= 0.05, median floor err {med_floor:.4f} <= 0.02, {elapsed:.2f}s < 5s"
    )


def test_fit_recovery_single_model_parameters():
    med_alpha, med_floor, elapsed = _recovery(1.11, 0.3578, 2.21)
    print(
        f"\nPASS: fit recovery (single-model curve): noise-free within 1e-3 rel; "
        f"median alpha err {med_alpha:.4f} <= 0.05, median floor err {med_floor:.4f} <= 0.02, {elapsed:.2f}s < 5s"
    )


def _exhaustive_weak_front(params, loss, keys):
    """Chunked O(n^2) weak-dominance filter plus key-smallest duplicate rule."""
    n = len(params)
    keep = np.ones(n, dtype=bool)
    for start in range(0, n, 512):
        sl = slice(start, min(start + 512, n))
        p, l = params[sl, None], loss[sl, None]
        le = (params[None, :] <= p) & (loss[None, :] <= l)
        strict = (params[None, :] < p) | (loss[None, :] < l)
        keep[sl] &= ~np.any(le & strict, axis=1)
    out = [(params[i], loss[i], keys[i]) for i in range(n) if keep[i]]
    # duplicates: keep key-smallest only
    best = {}
    for p, l, k in out:
        if (p, l) not in best or k < best[(p, l)]:
            best[(p, l)] = k
    return sorted((p, l, k) for (p, l), k in best.items())


def test_pareto_correctness_vs_exhaustive():
    start = time.monotonic()
    rng = np.random.default_rng(2024)
    sizes = [int(x) for x in rng.integers(1, 2000, size=98)] + [10000, 10000]
    assert len(sizes) >= 100
    for case, n in enumerate(sizes):
        params = rng.uniform(0.1, 100, size=n).round(3)  # rounding forces ties
        loss = rng.uniform(0.5, 5, size=n).round(3)
        keys = [(f"e{i}",) for i in range(n)]
        pts = [FrontierPoint(float(p), float(l), k) for p, l, k in zip(params, loss, keys)]
        front = pareto_front(pts)
        got = [(p.total_params_billions, p.loss, p.ensemble_key) for p in front]
        assert got == _exhaustive_weak_front(params.astype(float), loss.astype(float), keys)
        # staircase + idempotence
        for a, b in zip(front.points, front.points[1:]):
            assert a.total_params_billions < b.total_params_billions and a.loss > b.loss
        assert list(pareto_front(front.points)) == list(front)
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    print(f"\nPASS: pareto correctness: {len(sizes)} random sets (up to 10,000 points) match O(n^2) filtering exactly, {elapsed:.2f}s < 10s")


def test_oracle_loss_correctness_and_monotonicity():
    rng = np.random.default_rng(77)
    checked = 0
    for _ in range(100):
        m = random_matrix(rng)
        n = len(m.models)
        ids = m.model_ids
        grid = m.loss_grid
        for k in (1, 2, 3):
            if k > n:
                continue
            for idx in combinations(range(n), k):
                ev = oracle_loss(m, build_min_vector(m, {ids[i] for i in idx}))
                # independent per-text argmin re-computation (np.mean matches
                # the library's pairwise summation so equality can be exact)
                mins = [min(grid[i, j] for i in idx) for j in range(len(m.texts))]
                expected = float(np.mean(mins) / m.n_bar)
                assert ev.oracle_loss == expected
                checked += 1
    # monotonicity over 1,000 random nested pairs
    for _ in range(1000):
        m_idx = rng.integers(0, 50)
        m = random_matrix(np.random.default_rng(1000 + m_idx), n_models=6, n_texts=12)
        ids = list(m.model_ids)
        small = set(rng.choice(ids, size=int(rng.integers(1, 4)), replace=False))
        big = small | set(rng.choice(ids, size=int(rng.integers(1, 4)), replace=False))
        assert (
            oracle_loss(m, build_min_vector(m, big)).oracle_loss
            <= oracle_loss(m, build_min_vector(m, small)).oracle_loss
        )
    print(f"\nPASS: oracle-loss correctness: {checked} subsets across 100 matrices match per-text argmin exactly; monotonic on 1000 nested pairs")


def test_pruning_vs_exact():
    start = time.monotonic()
    rng = np.random.default_rng(55)
    for _ in range(50):
        n = int(rng.integers(8, 13))
        m = random_matrix(rng, n_models=n, n_texts=int(rng.integers(5, 21)))
        pruned = enumerate_pruned(m, n)
        exact = brute_force_enumerate(m, n)
        # exact envelope weakly dominates the pruned frontier at every budget
        for p in pruned.merged:
            assert any(
                q.total_params_billions <= p.total_params_billions and q.loss <= p.loss
                for q in exact
            )
        # full pool explored by both; both envelopes bottom out at its exact loss
        full = pruned.generations[-1].frontier.points
        assert [p.ensemble_key for p in full] == [tuple(sorted(m.model_ids))]
        assert min(p.loss for p in pruned.merged) == full[0].loss
        assert min(p.loss for p in exact) == full[0].loss
        # pruned frontier internally consistent
        for a, b in zip(pruned.merged.points, pruned.merged.points[1:]):
            assert a.total_params_billions < b.total_params_billions and a.loss > b.loss
    # monotone synthetic pool: pruned equals exact
    params = [1, 2, 4, 8, 16, 32]
    loss = np.array([[12 * p**-0.35 * (1 + 0.07 * t) for t in range(8)] for p in params])
    mono = make_matrix(loss, params)
    assert list(enumerate_pruned(mono, 6).merged) == list(brute_force_enumerate(mono, 6))
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    print(f"\nPASS: pruning vs exact: 50 random 8-12-model pools dominated by exact envelope; monotone pool pruned == exact, {elapsed:.2f}s < 60s")


def test_pair_partition_identity():
    from poolscale.diversity import partition_pairs

    rng = np.random.default_rng(31)
    for _ in range(20):
        m = random_matrix(rng, n_models=int(rng.integers(2, 10)), n_texts=4)
        part = partition_pairs(m)
        n = len(m.models)
        assert len(part.homogeneous) + len(part.heterogeneous) == comb(n, 2)
    assert 506 + 1979 == 2485 == comb(71, 2)
    print("\nPASS: pair partition identity: |homo| + |hetero| = C(n,2) on 20 pools; 506 + 1,979 = 2,485 = C(71,2)")


def test_qualitative_floor_ordering_on_synthetic_pool():
    start = time.monotonic()
    config = SynthConfig(
        n_families=3,
        models_per_family=6,
        params_grid_billions=(0.25, 0.5, 1.0, 2.0, 4.0, 8.0),
        n_texts=90,
        family_signature_strength=0.6,
        noise_sigma=0.0,
        seed=7,
    )
    matrix = synth_pool(config)
    result = enumerate_pruned(matrix, len(matrix.models))
    single_fit = fit_scaling_law(result.generations[0].frontier)
    ensemble_fit = fit_scaling_law(result.merged)
    homo, hetero = pairwise_frontiers_and_fits(matrix)
    elapsed = time.monotonic() - start
    assert ensemble_fit.L_inf < single_fit.L_inf
    assert hetero.fit is not None and homo.fit is not None
    assert hetero.fit.L_inf < homo.fit.L_inf
    assert elapsed < 120.0
    print(
        f"\nPASS: qualitative floor ordering: ensemble L_inf {ensemble_fit.L_inf:.3f} < single {single_fit.L_inf:.3f}; "
        f"heterogeneous {hetero.fit.L_inf:.3f} < homogeneous {homo.fit.L_inf:.3f}, {elapsed:.2f}s < 120s"
    )


def test_gradient_check():
    rng = np.random.default_rng(99)
    h = 1e-6
    for _ in range(100):
        A = float(rng.uniform(0.1, 5))
        alpha = float(rng.uniform(0.05, 2))
        L_inf = float(rng.uniform(0, 3))
        P = rng.uniform(0.2, 200, size=10)
        L = rng.uniform(0.5, 6, size=10)
        jac = residual_jacobian(P, A, alpha, L_inf)
        fd = np.column_stack(
            [
                (residuals(P, L, A + h, alpha, L_inf) - residuals(P, L, A - h, alpha, L_inf)) / (2 * h),
                (residuals(P, L, A, alpha + h, L_inf) - residuals(P, L, A, alpha - h, L_inf)) / (2 * h),
                (residuals(P, L, A, alpha, L_inf + h) - residuals(P, L, A, alpha, L_inf - h)) / (2 * h),
            ]
        )
        assert np.allclose(jac, fd, rtol=1e-5, atol=1e-8)
    print("\nPASS: gradient check: analytic residual Jacobian matches central differences (1e-6 step) within 1e-5 at 100 random points")


def test_cli_determinism(tmp_path):
    data = tmp_path / "data"
    assert cli_main(
        [
            "synth", "--out", str(data), "--seed", "13",
            "--n-families", "3", "--models-per-family", "4",
            "--params-grid", "0.25,0.5,1,2", "--n-texts", "40",
            "--signature-strength", "0.5", "--noise-sigma", "0.01",
        ]
    ) == 0
    outs = []
    for name in ("run1", "run2"):
        out = tmp_path / name
        assert cli_main(
            [
                "run",
                "--metadata", str(data / "metadata.csv"),
                "--matrix", str(data / "matrix.csv"),
                "--out", str(out),
            ]
        ) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files
    for name in files:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name
    print(f"\nPASS: determinism: cmd_run twice produced byte-identical outputs ({len(files)} files)")
