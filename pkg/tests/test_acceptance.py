"""Exit criteria. Each test prints one PASS/FAIL line to the terminal."""
import itertools
import math
import time

import numpy as np
import pytest

from dghmap.cli import run
from dghmap.core import COLLATZ, FIVE_X_PLUS_ONE, path as map_path, residue_set_E, trajectory, validate_params
from dghmap.oracle import brute_force_counts, members_from_table, path_table
from dghmap.statistics import (
    DensitySpec,
    PartitionSpec,
    drift_stats,
    empirical_drift,
    ks_critical,
    path_probability,
    sample_increments,
    sample_k_sums,
    stopping_density,
)
from dghmap.structure import enumerate_members, image_of, solve_structure

SWEEP = [
    validate_params(2, 3, {1: 1}),
    validate_params(2, 5, {1: 1}),
    validate_params(3, 4, {1: -1, 2: 1}),
    validate_params(3, 5, {1: 2, 2: 1}),
]
M_MAX, K_MAX = 3, 4


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")

    return emit


def test_criterion_1_worked_example(report):
    t0 = time.perf_counter()
    text, code, _ = run(["--d", "2", "--g", "3", "--h", "1=1", "solve", "--path", "2,3", "--eps", "5"])
    sol = solve_structure(COLLATZ, (2, 3), 5)
    checks = [
        code == 0,
        '"q": "2"' in text and '"r": "0"' in text and '"delta": 5' in text,
        [tuple(t) for t in sol.triples] == [(2, 0, 5)],
        [sol.member(0, 0), sol.member(0, 1)] == [17, 209],
        [image_of(sol, 0, 0), image_of(sol, 0, 1)] == [5, 59],
        trajectory(COLLATZ, 17, 2) == [17, 13, 5],
        trajectory(COLLATZ, 209, 2) == [209, 157, 59],
        map_path(COLLATZ, 17, 2) == (2, 3) == map_path(COLLATZ, 209, 2),
    ]
    elapsed = time.perf_counter() - t0
    ok = all(checks) and elapsed < 1.0
    report(1, ok, f"{sum(checks)}/{len(checks)} exact checks, {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_2_oracle_equivalence(report):
    t0 = time.perf_counter()
    checked = 0
    bad = []
    for params in SWEEP:
        d, dg = params.d, params.dg
        for m in range(1, M_MAX + 1):
            table = path_table(params, m, K_MAX, 3 * dg * d ** (m * K_MAX))
            for ks in itertools.product(range(1, K_MAX + 1), repeat=m):
                bound = 3 * dg * d ** sum(ks)
                for eps in residue_set_E(params):
                    sol = solve_structure(params, ks, eps)
                    checked += 1
                    if len(sol.triples) != (d - 1) ** m or enumerate_members(sol, bound) != members_from_table(
                        table, ks, eps, bound
                    ):
                        bad.append((params, ks, eps))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    report(2, ok, f"{checked} (map, path, eps) cases, {len(bad)} mismatches, {elapsed:.1f}s (< 120s)")
    assert ok, bad[:5]


def test_criterion_3_exact_path_distribution(report):
    checked = 0
    bad = []
    for params in SWEEP:
        for m in range(1, M_MAX + 1):
            counts = brute_force_counts(params, m, K_MAX)
            for ks in itertools.product(range(1, K_MAX + 1), repeat=m):
                checked += 1
                if counts.get(ks) != path_probability(params, ks):
                    bad.append((params, ks, counts.get(ks)))
    ok = not bad
    report(3, ok, f"{checked} paths, brute-force density == (d-1)^m/d^K exactly, {len(bad)} mismatches")
    assert ok, bad[:5]


def test_criterion_4_k_sum_moments(report):
    m, n = 100, 10**5
    window = DensitySpec(10**9, 10**9 + 6 * 10**6 - 1)
    t0 = time.perf_counter()
    sums = np.array(sample_k_sums(COLLATZ, m, window, n, seed=2024), dtype=float)
    elapsed = time.perf_counter() - t0
    mean, var = sums.mean(), sums.var(ddof=1)
    se = math.sqrt(200 / n)
    mean_ok = abs(mean - 200) <= 3 * se
    var_ok = abs(var - 200) <= 0.05 * 200
    ok = mean_ok and var_ok and elapsed < 60
    report(
        4,
        ok,
        f"window [1e9, 1e9+6e6): mean {mean:.4f} (|err| {abs(mean - 200):.4f} vs 3se {3 * se:.4f}), "
        f"variance {var:.2f} (rel err {abs(var - 200) / 200:.3f} vs 0.05), {elapsed:.1f}s",
    )
    assert ok


def test_criterion_4_companion_full_period_window(report):
    """Same moment check on a window of size dg * 2**K, K well above 200.

    Not a substitute for criterion 4: near 1e9 most 3x+1 orbits reach the
    fixed point 1 within 100 steps and the k sums stop being random.
    """
    m, n = 100, 10**5
    t0 = time.perf_counter()
    sums = np.array(sample_k_sums(COLLATZ, m, DensitySpec.for_steps(COLLATZ, m), n, seed=2024), dtype=float)
    elapsed = time.perf_counter() - t0
    mean, var = sums.mean(), sums.var(ddof=1)
    se = math.sqrt(200 / n)
    ok = abs(mean - 200) <= 3 * se and abs(var - 200) <= 0.05 * 200 and elapsed < 60
    report("4 (companion)", ok, f"full-period window: mean {mean:.4f} (3se {3 * se:.4f}), variance {var:.2f}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_brownian_increments(report):
    m, n = 10**4, 2000
    part = PartitionSpec.parse("0,0.25,0.5,0.75,1", m)
    t0 = time.perf_counter()
    sample = sample_increments(COLLATZ, part, DensitySpec.for_steps(COLLATZ, m), n, seed=42)
    elapsed = time.perf_counter() - t0
    crit = 1.63 / math.sqrt(n)
    assert crit == pytest.approx(ks_critical(n))
    ks = sample.ks()
    corr = sample.correlations()
    off = [abs(corr[i, j]) for i in range(4) for j in range(i + 1, 4)]
    ok = all(D < crit for D in ks) and max(off) <= 3 / math.sqrt(n) and elapsed < 300
    report(
        5,
        ok,
        f"KS D = {[round(D, 4) for D in ks]} vs {crit:.4f}; max |corr| {max(off):.4f} vs {3 / math.sqrt(n):.4f}; {elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_drift(report):
    m, n = 1000, 1000
    lines = []
    ok = True
    for params, expected in ((COLLATZ, -0.2876821), (FIVE_X_PLUS_ONE, 0.2231436)):
        theo = drift_stats(params)
        assert theo.drift == pytest.approx(expected, abs=1e-7)
        spec = DensitySpec.for_steps(params, m)
        for seed in range(5):
            t0 = time.perf_counter()
            emp = empirical_drift(params, m, spec, n, seed)
            elapsed = time.perf_counter() - t0
            run_ok = abs(emp - expected) <= 0.1 * abs(expected) and (emp < 0) == (theo.drift < 0) and elapsed < 60
            ok &= run_ok
            lines.append(f"g={params.g} seed={seed}: {emp:.5f}")
    report(6, ok, "; ".join(lines))
    assert ok


def test_criterion_7_stopping_density(report):
    t0 = time.perf_counter()
    f3 = stopping_density(COLLATZ, 10**6, 1000)
    f5 = stopping_density(FIVE_X_PLUS_ONE, 10**6, 1000)
    elapsed = time.perf_counter() - t0
    ok = f3 >= 0.99 and f5 < f3 and elapsed < 120
    report(7, ok, f"3x+1 fraction {f3:.6f} (>= 0.99), 5x+1 fraction {f5:.6f} (< 3x+1), {elapsed:.1f}s")
    assert ok


def test_criterion_8_determinism(report):
    commands = [
        ["stats", "increments", "--m", "1000", "--n", "200"],
        ["stats", "kdist", "--m", "100", "--n", "300"],
        ["stats", "drift", "--m", "500", "--n", "200"],
        ["stats", "stopping", "--bound", "50000", "--cap", "200"],
    ]
    differing = []
    for args in commands:
        for fmt in ("json", "csv"):
            outputs = {run(["--seed", "123", "--format", fmt, "--threads", str(t)] + args)[0] for t in (1, 2, 4)}
            outputs |= {run(["--seed", "123", "--format", fmt, "--threads", "1"] + args)[0]}
            if len(outputs) != 1:
                differing.append((fmt, args))
    ok = not differing
    report(8, ok, f"{len(commands) * 2} command/format pairs at threads 1, 2, 4; {len(differing)} differ")
    assert ok
