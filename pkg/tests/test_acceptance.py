"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single pass/fail line through ``record_criterion`` and
then asserts, so a red run still reports every verdict in the terminal
summary.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import fractrap as ft
from fractrap._kernels import binomial_np, miller_power_np
from fractrap.starting import exponent_set, starting_weight_table
from fractrap.weights import convolution_weights, miller_power

from conftest import record_criterion

M = ft.MethodKind


def _eoc_at(study, method, n):
    """EOC over the doubling (n, 2n), i.e. log2(E(n)/E(2n))."""
    res = study.results[M(method)]
    i = res.n_values.index(n)
    return res.eocs[i]


def _error_at(study, method, n):
    res = study.results[M(method)]
    return res.errors[res.n_values.index(n)]


def test_criterion_01_linear_eoc_alpha_half(study_alpha_half):
    study, seconds = study_alpha_half
    targets = {"PIU": 1.503, "PIG": 1.987, "FT": 1.991, "NG": 1.978, "FBDF": 1.969}
    table_errors = {
        "PIU": 6.14e-7,
        "PIG": 3.67e-8,
        "FT": 9.49e-9,
        "NG": 1.77e-8,
        "FBDF": 4.25e-8,
    }
    eoc_ok = all(
        abs(_eoc_at(study, m, 2048) - t) <= 0.05 for m, t in targets.items()
    )
    err_ok = all(
        e / 3 <= _error_at(study, m, 2048) <= 3 * e
        for m, e in table_errors.items()
    )
    time_ok = seconds < 60.0
    detail = (
        "alpha=0.5 EOC at N=2048 "
        + " ".join(f"{m}={_eoc_at(study, m, 2048):.3f}" for m in targets)
        + f" (targets +/-0.05), errors within 3x, runtime {seconds:.1f}s < 60s"
    )
    assert record_criterion(1, eoc_ok and err_ok and time_ok, detail)
    assert eoc_ok and err_ok and time_ok


def test_criterion_02_linear_eoc_alpha_three_halves(study_alpha_three_halves):
    study, _ = study_alpha_three_halves
    eocs = {m: _eoc_at(study, m, 2048) for m in ("PIU", "PIG", "FT", "NG", "FBDF")}
    in_range = all(1.9 <= e <= 2.15 for e in eocs.values())
    errs_1024 = {m: _error_at(study, m, 1024) for m in eocs}
    ng_smallest = errs_1024["NG"] == min(errs_1024.values())
    detail = (
        "alpha=1.5 EOC at N=2048 "
        + " ".join(f"{m}={e:.3f}" for m, e in eocs.items())
        + f" all in [1.9,2.15]; NG error {errs_1024['NG']:.2e} smallest at N=1024"
    )
    assert record_criterion(2, in_range and ng_smallest, detail)
    assert in_range and ng_smallest


def test_criterion_03_error_ordering_alpha_half(study_alpha_half):
    study, _ = study_alpha_half
    e = {m: _error_at(study, m, 1024) for m in ("FT", "NG", "FBDF", "PIG", "PIU")}
    ok = e["FT"] < e["NG"] < e["FBDF"] < e["PIG"] < e["PIU"]
    detail = (
        "alpha=0.5 N=1024 errors "
        + " ".join(f"{m}={v:.2e}" for m, v in e.items())
        + "; required chain FT<NG<FBDF<PIG<PIU"
        + ("" if ok else " breaks at FBDF<PIG (measured FBDF > PIG)")
    )
    assert record_criterion(3, ok, detail)
    assert ok, (
        "the FBDF<PIG leg of the required ordering contradicts the measured "
        "errors (and the published error table this run reproduces); see the "
        "maintainer notes for the analysis"
    )


def test_criterion_04_uniform_trapezoidal_order_drop():
    results = {}
    for alpha in (0.3, 0.6):
        problem = ft.make_linear(alpha, -2.0, T=2.0, y0=1.0)
        study = ft.convergence_study(problem, ["PIU"], [256, 512, 1024, 2048])
        results[alpha] = study.results[M.PIU].eocs[-1]
    ok = all(abs(results[a] - (1 + a)) <= 0.07 for a in results)
    detail = " ".join(
        f"PIU alpha={a}: EOC {results[a]:.3f} vs 1+alpha={1+a}" for a in results
    )
    assert record_criterion(4, ok, detail)
    assert ok


def test_criterion_05_graded_grid_restores_order():
    eocs = {}
    for alpha in (0.6, 0.8):
        problem = ft.make_linear(alpha, -2.0, T=2.0, y0=1.0)
        study = ft.convergence_study(problem, ["PIG"], [128, 256, 512, 1024])
        eocs[alpha] = study.results[M.PIG].eocs[-1]
    order_ok = all(abs(e - 2.0) <= 0.1 for e in eocs.values())
    problem = ft.make_linear(0.4, -2.0, T=2.0, y0=1.0)
    study = ft.convergence_study(problem, ["PIG", "FT"], [128, 256, 512, 1024])
    e_pig = study.results[M.PIG].errors[-1]
    e_ft = study.results[M.FT].errors[-1]
    small_alpha_ok = e_pig > e_ft
    detail = (
        " ".join(f"PIG alpha={a}: EOC {e:.3f}" for a, e in eocs.items())
        + f"; alpha=0.4 N=1024 PIG {e_pig:.2e} > FT {e_ft:.2e}"
    )
    assert record_criterion(5, order_ok and small_alpha_ok, detail)
    assert order_ok and small_alpha_ok


def test_criterion_06_stability_verdicts():
    methods = ("PIU", "PIG", "FT", "NG", "FBDF")
    ok = True
    for alpha in (0.3, 0.5, 0.7, 0.9):
        for m in methods:
            ok &= ft.a_alpha_stable(ft.generating_function(m, alpha))
    for alpha in (1.25, 1.5, 1.75):
        for m in ("NG", "PIU"):
            ok &= not ft.a_alpha_stable(ft.generating_function(m, alpha))
        for m in ("FT", "FBDF"):
            ok &= ft.a_alpha_stable(ft.generating_function(m, alpha))
    worst_dev = 0.0
    for alpha in (0.3, 0.5, 0.9, 1.5):
        b = ft.boundary_locus(ft.generating_function("FT", alpha), 2048)
        dev = np.max(np.abs(np.abs(np.angle(b.points)) - alpha * np.pi / 2))
        worst_dev = max(worst_dev, dev)
    rays_ok = worst_dev < 1e-6
    detail = (
        "sector verdicts match for all methods and orders; FT boundary sits "
        f"on the sector rays to {worst_dev:.1e} (< 1e-6)"
    )
    assert record_criterion(6, ok and rays_ok, detail)
    assert ok and rays_ok


def test_criterion_07_oracle_equivalences():
    mp = pytest.importorskip("mpmath")
    rng = np.random.default_rng(1234)
    worst_lag = 0.0
    for _ in range(200):
        alpha = rng.uniform(0.1, 1.9)
        n = int(rng.integers(3, 260))
        q = int(rng.integers(1, 4))
        om = convolution_weights(rng.choice(["FT", "NG", "FBDF"]), alpha, n).omega
        f = rng.standard_normal((n, q))
        acc = ft.LagAccumulator(om, n, q, base_block=int(rng.choice([4, 8, 16, 64])))
        for j in range(n):
            acc.append(j, f[j])
        for node in {max(1, n // 2), n}:
            fast = acc.lag(node)
            direct = ft.lag_direct(om, f, node)
            denom = max(np.max(np.abs(direct)), 1e-30)
            worst_lag = max(worst_lag, np.max(np.abs(fast - direct)) / denom)
    lag_ok = worst_lag <= 1e-12

    mp.mp.dps = 40
    worst_series = 0.0
    for coeffs, beta in [
        ([1.0, 1.0], 0.7),
        ([1.0, -1.0], -0.7),
        ([1.0, -4.0 / 3.0, 1.0 / 3.0], -0.7),
        ([1.0, -4.0 / 3.0, 1.0 / 3.0], -1.5),
    ]:
        mine = miller_power(np.array(coeffs), beta, 64)
        ref = mp.taylor(
            lambda t: sum(mp.mpf(c) * t**k for k, c in enumerate(coeffs))
            ** mp.mpf(beta),
            0,
            64,
        )
        worst_series = max(
            worst_series,
            max(abs(a - float(b)) / max(1.0, abs(float(b))) for a, b in zip(mine, ref)),
        )
    series_ok = worst_series <= 1e-11

    exact_ok = all(
        np.array_equal(
            binomial_np(sign, beta, 300),
            miller_power_np(np.array([1.0, sign]), beta, 300),
        )
        for sign, beta in [(-1.0, -0.7), (1.0, 0.7), (-1.0, 1.5)]
    )
    detail = (
        f"fast lag vs direct worst rel {worst_lag:.1e} (<=1e-12) over 200 "
        f"instances; series coefficients vs bignum oracle {worst_series:.1e} "
        "(<=1e-11); two-term binomial recursion bitwise equals the general one"
    )
    assert record_criterion(7, lag_ok and series_ok and exact_ok, detail)
    assert lag_ok and series_ok and exact_ok


def test_criterion_08_starting_weight_exactness():
    worst = 0.0
    for alpha in (0.5, 0.8, 1.5):
        E = exponent_set(alpha)
        for meth in ("FT", "NG", "FBDF"):
            N = 4096
            om = convolution_weights(meth, alpha, N).omega
            W = starting_weight_table(om, alpha, N, E)
            j = np.arange(N + 1, dtype=float)
            for nu in E.exponents:
                g = j**nu
                quad = np.convolve(om, g)[: N + 1] + W @ g[: E.s_plus_1]
                exact = (
                    math.gamma(nu + 1) / math.gamma(nu + 1 + alpha) * j ** (nu + alpha)
                )
                scale = np.maximum(1.0, np.abs(exact))
                worst = max(worst, np.max(np.abs(quad - exact)[1:] / scale[1:]))
    ok = worst <= 1e-9
    detail = (
        f"corrected quadrature on t^nu exact to {worst:.1e} of scale "
        "(<=1e-9) for alpha in {0.5,0.8,1.5}, n<=4096, all three multistep methods"
    )
    assert record_criterion(8, ok, detail)
    assert ok


def test_criterion_09_brusselator():
    tic = time.perf_counter()
    short = ft.make_brusselator(0.8, T=20.0)
    study = ft.convergence_study(
        short, ["PIU", "PIG", "FT", "NG", "FBDF"], [400, 800, 1600, 3200]
    )
    eocs = {m: study.results[M(m)].eocs[-1] for m in ("PIU", "PIG", "FT", "NG", "FBDF")}
    eoc_ok = all(1.8 <= e <= 2.2 for e in eocs.values())

    long = ft.make_brusselator(0.8, T=50.0)
    sol = ft.solve(long, M.FT, ft.grid_for(long, M.FT, 4096))
    late = sol.values[2048:]
    bounded = bool(np.all(np.isfinite(sol.values)) and np.max(np.abs(sol.values)) < 50)
    oscillating = bool(np.ptp(late[:, 0]) > 1.0)
    seconds = time.perf_counter() - tic
    ok = eoc_ok and bounded and oscillating and seconds < 120.0
    detail = (
        "alpha=0.8 T=20 EOC "
        + " ".join(f"{m}={e:.2f}" for m, e in eocs.items())
        + f" in [1.8,2.2]; T=50 trajectory bounded and cycling; {seconds:.1f}s < 120s"
    )
    assert record_criterion(9, ok, detail)
    assert ok


def test_criterion_10_complexity_and_efficiency(linear_half):
    def timed(method, N):
        grid = ft.grid_for(linear_half, M(method), N)
        sol = ft.solve(linear_half, M(method), grid)
        return sol.stats.wall_time, sol.values[-1]

    # soft-reported scaling ratios: quadratic history for the graded rule,
    # quasi-linear for the FFT-based one
    t_pig_1, _ = timed("PIG", 8192)
    t_pig_2, _ = timed("PIG", 16384)
    t_ft_1, _ = timed("FT", 8192)
    t_ft_2, _ = timed("FT", 16384)
    pig_ratio = t_pig_2 / t_pig_1
    ft_ratio = t_ft_2 / t_ft_1

    ref = ft.reference_solution(linear_half, 32768)
    pi_points = {}
    for m in ("PIU", "PIG"):
        seconds, val = timed(m, 2048)
        pi_points[m] = (seconds, float(np.max(np.abs(val - ref))))
    flmm_points = {m: [] for m in ("FT", "NG", "FBDF")}
    for m in flmm_points:
        for N in (512, 1024, 2048, 4096):
            seconds, val = timed(m, N)
            flmm_points[m].append((seconds, float(np.max(np.abs(val - ref)))))
    dominance = all(
        any(ts <= pt and es <= pe for ts, es in flmm_points[m])
        for m in flmm_points
        for pt, pe in pi_points.values()
    )
    detail = (
        f"doubling wall-time ratios at N=8192: PIG {pig_ratio:.2f} "
        f"(target >=3.2, soft), FT {ft_ratio:.2f} (target <=2.6, soft); "
        "every FFT-based method beats both product-integration variants on "
        f"error and time simultaneously: {dominance}"
    )
    assert record_criterion(10, dominance, detail)
    assert dominance
