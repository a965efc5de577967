"""Tests for descent checks, rate fits, plateau detection and the spectral predictor."""

import numpy as np
import pytest

from src.diagnostics import (
    bound_profile,
    check_descent,
    contraction_radius,
    detect_swamp,
    estimate_rate,
    gradient_bound_profile,
    hessian_fd,
    summarize,
)
from src.models import Algorithm, ProblemKind
from src.solvers import run, solver_config_for
from src.tensor import khatri_rao, random_cp_problem
from src.utils.errors import ShapeMismatchError, TraceError


# =============================================================================
# check_descent
# =============================================================================

def test_descent_violation_is_reported(make_trace):
    trace = make_trace([0.1] * 4, f_vals=[9.0, 8.0, 8.5, 7.0], f_initial=10.0)
    assert check_descent(trace) == [3]


def test_accelerated_iterations_are_exempt(make_trace):
    trace = make_trace([0.1] * 4, f_vals=[9.0, 8.0, 8.5, 7.0], accel={3}, f_initial=10.0)
    assert check_descent(trace) == []


def test_descent_uses_given_schedule(make_trace):
    from src.models import LambdaSchedule

    trace = make_trace([1.0, 1.0], f_vals=[9.0, 8.7], lam=0.1, f_initial=10.0)
    assert check_descent(trace) == []
    assert check_descent(trace, schedule=LambdaSchedule.constant(1.0)) == [2]


def test_descent_needs_initial_f(make_trace):
    with pytest.raises(TraceError):
        check_descent(make_trace([0.1], f_vals=[1.0]))


def test_rals_runs_satisfy_descent():
    for seed in range(3):
        t, x0, _ = random_cp_problem((6, 6, 6), 4, seed=seed)
        for algorithm in (Algorithm.RALS, Algorithm.RALS_L):
            trace = run(t, x0, solver_config_for(algorithm, max_iter=150))
            assert check_descent(trace) == []


# =============================================================================
# estimate_rate
# =============================================================================

def test_rate_of_exact_geometric_sequence():
    err = [4.0 ** -n for n in range(1, 61)]
    rate = estimate_rate(err)
    assert rate.q_fit == pytest.approx(0.5, rel=1e-9)
    assert rate.r_squared >= 1.0 - 1e-12
    assert rate.window == (31, 60)


def test_rate_of_oscillating_sequence_fits_poorly():
    rate = estimate_rate([1.0, 0.1] * 20)
    assert rate.r_squared < 0.9


@pytest.mark.parametrize("rho", [0.2, 0.7, 0.95])
def test_rate_of_linear_map_trace(rho):
    err = [3.0 * rho ** (2 * n) for n in range(200)]
    assert estimate_rate(err).q_fit == pytest.approx(rho, abs=1e-6)


def test_rate_window_starts_at_last_increase():
    err = [0.25 ** k for k in range(1, 101)] + [0.1 * 0.81 ** k for k in range(81)]
    rate = estimate_rate(err)
    assert rate.window == (101, 181)
    assert rate.q_fit == pytest.approx(0.9, rel=1e-9)
    assert rate.r_squared >= 1.0 - 1e-12


def test_rate_ignores_late_increase_with_short_tail():
    err = [0.25 ** k for k in range(1, 61)]
    err[55] = err[54] * 2.0
    rate = estimate_rate(err)
    assert rate.window == (31, 60)


def test_short_trace_is_fit_whole():
    rate = estimate_rate([0.3 ** k for k in range(1, 13)])
    assert rate.window == (1, 12)
    assert rate.q_fit == pytest.approx(0.3 ** 0.5, rel=1e-9)


def test_rate_needs_enough_records():
    with pytest.raises(TraceError):
        estimate_rate([1.0, 0.5, 0.25], min_records=10)


def test_rate_rejects_bad_window():
    with pytest.raises(ValueError):
        estimate_rate([1.0] * 20, window_fraction=0.0)


# =============================================================================
# detect_swamp
# =============================================================================

def _plateau_series(fast=100, slow=500, tail=50):
    err = [1.0]
    for factor, count in ((0.5, fast), (0.9999, slow), (0.5, tail)):
        for _ in range(count):
            err.append(err[-1] * factor)
    return err


def test_geometric_series_has_no_plateau():
    assert detect_swamp([0.5 ** n for n in range(1, 400)]) == []


def test_constructed_plateau_is_found():
    plateaus = detect_swamp(_plateau_series())
    assert len(plateaus) == 1
    start, end = plateaus[0]
    assert abs(start - 101) <= 5
    assert abs(end - 601) <= 5


def test_plateau_without_later_drop_is_ignored():
    assert detect_swamp(_plateau_series(tail=0)) == []


def test_short_stagnation_is_ignored():
    assert detect_swamp(_plateau_series(slow=20)) == []


def test_plateau_indices_follow_trace_iterations(make_trace):
    trace = make_trace(_plateau_series())
    assert detect_swamp(trace) == detect_swamp(_plateau_series())


def _plateau_total(trace):
    return sum(end - start + 1 for start, end in detect_swamp(trace))


@pytest.mark.slow
def test_acceleration_shortens_swamp_plateaus():
    shorter = 0
    seeds = range(5)
    for seed in seeds:
        t, x0, _ = random_cp_problem((10, 10, 10), 10, ProblemKind.SWAMP, seed=seed)
        als = run(t, x0, solver_config_for(Algorithm.ALS, max_iter=20000))
        rals_a = run(t, x0, solver_config_for(Algorithm.RALS_A, max_iter=20000))
        als_total = _plateau_total(als)
        if als_total > 0 and _plateau_total(rals_a) < als_total:
            shorter += 1
    assert shorter > len(seeds) // 2


# =============================================================================
# Spectral predictor
# =============================================================================

def test_contraction_radius_of_diagonal_hessian():
    prediction = contraction_radius(np.diag([1.0, 2.0, 3.0]), [1, 1, 1], 1.0)
    assert prediction.rho == pytest.approx(0.5, abs=1e-12)
    assert prediction.null_dim == 0


def test_contraction_radius_of_zero_hessian():
    prediction = contraction_radius(np.zeros((3, 3)), [1, 1, 1], 1.0)
    assert prediction.rho == 1.0
    assert prediction.null_dim == 3


def test_contraction_radius_respects_block_permutations(rng):
    g = rng.standard_normal((6, 6))
    hess = g @ g.T
    blocks = [2, 2, 2]
    perm = [1, 0, 3, 2, 5, 4]
    base = contraction_radius(hess, blocks, 0.7).rho
    permuted = contraction_radius(hess[np.ix_(perm, perm)], blocks, 0.7).rho
    assert permuted == pytest.approx(base, rel=1e-10)
    assert base < 1.0


def test_contraction_radius_rejects_bad_blocks():
    with pytest.raises(ShapeMismatchError):
        contraction_radius(np.eye(3), [1, 1], 1.0)


def test_hessian_a_block_matches_gram_structure(small_exact):
    t, x0, _ = small_exact
    hess = hessian_fd(t, x0)
    kr = khatri_rao(x0.C, x0.B)
    I, r = x0.dims[0], x0.r
    expected = np.kron(np.eye(I), kr.T @ kr)
    block = hess[:I * r, :I * r]
    assert np.linalg.norm(block - expected) <= 1e-5 * np.linalg.norm(expected)


def test_raw_hessian_is_nearly_symmetric(small_exact):
    t, x0, _ = small_exact
    raw = hessian_fd(t, x0, symmetrize=False)
    assert np.linalg.norm(raw - raw.T) <= 1e-5 * np.linalg.norm(raw)


def test_hessian_is_psd_at_global_minimizer(small_exact):
    t, _, x_star = small_exact
    hess = hessian_fd(t, x_star)
    assert np.linalg.eigvalsh(hess).min() >= -1e-6 * np.linalg.norm(hess, 2)


# =============================================================================
# Gradient bound
# =============================================================================

def test_fixed_point_start_gives_no_ratios(exact_problem):
    t, _, x = exact_problem
    trace = run(t, x, solver_config_for(Algorithm.RALS, keep_iterates=True))
    profile = gradient_bound_profile(trace, t)
    assert profile.ratios == [None]
    assert profile.max_ratio is None


def test_growing_ratios_are_flagged():
    profile = bound_profile([1.0] * 6, [10.0 ** -k for k in range(1, 7)], floor=1e-10, factor=10.0)
    assert profile.growing
    assert not profile.bounded
    assert profile.max_ratio == pytest.approx(1e6)


def test_flat_ratios_are_bounded():
    profile = bound_profile([2.0, 1.0, 0.5, 0.25], [1.0, 0.5, 0.25, 0.125], factor=10.0)
    assert profile.bounded
    assert not profile.growing
    assert profile.median_ratio == pytest.approx(2.0)


def test_gradient_bound_profile_needs_iterates(exact_problem):
    t, x0, _ = exact_problem
    trace = run(t, x0, solver_config_for(Algorithm.RALS, max_iter=5))
    with pytest.raises(TraceError):
        gradient_bound_profile(trace, t)


def test_rals_run_ratios_are_finite(exact_problem):
    t, x0, _ = exact_problem
    trace = run(t, x0, solver_config_for(Algorithm.RALS, max_iter=300, keep_iterates=True))
    profile = gradient_bound_profile(trace, t)
    assert len(profile.ratios) == trace.iterations
    assert profile.max_ratio is not None and np.isfinite(profile.max_ratio)
    assert not profile.growing
    assert profile.bounded
    assert profile.max_ratio <= 10.0 * profile.second_half_median


# =============================================================================
# summarize
# =============================================================================

def test_summary_of_rals_run(exact_problem):
    t, x0, _ = exact_problem
    cfg = solver_config_for(Algorithm.RALS, max_iter=100, keep_iterates=True)
    trace = run(t, x0, cfg)
    summary = summarize(t, trace, cfg)
    assert summary["algorithm"] == "rals"
    assert summary["iterations"] == trace.iterations
    assert summary["descent"]["holds"]
    assert "q_fit" in summary["rate"]
    assert "ratios" not in summary["gradient_bound"]
    assert "spectral" not in summary


def test_summary_skips_descent_for_als(exact_problem):
    t, x0, _ = exact_problem
    cfg = solver_config_for(Algorithm.ALS, max_iter=5)
    summary = summarize(t, run(t, x0, cfg), cfg)
    assert "descent" not in summary
    assert "gradient_bound" not in summary
    assert "error" in summary["rate"]


def test_summary_spectral_on_converged_run(small_exact):
    t, _, x_star = small_exact
    cfg = solver_config_for(Algorithm.RALS, max_iter=10)
    summary = summarize(t, run(t, x_star, cfg), cfg, spectral=True)
    assert 0.0 <= summary["spectral"]["rho"] < 1.0 + 1e-9
    assert summary["spectral"]["hessian_dim"] == 2 * 15
