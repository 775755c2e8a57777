"""
Tests for the step-size bounds, the P_H/P_K closed forms and the divergence probe
"""

import math

import numpy as np
import pytest

from src.errors import ParameterError
from src.models import ProbePoint, StabilityInputs, StabilityRegime
from src.stability import (
    advise,
    bound_gaussian_sensing_bounded_noise,
    bound_gaussian_sensing_gaussian_noise,
    bound_rademacher,
    divergence_probe,
    eval_PH_PK_bounded,
    eval_PH_PK_gaussian_noise,
    mc_PH_PK_bounded,
    mc_PH_PK_gaussian_noise,
)


# ==================== Bounds ====================

def test_bound_values():
    assert bound_rademacher(1000, 1 / 300) == pytest.approx(0.6, rel=1e-12)
    assert bound_gaussian_sensing_bounded_noise(1000, 1 / 300, 1.0, 2.0) == pytest.approx(600 / 1005, rel=1e-12)
    assert bound_gaussian_sensing_bounded_noise(1000, 1 / 300, 1.0, 2.0) == pytest.approx(0.597015, abs=1e-6)
    assert bound_gaussian_sensing_gaussian_noise(1000, 1 / 300) == pytest.approx(0.598802, abs=1e-6)


def test_bounds_simple_cases():
    assert bound_rademacher(1, 2.0) == pytest.approx(1.0)
    assert bound_gaussian_sensing_gaussian_noise(2, 0.5) == pytest.approx(1.0)
    # v_max = 0 leaves only the N + 4 term
    assert bound_gaussian_sensing_bounded_noise(10, 0.1, 0.7, 0.0) == pytest.approx(2 / 1.4)


def test_bounds_reject_bad_inputs():
    with pytest.raises(ParameterError):
        bound_rademacher(0, 0.1)
    with pytest.raises(ParameterError):
        bound_gaussian_sensing_gaussian_noise(10, 0.0)
    with pytest.raises(ParameterError):
        bound_gaussian_sensing_bounded_noise(10, 0.1, 1.0, -1.0)


def test_advise_rows():
    report = advise(StabilityInputs(N=1000, sigma_a_sq=1 / 300))
    regimes = [row.regime for row in report.rows]
    assert regimes == [StabilityRegime.RADEMACHER, StabilityRegime.GAUSSIAN_NOISE]
    assert report.rows[0].suggested_mu == pytest.approx(0.3)

    full = advise(StabilityInputs(N=1000, sigma_a_sq=1 / 300, sigma=1.0, v_max=2.0))
    assert len(full.rows) == 3
    assert full.P_H is None and full.P_K is None
    frame = full.to_dataframe()
    assert list(frame.columns) == ["regime", "bound", "suggested_mu"]


def test_advise_gaussian_closed_forms():
    report = advise(StabilityInputs(N=10, sigma_a_sq=1.0, sigma=1.0, sigma_v_sq=0.0, wtilde_norm_sq=1.0))
    assert report.P_H == pytest.approx(0.353553, abs=1e-6)
    assert report.P_K == pytest.approx(3.712311, abs=1e-6)


def test_advise_bounded_needs_noise_bound():
    with pytest.raises(ParameterError):
        advise(StabilityInputs(N=10, sigma_a_sq=0.1, sigma=1.0), [StabilityRegime.BOUNDED_NOISE])


# ==================== Closed forms ====================

def test_bounded_closed_form_at_zero_weight_error():
    probe = ProbePoint(wtilde_norm_sq=0.0, v=0.4, sigma=0.8, sigma_a_sq=0.02, N=50)
    P_H, P_K = eval_PH_PK_bounded(probe)
    assert P_H == pytest.approx(0.02 * math.exp(-0.16 / (2 * 0.64)))
    assert P_K == pytest.approx((50 + 2) * 0.02 * P_H)


def test_gaussian_noise_closed_form_worked_example():
    P_H, P_K = eval_PH_PK_gaussian_noise(N=10, sigma=1.0, sigma_a_sq=1.0, sigma_v_sq=0.0, wtilde_norm_sq=1.0)
    assert P_H == pytest.approx(2 ** -1.5, rel=1e-12)
    assert P_H == pytest.approx(0.353553, abs=1e-6)
    assert P_K == pytest.approx(3.712311, abs=1e-6)


def test_bounded_ratio_never_exceeds_bound():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        N = int(rng.integers(1, 2001))
        sigma = float(rng.uniform(0.5, 5.0))
        sigma_a_sq = float(rng.uniform(1e-4, 1.0))
        v_max = float(rng.uniform(0.0, 5.0))
        v = float(rng.uniform(-1.0, 1.0)) * v_max
        probe = ProbePoint(float(rng.uniform(0.0, 10.0)), v, sigma, sigma_a_sq, N)
        P_H, P_K = eval_PH_PK_bounded(probe)
        limit = (N + 4 + v_max ** 2 / (4 * sigma ** 2)) * sigma_a_sq
        assert P_K <= limit * P_H * (1 + 1e-12)


def test_gaussian_noise_ratio_is_strictly_below_bound():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        N = int(rng.integers(1, 2001))
        sigma_a_sq = float(rng.uniform(1e-4, 1.0))
        P_H, P_K = eval_PH_PK_gaussian_noise(
            N,
            float(rng.uniform(0.1, 5.0)),
            sigma_a_sq,
            float(rng.uniform(0.0, 1.0)),
            float(rng.uniform(1e-3, 10.0)),
        )
        assert P_K < (N + 2) * sigma_a_sq * P_H


def test_probe_point_validation():
    with pytest.raises(ParameterError):
        ProbePoint(-1.0, 0.0, 1.0, 0.1, 10)
    with pytest.raises(ParameterError):
        ProbePoint(1.0, 0.0, 0.0, 0.1, 10)


# ==================== Monte Carlo oracle ====================

def test_monte_carlo_matches_bounded_closed_form():
    probe = ProbePoint(wtilde_norm_sq=0.5, v=0.3, sigma=1.0, sigma_a_sq=1 / 300, N=50)
    P_H, P_K = eval_PH_PK_bounded(probe)
    mc_H, mc_K = mc_PH_PK_bounded(probe, samples=1_000_000, seed=1)
    assert mc_H == pytest.approx(P_H, rel=0.02)
    assert mc_K == pytest.approx(P_K, rel=0.02)


def test_monte_carlo_does_not_depend_on_direction():
    probe = ProbePoint(wtilde_norm_sq=1.0, v=-0.2, sigma=0.8, sigma_a_sq=0.05, N=20)
    P_H, P_K = eval_PH_PK_bounded(probe)
    direction = np.random.default_rng(3).normal(size=20)
    mc_H, mc_K = mc_PH_PK_bounded(probe, samples=400_000, seed=2, direction=direction)
    assert mc_H == pytest.approx(P_H, rel=0.03)
    assert mc_K == pytest.approx(P_K, rel=0.03)


def test_monte_carlo_matches_gaussian_noise_closed_form():
    P_H, P_K = eval_PH_PK_gaussian_noise(10, 1.0, 1.0, 0.0, 1.0)
    mc_H, mc_K = mc_PH_PK_gaussian_noise(10, 1.0, 1.0, 0.0, 1.0, samples=1_000_000, seed=4)
    assert mc_H == pytest.approx(P_H, rel=0.02)
    assert mc_K == pytest.approx(P_K, rel=0.02)


def test_monte_carlo_is_reproducible():
    probe = ProbePoint(wtilde_norm_sq=1.0, v=0.1, sigma=1.0, sigma_a_sq=0.1, N=5)
    assert mc_PH_PK_bounded(probe, samples=20_000, seed=5) == mc_PH_PK_bounded(probe, samples=20_000, seed=5)


def test_monte_carlo_needs_weight_error():
    probe = ProbePoint(wtilde_norm_sq=0.0, v=0.1, sigma=1.0, sigma_a_sq=0.1, N=5)
    with pytest.raises(ParameterError):
        mc_PH_PK_bounded(probe, samples=10)


@pytest.mark.slow
def test_monte_carlo_grid_30_points_within_3_percent():
    """30 random points at 2·10⁵ samples each: agreement within 3% (not the full 10³-point grid at 10⁶ samples)"""
    rng = np.random.default_rng(11)
    for point in range(30):
        N = int(rng.integers(2, 51))
        sigma = float(rng.uniform(0.5, 2.0))
        sigma_a_sq = float(rng.uniform(0.01, 1.0))
        wtilde = float(rng.uniform(0.1, 2.0))
        probe = ProbePoint(wtilde, float(rng.uniform(-1.0, 1.0)), sigma, sigma_a_sq, N)
        P_H, P_K = eval_PH_PK_bounded(probe)
        mc_H, mc_K = mc_PH_PK_bounded(probe, samples=200_000, seed=point)
        assert mc_H == pytest.approx(P_H, rel=0.03)
        assert mc_K == pytest.approx(P_K, rel=0.03)

        sigma_v_sq = float(rng.uniform(0.0, 1.0))
        P_H, P_K = eval_PH_PK_gaussian_noise(N, sigma, sigma_a_sq, sigma_v_sq, wtilde)
        mc_H, mc_K = mc_PH_PK_gaussian_noise(N, sigma, sigma_a_sq, sigma_v_sq, wtilde, samples=200_000, seed=100 + point)
        assert mc_H == pytest.approx(P_H, rel=0.03)
        assert mc_K == pytest.approx(P_K, rel=0.03)


# ==================== Divergence probe ====================

def test_step_size_far_above_bound_diverges():
    results = [divergence_probe(multiple=10.0, seed=seed) for seed in range(20)]
    assert all(r.diverged for r in results)
    assert all(r.iteration is not None for r in results)
    assert all(r.mu == pytest.approx(10.0 * r.bound) for r in results)


def test_step_size_below_bound_is_stable():
    results = [divergence_probe(multiple=0.5, seed=seed) for seed in range(20)]
    assert not any(r.diverged for r in results)
    assert all(r.final_deviation <= r.initial_deviation for r in results)
