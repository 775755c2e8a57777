"""
Tests for the l0-MCC, MB-l0-MCC and l0-LMS solvers
"""

import math

import numpy as np
import pytest

from src.errors import DivergenceError, ParameterError
from src.models import (
    KernelSchedule,
    ReconstructionProblem,
    SensingKind,
    SensingMatrix,
    SolverConfig,
    SolverState,
    SolverVariant,
    Termination,
)
from src.solvers import (
    L0LMSSolver,
    L0MCCSolver,
    MBL0MCCSolver,
    SolverFactory,
    draw_batch,
    l0_lms_step,
    l0_mcc_step,
    mb_l0_mcc_step,
    run,
    updates_to_reach,
    zero_attraction,
)


def _matrix(rows):
    return SensingMatrix(entries=np.array(rows, dtype=float), kind=SensingKind.GAUSSIAN_IID, entry_variance=1.0)


# ==================== Zero attraction ====================

def test_zero_attraction_values():
    z = zero_attraction(np.array([0.05, 0.0, 0.2, -0.05, -0.1]), 10.0)
    assert np.allclose(z, [-5.0, 0.0, 0.0, 5.0, 0.0])


def test_zero_attraction_is_bounded():
    w = np.linspace(-0.3, 0.3, 601)
    z = zero_attraction(w, 10.0)
    assert np.all(np.abs(z) <= 10.0 + 1e-12)
    assert np.all(z[np.abs(w) > 0.1] == 0.0)


def test_zero_attraction_rejects_bad_beta():
    with pytest.raises(ParameterError):
        zero_attraction(np.zeros(3), 0.0)


# ==================== Single updates ====================

def test_l0_mcc_step_without_attraction(scalar_state, plain_config):
    new = l0_mcc_step(scalar_state, np.array([1.0]), 0.5, plain_config)
    assert new.w[0] == pytest.approx(0.2 * math.exp(-0.125) * 0.5, rel=1e-12)
    assert new.w[0] == pytest.approx(0.088250, abs=1e-6)
    assert new.i == 1
    # the input state is untouched
    assert scalar_state.w[0] == 0.0


def test_l0_mcc_step_with_attraction():
    state = SolverState(w=np.array([0.05]), sigma_now=1.0)
    cfg = SolverConfig(mu=0.2, lam=0.01, beta=10.0)
    new = l0_mcc_step(state, np.array([1.0]), 0.5, cfg)
    e = 0.45
    expected = 0.05 + 0.2 * math.exp(-e * e / 2) * e + 0.2 * 0.01 * (-5.0)
    assert new.w[0] == pytest.approx(expected, rel=1e-12)
    assert new.w[0] == pytest.approx(0.121334, abs=1e-6)


def test_l0_lms_step(scalar_state):
    cfg = SolverConfig(variant=SolverVariant.L0LMS, mu=0.2, lam=0.0)
    new = l0_lms_step(scalar_state, np.array([1.0]), 0.5, cfg)
    assert new.w[0] == pytest.approx(0.1)


def test_huge_kernel_width_matches_lms(rng):
    cfg = SolverConfig(mu=0.05, lam=1e-3)
    for _ in range(1000):
        state = SolverState(w=rng.normal(0.0, 0.1, 20), sigma_now=1e9)
        phi_row = rng.normal(size=20)
        y_i = float(rng.normal())
        mcc = l0_mcc_step(state, phi_row, y_i, cfg)
        lms = l0_lms_step(state, phi_row, y_i, cfg)
        np.testing.assert_allclose(mcc.w, lms.w, rtol=1e-9, atol=1e-15)


def test_large_errors_are_gated():
    state = SolverState(w=np.array([0.0]), sigma_now=1.0)
    cfg = SolverConfig(mu=0.2, lam=0.0)
    new = l0_mcc_step(state, np.array([1.0]), 1e6, cfg)
    assert new.w[0] == 0.0


def test_mini_batch_step_worked_example(scalar_state):
    problem = ReconstructionProblem(phi=_matrix([[1.0], [2.0]]), y=np.array([0.5, 1.0]))
    cfg = SolverConfig(variant=SolverVariant.MBL0MCC, mu=0.1, lam=0.0, S=2)
    new = mb_l0_mcc_step(scalar_state, problem, cfg, rows=np.array([0, 1]))
    expected = 0.1 * (0.5 * math.exp(-0.125) + 2.0 * math.exp(-0.5))
    assert new.w[0] == pytest.approx(expected, rel=1e-12)
    assert new.w[0] == pytest.approx(0.165431, abs=1e-6)


def test_mini_batch_of_one_is_l0_mcc(rng):
    phi = _matrix(rng.normal(size=(15, 12)))
    problem = ReconstructionProblem(phi=phi, y=rng.normal(size=15))
    mb_cfg = SolverConfig(variant=SolverVariant.MBL0MCC, mu=0.1, lam=2e-3, S=1)
    cfg = SolverConfig(mu=0.1, lam=2e-3)
    for _ in range(1000):
        state = SolverState(w=rng.normal(0.0, 0.1, 12), sigma_now=float(rng.uniform(0.1, 2.0)))
        k = int(rng.integers(0, 15))
        batch = mb_l0_mcc_step(state, problem, mb_cfg, rows=np.array([k]))
        single = l0_mcc_step(state, phi.row(k), problem.y[k], cfg)
        np.testing.assert_array_equal(batch.w, single.w)


def test_full_batch_with_wide_kernel_is_gradient_step(rng):
    M, N = 20, 30
    phi = _matrix(rng.normal(0.0, 0.2, size=(M, N)))
    problem = ReconstructionProblem(phi=phi, y=rng.normal(size=M))
    cfg = SolverConfig(variant=SolverVariant.MBL0MCC, mu=0.05, lam=1e-3, beta=10.0, S=M)
    w = rng.normal(0.0, 0.05, N)
    state = SolverState(w=w, sigma_now=1e12)
    new = mb_l0_mcc_step(state, problem, cfg, rows=np.arange(M))
    dense = w + 0.05 * phi.entries.T @ (problem.y - phi.entries @ w) + 0.05 * 1e-3 * zero_attraction(w, 10.0)
    np.testing.assert_allclose(new.w, dense, atol=1e-10)


def test_draw_batch(rng):
    rows = draw_batch(rng, 10, 10, replace=False)
    assert sorted(rows) == list(range(10))
    rows = draw_batch(rng, 10, 4)
    assert rows.shape == (4,)
    assert np.all((rows >= 0) & (rows < 10))
    with pytest.raises(ParameterError):
        draw_batch(rng, 3, 4)


def test_mini_batch_needs_random_stream(small_problem):
    cfg = SolverConfig(variant=SolverVariant.MBL0MCC)
    with pytest.raises(ParameterError):
        mb_l0_mcc_step(SolverState.zeros(100, 1.0), small_problem, cfg)


# ==================== Full runs ====================

def test_zero_measurements_converge_immediately():
    problem = ReconstructionProblem(phi=_matrix([[1.0, 0.0], [0.0, 1.0]]), y=np.zeros(2))
    cfg = SolverConfig(convergence_window=1, schedule=KernelSchedule(sigma_max=1.0))
    w, trace = SolverFactory.run(problem, cfg)
    assert np.array_equal(w, np.zeros(2))
    assert trace.termination == Termination.CONVERGED
    assert trace.updates_used == 1


def test_zero_tolerance_runs_to_max_updates():
    problem = ReconstructionProblem(phi=_matrix([[1.0, 0.0], [0.0, 1.0]]), y=np.zeros(2))
    cfg = SolverConfig(C=40, epsilon=0.0, convergence_window=1, schedule=KernelSchedule(sigma_max=1.0))
    _, trace = SolverFactory.run(problem, cfg)
    assert trace.termination == Termination.MAX_ITERATIONS
    assert trace.updates_used == 40


def test_run_trace_shape(small_problem):
    cfg = SolverConfig(C=600, trace_stride=50)
    w, trace = run(small_problem, cfg)
    iterations = trace.iterations
    assert iterations[0] == 0
    assert np.all(np.diff(iterations) > 0)
    assert iterations[-1] == trace.updates_used
    assert trace.updates_used <= 600
    assert trace.convergence_window == 60
    assert trace.deviations[0] == pytest.approx(1.0)
    assert trace.final_deviation == pytest.approx(small_problem.squared_deviation(w))


def test_run_reduces_deviation(small_problem):
    for variant in SolverVariant:
        cfg = SolverConfig(variant=variant, C=3000)
        _, trace = SolverFactory.run(small_problem, cfg, rng_seed=5)
        assert trace.final_deviation < trace.deviations[0], variant


def test_mini_batch_runs_are_reproducible(small_problem):
    cfg = SolverConfig(variant=SolverVariant.MBL0MCC, C=2000)
    first, _ = SolverFactory.run(small_problem, cfg, rng_seed=9)
    second, _ = SolverFactory.run(small_problem, cfg, rng_seed=9)
    other, _ = SolverFactory.run(small_problem, cfg, rng_seed=10)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)


def test_batch_larger_than_measurements(small_problem):
    cfg = SolverConfig(variant=SolverVariant.MBL0MCC, S=61)
    with pytest.raises(ParameterError):
        SolverFactory.run(small_problem, cfg)


def test_oversized_step_diverges(small_problem):
    cfg = SolverConfig(variant=SolverVariant.L0LMS, mu=50.0, lam=0.0)
    with pytest.raises(DivergenceError) as info:
        SolverFactory.run(small_problem, cfg)
    assert info.value.iteration > 0
    assert info.value.variant == "l0_lms"


def test_updates_to_reach(small_problem):
    _, trace = SolverFactory.run(small_problem, SolverConfig(C=1000, trace_stride=10))
    assert updates_to_reach(trace, 2.0) == 0
    assert updates_to_reach(trace, -1.0) is None


def test_trace_csv(tmp_path, small_problem):
    _, trace = SolverFactory.run(small_problem, SolverConfig(C=200, trace_stride=20))
    path = trace.to_csv(tmp_path / "trace.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,squared_deviation,sigma"
    assert len(lines) == len(trace.samples) + 1


def test_factory():
    assert isinstance(SolverFactory.create(), L0MCCSolver)
    assert isinstance(SolverFactory.create(SolverConfig(variant="mb_l0_mcc")), MBL0MCCSolver)
    assert isinstance(SolverFactory.create(SolverConfig(variant="l0_lms")), L0LMSSolver)
    assert set(SolverFactory.get_supported_variants()) == {"l0_mcc", "mb_l0_mcc", "l0_lms"}
    with pytest.raises(ValueError):
        L0LMSSolver(SolverConfig(variant="l0_mcc"))


def test_config_defaults_per_variant():
    assert SolverConfig().lam == 5e-6
    assert SolverConfig().C == 10_000
    mb = SolverConfig(variant="mb_l0_mcc")
    assert mb.lam == 1e-4
    assert mb.C == 100_000
    assert mb.batch_size(300) == 30
    assert mb.window(300) == 1
    assert SolverConfig().window(300) == 300
    assert SolverConfig.model_validate({"lambda": 0.5}).lam == 0.5
