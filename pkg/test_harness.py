"""
Tests for the Monte Carlo harness: MSD, sweeps, learning curves and result files
"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import DimensionError, ParameterError
from src.harness import (
    TrialTask,
    average_traces,
    divergence_dominated,
    expand_points,
    learning_curve,
    msd,
    run_sweep,
    run_trial,
    write_learning_curve,
    write_sweep,
)
from src.models import (
    ExperimentSpec,
    GMMNoise,
    ProblemSettings,
    RunTrace,
    SolverConfig,
    SolverVariant,
    SweepAxis,
    TrialReport,
)


def _spec(**overrides):
    values = dict(
        problem=ProblemSettings(N=60, M=40, K=3),
        noise=GMMNoise(c=0.04, sigma_A_sq=0.01, sigma_B_sq=0.1),
        solvers=[
            SolverConfig(variant=SolverVariant.L0MCC, C=400),
            SolverConfig(variant=SolverVariant.MBL0MCC, C=400),
        ],
        trials=3,
        seed=5,
    )
    values.update(overrides)
    return ExperimentSpec(**values)


def _trace(points):
    trace = RunTrace(variant=SolverVariant.L0MCC)
    for iteration, deviation in points:
        trace.record(iteration, deviation, 1.0)
    return trace


# ==================== MSD ====================

def test_msd_examples():
    x = np.array([1.0, 0.0])
    assert msd([x], x) == 0.0
    assert msd([np.zeros(2), np.array([1.0, 2.0])], x) == pytest.approx((1.0 + 4.0) / 2)


def test_msd_rejects_bad_input():
    with pytest.raises(ParameterError):
        msd([], np.zeros(2))
    with pytest.raises(DimensionError):
        msd([np.zeros(3)], np.zeros(2))


# ==================== Sweep points ====================

def test_expand_points_for_measurement_axis():
    spec = _spec(sweep=SweepAxis(parameter="M", values=[20, 30]))
    points = expand_points(spec)
    assert [p.problem.M for p in points] == [20, 30]
    # the GMM divisor is resolved per point when the problem is built
    assert all(p.noise.M is None for p in points)


def test_expand_points_for_solver_axis():
    spec = _spec(sweep=SweepAxis(parameter="mu", values=[0.1, 0.3]))
    points = expand_points(spec)
    assert [cfg.mu for cfg in points[1].solvers] == [0.3, 0.3]
    assert [cfg.mu for cfg in spec.solvers] == [0.2, 0.2]


def test_expand_points_for_noise_axis():
    spec = _spec(sweep=SweepAxis(parameter="c", values=[0.0, 0.1]))
    assert [p.noise.c for p in expand_points(spec)] == [0.0, 0.1]
    with pytest.raises(ParameterError):
        expand_points(_spec(noise=None, sweep=SweepAxis(parameter="c", values=[0.1])))


def test_spec_rejects_oversized_batches():
    with pytest.raises(ValidationError) as info:
        _spec(solvers=[SolverConfig(variant=SolverVariant.MBL0MCC, S=50)])
    assert "solvers.0.S" in str(info.value)
    with pytest.raises(ValidationError):
        _spec(
            solvers=[SolverConfig(variant=SolverVariant.MBL0MCC, S=25)],
            sweep=SweepAxis(parameter="M", values=[20, 40]),
        )


def test_duplicate_labels_are_rejected():
    spec = _spec(solvers=[SolverConfig(C=10), SolverConfig(C=20)])
    with pytest.raises(ParameterError):
        run_sweep(spec)


# ==================== Trials and sweeps ====================

def test_trial_shares_problem_across_solvers():
    point = expand_points(_spec())[0]
    reports, traces = run_trial(TrialTask(point, trial=1, master_seed=5, threshold=0.05))
    assert [r.solver for r in reports] == ["l0_mcc", "mb_l0_mcc"]
    assert {r.seed_key for r in reports} == {"5/0/1"}
    assert traces == [None, None]


def test_sweep_results():
    spec = _spec(sweep=SweepAxis(parameter="K", values=[2, 4]))
    report = run_sweep(spec)
    assert len(report.results) == 4
    assert len(report.trials) == 2 * 3 * 2
    for result in report.results:
        assert result.trials == 3
        assert 0.0 <= result.probability <= 1.0
    frame = report.to_dataframe()
    assert list(frame["K"]) == [2.0, 4.0]
    assert "l0_mcc_probability" in frame.columns
    assert "mb_l0_mcc_msd_success" in frame.columns


def test_divergence_is_counted_not_raised():
    spec = _spec(solvers=[
        SolverConfig(variant=SolverVariant.L0LMS, name="wild", mu=50.0, lam=0.0),
        SolverConfig(variant=SolverVariant.L0MCC, C=300),
    ])
    report = run_sweep(spec)
    wild = [r for r in report.results if r.solver == "wild"][0]
    assert wild.diverged == 3
    assert wild.probability == 0.0
    assert wild.msd_all is None
    assert all(r.error for r in report.trials if r.solver == "wild")
    assert divergence_dominated(report.trials)


def test_divergence_dominated():
    def report(solver, diverged):
        return TrialReport(solver=solver, variant="l0_mcc", trial=0, seed_key="0/0/0", diverged=diverged)

    assert not divergence_dominated([report("a", True), report("a", False)])
    assert divergence_dominated([report("a", True), report("a", True), report("a", False)])
    assert not divergence_dominated([])


def test_learning_curve_skips_fully_diverged_solver():
    spec = _spec(solvers=[
        SolverConfig(variant=SolverVariant.L0LMS, name="wild", mu=50.0, lam=0.0),
        SolverConfig(variant=SolverVariant.L0MCC, C=300),
    ])
    result = learning_curve(spec)
    assert list(result.curves) == ["l0_mcc"]
    assert sum(r.solver == "wild" for r in result.trials) == 3
    assert divergence_dominated(result.trials)


def test_sweep_files_are_reproducible(tmp_path):
    spec = _spec(sweep=SweepAxis(parameter="K", values=[2, 3]), trials=2)
    first = write_sweep(run_sweep(spec), tmp_path / "a", stem="k")
    second = write_sweep(run_sweep(spec), tmp_path / "b", stem="k")
    assert first["csv"].name == "k_seed5.csv"
    assert first["csv"].read_bytes() == second["csv"].read_bytes()
    assert first["json"].read_bytes() == second["json"].read_bytes()
    assert first["timings"].exists()
    assert b"wall_time" not in first["json"].read_bytes()


@pytest.mark.slow
def test_sweep_is_independent_of_worker_count():
    spec = _spec(sweep=SweepAxis(parameter="K", values=[2, 3]), trials=2)
    serial = run_sweep(spec, threads=1)
    parallel = run_sweep(spec, threads=2)
    assert serial.model_dump_json() == parallel.model_dump_json()


# ==================== Learning curves ====================

def test_average_traces_carries_last_value_forward():
    long = _trace([(0, 1.0), (10, 0.5), (20, 0.2)])
    short = _trace([(0, 1.0), (10, 0.4)])
    curve = average_traces([long, short])
    assert list(curve["iteration"]) == [0, 10, 20]
    assert np.allclose(curve["msd"], [1.0, 0.45, 0.3])
    with pytest.raises(ParameterError):
        average_traces([])


def test_single_trial_curve_is_its_own_trace():
    spec = _spec(solvers=[SolverConfig(C=400, trace_stride=25)], trials=1)
    point = expand_points(spec)[0]
    _, traces = run_trial(TrialTask(point, 0, spec.seed, spec.success_threshold, keep_trace=True))
    result = learning_curve(spec)
    curve = result.curves["l0_mcc"]
    assert np.array_equal(curve["iteration"].to_numpy(), traces[0].iterations)
    assert np.array_equal(curve["msd"].to_numpy(), traces[0].deviations)


def test_learning_curve_files(tmp_path):
    spec = _spec(trace_stride=50)
    result = learning_curve(spec, trials=2)
    frame = result.to_dataframe()
    assert list(frame.columns) == ["iteration", "l0_mcc_msd", "mb_l0_mcc_msd"]
    assert frame["iteration"].iloc[0] == 0
    assert len(result.trials) == 4
    paths = write_learning_curve(result, spec, tmp_path)
    assert paths["csv"].name == "simulate_seed5_learning_curve.csv"
    assert paths["json"].exists() and paths["timings"].exists()


@pytest.mark.slow
def test_large_outliers_do_not_hurt_more_than_small_ones():
    def tail_msd(noise):
        spec = ExperimentSpec(problem=ProblemSettings(N=1000, M=300, K=40), noise=noise, trials=20, seed=21)
        curves = learning_curve(spec, threads=4).curves
        return {label: curve["msd"].iloc[-len(curve) // 10:].mean() for label, curve in curves.items()}

    heavy = tail_msd(GMMNoise(c=0.1, sigma_A_sq=0.01, sigma_B_sq=1.0))
    light = tail_msd(GMMNoise(c=0.04, sigma_A_sq=0.01, sigma_B_sq=0.2))
    for label in ("l0_mcc", "mb_l0_mcc"):
        assert heavy[label] <= 1.25 * light[label], (label, heavy[label], light[label])
