"""
Monte Carlo Harness
===================
הרצת ניסויים: MSD, עקומות למידה והסתברות שחזור לאורך צירי סריקה.

כל ניסוי (נקודת ציר a, ניסוי t) מקבל seed משלו מתוך ה-master seed,
כך שניתן לשחזר אותו בבידוד. כל האלגוריתמים בניסוי רואים את אותה בעיה.

שימוש:
```python
report = run_sweep(spec, threads=4)
write_sweep(report, "results", stem="k_sweep")
```
"""

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
import pandas as pd

from .errors import DimensionError, DivergenceError, ParameterError
from .models.experiment import (
    ExperimentSpec,
    ProblemSettings,
    SweepParameter,
    SweepReport,
    SweepResult,
    TrialReport,
)
from .models.noise import AlphaStableNoise, GMMNoise, NoiseModel
from .models.solver import RunTrace, SolverConfig
from .problem import build_problem
from .rng import child_sequence
from .solvers import SolverFactory

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# פרמטרי ציר שחלים על מודל הרעש
_GMM_AXES = {
    SweepParameter.SIGMA_A_SQ: "sigma_A_sq",
    SweepParameter.SIGMA_B_SQ: "sigma_B_sq",
    SweepParameter.C: "c",
}
_ALPHA_AXES = {
    SweepParameter.ALPHA: "alpha",
    SweepParameter.GAMMA: "gamma",
}
_SOLVER_AXES = {
    SweepParameter.MU: "mu",
    SweepParameter.LAMBDA: "lam",
}


def msd(estimates: Sequence[np.ndarray], x: np.ndarray) -> float:
    """
    (1/T)·Σ ||w⁽ᵗ⁾ - x||²

    Raises:
        ParameterError: רשימה ריקה
        DimensionError: אורכים שונים
    """
    if len(estimates) == 0:
        raise ParameterError("msd needs at least one estimate")
    x = np.asarray(x, dtype=np.float64)
    total = 0.0
    for w in estimates:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != x.shape:
            raise DimensionError(f"estimate length {w.size} does not match truth length {x.size}")
        diff = w - x
        total += float(diff @ diff)
    return total / len(estimates)


# ==================== Sweep points ====================

@dataclass(frozen=True)
class SweepPoint:
    """נקודה אחת על ציר הסריקה, עם הבעיה/רעש/solvers שנגזרו ממנה"""
    index: int
    axis_value: Optional[float]
    problem: ProblemSettings
    noise: Optional[NoiseModel]
    solvers: Tuple[SolverConfig, ...]


def expand_points(spec: ExperimentSpec) -> List[SweepPoint]:
    """
    פרוס את ההגדרה לנקודות ציר

    Raises:
        ParameterError: ציר רעש שלא מתאים למודל הרעש שבהגדרה
    """
    solvers = tuple(
        cfg.model_copy(update={"trace_stride": spec.trace_stride})
        if spec.trace_stride is not None and cfg.trace_stride is None
        else cfg
        for cfg in spec.solvers
    )
    if spec.sweep is None:
        return [SweepPoint(0, None, spec.problem, spec.noise, solvers)]

    parameter = spec.sweep.parameter
    points = []
    for index, value in enumerate(spec.sweep.values):
        problem, noise, point_solvers = spec.problem, spec.noise, solvers

        if parameter in (SweepParameter.K, SweepParameter.M):
            problem = ProblemSettings.model_validate(
                {**spec.problem.model_dump(), parameter.value: int(value)}
            )
        elif parameter in _GMM_AXES:
            if not isinstance(noise, GMMNoise):
                raise ParameterError(f"sweep over {parameter.value} needs gmm noise")
            noise = noise.model_copy(update={_GMM_AXES[parameter]: float(value)})
        elif parameter in _ALPHA_AXES:
            if not isinstance(noise, AlphaStableNoise):
                raise ParameterError(f"sweep over {parameter.value} needs alpha_stable noise")
            noise = noise.model_copy(update={_ALPHA_AXES[parameter]: float(value)})
        else:
            field = _SOLVER_AXES[parameter]
            point_solvers = tuple(cfg.model_copy(update={field: float(value)}) for cfg in solvers)

        points.append(SweepPoint(index, float(value), problem, noise, point_solvers))
    return points


# ==================== Trials ====================

@dataclass(frozen=True)
class TrialTask:
    """יחידת עבודה: ניסוי אחד בנקודת ציר אחת"""
    point: SweepPoint
    trial: int
    master_seed: int
    threshold: float
    keep_trace: bool = False


def run_trial(task: TrialTask) -> Tuple[List[TrialReport], List[Optional[RunTrace]]]:
    """
    בנה בעיה אחת והרץ עליה כל solver

    התבדרות נרשמת ככישלון (diverged=True) ולא עוצרת את הניסוי.
    """
    point = task.point
    settings_ = point.problem
    problem_seed = child_sequence(task.master_seed, point.index, task.trial, 0)
    problem = build_problem(
        settings_.N,
        settings_.M,
        settings_.K,
        noise=point.noise,
        seed=problem_seed,
        nonzero_dist=settings_.nonzero,
        normalize=settings_.normalize,
        kind=settings_.sensing,
        entry_variance=settings_.variance_for(settings_.M),
    )

    reports: List[TrialReport] = []
    traces: List[Optional[RunTrace]] = []
    for solver_index, cfg in enumerate(point.solvers):
        solver_seed = child_sequence(task.master_seed, point.index, task.trial, solver_index + 1)
        report = TrialReport(
            solver=cfg.label,
            variant=cfg.variant,
            trial=task.trial,
            axis_value=point.axis_value,
            seed_key=f"{task.master_seed}/{point.index}/{task.trial}",
        )
        started = time.perf_counter()
        trace: Optional[RunTrace] = None
        try:
            _, trace = SolverFactory.run(problem, cfg, solver_seed)
        except DivergenceError as error:
            report.diverged = True
            report.error = str(error)
            report.updates_used = error.iteration
        else:
            report.squared_deviation = trace.final_deviation
            report.success = (
                report.squared_deviation is not None
                and report.squared_deviation < task.threshold
            )
            report.updates_used = trace.updates_used
            report.converged = trace.converged
        report.wall_time = time.perf_counter() - started

        reports.append(report)
        traces.append(trace if task.keep_trace else None)
    return reports, traces


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int) -> List[R]:
    """map ששומר על סדר הקלט; threads=1 רץ בתהליך הנוכחי"""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (threads * 4))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


def _aggregate(point: SweepPoint, parameter: Optional[str], reports: List[TrialReport]) -> List[SweepResult]:
    results = []
    for cfg in point.solvers:
        mine = [r for r in reports if r.solver == cfg.label]
        finite = [r.squared_deviation for r in mine if r.squared_deviation is not None]
        successes = [r.squared_deviation for r in mine if r.success]
        results.append(SweepResult(
            parameter=parameter,
            axis_value=point.axis_value,
            solver=cfg.label,
            variant=cfg.variant,
            trials=len(mine),
            successes=len(successes),
            diverged=sum(1 for r in mine if r.diverged),
            msd_success=float(np.mean(successes)) if successes else None,
            msd_all=float(np.mean(finite)) if finite else None,
        ))
    return results


def _check_labels(spec: ExperimentSpec) -> None:
    labels = [cfg.label for cfg in spec.solvers]
    if len(set(labels)) != len(labels):
        raise ParameterError(
            f"solver labels must be unique, got {labels}; set 'name' on repeated variants"
        )


def run_sweep(spec: ExperimentSpec, threads: int = 1) -> SweepReport:
    """
    הרץ T ניסויים בכל נקודת ציר וסכם MSD והסתברות שחזור

    Args:
        spec: הגדרת הניסוי
        threads: מספר התהליכים המקסימלי

    Returns:
        SweepReport עם SweepResult לכל (נקודה, solver) ו-TrialReport לכל ריצה
    """
    _check_labels(spec)
    points = expand_points(spec)
    parameter = spec.sweep.parameter.value if spec.sweep is not None else None

    tasks = [
        TrialTask(point, trial, spec.seed, spec.success_threshold)
        for point in points
        for trial in range(spec.trials)
    ]
    logger.info("sweep: %d points x %d trials (%d tasks)", len(points), spec.trials, len(tasks))
    outcomes = parallel_map(run_trial, tasks, threads)

    report = SweepReport(spec=spec)
    for point in points:
        point_reports = [
            r
            for task, (reports, _) in zip(tasks, outcomes)
            if task.point.index == point.index
            for r in reports
        ]
        report.trials.extend(point_reports)
        report.results.extend(_aggregate(point, parameter, point_reports))
        logger.info(
            "point %s: %s",
            point.axis_value,
            ", ".join(f"{r.solver} p={r.probability:.2f}" for r in report.results[-len(point.solvers):]),
        )
    return report


# ==================== Learning curves ====================

@dataclass
class LearningCurveResult:
    """עקומות הלמידה הממוצעות ודו"חות הניסויים שמהם נבנו"""
    curves: Dict[str, pd.DataFrame]
    trials: List[TrialReport]

    def to_dataframe(self) -> pd.DataFrame:
        """
        טבלה אחת: iteration ועמודת {solver}_msd לכל אלגוריתם

        אלגוריתמים עם גרידים שונים מאוחדים דרך outer join (תאים חסרים ריקים).
        """
        frame: Optional[pd.DataFrame] = None
        for label, curve in self.curves.items():
            renamed = curve.rename(columns={"msd": f"{label}_msd"})
            frame = renamed if frame is None else frame.merge(renamed, on="iteration", how="outer")
        if frame is None:
            return pd.DataFrame(columns=["iteration"])
        return frame.sort_values("iteration").reset_index(drop=True)


def average_traces(traces: Sequence[RunTrace]) -> pd.DataFrame:
    """
    ממוצע נקודתי של עקבות על גריד משותף

    הגריד הוא איחוד האיטרציות שנרשמו. ריצה שעצרה מוקדם נשארת בערך
    האחרון שלה (forward fill) עד סוף הגריד.
    """
    if not traces:
        raise ParameterError("need at least one trace to average")
    series = [
        pd.Series(trace.deviations, index=trace.iterations)
        for trace in traces
    ]
    grid = sorted(set().union(*(s.index for s in series)))
    stacked = pd.concat([s.reindex(grid).ffill() for s in series], axis=1)
    return pd.DataFrame({"iteration": grid, "msd": stacked.mean(axis=1).to_numpy()})


def learning_curve(
    spec: ExperimentSpec,
    trials: Optional[int] = None,
    threads: int = 1,
) -> LearningCurveResult:
    """
    עקומת MSD ממוצעת לכל solver בנקודה קבועה

    Args:
        spec: הגדרה בלי ציר (אם יש ציר, נלקחת הנקודה הראשונה)
        trials: מספר ניסויים (ברירת מחדל spec.trials)

    solver שכל הניסויים שלו התבדרו לא מקבל עקומה; הדו"חות שלו נשארים
    ב-trials כדי ש-divergence_dominated יזהה אותו.
    """
    _check_labels(spec)
    point = expand_points(spec)[0]
    count = spec.trials if trials is None else trials
    tasks = [
        TrialTask(point, trial, spec.seed, spec.success_threshold, keep_trace=True)
        for trial in range(count)
    ]
    outcomes = parallel_map(run_trial, tasks, threads)

    curves: Dict[str, pd.DataFrame] = {}
    reports: List[TrialReport] = []
    for solver_index, cfg in enumerate(point.solvers):
        traces = [
            trial_traces[solver_index]
            for _, trial_traces in outcomes
            if trial_traces[solver_index] is not None
        ]
        if not traces:
            logger.warning("%s: every trial diverged, no learning curve", cfg.label)
            continue
        curves[cfg.label] = average_traces(traces)
    for trial_reports, _ in outcomes:
        reports.extend(trial_reports)
    return LearningCurveResult(curves=curves, trials=reports)


def divergence_dominated(trials: Sequence[TrialReport]) -> bool:
    """האם רוב הריצות של solver כלשהו התבדרו"""
    by_solver: Dict[str, List[TrialReport]] = {}
    for report in trials:
        by_solver.setdefault(report.solver, []).append(report)
    return any(
        sum(r.diverged for r in reports) * 2 > len(reports)
        for reports in by_solver.values()
    )


# ==================== Output files ====================

def result_stem(stem: str, seed: int) -> str:
    """שם קובץ שמטמיע את ה-master seed"""
    return f"{stem}_seed{seed}"


def _write_timings(trials: Sequence[TrialReport], path: Path) -> Path:
    rows = [
        {
            "solver": r.solver,
            "trial": r.trial,
            "axis_value": r.axis_value,
            "wall_time": r.wall_time,
        }
        for r in trials
    ]
    path.write_text(json.dumps(rows, indent=2), encoding="utf-8")
    return path


def write_sweep(
    report: SweepReport,
    out_dir: Union[str, Path],
    stem: str = "sweep",
) -> Dict[str, Path]:
    """
    כתוב CSV (שורה לכל נקודת ציר), JSON מלא ו-sidecar של זמני ריצה

    קבצי התוצאה לא כוללים זמנים, כך שריצה חוזרת עם אותו seed נותנת
    אותם בתים.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = result_stem(stem, report.spec.seed)

    paths = {
        "csv": out_dir / f"{base}.csv",
        "json": out_dir / f"{base}.json",
        "timings": out_dir / f"{base}_timings.json",
    }
    report.to_dataframe().to_csv(paths["csv"], index=False, float_format="%.12g")
    paths["json"].write_text(report.model_dump_json(indent=2), encoding="utf-8")
    _write_timings(report.trials, paths["timings"])
    return paths


def write_learning_curve(
    result: LearningCurveResult,
    spec: ExperimentSpec,
    out_dir: Union[str, Path],
    stem: str = "simulate",
) -> Dict[str, Path]:
    """כתוב CSV של עקומת הלמידה, JSON של הניסויים ו-sidecar של זמנים"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = result_stem(stem, spec.seed)

    paths = {
        "csv": out_dir / f"{base}_learning_curve.csv",
        "json": out_dir / f"{base}_trials.json",
        "timings": out_dir / f"{base}_timings.json",
    }
    result.to_dataframe().to_csv(paths["csv"], index=False, float_format="%.12g")
    payload = SweepReport(spec=spec, trials=result.trials)
    paths["json"].write_text(payload.model_dump_json(indent=2), encoding="utf-8")
    _write_timings(result.trials, paths["timings"])
    return paths
