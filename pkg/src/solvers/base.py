"""
Base Solver - מחלקת בסיס לכל אלגוריתמי השחזור
==============================================

כל אלגוריתם יורש ממחלקה זו ומממש עדכון משקלים בודד (step).
לולאת הריצה, ה-annealing, בדיקת ההתכנסות וזיהוי ההתבדרות משותפים.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from ..config import settings
from ..errors import DivergenceError
from ..kernel import anneal_sigma
from ..models.problem import ReconstructionProblem
from ..models.solver import RunTrace, SolverConfig, SolverState, SolverVariant, Termination
from ..rng import SeedLike, make_rng
from .attraction import zero_attraction

logger = logging.getLogger(__name__)


def apply_update(
    state: SolverState,
    rows: np.ndarray,
    errors: np.ndarray,
    gains: np.ndarray,
    cfg: SolverConfig,
    variant: SolverVariant,
) -> SolverState:
    """
    w ← w + μ·Xᵀ·G·e + μ·λ·z_β(w)

    z_β מופעל על w שלפני העדכון. מחזיר מצב חדש עם i+1 ו-||Δw||².

    Args:
        rows: X (S×N), שורות φ(k)ᵀ
        errors: e (אורך S)
        gains: האלכסון של G (אורך S); אחדות עבור l0-LMS
    """
    w = state.w
    gradient = rows.T @ (gains * errors)
    new_w = w + cfg.mu * gradient + cfg.mu * cfg.lam * zero_attraction(w, cfg.beta)

    if not np.all(np.isfinite(new_w)):
        raise DivergenceError("non-finite weight entries", state.i + 1, variant.value)

    delta = new_w - w
    return replace(state, w=new_w, i=state.i + 1, last_delta_sq=float(delta @ delta))


class BaseSolver(ABC):
    """
    מחלקת בסיס אבסטרקטית לכל ה-Solvers

    שימוש:
    ```python
    solver = L0MCCSolver(SolverConfig())
    w, trace = solver.run(problem, rng_seed=3)
    ```
    """

    # כל Solver מגדיר את האלגוריתם שלו
    VARIANT: SolverVariant = SolverVariant.L0MCC

    # האם העדכון צורך זרם אקראי (בחירת mini-batch)
    USES_RNG: bool = False

    def __init__(self, config: Optional[SolverConfig] = None):
        """
        Args:
            config: הפרמטרים; variant מיושר ל-VARIANT של המחלקה
        """
        if config is None:
            config = SolverConfig(variant=self.VARIANT)
        elif config.variant != self.VARIANT:
            raise ValueError(
                f"{type(self).__name__} runs {self.VARIANT.value}, got config for {config.variant.value}"
            )
        self.config = config

    @abstractmethod
    def step(self, state: SolverState, problem: ReconstructionProblem) -> SolverState:
        """
        עדכון משקלים בודד

        Returns:
            מצב חדש (הקלט לא משתנה)
        """
        pass

    def _divergence_limit(self, problem: ReconstructionProblem) -> float:
        """||w||² מעל הסף הזה נחשב התבדרות"""
        scale = float(problem.y @ problem.y) / problem.phi.entry_variance
        return settings.divergence_factor * max(1.0, scale)

    def run(
        self,
        problem: ReconstructionProblem,
        rng_seed: SeedLike = 0,
    ) -> Tuple[np.ndarray, RunTrace]:
        """
        הרץ עד ||w(i+1) - w(i)||² < ε במשך W עדכונים רצופים, או עד i = C

        Args:
            problem: הבעיה לשחזור
            rng_seed: seed לבחירת ה-mini-batch (מתעלמים ממנו אם אין צורך)

        Returns:
            (w הסופי, RunTrace)

        Raises:
            ParameterError: פרמטרים שלא מתאימים לבעיה (למשל S > M)
            DivergenceError: ערך לא סופי או נורמה מעל הסף
        """
        cfg = self.config
        M = problem.M
        cfg.validate_for(M)

        schedule = cfg.schedule.resolve(problem.y, cfg.C)
        window = cfg.window(M)
        stride = cfg.stride(settings.trace_points)
        limit = self._divergence_limit(problem)
        rng = make_rng(rng_seed) if self.USES_RNG else None

        state = SolverState.zeros(problem.N, anneal_sigma(0, schedule), rng)
        trace = RunTrace(variant=self.VARIANT, epsilon=cfg.epsilon, convergence_window=window)
        trace.record(0, problem.squared_deviation(state.w), state.sigma_now)

        logger.debug(
            "%s start: M=%d N=%d C=%d sigma_max=%.4g W=%d",
            cfg.label, M, problem.N, cfg.C, schedule.sigma_max, window,
        )

        streak = 0
        while state.i < cfg.C:
            state = replace(state, sigma_now=anneal_sigma(state.i, schedule))
            state = self.step(state, problem)

            norm_sq = float(state.w @ state.w)
            if norm_sq > limit:
                logger.warning("%s diverged at update %d", cfg.label, state.i)
                raise DivergenceError(
                    f"||w||^2 = {norm_sq:.3e} exceeds {limit:.3e}", state.i, self.VARIANT.value
                )

            if state.i % stride == 0:
                trace.record(state.i, problem.squared_deviation(state.w), state.sigma_now)

            if state.last_delta_sq < cfg.epsilon:
                streak += 1
                if streak >= window:
                    trace.termination = Termination.CONVERGED
                    break
            else:
                streak = 0

        trace.updates_used = state.i
        trace.record(state.i, problem.squared_deviation(state.w), state.sigma_now)

        logger.debug(
            "%s stopped after %d updates (%s)", cfg.label, state.i, trace.termination.value
        )
        return state.w, trace


def updates_to_reach(trace: RunTrace, level: float) -> Optional[int]:
    """
    העדכון הראשון שנרשם ב-trace עם ||w - x||² < level

    Returns:
        מספר העדכון, או None אם הרמה לא הושגה
    """
    for iteration, deviation, _ in trace.samples:
        if deviation < level:
            return iteration
    return None

