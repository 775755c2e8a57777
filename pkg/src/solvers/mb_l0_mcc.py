"""
MB-l0-MCC Solver
================
l0-MCC עם mini-batch: S שורות אקראיות לכל עדכון, משוקללות דרך G.
"""

from typing import Optional

import numpy as np

from ..errors import ParameterError
from ..kernel import kernel_weight
from ..models.problem import ReconstructionProblem
from ..models.solver import SolverConfig, SolverState, SolverVariant
from .base import BaseSolver, apply_update


def draw_batch(
    rng: np.random.Generator,
    M: int,
    S: int,
    replace: bool = True,
) -> np.ndarray:
    """
    אינדקסי שורות (zero-based) למיני-באץ' אחד

    replace=True: i.i.d אחיד על [0, M). replace=False: S שורות שונות.
    """
    if not 1 <= S <= M:
        raise ParameterError(f"S: mini-batch size {S} must be in [1, M={M}]")
    if replace:
        return rng.integers(0, M, size=S)
    return rng.choice(M, size=S, replace=False)


def mb_l0_mcc_step(
    state: SolverState,
    problem: ReconstructionProblem,
    cfg: SolverConfig,
    rows: Optional[np.ndarray] = None,
) -> SolverState:
    """
    עדכון MB-l0-MCC בודד

        X = [φ(r(1)) ... φ(r(S))]ᵀ,  d = y[r],  e = d - X·w
        G_kk = exp(-e_k²/2σ²)
        w ← w + μ·Xᵀ·G·e + μ·λ·z_β(w)

    Args:
        state: המצב הנוכחי (נדרש state.rng אם rows לא נתון)
        problem: הבעיה
        cfg: פרמטרי ה-solver
        rows: אינדקסים קבועים (zero-based) במקום דגימה

    Raises:
        ParameterError: S > M
        DivergenceError: עדכון לא סופי
    """
    M = problem.M
    if rows is None:
        if state.rng is None:
            raise ParameterError("mini-batch sampling needs a random stream in the state")
        rows = draw_batch(state.rng, M, cfg.batch_size(M), cfg.replace)
    else:
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size > M:
            raise ParameterError(f"S: mini-batch size {rows.size} exceeds M={M}")

    X = problem.phi.entries[rows]
    errors = problem.y[rows] - X @ state.w
    gains = kernel_weight(errors, state.sigma_now)
    return apply_update(state, X, errors, np.atleast_1d(gains), cfg, SolverVariant.MBL0MCC)


class MBL0MCCSolver(BaseSolver):
    """MB-l0-MCC: כל עדכון הוא mini-batch אחד; i סופר עדכונים"""

    VARIANT = SolverVariant.MBL0MCC
    USES_RNG = True

    def step(self, state: SolverState, problem: ReconstructionProblem) -> SolverState:
        return mb_l0_mcc_step(state, problem, self.config)
