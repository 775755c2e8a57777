"""
l0-LMS Solver
=============
הגבול σ → ∞ של l0-MCC: אותו עדכון ללא פקטור הגרעין.
"""

import numpy as np

from ..models.problem import ReconstructionProblem
from ..models.solver import SolverConfig, SolverState, SolverVariant
from ..problem import recursive_index
from .base import BaseSolver, apply_update

_UNIT_GAIN = np.ones(1)


def l0_lms_step(
    state: SolverState,
    phi_row: np.ndarray,
    y_i: float,
    cfg: SolverConfig,
) -> SolverState:
    """w ← w + μ·e·φ + μ·λ·z_β(w)"""
    X = np.asarray(phi_row, dtype=np.float64)[np.newaxis, :]
    errors = np.atleast_1d(y_i) - X @ state.w
    return apply_update(state, X, errors, _UNIT_GAIN, cfg, SolverVariant.L0LMS)


class L0LMSSolver(BaseSolver):
    """l0-LMS עם שימוש חוזר רקורסיבי בשורות"""

    VARIANT = SolverVariant.L0LMS

    def step(self, state: SolverState, problem: ReconstructionProblem) -> SolverState:
        k = recursive_index(state.i, problem.M) - 1
        return l0_lms_step(state, problem.phi.row(k), problem.y[k], self.config)
