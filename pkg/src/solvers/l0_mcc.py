"""
l0-MCC Solver
=============
עדכון correntropy עם משיכה לאפס ושימוש חוזר רקורסיבי בשורות המדידה.
"""

import numpy as np

from ..kernel import kernel_weight
from ..models.problem import ReconstructionProblem
from ..models.solver import SolverConfig, SolverState, SolverVariant
from ..problem import recursive_index
from .base import BaseSolver, apply_update


def l0_mcc_step(
    state: SolverState,
    phi_row: np.ndarray,
    y_i: float,
    cfg: SolverConfig,
) -> SolverState:
    """
    עדכון l0-MCC בודד

        e = y_i - wᵀφ
        w ← w + μ·exp(-e²/2σ²)·e·φ + μ·λ·z_β(w)

    Args:
        state: המצב הנוכחי (sigma_now > 0)
        phi_row: φ(k)
        y_i: המדידה המתאימה
        cfg: פרמטרי ה-solver

    Returns:
        מצב חדש
    """
    # same arithmetic path as a one-row mini-batch
    X = np.asarray(phi_row, dtype=np.float64)[np.newaxis, :]
    errors = np.atleast_1d(y_i) - X @ state.w
    gains = kernel_weight(errors, state.sigma_now)
    return apply_update(state, X, errors, gains, cfg, SolverVariant.L0MCC)


class L0MCCSolver(BaseSolver):
    """l0-MCC: שורה אחת לכל עדכון, k = (i mod M) + 1"""

    VARIANT = SolverVariant.L0MCC

    def step(self, state: SolverState, problem: ReconstructionProblem) -> SolverState:
        k = recursive_index(state.i, problem.M) - 1
        return l0_mcc_step(state, problem.phi.row(k), problem.y[k], self.config)
