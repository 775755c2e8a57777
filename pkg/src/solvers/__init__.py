# Solvers Package
from .attraction import zero_attraction
from .base import BaseSolver, apply_update, updates_to_reach
from .l0_mcc import L0MCCSolver, l0_mcc_step
from .l0_lms import L0LMSSolver, l0_lms_step
from .mb_l0_mcc import MBL0MCCSolver, draw_batch, mb_l0_mcc_step
from .factory import SolverFactory, run

__all__ = [
    "zero_attraction",
    "BaseSolver",
    "apply_update",
    "updates_to_reach",
    "L0MCCSolver",
    "l0_mcc_step",
    "L0LMSSolver",
    "l0_lms_step",
    "MBL0MCCSolver",
    "draw_batch",
    "mb_l0_mcc_step",
    "SolverFactory",
    "run",
]
