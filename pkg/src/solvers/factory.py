"""
Solver Factory
==============

Factory לבחירת ה-Solver לפי האלגוריתם שבתצורה.
"""

from typing import Dict, Optional, Tuple, Type

import numpy as np

from ..models.problem import ReconstructionProblem
from ..models.solver import RunTrace, SolverConfig, SolverVariant
from ..rng import SeedLike
from .base import BaseSolver
from .l0_lms import L0LMSSolver
from .l0_mcc import L0MCCSolver
from .mb_l0_mcc import MBL0MCCSolver


class SolverFactory:
    """
    Factory ליצירת Solvers

    שימוש:
    ```python
    w, trace = SolverFactory.run(problem, SolverConfig(variant="mb_l0_mcc"), rng_seed=1)
    print(trace.updates_used, trace.final_deviation)
    ```
    """

    # מיפוי אלגוריתמים ל-Solvers
    SOLVERS: Dict[SolverVariant, Type[BaseSolver]] = {
        SolverVariant.L0MCC: L0MCCSolver,
        SolverVariant.MBL0MCC: MBL0MCCSolver,
        SolverVariant.L0LMS: L0LMSSolver,
    }

    @classmethod
    def create(cls, config: Optional[SolverConfig] = None) -> BaseSolver:
        """צור Solver לפי config.variant"""
        config = config or SolverConfig()
        solver_class = cls.SOLVERS.get(config.variant)
        if solver_class is None:
            raise ValueError(f"Unsupported solver: {config.variant}")
        return solver_class(config)

    @classmethod
    def run(
        cls,
        problem: ReconstructionProblem,
        config: Optional[SolverConfig] = None,
        rng_seed: SeedLike = 0,
    ) -> Tuple[np.ndarray, RunTrace]:
        """צור והרץ"""
        return cls.create(config).run(problem, rng_seed)

    @classmethod
    def get_supported_variants(cls) -> Dict[str, str]:
        """קבל רשימת האלגוריתמים הנתמכים"""
        return {variant.value: solver.__name__ for variant, solver in cls.SOLVERS.items()}


def run(
    problem: ReconstructionProblem,
    cfg: Optional[SolverConfig] = None,
    rng_seed: SeedLike = 0,
) -> Tuple[np.ndarray, RunTrace]:
    """הרץ את האלגוריתם שבתצורה על הבעיה"""
    return SolverFactory.run(problem, cfg, rng_seed)
