"""
Solver Models
=============
תצורה, מצב ועקבות ריצה של אלגוריתמי השחזור.

SolverConfig מחזיק את כל הפרמטרים הניתנים לכוונון; ברירות המחדל הן
פרמטרי הסימולציות (μ=0.2, β=10, θ=20, ε=1e-4, σ_min=0.03).
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ParameterError


class SolverVariant(str, Enum):
    """אלגוריתמים נתמכים"""
    L0MCC = "l0_mcc"
    MBL0MCC = "mb_l0_mcc"
    L0LMS = "l0_lms"


class Termination(str, Enum):
    """סיבת העצירה של ריצה"""
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"


# λ ו-C לפי אלגוריתם (ניסויי ההתכנסות)
DEFAULT_LAMBDA = {
    SolverVariant.L0MCC: 5e-6,
    SolverVariant.MBL0MCC: 1e-4,
    SolverVariant.L0LMS: 5e-6,
}
DEFAULT_MAX_UPDATES = {
    SolverVariant.L0MCC: 10_000,
    SolverVariant.MBL0MCC: 100_000,
    SolverVariant.L0LMS: 10_000,
}


class KernelSchedule(BaseModel):
    """
    לוח רוחב הגרעין: σ(i) = σ_max·exp(-θ·i/C) + σ_min

    sigma_max=None מוערך מהמדידות בתחילת הריצה.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    sigma_max: Optional[float] = Field(default=None, gt=0)
    sigma_min: float = Field(default=0.03, gt=0)
    theta: float = Field(default=20.0, ge=0)
    C: Optional[int] = Field(default=None, ge=1)

    @property
    def is_resolved(self) -> bool:
        return self.sigma_max is not None and self.C is not None

    def resolve(self, y: np.ndarray, C: Optional[int] = None) -> "KernelSchedule":
        """מלא σ_max (מהמדידות) ו-C אם חסרים"""
        from ..kernel import resolve_schedule

        return resolve_schedule(self, y, C)


class SolverConfig(BaseModel):
    """
    כל הפרמטרים של ריצת solver

    lambda, C, S ו-convergence_window שנשארים None מקבלים ערך לפי האלגוריתם:
    λ ו-C מטבלאות ברירת המחדל, S = 0.1·M, W = M ל-l0-MCC/l0-LMS ו-1 ל-MB.
    """
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    variant: SolverVariant = SolverVariant.L0MCC
    name: Optional[str] = None
    mu: float = Field(default=0.2, gt=0)
    lam: Optional[float] = Field(default=None, ge=0, alias="lambda")
    beta: float = Field(default=10.0, gt=0)
    schedule: KernelSchedule = Field(default_factory=KernelSchedule)
    C: Optional[int] = Field(default=None, ge=1)
    epsilon: float = Field(default=1e-4, ge=0)
    S: Optional[int] = Field(default=None, ge=1)
    replace: bool = True
    convergence_window: Optional[int] = Field(default=None, ge=1)
    trace_stride: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _fill_variant_defaults(self) -> "SolverConfig":
        if self.lam is None:
            self.lam = DEFAULT_LAMBDA[self.variant]
        if self.C is None:
            self.C = DEFAULT_MAX_UPDATES[self.variant]
        return self

    @property
    def label(self) -> str:
        """שם לתצוגה ולעמודות - name אם הוגדר, אחרת שם האלגוריתם"""
        return self.name or self.variant.value

    def batch_size(self, M: int) -> int:
        """S בפועל עבור בעיה עם M מדידות"""
        if self.S is not None:
            return self.S
        return max(1, int(round(0.1 * M)))

    def window(self, M: int) -> int:
        """W - מספר העדכונים הרצופים שבהם ||Δw||² < ε נדרש"""
        if self.convergence_window is not None:
            return self.convergence_window
        return 1 if self.variant == SolverVariant.MBL0MCC else M

    def stride(self, trace_points: int = 2000) -> int:
        if self.trace_stride is not None:
            return self.trace_stride
        return max(1, int(self.C) // trace_points)

    def validate_for(self, M: int) -> None:
        """בדיקות שתלויות בבעיה - נקרא בתחילת run"""
        if self.variant == SolverVariant.MBL0MCC:
            S = self.batch_size(M)
            if S > M:
                raise ParameterError(f"S: mini-batch size {S} exceeds M={M}")


@dataclass
class SolverState:
    """
    המצב המשתנה של אלגוריתם

    w(0) = 0. i עולה ב-1 בכל עדכון. w̃ = x - w לא נשמר.
    """
    w: np.ndarray
    i: int = 0
    sigma_now: float = 1.0
    last_delta_sq: float = math.inf
    rng: Optional[np.random.Generator] = field(default=None, repr=False, compare=False)

    @classmethod
    def zeros(
        cls,
        N: int,
        sigma: float,
        rng: Optional[np.random.Generator] = None,
    ) -> "SolverState":
        return cls(w=np.zeros(N), i=0, sigma_now=sigma, rng=rng)


TraceSample = Tuple[int, float, float]


@dataclass
class RunTrace:
    """
    עקבות הריצה: דגימות (iteration, ||w - x||², σ) ומידע על העצירה

    convergence_window > 1 מסמן שבדיקת ההתכנסות דרשה W עדכונים רצופים
    ולא עדכון בודד.
    """
    variant: SolverVariant
    samples: List[TraceSample] = field(default_factory=list)
    termination: Termination = Termination.MAX_ITERATIONS
    updates_used: int = 0
    epsilon: float = 0.0
    convergence_window: int = 1

    def record(self, iteration: int, squared_deviation: Optional[float], sigma: float) -> None:
        """הוסף דגימה (מתעלם מכפילויות ומ-None)"""
        if squared_deviation is None:
            return
        if self.samples and self.samples[-1][0] >= iteration:
            return
        self.samples.append((int(iteration), float(squared_deviation), float(sigma)))

    @property
    def msd_samples(self) -> List[Tuple[int, float]]:
        return [(it, dev) for it, dev, _ in self.samples]

    @property
    def iterations(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples], dtype=np.int64)

    @property
    def deviations(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples], dtype=np.float64)

    @property
    def final_deviation(self) -> Optional[float]:
        return self.samples[-1][1] if self.samples else None

    @property
    def converged(self) -> bool:
        return self.termination == Termination.CONVERGED

    def to_dataframe(self) -> pd.DataFrame:
        """המר ל-DataFrame עם העמודות iteration, squared_deviation, sigma"""
        return pd.DataFrame(
            self.samples, columns=["iteration", "squared_deviation", "sigma"]
        )

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_dataframe().to_csv(path, index=False, float_format="%.12g")
        return path
