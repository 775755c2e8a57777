"""
Reconstruction Problem Models
=============================
מודלי הנתונים של בעיית השחזור: אות דליל, מטריצת חישה ומכל הבעיה.

y = Φx + v. כל הטיפוסים בלתי ניתנים לשינוי אחרי הבנייה, ולכן
בטוחים לשיתוף בין workers מקבילים.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import DimensionError


class NonzeroDistribution(str, Enum):
    """התפלגות הערכים שאינם אפס"""
    UNIFORM_SYM = "uniform_sym"            # U[-1, 1]
    UNIFORM_ANNULUS = "uniform_annulus"    # |x| ~ U[0.5, 1] עם סימן אקראי


class SensingKind(str, Enum):
    """סוג מטריצת החישה"""
    GAUSSIAN_IID = "gaussian_iid"
    RADEMACHER = "rademacher"
    ORTHOGONAL = "orthogonal"  # שורות אורתוגונליות, ||φ(i)||² = N·σ_a²


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class SparseSignal:
    """
    אות דליל באורך N עם K ערכים שונים מאפס

    Attributes:
        values: הווקטור המלא
        support: אינדקסים (ממוינים, zero-based) של הערכים שאינם אפס
    """
    values: np.ndarray
    support: np.ndarray

    def __post_init__(self) -> None:
        values = _freeze(self.values)
        support = np.asarray(self.support, dtype=np.int64)
        support.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)
        if support.size > values.size:
            raise DimensionError(f"K={support.size} exceeds N={values.size}")

    @property
    def N(self) -> int:
        return int(self.values.size)

    @property
    def K(self) -> int:
        return int(self.support.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


@dataclass(frozen=True)
class SensingMatrix:
    """
    מטריצת חישה M×N, row-major: שורה i היא φ(i)ᵀ

    Attributes:
        entries: המטריצה עצמה
        kind: סוג ההתפלגות
        entry_variance: σ_a²
    """
    entries: np.ndarray
    kind: SensingKind
    entry_variance: float

    def __post_init__(self) -> None:
        entries = _freeze(self.entries)
        if entries.ndim != 2:
            raise DimensionError(f"sensing matrix must be 2-D, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @property
    def M(self) -> int:
        return int(self.entries.shape[0])

    @property
    def N(self) -> int:
        return int(self.entries.shape[1])

    def row(self, index: int) -> np.ndarray:
        """φ(index) - אינדקס zero-based"""
        return self.entries[index]


@dataclass(frozen=True)
class ReconstructionProblem:
    """
    הקלט לכל solver

    truth קיים בסימולציה בלבד (לחישוב MSD); בשימוש אמיתי הוא None.
    """
    phi: SensingMatrix
    y: np.ndarray
    truth: Optional[SparseSignal] = None
    clean: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        y = _freeze(np.ravel(self.y))
        object.__setattr__(self, "y", y)
        if y.size != self.phi.M:
            raise DimensionError(
                f"measurement length {y.size} does not match {self.phi.M} sensing rows"
            )
        if self.truth is not None and self.truth.N != self.phi.N:
            raise DimensionError(
                f"signal length {self.truth.N} does not match {self.phi.N} sensing columns"
            )
        if self.clean is not None:
            object.__setattr__(self, "clean", _freeze(np.ravel(self.clean)))

    @property
    def M(self) -> int:
        return self.phi.M

    @property
    def N(self) -> int:
        return self.phi.N

    def squared_deviation(self, w: np.ndarray) -> Optional[float]:
        """||w - x||² או None אם אין אמת"""
        if self.truth is None:
            return None
        diff = w - self.truth.values
        return float(diff @ diff)
