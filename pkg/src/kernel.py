"""
Correntropy Kernel
==================
גרעין גאוסי (ללא נרמול), לוח ה-annealing של רוחב הגרעין והערכת σ_max.
"""

import math
from typing import Optional, Union

import numpy as np

from .config import settings
from .errors import DimensionError, ParameterError
from .models.solver import KernelSchedule


def kernel_weight(
    e: Union[float, np.ndarray],
    sigma: float,
) -> Union[float, np.ndarray]:
    """
    G(e) = exp(-e² / 2σ²)

    Raises:
        ParameterError: σ ≤ 0
    """
    if not sigma > 0:
        raise ParameterError(f"kernel width must be positive, got {sigma}")
    result = np.exp(-np.square(e) / (2.0 * sigma * sigma))
    return float(result) if np.ndim(result) == 0 else result


def anneal_sigma(i: int, schedule: KernelSchedule) -> float:
    """
    σ(i) = σ_max·exp(-θ·i/C) + σ_min
    """
    if i < 0:
        raise ParameterError(f"iteration must be non-negative, got {i}")
    if not schedule.is_resolved:
        raise ParameterError("schedule needs sigma_max and C before annealing")
    return schedule.sigma_max * math.exp(-schedule.theta * i / schedule.C) + schedule.sigma_min


def estimate_sigma_max(
    y: np.ndarray,
    sigma_min: float = 0.03,
    floor: Optional[float] = None,
) -> float:
    """
    σ_max = 0.5·(y_(0.875) - y_(0.125)) - σ_min

    קוונטילים באינטרפולציה לינארית (type 7). תוצאה ≤ 0 נחתכת ל-floor
    (ברירת מחדל settings.sigma_floor).

    Raises:
        DimensionError: פחות משתי מדידות
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size < 2:
        raise DimensionError(f"need at least 2 measurements to estimate sigma_max, got {y.size}")
    floor = settings.sigma_floor if floor is None else floor

    low, high = np.quantile(y, [0.125, 0.875], method="linear")
    estimate = 0.5 * (high - low) - sigma_min
    return float(max(estimate, floor))


def resolve_schedule(
    schedule: KernelSchedule,
    y: np.ndarray,
    C: Optional[int] = None,
) -> KernelSchedule:
    """
    החזר לוח עם σ_max ו-C ממולאים

    σ_max חסר מוערך מ-y; C חסר נלקח מהפרמטר (בדרך כלל SolverConfig.C).
    """
    updates = {}
    if schedule.sigma_max is None:
        updates["sigma_max"] = estimate_sigma_max(y, schedule.sigma_min)
    if schedule.C is None:
        if C is None:
            raise ParameterError("schedule C is unset and no solver C was given")
        updates["C"] = int(C)
    return schedule.model_copy(update=updates) if updates else schedule
