"""
Zero Attraction
===============
הגרדיאנט המקורב של נורמת l0 (פונקציה ליניארית למקוטעין).
"""

import numpy as np

from ..errors import ParameterError


def zero_attraction(w: np.ndarray, beta: float) -> np.ndarray:
    """
    z_β(w) איבר-איבר

        β²w + β   עבור w ∈ [-1/β, 0)
        β²w - β   עבור w ∈ (0, 1/β]
        0         עבור w = 0 ומחוץ ל-[-1/β, 1/β]

    Args:
        w: וקטור המשקלים
        beta: פרמטר אזור המשיכה (> 0)

    Returns:
        וקטור באותו אורך, |z| ≤ β
    """
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    w = np.asarray(w, dtype=np.float64)
    inside = np.abs(w) <= 1.0 / beta
    # np.sign(0) = 0 נותן z_β(0) = 0
    return np.where(inside, beta * beta * w - beta * np.sign(w), 0.0)
