"""
Measurement Noise
=================
דגימת רעש המדידות: גאוסי, תערובת גאוסיאנים (GMM) ו-α-stable סימטרי.

α-stable נדגם בשיטת Chambers-Mallows-Stuck (המקרה הסימטרי, β=0).
"""

import logging
import math
from typing import Optional, Union

import numpy as np

from .errors import ParameterError
from .models.noise import AlphaStableNoise, GaussianNoise, GMMNoise, NoiseModel, VarianceKind
from .rng import SeedLike, make_rng

logger = logging.getLogger(__name__)


def resolve_noise(model: NoiseModel, M: int) -> NoiseModel:
    """
    השלם את המחלק M של GMM ממספר המדידות אם לא הוגדר

    מודלים אחרים מוחזרים כמו שהם.
    """
    if isinstance(model, GMMNoise) and model.M is None:
        if M < 1:
            raise ParameterError(f"GMM divisor M must be positive, got {M}")
        return model.model_copy(update={"M": int(M)})
    return model


def _check_parameters(model: NoiseModel) -> None:
    # המודלים עוברים ולידציה ב-pydantic; model_construct עוקף אותה
    if isinstance(model, GaussianNoise):
        if not model.variance > 0:
            raise ParameterError(f"variance must be positive, got {model.variance}")
    elif isinstance(model, GMMNoise):
        if not 0.0 <= model.c <= 1.0:
            raise ParameterError(f"c must be in [0, 1], got {model.c}")
        if not (model.sigma_A_sq > 0 and model.sigma_B_sq > 0):
            raise ParameterError("GMM component variances must be positive")
        if model.M is None:
            raise ParameterError("GMM divisor M is unresolved; call resolve_noise first")
    elif isinstance(model, AlphaStableNoise):
        if not 0.0 < model.alpha <= 2.0:
            raise ParameterError(f"alpha must be in (0, 2], got {model.alpha}")
        if not model.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {model.gamma}")
    else:
        raise ParameterError(f"unknown noise model: {model!r}")


def _sample_alpha_stable(alpha: float, gamma: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    Chambers-Mallows-Stuck עבור β=0

    φ ~ U(-π/2, π/2), W ~ Exp(1). הסקאלה γ נותנת φ(t) = exp(-γ^α |t|^α).
    """
    phi = rng.uniform(-math.pi / 2, math.pi / 2, size=count)
    w = rng.exponential(1.0, size=count)

    if alpha == 1.0:
        return gamma * np.tan(phi)
    if alpha == 2.0:
        return 2.0 * gamma * np.sqrt(w) * np.sin(phi)

    return (
        gamma
        * np.sin(alpha * phi)
        / np.cos(phi) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha)
    )


def sample_noise(model: NoiseModel, count: int, rng_seed: SeedLike = 0) -> np.ndarray:
    """
    דגום count ערכי רעש i.i.d מהמודל

    Args:
        model: מודל הרעש (GMM חייב M פתור)
        count: מספר הדגימות
        rng_seed: seed או Generator

    Returns:
        וקטור באורך count

    Raises:
        ParameterError: count < 1 או פרמטרים לא חוקיים
    """
    if count < 1:
        raise ParameterError(f"count must be at least 1, got {count}")
    _check_parameters(model)
    rng = make_rng(rng_seed)

    if isinstance(model, GaussianNoise):
        return rng.normal(0.0, math.sqrt(model.variance), size=count)

    if isinstance(model, GMMNoise):
        # בחירת רכיב Bernoulli(c) ואז הגאוסיאן שנבחר
        outlier = rng.random(count) < model.c
        general = rng.normal(0.0, math.sqrt(model.general_variance), size=count)
        impulsive = rng.normal(0.0, math.sqrt(model.sigma_B_sq), size=count)
        return np.where(outlier, impulsive, general)

    return _sample_alpha_stable(model.alpha, model.gamma, count, rng)


def nominal_variance(
    model: NoiseModel,
    M: Optional[int] = None,
) -> Union[float, VarianceKind]:
    """
    שונות סגורה של המודל

    GMM: (1-c)·σ_A²/M + c·σ_B² (M נלקח מהמודל או מהפרמטר).
    α-stable: 2γ² עבור α=2, אחרת VarianceKind.INFINITE.
    """
    if isinstance(model, GaussianNoise):
        return float(model.variance)
    if isinstance(model, GMMNoise):
        divisor = model.M if model.M is not None else M
        if divisor is None:
            raise ParameterError("GMM divisor M is unresolved")
        return (1.0 - model.c) * model.sigma_A_sq / divisor + model.c * model.sigma_B_sq
    if model.alpha < 2.0:
        return VarianceKind.INFINITE
    return 2.0 * model.gamma ** 2
