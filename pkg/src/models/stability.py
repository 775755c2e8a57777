"""
Stability Models
================
קלטים ותוצאות של יועצי גודל הצעד ושל בדיקות ה-P_H/P_K.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field

from ..errors import ParameterError


class StabilityRegime(str, Enum):
    """משטר החישה/רעש שלגביו החסם תקף"""
    RADEMACHER = "rademacher"
    BOUNDED_NOISE = "bounded_noise"        # חישה גאוסית, רעש חסום |v| ≤ v_max
    GAUSSIAN_NOISE = "gaussian_noise"      # חישה גאוסית, רעש גאוסי


class StabilityInputs(BaseModel):
    """
    פרמטרי הבעיה עבור החסמים

    sigma ו-v_max נדרשים רק לחסם הרעש החסום. sigma ו-sigma_v_sq יחד מפעילים
    את הצורות הסגורות של הרעש הגאוסי בנקודה ||w̃||² = wtilde_norm_sq.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    N: int = Field(..., ge=1)
    sigma_a_sq: float = Field(..., gt=0)
    sigma: Optional[float] = Field(default=None, gt=0)
    v_max: Optional[float] = Field(default=None, ge=0)
    sigma_v_sq: Optional[float] = Field(default=None, ge=0)
    wtilde_norm_sq: float = Field(default=1.0, ge=0)

    @property
    def closed_forms_ready(self) -> bool:
        return self.sigma is not None and self.sigma_v_sq is not None


@dataclass(frozen=True)
class ProbePoint:
    """
    נקודת הערכה של P_H/P_K

    p = σ² + σ_a²·||w̃||²,  q = p·σ² + σ_a²·||w̃||²·v²
    """
    wtilde_norm_sq: float
    v: float
    sigma: float
    sigma_a_sq: float
    N: int

    def __post_init__(self) -> None:
        if self.wtilde_norm_sq < 0:
            raise ParameterError(f"wtilde_norm_sq must be non-negative, got {self.wtilde_norm_sq}")
        if self.sigma <= 0 or self.sigma_a_sq <= 0 or self.N < 1:
            raise ParameterError("sigma, sigma_a_sq and N must be positive")

    @property
    def p(self) -> float:
        return self.sigma ** 2 + self.sigma_a_sq * self.wtilde_norm_sq

    @property
    def q(self) -> float:
        return self.p * self.sigma ** 2 + self.sigma_a_sq * self.wtilde_norm_sq * self.v ** 2


class StepSizeAdvice(BaseModel):
    """שורה אחת בטבלת היועץ"""
    regime: StabilityRegime
    bound: float

    @computed_field
    @property
    def suggested_mu(self) -> float:
        """הצעה שמרנית: חצי מהחסם"""
        return 0.5 * self.bound


class StepSizeReport(BaseModel):
    """כל החסמים הרלוונטיים לבעיה אחת, ו-P_H/P_K של הרעש הגאוסי כשיש קלט מתאים"""
    inputs: StabilityInputs
    rows: List[StepSizeAdvice] = Field(default_factory=list)
    P_H: Optional[float] = None
    P_K: Optional[float] = None

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame([row.model_dump() for row in self.rows])


@dataclass
class DivergenceProbeResult:
    """תוצאת ריצת בדיקה של גודל צעד מעל/מתחת לחסם"""
    multiple: float
    mu: float
    bound: float
    diverged: bool
    iteration: Optional[int] = None
    initial_deviation: Optional[float] = None
    final_deviation: Optional[float] = None

    @property
    def grew(self) -> bool:
        """התבדרות או MSD סופי גדול מההתחלתי"""
        if self.diverged:
            return True
        if self.initial_deviation is None or self.final_deviation is None:
            return False
        return self.final_deviation > self.initial_deviation
