"""
Noise Models
============
מודלי הרעש של המדידות - איחוד מתויג (tagged union) לפי השדה kind.

    gaussian      N(0, variance)
    gmm           (1-c)·N(0, σ_A²/M) + c·N(0, σ_B²)
    alpha_stable  סימטרי, φ(t) = exp(-γ^α |t|^α)
"""

from enum import Enum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class VarianceKind(str, Enum):
    """שונות שאינה מספר סופי"""
    INFINITE = "infinite"


class GaussianNoise(BaseModel):
    """רעש גאוסי לבן"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["gaussian"] = "gaussian"
    variance: float = Field(..., gt=0)


class GMMNoise(BaseModel):
    """
    תערובת של שני גאוסיאנים

    רכיב ראשון: רעש כללי עם שונות σ_A²/M (נשמרים בנפרד, כמו ציר ה-x בסריקות σ_A²).
    רכיב שני: outliers בהסתברות c עם שונות σ_B².
    M=None נפתר ממספר המדידות של הבעיה (resolve_noise).
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["gmm"] = "gmm"
    c: float = Field(..., ge=0, le=1)
    sigma_A_sq: float = Field(..., gt=0)
    sigma_B_sq: float = Field(..., gt=0)
    M: Optional[int] = Field(default=None, ge=1)

    @property
    def general_variance(self) -> float:
        """σ_A²/M - דורש M פתור"""
        if self.M is None:
            raise ValueError("GMM divisor M is unresolved")
        return self.sigma_A_sq / self.M


class AlphaStableNoise(BaseModel):
    """רעש α-stable סימטרי (β=0)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["alpha_stable"] = "alpha_stable"
    alpha: float = Field(..., gt=0, le=2)
    gamma: float = Field(..., gt=0)


NoiseModel = Annotated[
    Union[GaussianNoise, GMMNoise, AlphaStableNoise],
    Field(discriminator="kind"),
]
