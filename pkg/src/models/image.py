"""
Image Models
============
בלוק של תמונה כבעיית דחיסה, ודו"ח השחזור של תמונה שלמה.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_serializer

from .noise import NoiseModel
from .solver import SolverConfig


@dataclass(frozen=True)
class BlockProblem:
    """
    בלוק B×B במרחב ה-DCT

    Attributes:
        index: מיקום הבלוק בסדר row-major
        coeffs: מקדמי DCT (אחרי sparsify), אורך B²
        y: המדידות הרועשות, אורך M_img
        s: מספר המקדמים שנשמרו
    """
    index: int
    coeffs: np.ndarray
    y: np.ndarray
    s: int


class ImageReport(BaseModel):
    """
    דו"ח השחזור (דטרמיניסטי: זמני הבלוקים נכתבים בנפרד)

    psnr = inf כשהשגיאה המקסימלית בפיקסל קטנה מ-1e-6; נכתב כ-"inf".
    """
    height: int
    width: int
    patch_size: int
    blocks: int
    s: int
    measurements: int
    seed: int
    solver: SolverConfig
    noise: Optional[NoiseModel] = None
    psnr: float
    failed_blocks: List[int] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)

    @field_serializer("psnr")
    def _serialize_psnr(self, value: float) -> Union[float, str]:
        return "inf" if math.isinf(value) else value

    @property
    def is_exact(self) -> bool:
        return math.isinf(self.psnr)


@dataclass
class ImageReconstruction:
    """התמונה המשוחזרת, הדו"ח וזמן הריצה של כל בלוק (בשניות)"""
    image: np.ndarray
    report: ImageReport
    block_times: List[float] = field(default_factory=list)
