"""
Experiment Models
=================
מודלי הניסויים: הגדרת ניסוי (גם כקובץ תצורה), דו"ח ניסוי בודד
ותוצאות סריקה.
"""

from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .noise import NoiseModel
from .problem import NonzeroDistribution, SensingKind
from .solver import SolverConfig, SolverVariant

DEFAULT_SUCCESS_THRESHOLD = 5e-2

# ב-Monte Carlo כל solver רץ עד C (ε=0); ל-l0-MCC זה דורש C ארוך יותר מברירת המחדל
SIMULATION_L0MCC_UPDATES = 30_000


class SweepParameter(str, Enum):
    """הפרמטרים שניתן לסרוק"""
    K = "K"
    M = "M"
    SIGMA_A_SQ = "sigma_A_sq"
    SIGMA_B_SQ = "sigma_B_sq"
    C = "c"
    ALPHA = "alpha"
    GAMMA = "gamma"
    MU = "mu"
    LAMBDA = "lambda"


class ProblemSettings(BaseModel):
    """ממדי הבעיה ואופן יצירתה"""
    model_config = ConfigDict(extra="forbid")

    N: int = Field(default=1000, ge=1)
    M: int = Field(default=300, ge=1)
    K: int = Field(default=40, ge=1)
    nonzero: NonzeroDistribution = NonzeroDistribution.UNIFORM_SYM
    normalize: bool = True
    sensing: SensingKind = SensingKind.GAUSSIAN_IID
    entry_variance: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "ProblemSettings":
        if self.K > self.N:
            raise ValueError(f"K: sparsity {self.K} exceeds N={self.N}")
        return self

    def variance_for(self, M: int) -> float:
        """σ_a² - ברירת מחדל 1/M"""
        return self.entry_variance if self.entry_variance is not None else 1.0 / M


class SweepAxis(BaseModel):
    """ציר סריקה אחד"""
    model_config = ConfigDict(extra="forbid")

    parameter: SweepParameter
    values: List[float] = Field(..., min_length=1)


class ImageSettings(BaseModel):
    """פרמטרי צינור התמונה (block CS)"""
    model_config = ConfigDict(extra="forbid")

    patch_size: int = Field(default=32, ge=1)
    s: Optional[int] = Field(default=None, ge=1)
    measurements: int = Field(default=500, ge=1)
    sensing: SensingKind = SensingKind.GAUSSIAN_IID
    entry_variance: Optional[float] = Field(default=None, gt=0)


class ExperimentSpec(BaseModel):
    """
    הגדרת ניסוי Monte Carlo

    noise=None משמעו מדידות נקיות. sweep=None משמעו נקודה קבועה אחת.
    ה-solvers של ברירת המחדל רצים בלי מבחן העצירה של ε.
    """
    model_config = ConfigDict(extra="forbid")

    problem: ProblemSettings = Field(default_factory=ProblemSettings)
    noise: Optional[NoiseModel] = None
    solvers: List[SolverConfig] = Field(
        default_factory=lambda: [
            SolverConfig(variant=SolverVariant.L0MCC, C=SIMULATION_L0MCC_UPDATES, epsilon=0.0),
            SolverConfig(variant=SolverVariant.MBL0MCC, epsilon=0.0),
        ],
        min_length=1,
    )
    trials: int = Field(default=50, ge=1)
    success_threshold: float = Field(default=DEFAULT_SUCCESS_THRESHOLD, gt=0)
    seed: int = Field(default=0, ge=0)
    trace_stride: Optional[int] = Field(default=None, ge=1)
    sweep: Optional[SweepAxis] = None

    @model_validator(mode="after")
    def _check_batch_sizes(self) -> "ExperimentSpec":
        smallest_M = self.problem.M
        if self.sweep is not None and self.sweep.parameter == SweepParameter.M:
            smallest_M = int(min(self.sweep.values))
        for index, solver in enumerate(self.solvers):
            if solver.S is not None and solver.S > smallest_M:
                raise ValueError(
                    f"solvers.{index}.S: mini-batch size {solver.S} exceeds M={smallest_M}"
                )
        return self


class ExperimentConfig(ExperimentSpec):
    """קובץ התצורה: ExperimentSpec + גרסת סכמה, תיקיית פלט והגדרות תמונה"""

    schema_version: Literal[1] = 1
    output_dir: Optional[Path] = None
    image: ImageSettings = Field(default_factory=ImageSettings)


class TrialReport(BaseModel):
    """
    תוצאת ניסוי בודד (אלגוריתם אחד על בעיה אחת)

    success ⇔ squared_deviation < threshold. ריצה שהתבדרה נספרת ככישלון
    ו-squared_deviation שלה None.
    """
    solver: str
    variant: SolverVariant
    trial: int
    axis_value: Optional[float] = None
    seed_key: str
    squared_deviation: Optional[float] = None
    success: bool = False
    updates_used: int = 0
    converged: bool = False
    diverged: bool = False
    error: Optional[str] = None
    wall_time: float = Field(default=0.0, exclude=True)


class SweepResult(BaseModel):
    """סיכום של אלגוריתם אחד בנקודת ציר אחת"""
    parameter: Optional[str] = None
    axis_value: Optional[float] = None
    solver: str
    variant: SolverVariant
    trials: int
    successes: int
    diverged: int = 0
    msd_success: Optional[float] = None
    msd_all: Optional[float] = None

    @computed_field
    @property
    def probability(self) -> float:
        """p = T_c / T"""
        return self.successes / self.trials if self.trials else 0.0


class SweepReport(BaseModel):
    """דו"ח סריקה מלא"""
    spec: ExperimentSpec
    results: List[SweepResult] = Field(default_factory=list)
    trials: List[TrialReport] = Field(default_factory=list)

    def to_dataframe(self) -> pd.DataFrame:
        """
        שורה אחת לכל נקודת ציר, עמודות {variant}_{metric}
        """
        rows: Dict[Optional[float], Dict[str, object]] = {}
        for result in self.results:
            row = rows.setdefault(result.axis_value, {"axis_value": result.axis_value})
            prefix = result.solver
            row[f"{prefix}_probability"] = result.probability
            row[f"{prefix}_msd_success"] = result.msd_success
            row[f"{prefix}_msd_all"] = result.msd_all
            row[f"{prefix}_diverged"] = result.diverged
            row[f"{prefix}_trials"] = result.trials
        frame = pd.DataFrame(list(rows.values()))
        if self.spec.sweep is not None:
            frame = frame.rename(columns={"axis_value": self.spec.sweep.parameter.value})
        return frame

