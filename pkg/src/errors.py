"""
Errors
======
היררכיית השגיאות של הספרייה.

שגיאות קלט יורשות מ-ValueError כך שקוד שתופס ValueError ממשיך לעבוד.
"""

from typing import Optional


class ReconstructionError(Exception):
    """בסיס לכל השגיאות של הספרייה"""


class DimensionError(ReconstructionError, ValueError):
    """ממדים לא תואמים (אורך וקטור, מספר שורות וכו')"""


class ParameterError(ReconstructionError, ValueError):
    """פרמטר מחוץ לטווח החוקי"""


class DivergenceError(ReconstructionError):
    """
    הפתרון התבדר - ערך לא סופי או נורמה שחורגת מהסף

    Attributes:
        iteration: מספר העדכון שבו זוהתה ההתבדרות
        variant: שם האלגוריתם
    """

    def __init__(
        self,
        message: str,
        iteration: int,
        variant: Optional[str] = None,
    ):
        self.iteration = iteration
        self.variant = variant
        prefix = f"[{variant}] " if variant else ""
        super().__init__(f"{prefix}diverged at update {iteration}: {message}")
