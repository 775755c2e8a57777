"""
Application Configuration
=========================
הגדרות סביבה ותצורה
"""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """הגדרות התהליך (נקראות מ-ROBUSTCS_* או מקובץ .env)"""

    # App Settings
    app_name: str = "RobustCS"
    log_level: str = "INFO"

    # Output - ברירת מחדל לתיקיית התוצאות
    output_dir: Path = Path("results")

    # Worker pool cap (--threads דורס)
    threads: int = Field(default=1, ge=1)

    # Trace stride = max(1, C // trace_points)
    trace_points: int = Field(default=2000, ge=1)

    # Divergence detector: ||w||^2 > factor * max(1, ||y||^2 / sigma_a^2)
    divergence_factor: float = Field(default=1e6, gt=0)

    # Lower clamp for the estimated kernel width
    sigma_floor: float = Field(default=1e-3, gt=0)

    model_config = SettingsConfigDict(
        env_prefix="ROBUSTCS_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """קבל את ההגדרות (cached)"""
    return Settings()


settings = get_settings()
