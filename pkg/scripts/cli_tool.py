#!/usr/bin/env python3
"""
RobustCS - Robust Compressive Sensing
=====================================

סקריפט ראשי להרצת ניסויי השחזור משורת הפקודה.

שימוש:
    python scripts/cli_tool.py simulate --config configs/gmm_convergence.toml
    python scripts/cli_tool.py sweep --config configs/k_sweep.toml --threads 4
    python scripts/cli_tool.py advise-stepsize --N 1000 --M 300

Author: RobustCS Team
"""

import sys
from pathlib import Path

# הוסף את תיקיית src ל-path (התיקייה הראשית של הפרויקט)
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
