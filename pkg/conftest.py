"""
Shared test fixtures
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.models import GMMNoise, SolverConfig, SolverState
from src.problem import build_problem


@pytest.fixture
def small_problem():
    """בעיה קטנה ונקייה: N=100, M=60, K=5"""
    return build_problem(N=100, M=60, K=5, seed=11)


@pytest.fixture
def gmm_noise():
    return GMMNoise(c=0.04, sigma_A_sq=0.01, sigma_B_sq=0.1)


@pytest.fixture
def scalar_state():
    """N=1, w=0, σ=1"""
    return SolverState.zeros(1, sigma=1.0)


@pytest.fixture
def plain_config():
    """μ=0.2, λ=0"""
    return SolverConfig(mu=0.2, lam=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
