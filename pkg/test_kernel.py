"""
Tests for the correntropy kernel and the annealing schedule
"""

import math

import numpy as np
import pytest

from src.errors import DimensionError, ParameterError
from src.kernel import anneal_sigma, estimate_sigma_max, kernel_weight, resolve_schedule
from src.models import KernelSchedule


def test_kernel_weight_values():
    assert kernel_weight(0.0, 2.0) == 1.0
    assert kernel_weight(2.0, 2.0) == pytest.approx(math.exp(-0.5))
    assert kernel_weight(0.606531, 1.0) == pytest.approx(math.exp(-0.606531 ** 2 / 2))
    assert kernel_weight(10.0, 1.0) == pytest.approx(1.93e-22, rel=1e-2)


def test_kernel_weight_shape_and_monotonicity():
    e = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
    weights = kernel_weight(e, 1.5)
    assert weights.shape == e.shape
    assert np.allclose(weights, weights[::-1])
    assert weights[0] < weights[1] < weights[2]
    assert kernel_weight(1.0, 1.0) < kernel_weight(1.0, 2.0)


def test_kernel_weight_rejects_bad_width():
    with pytest.raises(ParameterError):
        kernel_weight(1.0, 0.0)
    with pytest.raises(ParameterError):
        kernel_weight(1.0, -1.0)


def test_anneal_sigma_endpoints():
    schedule = KernelSchedule(sigma_max=2.0, sigma_min=0.03, theta=20.0, C=1000)
    assert anneal_sigma(0, schedule) == pytest.approx(2.03)
    assert anneal_sigma(1000, schedule) == pytest.approx(0.03 + 2.0 * math.exp(-20))


def test_anneal_sigma_is_log_linear():
    schedule = KernelSchedule(sigma_max=1.5, sigma_min=0.03, theta=20.0, C=500)
    logs = [math.log(anneal_sigma(i, schedule) - 0.03) for i in range(0, 50)]
    steps = np.diff(logs)
    assert np.allclose(steps, -20.0 / 500, atol=1e-12)


def test_anneal_sigma_without_decay():
    schedule = KernelSchedule(sigma_max=0.5, sigma_min=0.03, theta=0.0, C=10)
    values = {anneal_sigma(i, schedule) for i in range(20)}
    assert len(values) == 1
    assert values.pop() == pytest.approx(0.53)


def test_anneal_sigma_needs_resolved_schedule():
    with pytest.raises(ParameterError):
        anneal_sigma(0, KernelSchedule())


def test_estimate_sigma_max_quantiles():
    y = np.linspace(0.0, 1.0, 9)
    assert estimate_sigma_max(y, 0.03) == pytest.approx(0.345, abs=1e-12)
    assert estimate_sigma_max(-y, 0.03) == pytest.approx(0.345, abs=1e-12)


def test_estimate_sigma_max_floor():
    assert estimate_sigma_max(np.full(10, 3.0), 0.03) == 1e-3


def test_estimate_sigma_max_needs_two_values():
    with pytest.raises(DimensionError):
        estimate_sigma_max(np.array([]))
    with pytest.raises(DimensionError):
        estimate_sigma_max(np.array([1.0]))


def test_resolve_schedule_fills_missing_fields():
    y = np.linspace(0.0, 1.0, 9)
    resolved = resolve_schedule(KernelSchedule(), y, C=100)
    assert resolved.is_resolved
    assert resolved.sigma_max == pytest.approx(0.345)
    assert resolved.C == 100

    fixed = KernelSchedule(sigma_max=4.0, C=7)
    assert resolve_schedule(fixed, y) is fixed
    assert KernelSchedule(sigma_max=4.0).resolve(y, 12).C == 12
