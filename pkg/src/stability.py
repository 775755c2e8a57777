"""
Step-Size Stability
===================
חסמי גודל הצעד (תנאים מספיקים להתכנסות), הצורות הסגורות של P_H/P_K
ו-oracle של Monte Carlo לבדיקתן.

שימוש:
```python
report = advise(StabilityInputs(N=1000, sigma_a_sq=1/300))
for row in report.rows:
    print(row.regime.value, row.bound, row.suggested_mu)
```
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DivergenceError, ParameterError
from .models.problem import SensingKind
from .models.solver import KernelSchedule, SolverConfig, SolverVariant
from .models.stability import (
    DivergenceProbeResult,
    ProbePoint,
    StabilityInputs,
    StabilityRegime,
    StepSizeAdvice,
    StepSizeReport,
)
from .problem import build_problem
from .rng import SeedLike, split
from .solvers import SolverFactory

logger = logging.getLogger(__name__)

MC_SAMPLES = 1_000_000
MC_BLOCK = 50_000


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if value is None or not value > 0:
            raise ParameterError(f"{name} must be positive, got {value}")


# ==================== Bounds ====================

def bound_rademacher(N: int, sigma_a_sq: float) -> float:
    """μ < 2 / (N·σ_a²)"""
    _require_positive(N=N, sigma_a_sq=sigma_a_sq)
    return 2.0 / (N * sigma_a_sq)


def bound_gaussian_sensing_bounded_noise(
    N: int,
    sigma_a_sq: float,
    sigma: float,
    v_max: float,
) -> float:
    """μ < 2 / ((N + 4 + v_max²/(4σ²))·σ_a²)"""
    _require_positive(N=N, sigma_a_sq=sigma_a_sq, sigma=sigma)
    if v_max < 0:
        raise ParameterError(f"v_max must be non-negative, got {v_max}")
    return 2.0 / ((N + 4.0 + v_max ** 2 / (4.0 * sigma ** 2)) * sigma_a_sq)


def bound_gaussian_sensing_gaussian_noise(N: int, sigma_a_sq: float) -> float:
    """μ < 2 / ((N + 2)·σ_a²)"""
    _require_positive(N=N, sigma_a_sq=sigma_a_sq)
    return 2.0 / ((N + 2.0) * sigma_a_sq)


def advise(
    inputs: StabilityInputs,
    regimes: Optional[Sequence[StabilityRegime]] = None,
) -> StepSizeReport:
    """
    טבלת החסמים הרלוונטיים

    Args:
        inputs: ממדי הבעיה ופרמטרי הרעש
        regimes: משטרים מבוקשים; None = כל מה שניתן לחשב מהקלט

    Raises:
        ParameterError: משטר הרעש החסום התבקש בלי sigma או v_max
    """
    requested = list(regimes) if regimes is not None else None
    bounded_ready = inputs.sigma is not None and inputs.v_max is not None

    if requested is not None and StabilityRegime.BOUNDED_NOISE in requested and not bounded_ready:
        raise ParameterError("bounded_noise regime needs both sigma and v_max")

    rows = []
    if requested is None or StabilityRegime.RADEMACHER in requested:
        rows.append(StepSizeAdvice(
            regime=StabilityRegime.RADEMACHER,
            bound=bound_rademacher(inputs.N, inputs.sigma_a_sq),
        ))
    if (requested is None and bounded_ready) or (
        requested is not None and StabilityRegime.BOUNDED_NOISE in requested
    ):
        rows.append(StepSizeAdvice(
            regime=StabilityRegime.BOUNDED_NOISE,
            bound=bound_gaussian_sensing_bounded_noise(
                inputs.N, inputs.sigma_a_sq, inputs.sigma, inputs.v_max
            ),
        ))
    if requested is None or StabilityRegime.GAUSSIAN_NOISE in requested:
        rows.append(StepSizeAdvice(
            regime=StabilityRegime.GAUSSIAN_NOISE,
            bound=bound_gaussian_sensing_gaussian_noise(inputs.N, inputs.sigma_a_sq),
        ))

    report = StepSizeReport(inputs=inputs, rows=rows)
    if inputs.closed_forms_ready:
        report.P_H, report.P_K = eval_PH_PK_gaussian_noise(
            inputs.N, inputs.sigma, inputs.sigma_a_sq, inputs.sigma_v_sq, inputs.wtilde_norm_sq
        )
    return report


# ==================== Closed forms ====================

def eval_PH_PK_bounded(probe: ProbePoint) -> Tuple[float, float]:
    """
    P_H, P_K עבור חישה גאוסית ורעש קבוע v

        P_H = σ/√p · q/p² · σ_a² · exp(-v²/2p)
        P_K = σ/√p · [(N-1)·q/p² + 2σ²(q + σ_a²||w̃||²v²)/p³ + q²/p⁴] · σ_a⁴ · exp(-v²/2p)
    """
    p, q = probe.p, probe.q
    s_sq = probe.sigma_a_sq * probe.wtilde_norm_sq
    sigma_sq = probe.sigma ** 2
    scale = probe.sigma / math.sqrt(p) * math.exp(-probe.v ** 2 / (2.0 * p))

    P_H = scale * q / p ** 2 * probe.sigma_a_sq
    P_K = scale * probe.sigma_a_sq ** 2 * (
        (probe.N - 1) * q / p ** 2
        + 2.0 * sigma_sq * (q + s_sq * probe.v ** 2) / p ** 3
        + q ** 2 / p ** 4
    )
    return P_H, P_K


def eval_PH_PK_gaussian_noise(
    N: int,
    sigma: float,
    sigma_a_sq: float,
    sigma_v_sq: float,
    wtilde_norm_sq: float,
) -> Tuple[float, float]:
    """
    P_H, P_K עבור חישה גאוסית ורעש N(0, σ_v²)

        P_H = σ(σ²+σ_v²)σ_a² / (σ_a²||w̃||² + σ² + σ_v²)^{3/2}
        P_K = (N-1)·P_H·σ_a² + 3·P_H·(σ²+σ_v²)σ_a² / (σ_a²||w̃||² + σ² + σ_v²)
    """
    _require_positive(N=N, sigma=sigma, sigma_a_sq=sigma_a_sq)
    if sigma_v_sq < 0 or wtilde_norm_sq < 0:
        raise ParameterError("sigma_v_sq and wtilde_norm_sq must be non-negative")

    total = sigma ** 2 + sigma_v_sq
    denom = sigma_a_sq * wtilde_norm_sq + total
    P_H = sigma * total * sigma_a_sq / denom ** 1.5
    P_K = (N - 1) * P_H * sigma_a_sq + 3.0 * P_H * total * sigma_a_sq / denom
    return P_H, P_K


# ==================== Monte Carlo oracle ====================

def _weight_error(N: int, wtilde_norm_sq: float, direction: Optional[np.ndarray]) -> np.ndarray:
    if not wtilde_norm_sq > 0:
        raise ParameterError("Monte Carlo estimate needs ||w~||^2 > 0")
    if direction is None:
        direction = np.zeros(N)
        direction[0] = 1.0
    direction = np.asarray(direction, dtype=np.float64)
    if direction.shape != (N,):
        raise ParameterError(f"direction must have length N={N}")
    return direction / np.linalg.norm(direction) * math.sqrt(wtilde_norm_sq)


def _mc_expectations(
    N: int,
    sigma: float,
    sigma_a_sq: float,
    wtilde: np.ndarray,
    draw_v,
    samples: int,
    seed: SeedLike,
    block: int,
) -> Tuple[float, float]:
    """
    E[G(e)(φᵀw̃)²] ו-E[G(e)||φ||²(φᵀw̃)²], מחולקים ב-||w̃||²

    כל בלוק דוגם מזרם-בת משלו; הסכימה בסדר הבלוקים.
    """
    if samples < 1 or block < 1:
        raise ParameterError("samples and block must be positive")
    n_blocks = math.ceil(samples / block)
    streams = split(seed, n_blocks)
    scale = math.sqrt(sigma_a_sq)

    h_sum = 0.0
    k_sum = 0.0
    remaining = samples
    for rng in streams:
        size = min(block, remaining)
        remaining -= size
        phi = rng.normal(0.0, scale, size=(size, N))
        projection = phi @ wtilde
        e = projection + draw_v(rng, size)
        gain = np.exp(-e * e / (2.0 * sigma * sigma))
        weighted = gain * projection * projection
        h_sum += float(weighted.sum())
        k_sum += float((weighted * np.einsum("ij,ij->i", phi, phi)).sum())

    norm_sq = float(wtilde @ wtilde)
    return h_sum / samples / norm_sq, k_sum / samples / norm_sq


def mc_PH_PK_bounded(
    probe: ProbePoint,
    samples: int = MC_SAMPLES,
    seed: SeedLike = 0,
    direction: Optional[np.ndarray] = None,
    block: int = MC_BLOCK,
) -> Tuple[float, float]:
    """הערכת Monte Carlo של P_H, P_K עם v קבוע"""
    wtilde = _weight_error(probe.N, probe.wtilde_norm_sq, direction)
    v = float(probe.v)
    return _mc_expectations(
        probe.N, probe.sigma, probe.sigma_a_sq, wtilde,
        lambda rng, size: v, samples, seed, block,
    )


def mc_PH_PK_gaussian_noise(
    N: int,
    sigma: float,
    sigma_a_sq: float,
    sigma_v_sq: float,
    wtilde_norm_sq: float,
    samples: int = MC_SAMPLES,
    seed: SeedLike = 0,
    direction: Optional[np.ndarray] = None,
    block: int = MC_BLOCK,
) -> Tuple[float, float]:
    """הערכת Monte Carlo של P_H, P_K עם v ~ N(0, σ_v²)"""
    _require_positive(N=N, sigma=sigma, sigma_a_sq=sigma_a_sq)
    wtilde = _weight_error(N, wtilde_norm_sq, direction)
    noise_std = math.sqrt(sigma_v_sq)
    return _mc_expectations(
        N, sigma, sigma_a_sq, wtilde,
        lambda rng, size: rng.normal(0.0, noise_std, size=size), samples, seed, block,
    )


# ==================== Divergence probe ====================

def divergence_probe(
    N: int = 100,
    M: int = 30,
    K: int = 5,
    multiple: float = 10.0,
    seed: SeedLike = 0,
    updates: Optional[int] = None,
    sigma_a_sq: Optional[float] = None,
) -> DivergenceProbeResult:
    """
    הרץ l0-MCC עם λ=0 על בעיית Rademacher נקייה ב-μ = multiple × חסם Rademacher

    רוחב הגרעין קבוע ורחב מאוד (θ=0, σ_max=1e9), כלומר המקרה הגרוע של הגרעין.

    Args:
        updates: מספר העדכונים (ברירת מחדל 5·M)
    """
    variance = 1.0 / M if sigma_a_sq is None else sigma_a_sq
    bound = bound_rademacher(N, variance)
    mu = multiple * bound
    problem = build_problem(
        N, M, K, noise=None, seed=seed,
        kind=SensingKind.RADEMACHER, entry_variance=variance,
    )
    cfg = SolverConfig(
        variant=SolverVariant.L0MCC,
        mu=mu,
        lam=0.0,
        schedule=KernelSchedule(sigma_max=1e9, theta=0.0),
        C=updates if updates is not None else 5 * M,
        epsilon=0.0,
    )
    initial = problem.squared_deviation(np.zeros(N))
    try:
        _, trace = SolverFactory.run(problem, cfg)
    except DivergenceError as error:
        logger.info("probe at %.1fx bound diverged at update %d", multiple, error.iteration)
        return DivergenceProbeResult(
            multiple=multiple, mu=mu, bound=bound, diverged=True,
            iteration=error.iteration, initial_deviation=initial,
        )
    return DivergenceProbeResult(
        multiple=multiple, mu=mu, bound=bound, diverged=False,
        initial_deviation=initial, final_deviation=trace.final_deviation,
    )
