"""
Problem Generation
==================
יצירת אותות דלילים, מטריצות חישה ומדידות, ושמירה/טעינה של בעיות.

שימוש:
```python
problem = build_problem(N=1000, M=300, K=40, noise=GMMNoise(...), seed=7)
print(problem.M, problem.truth.K)
```
"""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg

from .errors import DimensionError, ParameterError
from .models.noise import NoiseModel
from .models.problem import (
    NonzeroDistribution,
    ReconstructionProblem,
    SensingKind,
    SensingMatrix,
    SparseSignal,
)
from .rng import SeedLike, make_rng, split

logger = logging.getLogger(__name__)


def generate_sparse_signal(
    N: int,
    K: int,
    nonzero_dist: NonzeroDistribution = NonzeroDistribution.UNIFORM_SYM,
    normalize: bool = True,
    rng_seed: SeedLike = 0,
) -> SparseSignal:
    """
    צור אות דליל עם K ערכים שונים מאפס במיקומים אקראיים

    המיקומים נבחרים קודם (Fisher-Yates חלקי דרך Generator.choice ללא החזרה)
    ורק אחר כך הערכים.

    Raises:
        DimensionError: K > N
        ParameterError: K < 1 או N < 1
    """
    if N < 1:
        raise ParameterError(f"N must be positive, got {N}")
    if K < 1:
        raise ParameterError(f"K must be at least 1, got {K}")
    if K > N:
        raise DimensionError(f"sparsity K={K} exceeds signal length N={N}")

    rng = make_rng(rng_seed)
    support = np.sort(rng.choice(N, size=K, replace=False, shuffle=True))

    dist = NonzeroDistribution(nonzero_dist)
    if dist == NonzeroDistribution.UNIFORM_SYM:
        nonzeros = rng.uniform(-1.0, 1.0, size=K)
        # U[-1,1] יכול להחזיר 0 בדיוק; נשמור על K ערכים שונים מאפס
        nonzeros[nonzeros == 0.0] = 1.0
    else:
        magnitudes = rng.uniform(0.5, 1.0, size=K)
        signs = rng.choice(np.array([-1.0, 1.0]), size=K)
        nonzeros = magnitudes * signs

    values = np.zeros(N)
    values[support] = nonzeros
    if normalize:
        values /= np.linalg.norm(values)

    return SparseSignal(values=values, support=support)


def generate_sensing_matrix(
    M: int,
    N: int,
    kind: SensingKind = SensingKind.GAUSSIAN_IID,
    entry_variance: Optional[float] = None,
    rng_seed: SeedLike = 0,
) -> SensingMatrix:
    """
    צור מטריצת חישה M×N עם כניסות i.i.d

    entry_variance=None משמעו 1/M. עבור ORTHOGONAL השורות אורתוגונליות
    ו-||φ(i)||² = N·σ_a² (דורש M ≤ N).

    Raises:
        ParameterError: ממדים או שונות לא חיוביים
    """
    if M < 1 or N < 1:
        raise ParameterError(f"dimensions must be positive, got M={M}, N={N}")
    variance = 1.0 / M if entry_variance is None else float(entry_variance)
    if not variance > 0:
        raise ParameterError(f"entry variance must be positive, got {variance}")

    rng = make_rng(rng_seed)
    scale = np.sqrt(variance)
    kind = SensingKind(kind)

    if kind == SensingKind.GAUSSIAN_IID:
        entries = rng.normal(0.0, scale, size=(M, N))
    elif kind == SensingKind.RADEMACHER:
        entries = scale * rng.choice(np.array([-1.0, 1.0]), size=(M, N))
    else:
        if M > N:
            raise DimensionError(f"orthogonal rows need M <= N, got M={M}, N={N}")
        gaussian = rng.normal(size=(N, M))
        q, r = scipy.linalg.qr(gaussian, mode="economic")
        # תיקון סימן כדי שההתפלגות תהיה Haar
        q = q * np.sign(np.diag(r))
        entries = q.T * np.sqrt(N * variance)

    return SensingMatrix(entries=entries, kind=kind, entry_variance=variance)


def measure(
    phi: SensingMatrix,
    x: Union[SparseSignal, np.ndarray],
    noise: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    y = Φx + v

    Raises:
        DimensionError: אם האורכים לא מתאימים
    """
    values = x.values if isinstance(x, SparseSignal) else np.asarray(x, dtype=np.float64)
    if values.ndim != 1 or values.size != phi.N:
        raise DimensionError(f"signal length {values.size} does not match N={phi.N}")
    y = phi.entries @ values
    if noise is not None:
        noise = np.asarray(noise, dtype=np.float64)
        if noise.shape != y.shape:
            raise DimensionError(f"noise length {noise.size} does not match M={phi.M}")
        y = y + noise
    return y


def recursive_index(i: int, M: int) -> int:
    """
    אינדקס השורה של עדכון i בשימוש חוזר בנתונים: k = (i mod M) + 1

    מוחזר one-based (כמו בפסאודו-קוד); הקוד הפנימי משתמש ב-k - 1.
    """
    if M < 1:
        raise ParameterError(f"M must be positive, got {M}")
    return (i % M) + 1


def build_problem(
    N: int,
    M: int,
    K: int,
    noise: Optional[NoiseModel] = None,
    seed: SeedLike = 0,
    nonzero_dist: NonzeroDistribution = NonzeroDistribution.UNIFORM_SYM,
    normalize: bool = True,
    kind: SensingKind = SensingKind.GAUSSIAN_IID,
    entry_variance: Optional[float] = None,
) -> ReconstructionProblem:
    """
    בנה בעיה מלאה (אות, מטריצה, רעש) משלושה זרמי-בת של seed אחד
    """
    # import מקומי: noise תלוי ב-problem דרך resolve_noise
    from .noise import resolve_noise, sample_noise

    signal_rng, matrix_rng, noise_rng = split(seed, 3)
    signal = generate_sparse_signal(N, K, nonzero_dist, normalize, signal_rng)
    phi = generate_sensing_matrix(M, N, kind, entry_variance, matrix_rng)
    clean = measure(phi, signal)

    y = clean
    if noise is not None:
        v = sample_noise(resolve_noise(noise, M), M, noise_rng)
        y = clean + v

    return ReconstructionProblem(phi=phi, y=y, truth=signal, clean=clean)


# ==================== Serialization ====================

def save_problem_npz(problem: ReconstructionProblem, path: Union[str, Path]) -> Path:
    """שמור בעיה בקובץ npz בינארי"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {
        "phi": problem.phi.entries,
        "y": problem.y,
        "kind": np.array(problem.phi.kind.value),
        "entry_variance": np.array(problem.phi.entry_variance),
    }
    if problem.truth is not None:
        arrays["x"] = problem.truth.values
        arrays["support"] = problem.truth.support
    if problem.clean is not None:
        arrays["clean"] = problem.clean
    with open(path, "wb") as handle:
        np.savez(handle, **arrays)
    return path


def load_problem_npz(path: Union[str, Path]) -> ReconstructionProblem:
    """טען בעיה מקובץ npz"""
    with np.load(Path(path), allow_pickle=False) as data:
        phi = SensingMatrix(
            entries=data["phi"],
            kind=SensingKind(str(data["kind"])),
            entry_variance=float(data["entry_variance"]),
        )
        truth = None
        if "x" in data:
            truth = SparseSignal(values=data["x"], support=data["support"])
        clean = data["clean"] if "clean" in data else None
        return ReconstructionProblem(phi=phi, y=data["y"], truth=truth, clean=clean)


def export_problem_csv(
    problem: ReconstructionProblem,
    directory: Union[str, Path],
    stem: str = "problem",
) -> Tuple[Path, Path]:
    """
    ייצא ל-CSV: מטריצה (שורה לכל φ(i)) ועמודת מדידות אחת

    Returns:
        (matrix_path, measurements_path)
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    matrix_path = directory / f"{stem}_phi.csv"
    y_path = directory / f"{stem}_y.csv"
    pd.DataFrame(problem.phi.entries).to_csv(
        matrix_path, header=False, index=False, float_format="%.17g"
    )
    pd.DataFrame({"y": problem.y}).to_csv(y_path, index=False, float_format="%.17g")
    logger.debug("exported problem %dx%d to %s", problem.M, problem.N, directory)
    return matrix_path, y_path
