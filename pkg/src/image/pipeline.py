"""
Block Compressive Sensing
=========================
צינור דחיסת תמונה לפי בלוקים: ריפוד, DCT לכל בלוק, sparsify, מדידה
ברעש, נרמול, שחזור עם solver, DCT הפוך, הרכבה ו-PSNR.

מטריצת חישה אחת משותפת לכל הבלוקים. לכל בלוק זרמי אקראיות משלו
(נגזרים מאינדקס הבלוק), כך שסדר העיבוד לא משנה את התוצאה.

שימוש:
```python
result = reconstruct_image(image, s=1024, M_img=500, noise=None, cfg=SolverConfig(), seed=1)
print(result.report.psnr)
```
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionError, DivergenceError, ParameterError
from ..harness import parallel_map
from ..models.image import BlockProblem, ImageReconstruction, ImageReport
from ..models.noise import NoiseModel
from ..models.problem import ReconstructionProblem, SensingKind, SensingMatrix
from ..models.solver import SolverConfig
from ..noise import resolve_noise, sample_noise
from ..problem import generate_sensing_matrix
from ..rng import child_sequence
from ..solvers import SolverFactory
from .transform import dct2, idct2, sparsify_top_s

logger = logging.getLogger(__name__)

PEAK = 255.0
EXACT_TOLERANCE = 1e-6

# מפתחות זרמי-הבת מתחת ל-seed של הריצה
_MATRIX_STREAM = 0
_NOISE_STREAM = 1
_SOLVER_STREAM = 2


def psnr(reference: np.ndarray, reconstructed: np.ndarray, peak: float = PEAK) -> float:
    """
    10·log10(peak² / MSE) על כל התמונה

    Returns:
        inf כשהשגיאה המקסימלית בפיקסל < 1e-6
    """
    reference = np.asarray(reference, dtype=np.float64)
    reconstructed = np.asarray(reconstructed, dtype=np.float64)
    if reference.shape != reconstructed.shape:
        raise DimensionError(f"shape mismatch: {reference.shape} vs {reconstructed.shape}")
    diff = reference - reconstructed
    if np.max(np.abs(diff)) < EXACT_TOLERANCE:
        return math.inf
    mse = float(np.mean(diff * diff))
    return 10.0 * math.log10(peak * peak / mse)


def pad_to_blocks(image: np.ndarray, patch_size: int) -> np.ndarray:
    """ריפוד edge-replicate עד שהממדים מתחלקים ב-B"""
    height, width = image.shape
    pad_h = (-height) % patch_size
    pad_w = (-width) % patch_size
    if pad_h == 0 and pad_w == 0:
        return image
    return np.pad(image, ((0, pad_h), (0, pad_w)), mode="edge")


def split_blocks(image: np.ndarray, patch_size: int) -> List[np.ndarray]:
    """בלוקים B×B בסדר row-major (התמונה כבר מרופדת)"""
    height, width = image.shape
    return [
        image[r:r + patch_size, c:c + patch_size]
        for r in range(0, height, patch_size)
        for c in range(0, width, patch_size)
    ]


def merge_blocks(blocks: Sequence[np.ndarray], shape: Tuple[int, int], patch_size: int) -> np.ndarray:
    """ההפך של split_blocks"""
    height, width = shape
    image = np.zeros(shape)
    per_row = width // patch_size
    for index, block in enumerate(blocks):
        r, c = divmod(index, per_row)
        image[r * patch_size:(r + 1) * patch_size, c * patch_size:(c + 1) * patch_size] = block
    return image


@dataclass(frozen=True)
class BlockTask:
    """עבודה על בלוק אחד - בבעלות מלאה של ה-worker"""
    block: BlockProblem
    phi: SensingMatrix
    cfg: SolverConfig
    seed: int


@dataclass
class BlockOutcome:
    index: int
    pixels: np.ndarray
    seconds: float
    error: Optional[str] = None


def encode_block(
    index: int,
    pixels: np.ndarray,
    s: int,
    phi: SensingMatrix,
    noise: Optional[NoiseModel],
    seed: int,
) -> BlockProblem:
    """DCT, sparsify ומדידה (עם רעש) של בלוק אחד"""
    coeffs = dct2(pixels).ravel()
    if s < coeffs.size:
        coeffs = sparsify_top_s(coeffs, s)
    y = phi.entries @ coeffs
    if noise is not None:
        y = y + sample_noise(resolve_noise(noise, phi.M), phi.M, child_sequence(seed, _NOISE_STREAM, index))
    return BlockProblem(index=index, coeffs=coeffs, y=y, s=s)


def solve_block(task: BlockTask) -> BlockOutcome:
    """
    נרמל y לנורמה 1, שחזר, הכפל בחזרה והחזר פיקסלים

    התבדרות מחזירה בלוק של אפסים עם הודעת שגיאה.
    """
    block = task.block
    patch_size = int(round(math.sqrt(task.phi.N)))
    started = time.perf_counter()

    scale = float(np.linalg.norm(block.y))
    if scale == 0.0:
        coeffs = np.zeros(task.phi.N)
        error = None
    else:
        problem = ReconstructionProblem(phi=task.phi, y=block.y / scale)
        try:
            w, _ = SolverFactory.run(
                problem, task.cfg, child_sequence(task.seed, _SOLVER_STREAM, block.index)
            )
            coeffs = w * scale
            error = None
        except DivergenceError as exc:
            logger.warning("block %d diverged: %s", block.index, exc)
            coeffs = np.zeros(task.phi.N)
            error = str(exc)

    pixels = idct2(coeffs.reshape(patch_size, patch_size))
    return BlockOutcome(block.index, pixels, time.perf_counter() - started, error)


def reconstruct_image(
    image: np.ndarray,
    s: Optional[int],
    M_img: int,
    noise: Optional[NoiseModel],
    cfg: SolverConfig,
    seed: int = 0,
    patch_size: int = 32,
    kind: SensingKind = SensingKind.GAUSSIAN_IID,
    entry_variance: Optional[float] = None,
    threads: int = 1,
    order: Optional[Sequence[int]] = None,
) -> ImageReconstruction:
    """
    שחזר תמונה בגווני אפור בשיטת block CS

    Args:
        image: מטריצה H×W בטווח [0, 255]
        s: מספר מקדמי DCT שנשמרים לכל בלוק (None = B², ללא sparsify)
        M_img: מספר המדידות לכל בלוק
        noise: מודל הרעש (None = ללא רעש)
        cfg: פרמטרי ה-solver
        seed: seed של הריצה
        patch_size: B
        kind, entry_variance: מטריצת החישה המשותפת (ברירת מחדל σ_a² = 1/M_img)
        threads: מספר תהליכים
        order: סדר עיבוד הבלוקים (פרמוטציה); לא משפיע על התוצאה

    Returns:
        ImageReconstruction עם התמונה (חתוכה ל-[0, 255]), הדו"ח וזמני הבלוקים
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise DimensionError(f"expected a 2-D grayscale image, got shape {image.shape}")
    if image.size == 0 or image.min() < 0 or image.max() > PEAK:
        raise ParameterError("image pixels must lie in [0, 255]")
    if patch_size < 1:
        raise ParameterError(f"patch_size must be positive, got {patch_size}")

    n_coeffs = patch_size * patch_size
    s = n_coeffs if s is None else s
    if not 1 <= s <= n_coeffs:
        raise ParameterError(f"s must be in [1, {n_coeffs}], got {s}")

    padded = pad_to_blocks(image, patch_size)
    blocks = split_blocks(padded, patch_size)
    phi = generate_sensing_matrix(
        M_img, n_coeffs, kind, entry_variance, child_sequence(seed, _MATRIX_STREAM)
    )

    if order is None:
        order = range(len(blocks))
    order = list(order)
    if sorted(order) != list(range(len(blocks))):
        raise ParameterError("order must be a permutation of the block indices")

    tasks = [
        BlockTask(encode_block(index, blocks[index], s, phi, noise, seed), phi, cfg, seed)
        for index in order
    ]
    logger.info("image %dx%d: %d blocks, s=%d, M=%d", *image.shape, len(blocks), s, M_img)
    outcomes = sorted(parallel_map(solve_block, tasks, threads), key=lambda o: o.index)

    merged = merge_blocks([o.pixels for o in outcomes], padded.shape, patch_size)
    reconstructed = np.clip(merged[: image.shape[0], : image.shape[1]], 0.0, PEAK)

    failed = [o.index for o in outcomes if o.error is not None]
    report = ImageReport(
        height=image.shape[0],
        width=image.shape[1],
        patch_size=patch_size,
        blocks=len(blocks),
        s=s,
        measurements=M_img,
        seed=seed,
        solver=cfg,
        noise=noise,
        psnr=psnr(image, reconstructed),
        failed_blocks=failed,
        errors=[o.error for o in outcomes if o.error is not None],
    )
    return ImageReconstruction(
        image=reconstructed,
        report=report,
        block_times=[o.seconds for o in outcomes],
    )
