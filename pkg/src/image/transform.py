"""
Block Transforms
================
DCT דו-ממדי אורתונורמלי (type II) ובחירת s המקדמים הגדולים.
"""

import numpy as np
import scipy.fft

from ..errors import DimensionError, ParameterError


def _square(block: np.ndarray) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise DimensionError(f"expected a square block, got shape {block.shape}")
    return block


def dct2(block: np.ndarray) -> np.ndarray:
    """DCT-II דו-ממדי עם נרמול אורתונורמלי"""
    return scipy.fft.dctn(_square(block), type=2, norm="ortho")


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """ההפכי של dct2"""
    return scipy.fft.idctn(_square(coeffs), type=2, norm="ortho")


def sparsify_top_s(coeffs: np.ndarray, s: int) -> np.ndarray:
    """
    אפס את כל המקדמים פרט ל-s הגדולים בערכם המוחלט

    שוויון בגודל נשבר לטובת האינדקס הנמוך (מיון יציב). הצורה נשמרת.

    Raises:
        ParameterError: s מחוץ ל-[1, size]
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    flat = coeffs.ravel()
    if not 1 <= s <= flat.size:
        raise ParameterError(f"s must be in [1, {flat.size}], got {s}")
    if s == flat.size:
        return coeffs.copy()

    keep = np.argsort(-np.abs(flat), kind="stable")[:s]
    result = np.zeros_like(flat)
    result[keep] = flat[keep]
    return result.reshape(coeffs.shape)
