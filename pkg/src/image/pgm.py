"""
Grayscale Images
================
קריאה/כתיבה של PGM בגווני אפור (P5 בינארי ו-P2 טקסט, 8 ביט),
יצוא מטריצה ל-CSV ויצירת תמונת בדיקה סינתטית.
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import DimensionError, ParameterError
from ..rng import SeedLike, make_rng

PathLike = Union[str, Path]


def _header_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """קרא count טוקנים מה-header (מדלג על הערות #); מחזיר גם את מיקום סוף ה-header"""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise ParameterError("truncated PGM header")
        char = data[pos:pos + 1]
        if char == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif char.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    # בדיוק תו רווח אחד מפריד בין ה-header לנתונים הבינאריים
    return tokens, pos + 1


def read_pgm(path: PathLike) -> np.ndarray:
    """
    קרא קובץ PGM (P5 או P2) למטריצת float64 בטווח [0, 255]

    Raises:
        FileNotFoundError: הקובץ לא קיים
        ParameterError: פורמט לא נתמך
    """
    data = Path(path).read_bytes()
    tokens, offset = _header_tokens(data, 4)
    magic, width, height, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if not 0 < maxval <= 255:
        raise ParameterError(f"only 8-bit PGM is supported, got maxval={maxval}")

    if magic == b"P5":
        pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=offset)
    elif magic == b"P2":
        values = data[offset:].split()
        if len(values) < width * height:
            raise ParameterError("truncated P2 pixel data")
        pixels = np.array([int(v) for v in values[: width * height]], dtype=np.int64)
    else:
        raise ParameterError(f"unsupported PGM magic {magic!r}")

    image = pixels.reshape(height, width).astype(np.float64)
    if maxval != 255:
        image = image * (255.0 / maxval)
    return image


def to_uint8(image: np.ndarray) -> np.ndarray:
    """עיגול וחיתוך לטווח [0, 255]"""
    return np.clip(np.rint(np.asarray(image, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_pgm(image: np.ndarray, path: PathLike, binary: bool = True) -> Path:
    """כתוב מטריצה כ-PGM (P5 כברירת מחדל, P2 עם binary=False)"""
    pixels = to_uint8(image)
    if pixels.ndim != 2:
        raise DimensionError(f"expected a 2-D image, got shape {pixels.shape}")
    height, width = pixels.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if binary:
        header = f"P5\n{width} {height}\n255\n".encode("ascii")
        path.write_bytes(header + pixels.tobytes())
    else:
        lines = [f"P2\n{width} {height}\n255"]
        lines.extend(" ".join(str(v) for v in row) for row in pixels)
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def write_matrix_csv(image: np.ndarray, path: PathLike) -> Path:
    """יצוא גולמי של המטריצה ל-CSV (שורה לכל שורת פיקסלים)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(np.asarray(image, dtype=np.float64)).to_csv(
        path, header=False, index=False, float_format="%.12g"
    )
    return path


def read_matrix_csv(path: PathLike) -> np.ndarray:
    return pd.read_csv(Path(path), header=None).to_numpy(dtype=np.float64)


def synthetic_pattern(height: int = 64, width: int = 64, seed: SeedLike = 0) -> np.ndarray:
    """
    תמונת בדיקה: שיפוע חלק, מלבנים, עיגול ומרקם סינוסי קל

    Returns:
        מטריצה height×width בטווח [0, 255]
    """
    if height < 1 or width < 1:
        raise ParameterError(f"image dimensions must be positive, got {height}x{width}")
    rng = make_rng(seed)
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)
    u, v = rows / max(height - 1, 1), cols / max(width - 1, 1)

    image = 60.0 + 80.0 * u + 40.0 * v
    image += 20.0 * np.sin(2 * np.pi * (3 * u + 2 * v))

    for _ in range(3):
        top, left = rng.uniform(0.0, 0.7, size=2)
        size = rng.uniform(0.15, 0.3)
        level = rng.uniform(-50.0, 50.0)
        image[(u >= top) & (u < top + size) & (v >= left) & (v < left + size)] += level

    cy, cx, radius = rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.1, 0.2)
    image[(u - cy) ** 2 + (v - cx) ** 2 < radius ** 2] = 230.0

    return np.clip(image, 0.0, 255.0)
