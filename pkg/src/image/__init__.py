# Image Package
from .transform import dct2, idct2, sparsify_top_s
from .pgm import read_pgm, write_pgm, read_matrix_csv, write_matrix_csv, synthetic_pattern
from .pipeline import psnr, reconstruct_image, pad_to_blocks, split_blocks, merge_blocks

__all__ = [
    "dct2",
    "idct2",
    "sparsify_top_s",
    "read_pgm",
    "write_pgm",
    "read_matrix_csv",
    "write_matrix_csv",
    "synthetic_pattern",
    "psnr",
    "reconstruct_image",
    "pad_to_blocks",
    "split_blocks",
    "merge_blocks",
]
