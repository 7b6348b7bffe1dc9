"""Histogram of Oriented Gradients (Dalal-Triggs style).

Pipeline: centered-difference gradients with replicate edges, unsigned
orientations in [0, 180), per-cell histograms with magnitude-weighted
votes split linearly between the two nearest bins, overlapping blocks of
cells normalized with L2-Hys, concatenated row-major.

With the default settings (8 orientations, 16x16 cells, 2x2 blocks,
stride 1) a 224x224 image yields 13 * 13 * 2 * 2 * 8 = 5408 components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .imaging import as_pixels

L2HYS_EPS = 1e-5
L2HYS_CLIP = 0.2


@dataclass(frozen=True)
class HogParams:
    orientations: int = 8
    cell_size: int = 16
    block_size: int = 2
    block_stride: int = 1

    def __post_init__(self):
        if self.orientations < 1 or self.cell_size < 1:
            raise ValueError("orientations and cell_size must be >= 1")
        if self.block_size < 1 or self.block_stride < 1:
            raise ValueError("block_size and block_stride must be >= 1")

    def output_dim(self, width: int, height: int) -> int:
        cells_x = width // self.cell_size
        cells_y = height // self.cell_size
        bx = (cells_x - self.block_size) // self.block_stride + 1
        by = (cells_y - self.block_size) // self.block_stride + 1
        return bx * by * self.block_size ** 2 * self.orientations


def gradients(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered differences [-1, 0, 1] along x and y with replicate edges."""
    padx = np.pad(pixels, ((0, 0), (1, 1)), mode="edge")
    pady = np.pad(pixels, ((1, 1), (0, 0)), mode="edge")
    gx = padx[:, 2:] - padx[:, :-2]
    gy = pady[2:, :] - pady[:-2, :]
    return gx, gy


def cell_histograms(pixels: np.ndarray, orientations: int, cell_size: int) -> np.ndarray:
    """Per-cell orientation histograms, shape (cells_y, cells_x, orientations).

    Each pixel votes its gradient magnitude, split linearly between the two
    nearest bins; bin centers sit at k * 180/orientations degrees and wrap
    circularly (0 and 180 coincide for unsigned gradients).
    """
    h, w = pixels.shape
    cells_y, cells_x = h // cell_size, w // cell_size
    gx, gy = gradients(pixels)
    mag = np.hypot(gx, gy)
    ang = np.degrees(np.arctan2(gy, gx)) % 180.0

    bin_width = 180.0 / orientations
    pos = ang / bin_width
    b0 = np.floor(pos).astype(np.int64) % orientations
    frac = pos - np.floor(pos)
    b1 = (b0 + 1) % orientations

    rows, cols = np.indices((h, w))
    cell_idx = (rows // cell_size) * cells_x + (cols // cell_size)
    n_bins = cells_y * cells_x * orientations
    hist = np.bincount((cell_idx * orientations + b0).ravel(),
                       weights=(mag * (1.0 - frac)).ravel(), minlength=n_bins)
    hist += np.bincount((cell_idx * orientations + b1).ravel(),
                        weights=(mag * frac).ravel(), minlength=n_bins)
    return hist.reshape(cells_y, cells_x, orientations)


def l2hys(v: np.ndarray) -> np.ndarray:
    """L2-normalize, clip at 0.2, renormalize; zero blocks stay zero."""
    v = v / np.sqrt(v @ v + L2HYS_EPS)
    v = np.minimum(v, L2HYS_CLIP)
    return v / np.sqrt(v @ v + L2HYS_EPS)


def hog_extract(img, params: HogParams = HogParams()) -> np.ndarray:
    """Extract the HOG descriptor of a grayscale image.

    The image sides must be divisible by the cell size and large enough to
    hold at least one block. Blocks are emitted row-major, cells within a
    block row-major, orientation bins ascending.
    """
    pixels = as_pixels(img)
    h, w = pixels.shape
    cs, bs, stride = params.cell_size, params.block_size, params.block_stride
    if h % cs != 0 or w % cs != 0:
        raise GeometryError(f"image {w}x{h} not divisible by cell size {cs}")
    cells_y, cells_x = h // cs, w // cs
    if cells_x < bs or cells_y < bs:
        raise GeometryError(
            f"cell grid {cells_x}x{cells_y} too small for {bs}x{bs} blocks")

    cells = cell_histograms(pixels, params.orientations, cs)
    blocks_y = (cells_y - bs) // stride + 1
    blocks_x = (cells_x - bs) // stride + 1
    out = np.empty(blocks_y * blocks_x * bs * bs * params.orientations)
    block_len = bs * bs * params.orientations
    i = 0
    for by in range(blocks_y):
        for bx in range(blocks_x):
            block = cells[by * stride:by * stride + bs,
                          bx * stride:bx * stride + bs, :].ravel()
            out[i:i + block_len] = l2hys(block)
            i += block_len
    return out
