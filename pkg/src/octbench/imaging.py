"""Grayscale image loading and canonical 224x224 geometry.

Images are plain 2-D float64 arrays with intensities in [0, 1]. The
canonical form used by every feature extractor is a square target x target
image produced by aspect-preserving rescale plus centered zero padding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, InvalidDimensionError

TARGET_SIDE = 224

# ITU-R 601 luma weights for RGB -> gray
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class CanonicalImage:
    """A target x target grayscale image with zero padding around the content.

    content_rect is (x, y, w, h) of the non-padding region; every pixel
    outside it is exactly 0.0.
    """

    pixels: np.ndarray
    content_rect: tuple[int, int, int, int]

    @property
    def side(self) -> int:
        return self.pixels.shape[0]


def load_image(path) -> np.ndarray:
    """Load a PNG or JPEG as a (H, W) float64 array in [0, 1].

    Multi-channel sources are reduced to one channel with the ITU-R 601
    luma combination (0.299 R + 0.587 G + 0.114 B). 8-bit sources are
    divided by 255, 16-bit grayscale by 65535.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "L":
                return np.asarray(im, dtype=np.float64) / 255.0
            if im.mode in ("I", "I;16"):
                return np.asarray(im, dtype=np.float64) / 65535.0
            rgb = im if im.mode == "RGB" else im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.float64) / 255.0
            return arr @ _LUMA
    except UnidentifiedImageError as exc:
        raise DecodeError(f"{path}: not a decodable image ({exc})") from exc
    except (OSError, SyntaxError) as exc:
        if isinstance(exc, FileNotFoundError):
            raise
        raise DecodeError(f"{path}: {exc}") from exc


def save_png(pixels: np.ndarray, path) -> None:
    """Write a [0, 1] grayscale array as an 8-bit PNG (format forced to PNG
    regardless of the path suffix)."""
    data = np.clip(np.rint(np.asarray(pixels) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path, format="PNG")


def bilinear_sample(img: np.ndarray, sy, sx) -> np.ndarray:
    """Sample img at real-valued (row, col) coordinates with bilinear
    interpolation and replicate padding outside the image.

    The two-stage lerp form keeps constant regions bit-exact.
    """
    h, w = img.shape
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    ty = sy - y0
    tx = sx - x0
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    v00 = img[y0c, x0c]
    v01 = img[y0c, x1c]
    v10 = img[y1c, x0c]
    v11 = img[y1c, x1c]
    top = v00 + tx * (v01 - v00)
    bot = v10 + tx * (v11 - v10)
    return top + ty * (bot - top)


def resize_bilinear(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Classic bilinear resize with half-pixel-center alignment.

    Resizing to the input size is an exact identity.
    """
    in_h, in_w = img.shape
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    return bilinear_sample(img, ys[:, None], xs[None, :])


def _round_half_away(x: float) -> int:
    # round-to-nearest with ties away from zero (x is always positive here)
    return int(math.floor(x + 0.5))


def rescale_pad(img: np.ndarray, target: int = TARGET_SIDE) -> CanonicalImage:
    """Rescale so the longer dimension equals target (aspect preserved,
    bilinear resampling) and center the result in a target x target zero
    canvas.

    The shorter dimension rounds to nearest (ties away from zero); an odd
    padding amount puts the extra pixel on the bottom/right.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise InvalidDimensionError(f"expected a 2-D image, got shape {img.shape}")
    h, w = img.shape
    if h < 1 or w < 1:
        raise InvalidDimensionError(f"zero-sized image: {w}x{h}")

    scale = target / max(w, h)
    if w >= h:
        out_w = target
        out_h = max(1, _round_half_away(scale * h))
    else:
        out_h = target
        out_w = max(1, _round_half_away(scale * w))

    content = resize_bilinear(img, out_h, out_w)
    canvas = np.zeros((target, target), dtype=np.float64)
    off_y = (target - out_h) // 2
    off_x = (target - out_w) // 2
    canvas[off_y:off_y + out_h, off_x:off_x + out_w] = content
    return CanonicalImage(pixels=canvas, content_rect=(off_x, off_y, out_w, out_h))


def as_pixels(img) -> np.ndarray:
    """Accept either a CanonicalImage or a bare 2-D array."""
    if isinstance(img, CanonicalImage):
        return img.pixels
    return np.asarray(img, dtype=np.float64)
