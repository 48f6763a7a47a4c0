"""Raster I/O and basic pixel-grid transforms.

A pixel grid is an ``(height, width, 3)`` ``uint8`` array; a luma grid is a
``(height, width)`` ``float64`` array with values in ``[0, 255]``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import CorruptImage, DimensionMismatch, EmptyImage, UnsupportedFormat

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
PPM_MAGIC = b"P6"

_SUFFIX_FORMATS = {".png": "PNG", ".ppm": "PPM", ".pnm": "PPM"}


def as_pixel_grid(grid) -> np.ndarray:
    """Validate and return ``grid`` as a contiguous ``(h, w, 3)`` uint8 array."""
    arr = np.asarray(grid)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionMismatch(f"expected (height, width, 3) pixels, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyImage("pixel grid must be at least 1x1")
    if arr.dtype != np.uint8:
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def _sniff(path: Path) -> str:
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head.startswith(PNG_MAGIC):
        return "PNG"
    if head.startswith(PPM_MAGIC):
        return "PPM"
    raise UnsupportedFormat(f"{path}: not a PNG or binary PPM (P6) file")


def load_image(path) -> np.ndarray:
    """Decode a PNG or P6 PPM file into a pixel grid, dropping any alpha channel."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    fmt = _sniff(path)
    try:
        with Image.open(path, formats=[fmt]) as im:
            im.load()
            rgb = im.convert("RGB")
            arr = np.array(rgb, dtype=np.uint8)
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptImage(f"{path}: {exc}") from exc
    return as_pixel_grid(arr)


def save_image(grid, path) -> None:
    """Write ``grid`` losslessly; the format follows the file suffix (.png, .ppm)."""
    path = Path(path)
    fmt = _SUFFIX_FORMATS.get(path.suffix.lower())
    if fmt is None:
        raise UnsupportedFormat(f"{path}: output must end in .png or .ppm")
    if not path.parent.is_dir():
        raise FileNotFoundError(f"directory does not exist: {path.parent}")
    arr = as_pixel_grid(grid)
    Image.fromarray(arr, mode="RGB").save(path, format=fmt)


def save_gray(values, path) -> None:
    """Write a 2-D uint8 array as an 8-bit grayscale PNG."""
    path = Path(path)
    if not path.parent.is_dir():
        raise FileNotFoundError(f"directory does not exist: {path.parent}")
    arr = np.ascontiguousarray(values, dtype=np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def load_gray(path) -> np.ndarray:
    """Decode a PNG or PPM file to a 2-D uint8 luminance array."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    fmt = _sniff(path)
    try:
        with Image.open(path, formats=[fmt]) as im:
            im.load()
            arr = np.array(im.convert("L"), dtype=np.uint8)
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptImage(f"{path}: {exc}") from exc
    return arr


def to_grayscale(grid) -> np.ndarray:
    """BT.601 luma: ``0.299 R + 0.587 G + 0.114 B``.

    Computed in integer thousandths and divided once, so gray pixels map
    back to exactly their channel value.
    """
    arr = as_pixel_grid(grid).astype(np.int64)
    weighted = 299 * arr[..., 0] + 587 * arr[..., 1] + 114 * arr[..., 2]
    return weighted / 1000.0


def transpose(grid) -> np.ndarray:
    """Swap rows and columns; works for pixel grids and 2-D maps alike."""
    arr = np.asarray(grid)
    axes = (1, 0, 2) if arr.ndim == 3 else (1, 0)
    return np.ascontiguousarray(arr.transpose(axes))

