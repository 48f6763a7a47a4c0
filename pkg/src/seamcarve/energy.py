"""Per-pixel energy maps and the transforms applied to them.

Every stencil reads neighbours with clamped indices (edge replication), so
maps keep the image's shape. First derivatives are the unhalved central
difference ``f(x+1) - f(x-1)``; second derivatives are
``f(x+1) - 2 f(x) + f(x-1)``.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import raster
from .errors import DimensionMismatch, EmptyImage

HOG_WINDOW = 11
HOG_BINS = 8
HOG_EPS = 1e-6
ENTROPY_WINDOW = 9
ENTROPY_BINS = 16
MASK_SCALE = 1000.0


class ForwardCosts(NamedTuple):
    """Transition costs for arriving at (i, j) from the upper-left, above, upper-right."""

    left: np.ndarray
    up: np.ndarray
    right: np.ndarray


def _as_luma(gray) -> np.ndarray:
    arr = np.asarray(gray, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D luma grid, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyImage("luma grid must be at least 1x1")
    return arr


def _first_diffs(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.pad(g, 1, mode="edge")
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    return dx, dy


def _box_sum(a: np.ndarray, size: int) -> np.ndarray:
    """Sum over a ``size x size`` window centred on each cell, borders clamped."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"window size must be a positive odd number, got {size}")
    r = size // 2
    p = np.pad(a, r, mode="edge")
    rows = sliding_window_view(p, size, axis=0).sum(axis=-1)
    return sliding_window_view(rows, size, axis=1).sum(axis=-1)


def energy_e1(gray) -> np.ndarray:
    """Sum of absolute x and y derivatives; values lie in [0, 510]."""
    g = _as_luma(gray)
    dx, dy = _first_diffs(g)
    return np.abs(dx) + np.abs(dy)


def energy_e2(gray) -> np.ndarray:
    """e1 plus the absolute second derivatives in x and y."""
    g = _as_luma(gray)
    p = np.pad(g, 1, mode="edge")
    dxx = p[1:-1, 2:] - 2.0 * g + p[1:-1, :-2]
    dyy = p[2:, 1:-1] - 2.0 * g + p[:-2, 1:-1]
    return energy_e1(g) + np.abs(dxx) + np.abs(dyy)


def orientation_bins(dx: np.ndarray, dy: np.ndarray, bins: int = HOG_BINS) -> np.ndarray:
    """Map gradient directions in [0, 2*pi) to ``bins`` equal sectors."""
    angle = np.mod(np.arctan2(dy, dx), 2.0 * np.pi)
    idx = np.floor(angle / (2.0 * np.pi / bins)).astype(np.intp)
    return np.minimum(idx, bins - 1)


def energy_hog(gray, window: int = HOG_WINDOW, bins: int = HOG_BINS, eps: float = HOG_EPS) -> np.ndarray:
    """e1 divided by the largest bin of the local histogram of oriented gradients.

    Each pixel votes its Euclidean gradient magnitude into one of ``bins``
    direction sectors; the histogram is taken over a ``window x window``
    clamped neighbourhood. The denominator is floored at ``eps``.
    """
    g = _as_luma(gray)
    dx, dy = _first_diffs(g)
    magnitude = np.hypot(dx, dy)
    sector = orientation_bins(dx, dy, bins)
    peak = np.zeros_like(g)
    for b in range(bins):
        np.maximum(peak, _box_sum(np.where(sector == b, magnitude, 0.0), window), out=peak)
    return (np.abs(dx) + np.abs(dy)) / np.maximum(peak, eps)


def intensity_bins(g: np.ndarray, bins: int = ENTROPY_BINS) -> np.ndarray:
    idx = np.floor(g * (bins / 256.0)).astype(np.intp)
    return np.clip(idx, 0, bins - 1)


def histogram_entropy(counts, axis: int = 0) -> np.ndarray:
    """Base-2 Shannon entropy of histogram ``counts`` along ``axis`` (0 log 0 = 0)."""
    c = np.asarray(counts, dtype=np.float64)
    p = c / c.sum(axis=axis, keepdims=True)
    terms = np.where(c > 0, p * np.log2(np.where(c > 0, p, 1.0)), 0.0)
    # + 0.0 turns the -0.0 of single-bin histograms into 0.0
    return -terms.sum(axis=axis) + 0.0


def local_entropy(gray, window: int = ENTROPY_WINDOW, bins: int = ENTROPY_BINS) -> np.ndarray:
    """Entropy of the intensity histogram in each clamped ``window x window`` neighbourhood."""
    g = _as_luma(gray)
    level = intensity_bins(g, bins)
    counts = np.stack([_box_sum((level == b).astype(np.int64), window) for b in range(bins)])
    return histogram_entropy(counts)


def energy_entropy(gray, window: int = ENTROPY_WINDOW, bins: int = ENTROPY_BINS) -> np.ndarray:
    """e1 plus windowed intensity entropy."""
    g = _as_luma(gray)
    return energy_e1(g) + local_entropy(g, window, bins)


def forward_costs(gray) -> ForwardCosts:
    """Cost of the new neighbour pairs a seam creates when it passes through (i, j)."""
    g = _as_luma(gray)
    p = np.pad(g, 1, mode="edge")
    left = p[1:-1, :-2]
    right = p[1:-1, 2:]
    above = p[:-2, 1:-1]
    up = np.abs(right - left)
    return ForwardCosts(
        left=up + np.abs(above - left),
        up=up,
        right=up + np.abs(above - right),
    )


def mask_penalty(energy, mask) -> float:
    """Magnitude K written into masked cells by :func:`apply_mask`."""
    e = np.asarray(energy, dtype=np.float64)
    m = np.asarray(mask, dtype=bool)
    unmasked = e[~m]
    ref = unmasked.max() if unmasked.size else e.max()
    return MASK_SCALE * (e.shape[0] * max(float(ref), 0.0) + 1.0)


def apply_mask(energy, mask) -> np.ndarray:
    """Return a copy of ``energy`` with masked cells set to ``-K``.

    ``K = 1000 * (height * max_unmasked + 1)`` exceeds the energy of any
    full-height seam over unmasked cells, so a seam touching the mask
    always beats one that avoids it.
    """
    e = np.asarray(energy, dtype=np.float64)
    m = np.asarray(mask, dtype=bool)
    if e.shape != m.shape:
        raise DimensionMismatch(f"mask shape {m.shape} does not match energy shape {e.shape}")
    out = e.copy()
    if m.any():
        out[m] = -mask_penalty(e, m)
    return out


ENERGY_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "e1": energy_e1,
    "e2": energy_e2,
    "hog": energy_hog,
    "entropy": energy_entropy,
}


def energy_function(name: str) -> Callable[[np.ndarray], np.ndarray]:
    try:
        return ENERGY_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown energy function {name!r}; choose from {sorted(ENERGY_FUNCTIONS)}") from None


def compute_energy(grid, name: str = "e1") -> np.ndarray:
    return energy_function(name)(raster.to_grayscale(grid))


def normalize(energy) -> np.ndarray:
    """Min-max scale an energy map to uint8; a flat map becomes all zeros."""
    e = np.asarray(energy, dtype=np.float64)
    lo, hi = float(e.min()), float(e.max())
    if hi <= lo:
        return np.zeros(e.shape, dtype=np.uint8)
    return np.round((e - lo) * (255.0 / (hi - lo))).astype(np.uint8)


def save_energy_png(energy, path) -> None:
    raster.save_gray(normalize(energy), path)


def load_mask(path, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read a removal mask: pixels with luminance >= 128 are marked."""
    mask = raster.load_gray(path) >= 128
    if shape is not None and mask.shape != tuple(shape):
        raise DimensionMismatch(f"mask is {mask.shape[1]}x{mask.shape[0]}, image is {shape[1]}x{shape[0]}")
    return mask
