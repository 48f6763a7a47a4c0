"""Seam removal and insertion pipelines.

All pipelines work on vertical seams; horizontal operations transpose the
image, run the vertical version, and transpose back.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import energy as energy_mod
from .errors import (
    DimensionMismatch,
    EmptyMask,
    InvalidConfig,
    InvalidTarget,
    TargetTooLarge,
    UnremovableMask,
    WidthTooSmall,
)
from .raster import as_pixel_grid, to_grayscale, transpose
from .solvers import SolverKind, find_seam, validate_seam

OVERLAY_COLOR = (255, 0, 0)


@dataclass(frozen=True)
class CarveConfig:
    solver: SolverKind = SolverKind.PARALLEL_DYNAMIC
    energy_fn: str = "e1"
    forward: bool = False
    recompute: bool = True
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "solver", SolverKind.parse(self.solver))
        energy_mod.energy_function(self.energy_fn)
        if self.forward and self.solver not in (SolverKind.DYNAMIC, SolverKind.PARALLEL_DYNAMIC):
            raise InvalidConfig("forward energy needs the dp or pardp solver")


class SeamTiming(NamedTuple):
    energy: float
    solve: float
    edit: float


@dataclass
class CarveReport:
    seams_removed: int = 0
    seams_inserted: int = 0
    per_seam_times: list[SeamTiming] = field(default_factory=list)
    total_time: float = 0.0
    # seams in the coordinates of the image they were removed from
    removed_seams: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def seams(self) -> int:
        return self.seams_removed + self.seams_inserted

    def extend(self, other: "CarveReport") -> None:
        self.seams_removed += other.seams_removed
        self.seams_inserted += other.seams_inserted
        self.per_seam_times.extend(other.per_seam_times)
        self.total_time += other.total_time
        self.removed_seams.extend(other.removed_seams)


def remove_seam(grid, seam) -> np.ndarray:
    """Delete one pixel per row, shifting everything right of it one column left.

    Works on pixel grids and on 2-D maps (masks, energies, index maps).
    """
    arr = np.asarray(grid)
    h, w = arr.shape[:2]
    s = validate_seam(seam, (h, w))
    if w < 2:
        raise WidthTooSmall("cannot remove a seam from a 1-pixel-wide image")
    keep = np.ones((h, w), dtype=bool)
    keep[np.arange(h), s] = False
    return arr[keep].reshape((h, w - 1) + arr.shape[2:])


def _insert_columns(arr: np.ndarray, cols: np.ndarray) -> np.ndarray:
    # New pixel goes right of cols[i]: rounded (half up) mean of cols[i] and
    # its right neighbour, or a copy of cols[i] at the right border.
    h, w = arr.shape[:2]
    rows = np.arange(h)
    a = arr[rows, cols].astype(np.int64)
    b = arr[rows, np.minimum(cols + 1, w - 1)].astype(np.int64)
    fresh = ((a + b + 1) // 2).astype(arr.dtype)
    pos = np.arange(w + 1)[np.newaxis, :]
    src = np.where(pos <= cols[:, np.newaxis], pos, pos - 1)
    out = arr[rows[:, np.newaxis], src]
    out[rows, cols + 1] = fresh
    return out


def insert_seam(grid, seam) -> np.ndarray:
    """Widen by one column, adding an averaged pixel just right of each seam pixel."""
    arr = as_pixel_grid(grid)
    s = validate_seam(seam, arr.shape)
    return _insert_columns(arr, s)


def _energy_of(img: np.ndarray, cfg: CarveConfig):
    gray = to_grayscale(img)
    e = energy_mod.energy_function(cfg.energy_fn)(gray)
    costs = energy_mod.forward_costs(gray) if cfg.forward else None
    return e, costs


class _Pass(NamedTuple):
    image: np.ndarray
    mask: np.ndarray | None
    originals: list[np.ndarray]
    report: CarveReport


def _removal_pass(img, cfg: CarveConfig, count: int | None = None, mask=None, track: bool = False) -> _Pass:
    """Remove ``count`` seams, or keep going until ``mask`` is empty when count is None."""
    start = time.perf_counter()
    report = CarveReport()
    h, w = img.shape[:2]
    index = np.tile(np.arange(w, dtype=np.intp), (h, 1)) if track else None
    originals: list[np.ndarray] = []
    carried = None
    if not cfg.recompute:
        carried = _energy_of(img, cfg)

    done = 0
    while (mask.any() if count is None else done < count):
        t0 = time.perf_counter()
        if carried is None:
            e, costs = _energy_of(img, cfg)
        else:
            e, costs = carried
        if mask is not None:
            e = energy_mod.apply_mask(e, mask)
        t1 = time.perf_counter()
        seam = find_seam(e, cfg.solver, costs, cfg.workers)
        t2 = time.perf_counter()
        img = remove_seam(img, seam)
        if mask is not None:
            mask = remove_seam(mask, seam)
        if index is not None:
            originals.append(index[np.arange(h), seam])
            index = remove_seam(index, seam)
        if carried is not None:
            e0, c0 = carried
            carried = (
                remove_seam(e0, seam),
                None if c0 is None else energy_mod.ForwardCosts(*(remove_seam(c, seam) for c in c0)),
            )
        t3 = time.perf_counter()
        report.per_seam_times.append(SeamTiming(t1 - t0, t2 - t1, t3 - t2))
        report.removed_seams.append(seam)
        done += 1
    report.seams_removed = done
    report.total_time = time.perf_counter() - start
    return _Pass(img, mask, originals, report)


def _config(cfg: CarveConfig | None) -> CarveConfig:
    return CarveConfig() if cfg is None else cfg


def carve_to_width(grid, target_width: int, cfg: CarveConfig | None = None) -> tuple[np.ndarray, CarveReport]:
    """Remove ``width - target_width`` minimum seams, recomputing energy each time."""
    img = as_pixel_grid(grid)
    w = img.shape[1]
    if not 1 <= target_width <= w:
        raise InvalidTarget(f"target width {target_width} must be in [1, {w}]")
    result = _removal_pass(img, _config(cfg), count=w - target_width)
    return result.image, result.report


def carve_to_height(grid, target_height: int, cfg: CarveConfig | None = None) -> tuple[np.ndarray, CarveReport]:
    img = as_pixel_grid(grid)
    if not 1 <= target_height <= img.shape[0]:
        raise InvalidTarget(f"target height {target_height} must be in [1, {img.shape[0]}]")
    out, report = carve_to_width(transpose(img), target_height, cfg)
    return transpose(out), report


def record_seams(grid, count: int, cfg: CarveConfig | None = None) -> tuple[list[np.ndarray], CarveReport]:
    """Run ``count`` removals on a scratch copy and return the seams in original coordinates.

    The returned seams are in removal order. They do not overlap, but a seam
    mapped back to the original image need not be connected.
    """
    img = as_pixel_grid(grid)
    w = img.shape[1]
    if not 0 <= count <= w - 1:
        raise InvalidTarget(f"can record between 0 and {w - 1} seams, not {count}")
    result = _removal_pass(img, _config(cfg), count=count, track=True)
    return result.originals, result.report


def enlarge_to_width(grid, target_width: int, cfg: CarveConfig | None = None) -> tuple[np.ndarray, CarveReport]:
    """Widen by inserting the seams a removal pass would have taken, in the order it took them."""
    img = as_pixel_grid(grid)
    w = img.shape[1]
    if target_width < w:
        raise InvalidTarget(f"target width {target_width} is smaller than the image width {w}")
    if target_width > 2 * w - 1:
        raise TargetTooLarge(f"one pass can widen a {w}-pixel image to at most {2 * w - 1}")
    k = target_width - w
    if k == 0:
        return img.copy(), CarveReport()

    start = time.perf_counter()
    pending, scan = record_seams(img, k, cfg)
    report = CarveReport()
    out = img
    for n, cols in enumerate(pending):
        t0 = time.perf_counter()
        out = _insert_columns(out, cols)
        for later in pending[n + 1:]:
            later[later >= cols + 1] += 1
        elapsed = time.perf_counter() - t0
        timing = scan.per_seam_times[n]
        report.per_seam_times.append(timing._replace(edit=timing.edit + elapsed))
    report.seams_inserted = k
    report.total_time = time.perf_counter() - start
    return out, report


def enlarge_to_height(grid, target_height: int, cfg: CarveConfig | None = None) -> tuple[np.ndarray, CarveReport]:
    out, report = enlarge_to_width(transpose(as_pixel_grid(grid)), target_height, cfg)
    return transpose(out), report


def resize(grid, width: int | None = None, height: int | None = None, cfg: CarveConfig | None = None):
    """Carve or enlarge to the requested width and/or height; width is handled first."""
    img = as_pixel_grid(grid)
    report = CarveReport()
    if width is not None and width != img.shape[1]:
        op = carve_to_width if width < img.shape[1] else enlarge_to_width
        img, r = op(img, width, cfg)
        report.extend(r)
    if height is not None and height != img.shape[0]:
        op = carve_to_height if height < img.shape[0] else enlarge_to_height
        img, r = op(img, height, cfg)
        report.extend(r)
    return img, report


def prefers_vertical_seams(mask) -> bool:
    """Vertical seams when the mask's bounding box is no wider than it is tall."""
    m = np.asarray(mask, dtype=bool)
    rows = np.flatnonzero(m.any(axis=1))
    cols = np.flatnonzero(m.any(axis=0))
    return (cols[-1] - cols[0] + 1) <= (rows[-1] - rows[0] + 1)


def seam_direction(mask) -> bool:
    """True for vertical seams. Follows the bounding-box rule unless that
    direction cannot clear the mask: a fully masked row defeats vertical
    seams, a fully masked column defeats horizontal ones.
    """
    m = np.asarray(mask, dtype=bool)
    vertical_ok = not m.all(axis=1).any()
    horizontal_ok = not m.all(axis=0).any()
    if not (vertical_ok or horizontal_ok):
        raise UnremovableMask("mask covers a full row and a full column")
    if vertical_ok and horizontal_ok:
        return prefers_vertical_seams(m)
    return vertical_ok


def remove_object(
    grid, mask, cfg: CarveConfig | None = None, restore: bool = True
) -> tuple[np.ndarray, CarveReport]:
    """Carve out every masked pixel, then (by default) re-enlarge to the input size."""
    img = as_pixel_grid(grid)
    m = np.asarray(mask, dtype=bool)
    if m.shape != img.shape[:2]:
        raise DimensionMismatch(f"mask shape {m.shape} does not match image shape {img.shape[:2]}")
    if not m.any():
        raise EmptyMask("mask marks no pixels")
    cfg = _config(cfg)
    vertical = seam_direction(m)
    if not vertical:
        img, m = transpose(img), transpose(m)

    target = img.shape[1]
    result = _removal_pass(img, cfg, mask=m)
    img, report = result.image, result.report
    if restore:
        # one enlargement pass can at most double the width less one
        while img.shape[1] < target:
            if img.shape[1] == 1:
                # nothing left to carve from: the border rule duplicates the column
                t0 = time.perf_counter()
                img = _insert_columns(img, np.zeros(img.shape[0], dtype=np.intp))
                report.seams_inserted += 1
                report.per_seam_times.append(SeamTiming(0.0, 0.0, time.perf_counter() - t0))
                continue
            step = min(target - img.shape[1], img.shape[1] - 1)
            img, r = enlarge_to_width(img, img.shape[1] + step, cfg)
            report.extend(r)

    if not vertical:
        img = transpose(img)
    return img, report


def draw_seams(grid, seams, color=OVERLAY_COLOR) -> np.ndarray:
    """Paint each seam (original coordinates) onto a copy of ``grid``."""
    out = as_pixel_grid(grid).copy()
    rows = np.arange(out.shape[0])
    for cols in seams:
        out[rows, np.asarray(cols)] = color
    return out
