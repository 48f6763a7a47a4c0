"""Runtime-scaling benchmarks for the seam solvers.

Two phases are timed: ``single_seam`` (one solver call on a precomputed
energy map) and ``full_carve`` (carving to ``round(scale * width)`` columns,
energy and removal included). Each measurement is the minimum over a number
of repetitions, taken with the garbage collector paused.
"""

from __future__ import annotations

import csv
import enum
import gc
import logging
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, NamedTuple
from xml.sax.saxutils import escape

import numpy as np
from PIL import Image

from . import energy as energy_mod
from .carver import CarveConfig, carve_to_width
from .errors import EmptyInput, InsufficientData, SizeExceedsSource, SolverCapViolated
from .raster import as_pixel_grid, to_grayscale
from .solvers import SolverKind, brute_force_cap, find_seam, warmup

log = logging.getLogger(__name__)

FAST_SIZES = (180, 360, 480, 720, 1080)
BRUTE_SIZES = (2, 5, 7, 10, 12)
FAST_SOLVERS = (SolverKind.GREEDY, SolverKind.DYNAMIC, SolverKind.PARALLEL_DYNAMIC)
DEFAULT_SCALE = 0.5

CSV_HEADER = ["solver", "energy_fn", "n", "phase", "scale", "wall_time_s", "repetitions", "timestamp_utc"]


class Phase(str, enum.Enum):
    SINGLE_SEAM = "single_seam"
    FULL_CARVE = "full_carve"


def _now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class BenchRecord:
    solver: SolverKind
    energy_fn: str
    n: int
    phase: Phase
    scale: float | None
    wall_time: float
    repetitions: int
    timestamp: datetime = field(default_factory=_now)

    def __post_init__(self):
        object.__setattr__(self, "solver", SolverKind.parse(self.solver))
        object.__setattr__(self, "phase", Phase(self.phase))
        if not self.wall_time > 0:
            raise ValueError(f"wall_time must be positive, got {self.wall_time}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


class ScalingFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


def _quantize(seconds: float) -> float:
    # CSV carries microseconds; keep records exactly representable there
    return max(round(seconds, 6), 1e-6)


def _min_time(fn, reps: int) -> float:
    best = math.inf
    for _ in range(reps):
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        finally:
            if was_enabled:
                gc.enable()
    return best


def make_test_image(size: int = 1080, seed: int = 0) -> np.ndarray:
    """Deterministic benchmark image: colour gradients, a few hard-edged shapes and noise."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    img = np.stack((60 + 150 * x, 70 + 120 * y, 210 - 90 * (x + y)), axis=-1)
    disks = ((0.3, 0.35, 0.12, (230, 200, 40)), (0.7, 0.6, 0.18, (30, 90, 160)), (0.45, 0.8, 0.08, (200, 40, 60)))
    for cy, cx, r, color in disks:
        img[(y - cy) ** 2 + (x - cx) ** 2 <= r * r] = color
    img[(np.abs(y - 0.55) < 0.04) & (x > 0.1) & (x < 0.55)] = (20, 20, 20)
    img[np.abs((x - y) - 0.25) < 0.015] = (250, 250, 250)
    img += rng.normal(0.0, 4.0, img.shape)
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def square_image(source, n: int, mode: str = "auto") -> np.ndarray:
    """An ``n x n`` version of ``source``: centre crop if it fits, else bilinear resize.

    ``mode`` is ``auto``, ``crop`` (fail if the crop is impossible) or ``resize``.
    """
    src = as_pixel_grid(source)
    h, w = src.shape[:2]
    fits = h >= n and w >= n
    if mode == "crop" and not fits:
        raise SizeExceedsSource(f"cannot crop {n}x{n} from a {w}x{h} image")
    if fits and mode in ("auto", "crop"):
        top, left = (h - n) // 2, (w - n) // 2
        return src[top:top + n, left:left + n].copy()
    resized = Image.fromarray(src, mode="RGB").resize((n, n), Image.BILINEAR)
    return np.array(resized, dtype=np.uint8)


def time_single_seam(grid, cfg: CarveConfig, reps: int = 3) -> BenchRecord:
    """Time one seam search; energy (and forward costs) are computed beforehand."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    img = as_pixel_grid(grid)
    gray = to_grayscale(img)
    e = energy_mod.energy_function(cfg.energy_fn)(gray)
    costs = energy_mod.forward_costs(gray) if cfg.forward else None
    if cfg.solver is SolverKind.BRUTE_FORCE:
        warmup()
    wall = _min_time(lambda: find_seam(e, cfg.solver, costs, cfg.workers), reps)
    return BenchRecord(cfg.solver, cfg.energy_fn, img.shape[0], Phase.SINGLE_SEAM, None, _quantize(wall), reps)


def time_full_carve(grid, scale: float, cfg: CarveConfig, reps: int = 1) -> BenchRecord:
    """Time ``carve_to_width`` down to ``round(scale * width)`` columns end to end."""
    if not 0 < scale <= 1:
        raise ValueError(f"scale must be in (0, 1], got {scale}")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    img = as_pixel_grid(grid)
    target = max(1, round(scale * img.shape[1]))
    if cfg.solver is SolverKind.BRUTE_FORCE:
        warmup()
    wall = _min_time(lambda: carve_to_width(img, target, cfg), reps)
    return BenchRecord(cfg.solver, cfg.energy_fn, img.shape[0], Phase.FULL_CARVE, scale, _quantize(wall), reps)


def run_suite(
    sizes: Iterable[int],
    solvers: Iterable[SolverKind | str],
    scale: float = DEFAULT_SCALE,
    source=None,
    reps: int = 1,
    energy_fn: str = "e1",
    resample: str = "auto",
) -> list[BenchRecord]:
    """Both phases for every (size, solver) pair, sizes in the order given."""
    sizes = [int(n) for n in sizes]
    kinds = [SolverKind.parse(s) for s in solvers]
    if not kinds or not sizes:
        return []
    cap = brute_force_cap()
    if SolverKind.BRUTE_FORCE in kinds and max(sizes) > cap:
        raise SolverCapViolated(f"brute force limited to sizes <= {cap}; requested {max(sizes)}")
    if source is None:
        source = make_test_image(max(sizes))
    records = []
    for n in sizes:
        img = square_image(source, n, resample)
        for kind in kinds:
            cfg = CarveConfig(solver=kind, energy_fn=energy_fn)
            for rec in (time_single_seam(img, cfg, reps), time_full_carve(img, scale, cfg, reps)):
                log.info("%s n=%d %s %.6fs", rec.solver.value, rec.n, rec.phase.value, rec.wall_time)
                records.append(rec)
    return records


def fit_scaling(records: Iterable[BenchRecord], solver: SolverKind | str, phase: Phase | str) -> ScalingFit:
    """Least-squares line through (ln n, ln wall_time)."""
    kind, ph = SolverKind.parse(solver), Phase(phase)
    pts = [(r.n, r.wall_time) for r in records if r.solver is kind and r.phase is ph]
    if len({n for n, _ in pts}) < 3:
        raise InsufficientData(f"need records at 3 or more distinct sizes for {kind.value}/{ph.value}")
    x = np.log([n for n, _ in pts])
    y = np.log([t for _, t in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(intercept), r2)


def exp_growth_ratio(records: Iterable[BenchRecord]) -> float:
    """Per-row branching factor implied by brute-force single-seam times.

    Geometric mean over consecutive sizes of ``(t2 / t1) ** (1 / (n2 - n1))``.
    """
    by_n: dict[int, float] = {}
    for r in records:
        if r.solver is SolverKind.BRUTE_FORCE and r.phase is Phase.SINGLE_SEAM:
            by_n[r.n] = min(r.wall_time, by_n.get(r.n, math.inf))
    ns = sorted(by_n)
    if len(ns) < 2:
        raise InsufficientData("need brute-force single-seam records at 2 or more sizes")
    logs = [math.log(by_n[b] / by_n[a]) / (b - a) for a, b in zip(ns, ns[1:])]
    return math.exp(sum(logs) / len(logs))


def emit_csv(records: Iterable[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.solver.value,
                r.energy_fn,
                r.n,
                r.phase.value,
                "" if r.phase is Phase.SINGLE_SEAM or r.scale is None else repr(float(r.scale)),
                f"{r.wall_time:.6f}",
                r.repetitions,
                r.timestamp.astimezone(timezone.utc).isoformat(timespec="microseconds"),
            ])


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def emit_plot(records: Iterable[BenchRecord], path, title: str = "seam carving runtime") -> None:
    """Write a standalone log-log SVG line chart, one polyline per (solver, phase)."""
    records = list(records)
    if not records:
        raise EmptyInput("no records to plot")
    series: dict[tuple[str, str], list[tuple[int, float]]] = defaultdict(list)
    for r in records:
        series[(r.solver.value, r.phase.value)].append((r.n, r.wall_time))

    width, height = 720, 480
    left, right, top, bottom = 80, 200, 40, 60
    lx = [math.log10(r.n) for r in records]
    ly = [math.log10(r.wall_time) for r in records]
    x0, x1 = math.floor(min(lx)), max(math.ceil(max(lx)), math.floor(min(lx)) + 1)
    y0, y1 = math.floor(min(ly)), max(math.ceil(max(ly)), math.floor(min(ly)) + 1)

    def px(v: float) -> float:
        return left + (v - x0) / (x1 - x0) * (width - left - right)

    def py(v: float) -> float:
        return height - bottom - (v - y0) / (y1 - y0) * (height - top - bottom)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for d in range(x0, x1 + 1):
        out.append(f'<line x1="{px(d):.1f}" y1="{py(y0):.1f}" x2="{px(d):.1f}" y2="{py(y1):.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{px(d):.1f}" y="{py(y0) + 18:.1f}" text-anchor="middle">1e{d}</text>')
    for d in range(y0, y1 + 1):
        out.append(f'<line x1="{px(x0):.1f}" y1="{py(d):.1f}" x2="{px(x1):.1f}" y2="{py(d):.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{px(x0) - 8:.1f}" y="{py(d) + 4:.1f}" text-anchor="end">1e{d}</text>')
    out.append(
        f'<text x="{(px(x0) + px(x1)) / 2:.1f}" y="{height - 15}" text-anchor="middle">image side n (pixels, log scale)</text>'
    )
    out.append(
        f'<text x="20" y="{(py(y0) + py(y1)) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {(py(y0) + py(y1)) / 2:.1f})">wall time (s, log scale)</text>'
    )
    for idx, ((solver, phase), pts) in enumerate(sorted(series.items())):
        color = _PALETTE[idx % len(_PALETTE)]
        pts.sort()
        coords = " ".join(f"{px(math.log10(n)):.1f},{py(math.log10(t)):.1f}" for n, t in pts)
        label = escape(f"{solver} {phase}")
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"><title>{label}</title></polyline>')
        for n, t in pts:
            out.append(f'<circle cx="{px(math.log10(n)):.1f}" cy="{py(math.log10(t)):.1f}" r="3" fill="{color}"/>')
        ly_ = top + 10 + 18 * idx
        out.append(f'<line x1="{width - right + 15}" y1="{ly_}" x2="{width - right + 40}" y2="{ly_}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{width - right + 46}" y="{ly_ + 4}">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
