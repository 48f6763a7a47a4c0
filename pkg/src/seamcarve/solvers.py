"""Minimum vertical seam search.

Four interchangeable backends share one calling convention: they take a
``(height, width)`` float energy map and return the seam as an int array of
column indices, top row first. Ties are always broken toward the smallest
column index, which makes every backend deterministic and lets the parallel
sweep reproduce the sequential table bit for bit.
"""

from __future__ import annotations

import enum
import os
import threading
from typing import NamedTuple

import numpy as np
from numba import njit

from .energy import ForwardCosts
from .errors import DimensionMismatch, EmptyImage, ImageTooLarge, InvalidSeam

DEFAULT_BRUTE_CAP = 16


class SolverKind(str, enum.Enum):
    BRUTE_FORCE = "bruteforce"
    GREEDY = "greedy"
    DYNAMIC = "dp"
    PARALLEL_DYNAMIC = "pardp"

    @classmethod
    def parse(cls, name: "str | SolverKind") -> "SolverKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(name)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown solver {name!r}; choose from {names}") from None


class CostTable(NamedTuple):
    """Accumulated minimum costs ``m`` and predecessor columns ``b``.

    ``b[0]`` is -1: the top row has no predecessor.
    """

    m: np.ndarray
    b: np.ndarray


def brute_force_cap() -> int:
    return int(os.environ.get("CARVE_BRUTE_CAP", DEFAULT_BRUTE_CAP))


def default_workers() -> int:
    env = os.environ.get("CARVE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def as_energy(energy) -> np.ndarray:
    e = np.asarray(energy, dtype=np.float64)
    if e.ndim != 2:
        raise DimensionMismatch(f"energy map must be 2-D, got shape {e.shape}")
    if e.shape[0] < 1 or e.shape[1] < 1:
        raise EmptyImage("energy map must be at least 1x1")
    return e


def validate_seam(seam, shape: tuple[int, int]) -> np.ndarray:
    """Return ``seam`` as an intp array, raising InvalidSeam if it cannot be a seam for ``shape``."""
    h, w = shape[:2]
    s = np.asarray(seam)
    if s.ndim != 1 or s.shape[0] != h:
        raise InvalidSeam(f"seam must have one column per row ({h}), got shape {s.shape}")
    if s.size and not np.issubdtype(s.dtype, np.integer):
        raise InvalidSeam("seam columns must be integers")
    s = s.astype(np.intp)
    if s.size and (s.min() < 0 or s.max() >= w):
        raise InvalidSeam(f"seam column out of range [0, {w})")
    if h > 1 and np.abs(np.diff(s)).max() > 1:
        raise InvalidSeam("seam is not connected (adjacent rows differ by more than one column)")
    return s


def seam_cost(energy, seam) -> float:
    """Sum of energy along ``seam``, accumulated top row first."""
    e = as_energy(energy)
    s = validate_seam(seam, e.shape)
    total = 0.0
    for i, j in enumerate(s.tolist()):
        total += float(e[i, j])
    return total


# -- brute force -------------------------------------------------------------


@njit(cache=True)
def _enumerate_seams(e):
    # Depth-first walk over every connected path, visiting column sequences in
    # lexicographic order; a strictly better total is required to replace the
    # incumbent, so the first of several equal-cost seams is kept.
    h, w = e.shape
    best = np.inf
    best_path = np.zeros(h, dtype=np.intp)
    path = np.zeros(h, dtype=np.intp)
    sums = np.zeros(h, dtype=np.float64)
    step = np.zeros(h, dtype=np.intp)
    for start in range(w):
        path[0] = start
        sums[0] = 0.0 + e[0, start]
        if h == 1:
            if sums[0] < best:
                best = sums[0]
                best_path[0] = start
            continue
        depth = 1
        step[1] = 0
        while depth > 0:
            if step[depth] == 3:
                depth -= 1
                if depth > 0:
                    step[depth] += 1
                continue
            col = path[depth - 1] - 1 + step[depth]
            if col < 0 or col >= w:
                step[depth] += 1
                continue
            path[depth] = col
            sums[depth] = sums[depth - 1] + e[depth, col]
            if depth == h - 1:
                if sums[depth] < best:
                    best = sums[depth]
                    best_path[:] = path
                step[depth] += 1
            else:
                depth += 1
                step[depth] = 0
    return best_path


def brute_force_seam(energy, cap: int | None = None) -> np.ndarray:
    """Exhaustively enumerate every connected seam; Theta(width * 3**height).

    No pruning or memoisation is done. ``cap`` (default from
    ``CARVE_BRUTE_CAP`` or 16) bounds the height that will be attempted.
    """
    e = as_energy(energy)
    limit = brute_force_cap() if cap is None else cap
    if e.shape[0] > limit:
        raise ImageTooLarge(f"height {e.shape[0]} exceeds brute-force cap {limit}")
    return _enumerate_seams(np.ascontiguousarray(e))


def warmup() -> None:
    """Trigger JIT compilation so the first timed call is not charged for it."""
    _enumerate_seams(np.zeros((2, 2)))


# -- greedy ------------------------------------------------------------------


def greedy_seam(energy) -> np.ndarray:
    """Start at the cheapest bottom pixel and repeatedly step to the cheapest neighbour above."""
    e = as_energy(energy)
    h, w = e.shape
    col = int(np.argmin(e[h - 1]))
    cols = [col]
    for i in range(h - 2, -1, -1):
        lo = col - 1 if col > 0 else 0
        window = e[i, lo:col + 2].tolist()
        best = 0
        for k in range(1, len(window)):
            if window[k] < window[best]:
                best = k
        col = lo + best
        cols.append(col)
    cols.reverse()
    return np.array(cols, dtype=np.intp)


# -- dynamic programming -----------------------------------------------------


def _backtrack(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    h = m.shape[0]
    seam = np.empty(h, dtype=np.intp)
    j = int(np.argmin(m[h - 1]))
    seam[h - 1] = j
    for i in range(h - 1, 0, -1):
        j = int(b[i, j])
        seam[i - 1] = j
    return seam


def _check_costs(costs: ForwardCosts, shape) -> None:
    for grid in costs:
        if np.shape(grid) != shape:
            raise DimensionMismatch(f"forward cost grid shape {np.shape(grid)} != energy shape {shape}")


def _sequential_rows(rows):
    h, w = len(rows), len(rows[0])
    m_rows = [list(rows[0])]
    b_rows = [[-1] * w]
    prev = m_rows[0]
    for i in range(1, h):
        er = rows[i]
        cur = [0.0] * w
        back = [0] * w
        if w == 1:
            cur[0] = er[0] + prev[0]
        else:
            if prev[1] < prev[0]:
                cur[0] = er[0] + prev[1]
                back[0] = 1
            else:
                cur[0] = er[0] + prev[0]
            for j in range(1, w - 1):
                a = prev[j - 1]
                u = prev[j]
                c = prev[j + 1]
                if u < a:
                    if c < u:
                        cur[j] = er[j] + c
                        back[j] = j + 1
                    else:
                        cur[j] = er[j] + u
                        back[j] = j
                elif c < a:
                    cur[j] = er[j] + c
                    back[j] = j + 1
                else:
                    cur[j] = er[j] + a
                    back[j] = j - 1
            j = w - 1
            if prev[j] < prev[j - 1]:
                cur[j] = er[j] + prev[j]
                back[j] = j
            else:
                cur[j] = er[j] + prev[j - 1]
                back[j] = j - 1
        m_rows.append(cur)
        b_rows.append(back)
        prev = cur
    return m_rows, b_rows


def _sequential_rows_forward(rows, cl, cu, cr):
    h, w = len(rows), len(rows[0])
    m_rows = [list(rows[0])]
    b_rows = [[-1] * w]
    prev = m_rows[0]
    for i in range(1, h):
        er, lrow, urow, rrow = rows[i], cl[i], cu[i], cr[i]
        cur = [0.0] * w
        back = [0] * w
        for j in range(w):
            best_k = j
            best = prev[j] + urow[j]
            if j > 0:
                v = prev[j - 1] + lrow[j]
                if v <= best:
                    best, best_k = v, j - 1
            if j < w - 1:
                v = prev[j + 1] + rrow[j]
                if v < best:
                    best, best_k = v, j + 1
            cur[j] = er[j] + best
            back[j] = best_k
        m_rows.append(cur)
        b_rows.append(back)
        prev = cur
    return m_rows, b_rows


def dp_seam(energy, costs: ForwardCosts | None = None) -> tuple[np.ndarray, CostTable]:
    """Fill the accumulated-cost table one cell at a time and backtrack from the bottom-row minimum.

    When ``costs`` is given, arriving at (i, j) from column j-1, j or j+1
    additionally charges ``costs.left``, ``costs.up`` or ``costs.right``.
    """
    e = as_energy(energy)
    if costs is None:
        m_rows, b_rows = _sequential_rows(e.tolist())
    else:
        _check_costs(costs, e.shape)
        m_rows, b_rows = _sequential_rows_forward(
            e.tolist(),
            np.asarray(costs.left, dtype=np.float64).tolist(),
            np.asarray(costs.up, dtype=np.float64).tolist(),
            np.asarray(costs.right, dtype=np.float64).tolist(),
        )
    table = CostTable(np.array(m_rows, dtype=np.float64), np.array(b_rows, dtype=np.intp))
    return _backtrack(table.m, table.b), table


def dp_seam_forward(energy, costs: ForwardCosts) -> tuple[np.ndarray, CostTable]:
    return dp_seam(energy, costs)


def _sweep_chunk(e, m, b, i, lo, hi, costs):
    # Row i, columns [lo, hi): read row i-1 only, write row i only.
    w = e.shape[1]
    prev = m[i - 1]
    inf = np.full(1, np.inf)
    up = prev[lo:hi]
    left = prev[lo - 1:hi - 1] if lo > 0 else np.concatenate((inf, prev[0:hi - 1]))
    right = prev[lo + 1:hi + 1] if hi < w else np.concatenate((prev[lo + 1:w], inf))
    if costs is not None:
        left = left + costs.left[i, lo:hi]
        up = up + costs.up[i, lo:hi]
        right = right + costs.right[i, lo:hi]
    cand = np.stack((left, up, right))
    k = np.argmin(cand, axis=0)
    best = np.take_along_axis(cand, k[np.newaxis], axis=0)[0]
    m[i, lo:hi] = e[i, lo:hi] + best
    b[i, lo:hi] = np.arange(lo - 1, hi - 1) + k


def parallel_dp_seam(
    energy, costs: ForwardCosts | None = None, workers: int | None = None
) -> tuple[np.ndarray, CostTable]:
    """Row-synchronous data-parallel fill of the same table :func:`dp_seam` builds.

    Each row is split into ``workers`` contiguous column blocks; every worker
    updates its block from the previous row and then waits at a barrier
    before the next row starts. The result does not depend on ``workers``.
    """
    e = as_energy(energy)
    h, w = e.shape
    if costs is not None:
        _check_costs(costs, e.shape)
        costs = ForwardCosts(*(np.asarray(c, dtype=np.float64) for c in costs))
    n_workers = max(1, min(default_workers() if workers is None else int(workers), w))
    m = np.empty((h, w), dtype=np.float64)
    b = np.empty((h, w), dtype=np.intp)
    m[0] = e[0]
    b[0] = -1
    edges = np.linspace(0, w, n_workers + 1).round().astype(int)
    blocks = [(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]

    if len(blocks) == 1:
        for i in range(1, h):
            _sweep_chunk(e, m, b, i, 0, w, costs)
    else:
        barrier = threading.Barrier(len(blocks))
        failures: list[BaseException] = []

        def run(lo: int, hi: int) -> None:
            try:
                for i in range(1, h):
                    _sweep_chunk(e, m, b, i, lo, hi, costs)
                    barrier.wait()
            except threading.BrokenBarrierError:
                pass
            except BaseException as exc:
                failures.append(exc)
                barrier.abort()

        threads = [threading.Thread(target=run, args=blk, daemon=True) for blk in blocks]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if failures:
            raise failures[0]

    table = CostTable(m, b)
    return _backtrack(m, b), table


def find_seam(
    energy,
    kind: SolverKind | str = SolverKind.PARALLEL_DYNAMIC,
    costs: ForwardCosts | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Dispatch to the backend named by ``kind`` and return only the seam."""
    kind = SolverKind.parse(kind)
    if costs is not None and kind not in (SolverKind.DYNAMIC, SolverKind.PARALLEL_DYNAMIC):
        raise ValueError(f"forward costs require a dynamic-programming solver, not {kind.value}")
    if kind is SolverKind.BRUTE_FORCE:
        return brute_force_seam(energy)
    if kind is SolverKind.GREEDY:
        return greedy_seam(energy)
    if kind is SolverKind.DYNAMIC:
        return dp_seam(energy, costs)[0]
    return parallel_dp_seam(energy, costs, workers)[0]
