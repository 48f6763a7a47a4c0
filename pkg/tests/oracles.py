"""Slow, obviously-correct reference computations used only by the tests.

Nothing here imports the package's numeric code; each helper re-derives its
answer from the definitions with plain loops.
"""

import math
from collections import Counter


def clamp(v, lo, hi):
    return max(lo, min(hi, v))


def at(g, i, j):
    h, w = len(g), len(g[0])
    return g[clamp(i, 0, h - 1)][clamp(j, 0, w - 1)]


def all_seams(h, w):
    """Every connected top-to-bottom column sequence, in lexicographic order."""
    out = []

    def walk(prefix):
        if len(prefix) == h:
            out.append(tuple(prefix))
            return
        last = prefix[-1]
        for c in (last - 1, last, last + 1):
            if 0 <= c < w:
                walk(prefix + [c])

    for start in range(w):
        walk([start])
    return out


def path_sum(e, seam):
    total = 0.0
    for i, j in enumerate(seam):
        total += float(e[i][j])
    return total


def best_seam(e):
    """(cost, seam) minimising total energy; lexicographically first on ties."""
    h, w = len(e), len(e[0])
    return min((path_sum(e, s), s) for s in all_seams(h, w))


def forward_path_cost(e, gray, seam):
    h = len(e)
    total = float(e[0][seam[0]])
    for i in range(1, h):
        j, k = seam[i], seam[i - 1]
        up = abs(at(gray, i, j + 1) - at(gray, i, j - 1))
        if k == j - 1:
            c = up + abs(at(gray, i - 1, j) - at(gray, i, j - 1))
        elif k == j:
            c = up
        else:
            c = up + abs(at(gray, i - 1, j) - at(gray, i, j + 1))
        total += e[i][j] + c
    return total


def e1(g):
    h, w = len(g), len(g[0])
    return [
        [abs(at(g, i, j + 1) - at(g, i, j - 1)) + abs(at(g, i + 1, j) - at(g, i - 1, j)) for j in range(w)]
        for i in range(h)
    ]


def hog_value(g, i, j, window=11, bins=8):
    h, w = len(g), len(g[0])
    r = window // 2
    hist = [0.0] * bins
    for di in range(-r, r + 1):
        for dj in range(-r, r + 1):
            y, x = clamp(i + di, 0, h - 1), clamp(j + dj, 0, w - 1)
            dx = at(g, y, x + 1) - at(g, y, x - 1)
            dy = at(g, y + 1, x) - at(g, y - 1, x)
            angle = math.atan2(dy, dx) % (2 * math.pi)
            b = min(int(angle // (2 * math.pi / bins)), bins - 1)
            hist[b] += math.hypot(dx, dy)
    return e1(g)[i][j] / max(max(hist), 1e-6)


def window_entropy(g, i, j, window=9, bins=16):
    h, w = len(g), len(g[0])
    r = window // 2
    counts = Counter()
    for di in range(-r, r + 1):
        for dj in range(-r, r + 1):
            v = g[clamp(i + di, 0, h - 1)][clamp(j + dj, 0, w - 1)]
            counts[min(int(v // (256 / bins)), bins - 1)] += 1
    n = window * window
    return -sum((c / n) * math.log2(c / n) for c in counts.values())
