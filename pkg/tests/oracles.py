"""Independent reference computations used by several test modules.

Each oracle works from raw positions or brute force and never calls the
closed-form routine it checks.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def line_config(l_a, l_d, phi):
    """Attacker above and defender below the x axis with the given LOS angle.

    Returns arrays ``(ax, ay, dx, dy)``; the LOS from defender to attacker
    makes angle ``phi`` with the +x direction of the line.
    """
    l_a, l_d, phi = map(np.asarray, (l_a, l_d, phi))
    dx = np.zeros_like(l_a, dtype=float)
    ax = dx + (l_a + l_d) / np.tan(phi)
    return ax, l_a + 0.0 * ax, dx, -l_d + 0.0 * ax


def disc_line_gap(l_a, l_d, phi, alpha):
    """min over the x axis of |p - A|^2 - alpha^2 |p - D|^2.

    Negative means some point of the line is reached by the attacker
    strictly first, i.e. the Apollonius disc crosses the line.
    """
    ax, ay, dx, dy = line_config(l_a, l_d, phi)
    k = 1.0 - alpha**2
    x = (ax - alpha**2 * dx) / k
    return (x - ax) ** 2 + ay**2 - alpha**2 * ((x - dx) ** 2 + dy**2)


def grid_min(f, lo, hi, n=10_000):
    xs = np.linspace(lo, hi, n)
    return float(np.min(f(xs)))


def brute_force_assignment(T, S, w=1.0):
    """Enumerate every permutation directly against the raw objective."""
    n = len(T)
    best, best_perm = math.inf, None
    for perm in itertools.permutations(range(n)):
        val = sum(T[i][perm[i]] for i in range(n))
        val += w * sum(S[i][perm[i]][k][perm[k]] for i in range(n) for k in range(i + 1, n))
        if val < best:
            best, best_perm = val, perm
    return best, best_perm


def grid_astar_length(start, goal, discs, h=0.05, reach=6, pad=1.5):
    """Grid shortest path with long moves, every edge checked exactly against the discs.

    Moves go to all coprime offsets within ``reach`` cells, so direction
    quantization adds well under 1% to the length.  Every accepted edge is a
    genuinely collision-free segment, hence the result is an upper bound.
    """
    import heapq

    xs = [start[0], goal[0]] + [c[0] for c, _ in discs]
    ys = [start[1], goal[1]] + [c[1] for c, _ in discs]
    x0, y0 = min(xs) - pad, min(ys) - pad
    nx = int((max(xs) + pad - x0) / h) + 1
    ny = int((max(ys) + pad - y0) / h) + 1

    def pt(c):
        return (x0 + h * c[0], y0 + h * c[1])

    def seg_clear(a, b):
        ax, ay = a
        dx, dy = b[0] - ax, b[1] - ay
        ll = dx * dx + dy * dy
        for (cx, cy), r in discs:
            t = 0.0 if ll == 0 else max(0.0, min(1.0, ((cx - ax) * dx + (cy - ay) * dy) / ll))
            if math.hypot(ax + t * dx - cx, ay + t * dy - cy) < r:
                return False
        return True

    s = (round((start[0] - x0) / h), round((start[1] - y0) / h))
    g = (round((goal[0] - x0) / h), round((goal[1] - y0) / h))
    moves = [
        (dx, dy, math.hypot(dx, dy) * h)
        for dx in range(-reach, reach + 1)
        for dy in range(-reach, reach + 1)
        if (dx or dy) and math.gcd(dx, dy) == 1
    ]
    # snap error from endpoints to the lattice
    extra = math.dist(start, pt(s)) + math.dist(goal, pt(g))
    dist = {s: 0.0}
    heap = [(0.0, 0.0, s)]
    while heap:
        _, d, u = heapq.heappop(heap)
        if u == g:
            return d + extra
        if d > dist[u]:
            continue
        pu = pt(u)
        for dx, dy, w in moves:
            v = (u[0] + dx, u[1] + dy)
            if not (0 <= v[0] < nx and 0 <= v[1] < ny):
                continue
            nd = d + w
            if nd < dist.get(v, math.inf) and seg_clear(pu, pt(v)):
                dist[v] = nd
                heur = h * math.hypot(v[0] - g[0], v[1] - g[1])
                heapq.heappush(heap, (nd + heur, nd, v))
    return math.inf
