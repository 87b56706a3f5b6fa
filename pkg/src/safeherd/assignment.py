"""Slot assignment for the capture stage.

Each defender/slot pair gets a shortest path that wraps circular obstacles
tangentially.  The assignment minimizes total travel time plus a penalty for
pairs of chosen paths that run close together, which is a small quadratic
assignment problem solved exactly by depth-first branch and bound.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import EPS, GeometryError, Obstacle, Vec2, point_segment_distance

CLEAR_TOL = 1e-9
ARC_STEP = math.radians(2.0)
OVERLAP_STEP = 0.05
EXACT_LIMIT = 12


@dataclass(frozen=True)
class PathEstimate:
    polyline: tuple[Vec2, ...]
    length: float
    travel_time: float


def polyline_length(pts: Sequence[Vec2]) -> float:
    return sum(a.dist(b) for a, b in zip(pts, pts[1:]))


def _segment_clear(a: Vec2, b: Vec2, obstacles: Sequence[Obstacle]) -> bool:
    return all(point_segment_distance(o.center, a, b) >= o.radius - CLEAR_TOL for o in obstacles)


def _point_tangents(p: Vec2, o: Obstacle) -> list[Vec2]:
    off = p - o.center
    d = off.norm()
    if d <= o.radius + CLEAR_TOL:
        return [p]
    base = off.angle()
    half = math.acos(o.radius / d)
    return [o.center + Vec2.polar(o.radius, base + half), o.center + Vec2.polar(o.radius, base - half)]


def _bitangents(o1: Obstacle, o2: Obstacle) -> list[tuple[Vec2, Vec2]]:
    off = o2.center - o1.center
    d = off.norm()
    out = []
    if d <= abs(o1.radius - o2.radius) + EPS:
        return out
    theta = off.angle()
    g = math.acos((o1.radius - o2.radius) / d)
    for s in (1.0, -1.0):
        n = Vec2.polar(1.0, theta + s * g)
        out.append((o1.center + n * o1.radius, o2.center + n * o2.radius))
    if d > o1.radius + o2.radius + EPS:
        g = math.acos((o1.radius + o2.radius) / d)
        for s in (1.0, -1.0):
            n = Vec2.polar(1.0, theta + s * g)
            out.append((o1.center + n * o1.radius, o2.center - n * o2.radius))
    return out


def _arc_points(o: Obstacle, a0: float, sweep: float) -> list[Vec2]:
    """Interior vertices of a circumscribed polyline following an arc.

    Every segment is tangent to the circle, so the polyline never dips inside.
    """
    m = max(1, math.ceil(abs(sweep) / ARC_STEP))
    step = sweep / m
    r = o.radius / math.cos(step / 2)
    return [o.center + Vec2.polar(r, a0 + (k + 0.5) * step) for k in range(m)]


def shortest_path(start: Vec2, goal: Vec2, obstacles: Sequence[Obstacle], speed: float) -> PathEstimate:
    """Shortest tangent-segment/arc path around disc obstacles."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    for o in obstacles:
        if goal.dist(o.center) < o.radius - CLEAR_TOL:
            raise GeometryError("goal lies inside an obstacle")
        if start.dist(o.center) < o.radius - CLEAR_TOL:
            raise GeometryError("start lies inside an obstacle")
    if _segment_clear(start, goal, obstacles):
        return PathEstimate((start, goal), start.dist(goal), start.dist(goal) / speed)

    nodes: list[Vec2] = [start, goal]
    on_circle: list[int | None] = [None, None]
    edges: dict[int, list[tuple[int, float]]] = {}

    def add_node(p: Vec2, k: int | None) -> int:
        nodes.append(p)
        on_circle.append(k)
        return len(nodes) - 1

    def link(i: int, j: int) -> None:
        w = nodes[i].dist(nodes[j])
        edges.setdefault(i, []).append((j, w))
        edges.setdefault(j, []).append((i, w))

    for k, o in enumerate(obstacles):
        for src in (0, 1):
            for t in _point_tangents(nodes[src], o):
                idx = add_node(t, k)
                if _segment_clear(nodes[src], t, obstacles):
                    link(src, idx)
    for k1 in range(len(obstacles)):
        for k2 in range(k1 + 1, len(obstacles)):
            for p1, p2 in _bitangents(obstacles[k1], obstacles[k2]):
                if _segment_clear(p1, p2, obstacles):
                    link(add_node(p1, k1), add_node(p2, k2))

    arcs: dict[tuple[int, int], tuple[int, float, float]] = {}
    for k, o in enumerate(obstacles):
        members = sorted(
            (i for i, c in enumerate(on_circle) if c == k), key=lambda i: (nodes[i] - o.center).angle()
        )
        for a, b in zip(members, members[1:] + members[:1]):
            if a == b:
                continue
            a0 = (nodes[a] - o.center).angle()
            sweep = ((nodes[b] - o.center).angle() - a0) % (2 * math.pi)
            w = o.radius * sweep
            edges.setdefault(a, []).append((b, w))
            edges.setdefault(b, []).append((a, w))
            arcs[(a, b)] = (k, a0, sweep)
            arcs[(b, a)] = (k, a0 + sweep, -sweep)

    dist = {0: 0.0}
    prev: dict[int, int] = {}
    heap = [(0.0, 0)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == 1:
            break
        if d > dist.get(u, math.inf):
            continue
        for v, w in edges.get(u, ()):
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if 1 not in dist:
        raise GeometryError("goal unreachable around obstacles")

    chain = [1]
    while chain[-1] != 0:
        chain.append(prev[chain[-1]])
    chain.reverse()
    pts = [nodes[0]]
    for a, b in zip(chain, chain[1:]):
        if (a, b) in arcs:
            k, a0, sweep = arcs[(a, b)]
            pts.extend(_arc_points(obstacles[k], a0, sweep))
        pts.append(nodes[b])
    length = polyline_length(pts)
    return PathEstimate(tuple(pts), length, length / speed)


def _resample(path: PathEstimate, step: float) -> tuple[np.ndarray, float]:
    """Midpoint samples along the polyline, each standing for ``ds`` of length."""
    m = max(1, math.ceil(path.length / step))
    ds = path.length / m
    pts = np.array([tuple(p) for p in path.polyline])
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    s = (np.arange(m) + 0.5) * ds
    x = np.interp(s, cum, pts[:, 0])
    y = np.interp(s, cum, pts[:, 1])
    return np.column_stack([x, y]), ds


def _distance_to_polyline(q: np.ndarray, pts: Sequence[Vec2]) -> np.ndarray:
    p = np.array([tuple(v) for v in pts])
    if len(p) == 1:
        return np.hypot(q[:, 0] - p[0, 0], q[:, 1] - p[0, 1])
    a = p[:-1][None, :, :]
    d = (p[1:] - p[:-1])[None, :, :]
    dd = np.maximum((d**2).sum(-1), EPS * EPS)
    t = np.clip(((q[:, None, :] - a) * d).sum(-1) / dd, 0.0, 1.0)
    diff = q[:, None, :] - (a + t[..., None] * d)
    return np.sqrt((diff**2).sum(-1)).min(axis=1)


def overlap_length(p1: PathEstimate, p2: PathEstimate, clearance: float, step: float = OVERLAP_STEP) -> float:
    """Length of ``p1`` lying within ``clearance`` of ``p2``."""
    if p1.length <= 0.0:
        return 0.0
    q, ds = _resample(p1, step)
    near = _distance_to_polyline(q, p2.polyline) < clearance
    return float(near.sum()) * ds


@dataclass(frozen=True)
class AssignmentProblem:
    """``travel_times[i, j]``: defender ``i`` to slot ``j``.

    ``overlaps[i, j, k, l]``: shared length of paths ``i->j`` and ``k->l``.
    Only entries with ``i < k`` enter the objective.
    """

    travel_times: np.ndarray
    overlaps: np.ndarray
    overlap_weight: float = 1.0

    def __post_init__(self) -> None:
        t = np.asarray(self.travel_times, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("travel-time matrix must be square")
        n = t.shape[0]
        s = np.asarray(self.overlaps, dtype=float)
        if s.shape != (n, n, n, n):
            raise ValueError(f"overlap tensor must have shape {(n, n, n, n)}")
        object.__setattr__(self, "travel_times", t)
        object.__setattr__(self, "overlaps", s)

    @property
    def n(self) -> int:
        return self.travel_times.shape[0]


@dataclass(frozen=True)
class Assignment:
    perm: tuple[int, ...]
    objective: float


def objective(problem: AssignmentProblem, perm: Sequence[int]) -> float:
    t, s, w = problem.travel_times, problem.overlaps, problem.overlap_weight
    n = len(perm)
    total = sum(float(t[i, perm[i]]) for i in range(n))
    pen = 0.0
    for i in range(n):
        for k in range(i + 1, n):
            pen += float(s[i, perm[i], k, perm[k]])
    return total + w * pen


def _solve_exact(problem: AssignmentProblem) -> tuple[int, ...]:
    n = problem.n
    t, s, w = problem.travel_times, problem.overlaps, problem.overlap_weight
    prune = bool((s >= 0).all()) and w >= 0
    best_perm: tuple[int, ...] | None = None
    best = math.inf
    perm = [0] * n
    used = [False] * n

    def bound_rest(row: int) -> float:
        if not prune:
            return -math.inf
        free = [j for j in range(n) if not used[j]]
        return sum(min(t[i, j] for j in free) for i in range(row, n))

    def dfs(row: int, partial: float) -> None:
        nonlocal best, best_perm
        if row == n:
            val = objective(problem, perm)
            if val < best:
                best, best_perm = val, tuple(perm)
            return
        for j in range(n):
            if used[j]:
                continue
            inc = t[row, j] + w * sum(s[k, perm[k], row, j] for k in range(row))
            perm[row] = j
            used[j] = True
            nxt = partial + inc
            if not prune or nxt + bound_rest(row + 1) <= best * (1 + 1e-12) + 1e-12:
                dfs(row + 1, nxt)
            used[j] = False

    dfs(0, 0.0)
    assert best_perm is not None
    return best_perm


def _solve_heuristic(problem: AssignmentProblem) -> tuple[int, ...]:
    n = problem.n
    t, s, w = problem.travel_times, problem.overlaps, problem.overlap_weight
    perm: list[int] = []
    free = set(range(n))
    for i in range(n):
        j = min(sorted(free), key=lambda j: t[i, j] + w * sum(s[k, perm[k], i, j] for k in range(i)))
        perm.append(j)
        free.remove(j)
    best = objective(problem, perm)
    improved = True
    while improved:
        improved = False
        for a in range(n):
            for b in range(a + 1, n):
                perm[a], perm[b] = perm[b], perm[a]
                val = objective(problem, perm)
                if val < best:
                    best = val
                    improved = True
                else:
                    perm[a], perm[b] = perm[b], perm[a]
    return tuple(perm)


def solve_assignment(problem: AssignmentProblem, mode: str = "auto") -> Assignment:
    """Minimize travel time plus weighted path overlap over permutations.

    ``mode="exact"`` (default for ``n <= 12``) returns the lexicographically
    smallest optimal permutation; ``mode="heuristic"`` runs greedy insertion
    followed by pairwise-swap descent.
    """
    if mode == "auto":
        mode = "exact" if problem.n <= EXACT_LIMIT else "heuristic"
    if mode == "exact":
        if problem.n > EXACT_LIMIT:
            raise ValueError(f"exact mode supports n <= {EXACT_LIMIT}")
        perm = _solve_exact(problem)
    elif mode == "heuristic":
        perm = _solve_heuristic(problem)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return Assignment(perm, objective(problem, perm))


def build_problem(
    starts: Sequence[Vec2],
    slots: Sequence[Vec2],
    obstacles: Sequence[Obstacle],
    speed: float,
    clearance: float = 0.5,
    overlap_weight: float = 1.0,
) -> tuple[AssignmentProblem, list[list[PathEstimate]]]:
    n = len(starts)
    if len(slots) != n:
        raise ValueError("need as many slots as defenders")
    paths = [[shortest_path(starts[i], slots[j], obstacles, speed) for j in range(n)] for i in range(n)]
    t = np.array([[paths[i][j].travel_time for j in range(n)] for i in range(n)])
    s = np.zeros((n, n, n, n))
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(n):
                for l in range(n):
                    if j == l:
                        continue
                    v = 0.5 * (
                        overlap_length(paths[i][j], paths[k][l], clearance)
                        + overlap_length(paths[k][l], paths[i][j], clearance)
                    )
                    s[i, j, k, l] = s[k, l, i, j] = v
    return AssignmentProblem(t, s, overlap_weight), paths
