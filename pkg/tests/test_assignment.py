import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from safeherd.assignment import (
    AssignmentProblem,
    PathEstimate,
    build_problem,
    objective,
    overlap_length,
    polyline_length,
    shortest_path,
    solve_assignment,
)
from safeherd.geometry import GeometryError, Obstacle, Vec2, point_segment_distance
from oracles import brute_force_assignment, grid_astar_length

DISC = Obstacle(Vec2(0, 0), 1.0)


def test_straight_path():
    p = shortest_path(Vec2(0, 0), Vec2(3, 4), [], 1.0)
    assert p.length == 5.0 and p.travel_time == 5.0


def test_tangent_arc_path():
    p = shortest_path(Vec2(-2, 0), Vec2(2, 0), [DISC], 2.0)
    exact = 2 * math.sqrt(3) + math.pi / 3
    assert p.length == pytest.approx(exact, rel=1e-4)
    assert p.length >= exact - 1e-12
    assert p.travel_time == pytest.approx(p.length / 2.0)
    grid = grid_astar_length((-2, 0), (2, 0), [((0, 0), 1.0)])
    assert abs(grid - exact) / exact < 0.01


def test_far_obstacle_is_ignored():
    p = shortest_path(Vec2(0, 0), Vec2(3, 0), [Obstacle(Vec2(1, 5), 1.0)], 1.0)
    assert p.polyline == (Vec2(0, 0), Vec2(3, 0))


def test_goal_inside_obstacle():
    with pytest.raises(GeometryError):
        shortest_path(Vec2(-3, 0), Vec2(0.2, 0), [DISC], 1.0)


def test_two_obstacle_chain_against_grid():
    obs = [Obstacle(Vec2(0, 0), 1.0), Obstacle(Vec2(3, 0.6), 0.8)]
    p = shortest_path(Vec2(-2.5, 0.2), Vec2(5.5, 0.3), obs, 1.0)
    grid = grid_astar_length((-2.5, 0.2), (5.5, 0.3), [((0, 0), 1.0), ((3, 0.6), 0.8)])
    assert p.length <= grid + 1e-9
    assert (grid - p.length) / p.length < 0.01


discs = st.lists(
    st.tuples(st.floats(-4, 4), st.floats(-4, 4), st.floats(0.2, 1.2)), min_size=0, max_size=3
)


@given(discs, st.floats(-6, 6), st.floats(-6, 6), st.floats(-6, 6), st.floats(-6, 6))
def test_path_invariants(ds, sx, sy, gx, gy):
    obs = [Obstacle(Vec2(x, y), r) for x, y, r in ds]
    s, g = Vec2(sx, sy), Vec2(gx, gy)
    if any(s.dist(o.center) <= o.radius + 1e-6 or g.dist(o.center) <= o.radius + 1e-6 for o in obs):
        return
    try:
        p = shortest_path(s, g, obs, 1.0)
    except GeometryError:
        return  # overlapping discs can seal the goal off
    assert p.length == pytest.approx(polyline_length(p.polyline), abs=1e-9)
    assert p.length >= s.dist(g) - 1e-12
    for a, b in zip(p.polyline, p.polyline[1:]):
        for o in obs:
            assert point_segment_distance(o.center, a, b) >= o.radius - 1e-7
    straight_clear = all(point_segment_distance(o.center, s, g) >= o.radius for o in obs)
    if straight_clear:
        assert p.length == pytest.approx(s.dist(g))


def _seg(a, b):
    return PathEstimate((a, b), a.dist(b), a.dist(b))


def test_overlap_examples():
    p = _seg(Vec2(0, 0), Vec2(10, 0))
    assert overlap_length(p, p, 0.5) == pytest.approx(10.0)
    assert overlap_length(p, _seg(Vec2(0, 5), Vec2(10, 5)), 0.5) == 0.0
    cross = _seg(Vec2(5, -5), Vec2(5, 5))
    assert abs(overlap_length(p, cross, 0.5) - 1.0) <= 0.05 + 1e-9


def test_solver_examples():
    pr = AssignmentProblem(np.array([[1.0, 9.0], [9.0, 1.0]]), np.zeros((2, 2, 2, 2)))
    a = solve_assignment(pr)
    assert a.perm == (0, 1) and a.objective == 2.0
    s = np.zeros((2, 2, 2, 2))
    s[0, 0, 1, 1] = 10.0
    pr = AssignmentProblem(np.full((2, 2), 5.0), s)
    a = solve_assignment(pr)
    assert a.perm == (1, 0) and a.objective == 10.0


def test_solver_rejects_bad_shapes():
    with pytest.raises(ValueError):
        AssignmentProblem(np.zeros((2, 3)), np.zeros((2, 2, 2, 2)))
    with pytest.raises(ValueError):
        AssignmentProblem(np.zeros((2, 2)), np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        solve_assignment(AssignmentProblem(np.zeros((13, 13)), np.zeros((13,) * 4)), mode="exact")


def random_problem(rng: random.Random, n: int, integer: bool = True) -> AssignmentProblem:
    draw = (lambda: float(rng.randint(0, 20))) if integer else (lambda: rng.uniform(0, 20))
    t = np.array([[draw() for _ in range(n)] for _ in range(n)])
    s = np.zeros((n, n, n, n))
    for i, k in itertools.combinations(range(n), 2):
        for j in range(n):
            for l in range(n):
                if j != l:
                    s[i, j, k, l] = s[k, l, i, j] = draw() if rng.random() < 0.5 else 0.0
    return AssignmentProblem(t, s, 1.0)


def test_exact_matches_brute_force():
    rng = random.Random(2024)
    for trial in range(60):
        n = 2 + trial % 5
        pr = random_problem(rng, n)
        best, best_perm = brute_force_assignment(pr.travel_times.tolist(), pr.overlaps.tolist())
        a = solve_assignment(pr)
        assert a.objective == best
        assert a.perm == best_perm  # both enumerate lexicographically, first optimum wins


def test_exact_is_optimal_over_all_permutations():
    rng = random.Random(99)
    for n in (3, 4, 5):
        pr = random_problem(rng, n, integer=False)
        a = solve_assignment(pr)
        assert sorted(a.perm) == list(range(n))
        for perm in itertools.permutations(range(n)):
            assert a.objective <= objective(pr, perm) + 1e-12


def test_relabelling_defenders_keeps_optimum():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(2, 6)
        pr = random_problem(rng, n)
        rename = list(range(n))
        rng.shuffle(rename)
        t = pr.travel_times[rename]
        s = pr.overlaps[np.ix_(rename, range(n), rename, range(n))]
        s = s.copy()
        # keep the i < k half consistent after renaming by symmetrizing
        s = np.maximum(s, s.transpose(2, 3, 0, 1))
        pr2 = AssignmentProblem(t, s, 1.0)
        base = AssignmentProblem(pr.travel_times, np.maximum(pr.overlaps, pr.overlaps.transpose(2, 3, 0, 1)), 1.0)
        assert solve_assignment(pr2).objective == solve_assignment(base).objective


def test_heuristic_returns_valid_permutation():
    rng = random.Random(8)
    pr = random_problem(rng, 14)
    a = solve_assignment(pr)
    assert sorted(a.perm) == list(range(14))
    assert a.objective == pytest.approx(objective(pr, a.perm))
    small = random_problem(rng, 5)
    h = solve_assignment(small, mode="heuristic")
    assert h.objective >= solve_assignment(small).objective


def test_build_problem_costs():
    starts = [Vec2(-3, 0), Vec2(3, 0)]
    slots = [Vec2(3, 1), Vec2(-3, 1)]
    pr, paths = build_problem(starts, slots, [Obstacle(Vec2(0, 0.5), 0.6)], 3.0)
    assert pr.travel_times[0, 0] == pytest.approx(paths[0][0].length / 3.0)
    assert pr.overlaps[0, 0, 1, 1] == pr.overlaps[1, 1, 0, 0] > 0.0
    assert solve_assignment(pr).perm == (1, 0)
