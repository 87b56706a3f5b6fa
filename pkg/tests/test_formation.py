import math
import random

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from safeherd.formation import (
    FormationInfeasible,
    PursuitCircle,
    compute_eps_b,
    compute_eps_d,
    critical_profile,
    critical_vertical_distance,
    design_formation,
    layout,
    pc_update,
    point_in_fence,
)
from safeherd.geometry import GeometryError, Vec2, los_geometry
from safeherd.reach_avoid import conditions, judgment
from oracles import grid_min

LAM3 = 2 * math.pi / 3


def test_pc_update_examples():
    pc = PursuitCircle(Vec2(0, 0), 0.5)
    assert pc_update(pc, Vec2(0.2, 0)) is None
    new = pc_update(pc, Vec2(0.5, 0))
    assert new == PursuitCircle(Vec2(0.5, 0), 0.5, 1)
    assert pc_update(pc, Vec2(0.51, 0)).center == Vec2(0.51, 0)


def test_eps_d_examples():
    eps_d = compute_eps_d(3, 0.5, 2.0, 0.65)
    assert eps_d == pytest.approx(1 / math.sqrt(0.5775), abs=1e-12)
    assert eps_d == pytest.approx(1.31590, abs=1e-5)
    assert math.sqrt(3) * eps_d == pytest.approx(2.279, abs=1e-3)
    assert compute_eps_d(8, 0.5, 2.0, 0.65) == pytest.approx(1.25121, abs=1e-5)
    for n in (3, 8):
        assert compute_eps_d(n, 0.5, 2.0, 1e-9) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("args", [(2, 0.5, 2, 0.65), (3, 0.5, 1.0, 0.65), (3, 0.5, 2, 1.0), (3, 0.0, 2, 0.5)])
def test_eps_d_rejects_bad_input(args):
    with pytest.raises(ValueError):
        compute_eps_d(*args)


@pytest.mark.parametrize("n", range(3, 13))
def test_eps_d_branch_continuity(n):
    half = math.pi / n
    a = math.sin(half)
    below = compute_eps_d(n, 0.5, 2.0, a * (1 - 1e-12))
    above = compute_eps_d(n, 0.5, 2.0, min(a * (1 + 1e-12), 0.999999))
    assert abs(below - above) < 1e-9


def test_critical_distance_table_values():
    eps_d = compute_eps_d(3, 0.5, 2.0, 0.65)
    chi = (0.25 + (1 - 0.65**2) * eps_d**2) / (2 * 0.5 * eps_d)
    assert chi == pytest.approx(0.94992, abs=1e-5)
    l_min, eta = critical_vertical_distance(0.5, eps_d, 0.65, LAM3)
    # brute-force argmin of the profile
    etas = np.linspace(0.0, LAM3 / 2, 2_000_001)
    prof = (eps_d - 0.5 * np.cos(etas) - 0.65 * np.sqrt(0.25 + eps_d**2 - eps_d * np.cos(etas))) / (1 - 0.65**2)
    assert eta == pytest.approx(etas[prof.argmin()], abs=1e-6)
    assert eta == pytest.approx(math.acos(chi), abs=1e-15)
    # the commonly quoted 0.31735 is acos(0.94992) mis-evaluated; 0.31782 is correct
    assert abs(eta - 0.31735) < 1e-3
    assert critical_profile(0.0, 0.5, eps_d, 0.65) == pytest.approx(0.49449, abs=1e-5)
    assert critical_profile(eta, 0.5, eps_d, 0.65) == pytest.approx(0.49347, abs=1e-5)
    assert critical_profile(LAM3 / 2, 0.5, eps_d, 0.65) == pytest.approx(0.55079, abs=1e-5)
    assert l_min == pytest.approx(0.49347, abs=1e-5)


def test_critical_profile_point_circle_limit():
    for eta in (0.0, 0.4, 1.0):
        assert critical_profile(eta, 1e-12, 1.3, 0.65) == pytest.approx(1.3 / 1.65, abs=1e-9)


@given(
    st.integers(3, 12),
    st.floats(0.1, 2.0),
    st.floats(1.1, 3.0),
    st.floats(0.05, 0.95),
)
def test_critical_distance_matches_grid(n, eps_p, k_p, a):
    lam = 2 * math.pi / n
    eps_d = compute_eps_d(n, eps_p, k_p, a)
    l_min, _ = critical_vertical_distance(eps_p, eps_d, a, lam)
    rho = lambda e: np.sqrt(eps_p**2 + eps_d**2 - 2 * eps_p * eps_d * np.cos(e))  # noqa: E731
    f = lambda e: (eps_d - eps_p * np.cos(e) - a * rho(e)) / (1 - a * a)  # noqa: E731
    assert abs(grid_min(f, 0.0, lam / 2) - l_min) < 1e-6


def test_eps_b_examples():
    eps_d = compute_eps_d(3, 0.5, 2.0, 0.65)
    l_min, _ = critical_vertical_distance(0.5, eps_d, 0.65, LAM3)
    eps_b = compute_eps_b(eps_d, l_min, LAM3)
    assert eps_b == pytest.approx(1.64486, abs=1e-4)
    assert eps_b * math.cos(LAM3 / 2) == pytest.approx(0.82243, abs=1e-4)
    assert compute_eps_b(1.3, 0.0, LAM3) == pytest.approx(1.3 / math.cos(LAM3 / 2))
    assert compute_eps_b(1.3, 0.4, 1e-9) == pytest.approx(0.9)
    with pytest.raises(FormationInfeasible):
        compute_eps_b(0.4, 0.4, LAM3)


def test_design_formation_table_values():
    f = design_formation(3, 0.5, 2.0, 0.65)
    assert f.eps_d == pytest.approx(1.315903, abs=1e-6)
    assert f.l_xi_min == pytest.approx(0.493464, abs=1e-6)
    assert f.eps_b == pytest.approx(1.644879, abs=1e-6)
    assert f.eps_d > f.k_p * f.eps_p
    assert f.apothem > f.eps_p
    assert f.defender_line_distance == pytest.approx(f.l_xi_min)
    # the literal reading puts the fence inside the pursuit circle
    assert f.eps_b_literal * math.cos(f.lam / 2) < f.eps_p


@given(st.integers(3, 10), st.floats(0.2, 1.0), st.floats(1.2, 3.0), st.floats(0.1, 0.9))
def test_apothem_exceeds_pursuit_radius_when_feasible(n, eps_p, k_p, a):
    try:
        f = design_formation(n, eps_p, k_p, a)
    except FormationInfeasible:
        assume(False)
    assert f.apothem > f.eps_p


def test_layout_examples():
    f = design_formation(3, 0.5, 2.0, 0.65)
    unit = type(f)(**{**f.__dict__, "eps_d": 1.0, "eps_b": 1.0})
    lay = layout(Vec2(0, 0), unit)
    assert lay.defender_targets[0].x == pytest.approx(0.5) and lay.defender_targets[0].y == pytest.approx(math.sqrt(3) / 2)
    assert lay.beacon_targets[0] == Vec2(1.0, 0.0)


@given(st.integers(3, 8), st.floats(-20, 20), st.floats(-20, 20))
def test_layout_translation_and_bisectors(n, tx, ty):
    f = design_formation(n, 0.5, 2.0, 0.65)
    a = layout(Vec2(0, 0), f)
    b = layout(Vec2(tx, ty), f)
    for p, q in zip(a.defender_targets + a.beacon_targets, b.defender_targets + b.beacon_targets):
        assert (p + Vec2(tx, ty)).dist(q) < 1e-9
    for i in range(n):
        bi, bn = a.beacon_targets[i], a.beacon_targets[(i + 1) % n]
        d = a.defender_targets[i]
        assert abs(d.dist(bi) - d.dist(bn)) < 1e-9
        g = los_geometry(Vec2(0, 0), d, bi, bn)
        assert g.l_d == pytest.approx(f.l_xi_min, abs=1e-9)


def test_point_in_fence():
    f = design_formation(3, 0.5, 2.0, 0.65)
    lay = layout(Vec2(2, 3), f)
    fence = lay.beacon_targets
    assert point_in_fence(Vec2(2, 3), fence)
    assert not point_in_fence(fence[0], fence)
    rng = random.Random(7)
    n = len(fence)
    for _ in range(10_000):
        p = Vec2(rng.uniform(0, 4), rng.uniform(1, 5))
        # half-plane oracle via the outward edge normals and the apothem
        inside = all(
            (p - Vec2(2, 3)).dot(Vec2.polar(1.0, (i + 0.5) * f.lam)) < f.apothem - 1e-12 for i in range(n)
        )
        on_edge = any(
            abs((p - Vec2(2, 3)).dot(Vec2.polar(1.0, (i + 0.5) * f.lam)) - f.apothem) < 1e-9 for i in range(n)
        )
        if not on_edge:
            assert point_in_fence(p, fence) == inside
    with pytest.raises(GeometryError):
        point_in_fence(Vec2(0, 0), fence[::-1])


def _sector(theta: float, lam: float, n: int) -> int:
    return int(math.floor((theta % (2 * math.pi)) / lam)) % n


SWEEP = [(n, a / 10, kp) for n in range(3, 9) for a in range(3, 10) for kp in (1.5, 2.0)]


@pytest.mark.parametrize("n, a, kp", SWEEP)
def test_synthesized_formation_sound_per_sector(n, a, kp):
    """Guarantee the synthesis actually provides.

    The angular band holds against the extended pursuit circle; the distance
    condition (J >= 0) holds for an attacker anywhere on the pursuit circle
    against the defender of the sector it occupies.
    """
    f = design_formation(n, 0.5, kp, a)
    lay = layout(Vec2(0, 0), f)
    band = math.acos(a)
    for k in range(360):
        th = 2 * math.pi * (k + 0.5) / 360
        i = _sector(th, f.lam, n)
        bi, bn, d = lay.beacon_targets[i], lay.beacon_targets[(i + 1) % n], lay.defender_targets[i]
        g = los_geometry(Vec2.polar(kp * 0.5, th), d, bi, bn)
        assert abs(g.phi - math.pi / 2) <= band + 1e-12
        for j in range(n):
            g = los_geometry(Vec2.polar(0.5, th), lay.defender_targets[j], lay.beacon_targets[j], lay.beacon_targets[(j + 1) % n])
            assert conditions(g.l_a, g.l_d, g.phi, a)[0]
        g = los_geometry(Vec2.polar(0.5, th), d, bi, bn)
        assert judgment(g.l_a, g.l_d, g.phi, a) >= -1e-9
