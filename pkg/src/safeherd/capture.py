"""Capture-stage defender control: artificial potential fields toward formation slots."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .geometry import EPS, GeometryError, Obstacle, Vec2, ZERO, min_distance_to_obstacle, saturate

COINCIDENT_CAP = 1e3


@dataclass(frozen=True)
class CaptureGains:
    K_a: float = 1.0
    K_r: float = 2.0
    Gamma_cap: float = 8.0
    K_int: float = 1.0
    Gamma_int: float = 1.0

    def __post_init__(self) -> None:
        for name in ("K_a", "K_r", "Gamma_cap", "K_int", "Gamma_int"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def attractive_force(x: Vec2, target: Vec2, K_a: float) -> Vec2:
    return (target - x) * K_a


def repulsive_force(x: Vec2, obs: Obstacle, K_r: float, Gamma: float) -> Vec2:
    """Obstacle repulsion with support ``d < Gamma``, pushing away from the nearest boundary point."""
    d, p_min = min_distance_to_obstacle(x, obs)
    if d <= 0.0:
        raise GeometryError("point lies on or inside an obstacle")
    if d >= Gamma:
        return ZERO
    return (x - p_min) * (K_r * (1.0 / d - 1.0 / Gamma) / d**3)


def inter_defender_force(xi: Vec2, xj: Vec2, K_int: float, Gamma_int: float) -> Vec2:
    """Short-range exclusion between two defenders; odd in ``xi - xj``.

    Coincident or nearly coincident defenders get a force of magnitude at most
    ``COINCIDENT_CAP * K_int``.
    """
    off = xi - xj
    rho = off.norm()
    if rho >= Gamma_int:
        return ZERO
    cap = COINCIDENT_CAP * K_int
    if rho < EPS:
        return Vec2(cap, 0.0)
    f = off * (K_int * (1.0 / rho - 1.0 / Gamma_int))
    return saturate(f, cap)


def capture_force(
    x: Vec2, target: Vec2, obstacles: Sequence[Obstacle], peers: Sequence[Vec2], gains: CaptureGains
) -> Vec2:
    f = attractive_force(x, target, gains.K_a)
    for o in obstacles:
        f = f + repulsive_force(x, o, gains.K_r, gains.Gamma_cap)
    for p in peers:
        f = f + inter_defender_force(x, p, gains.K_int, gains.Gamma_int)
    return f


def capture_input(
    x: Vec2,
    target: Vec2,
    obstacles: Sequence[Obstacle],
    peers: Sequence[Vec2],
    gains: CaptureGains,
    V_max: float,
) -> Vec2:
    """Saturated capture command; ``peers`` excludes the defender itself."""
    return saturate(capture_force(x, target, obstacles, peers, gains), V_max)
