"""Plan-layer fence motion: a joint potential field moves all beacons together.

Each defender feels attraction to the target, repulsion from the protected
area and repulsion from nearby obstacles.  The leader sums these into one
force and every beacon moves with the same saturated velocity, so the fence
translates rigidly.  The saturation bound keeps the attacker-to-defender speed
ratio, seen in the moving fence frame, no worse than the design ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .capture import repulsive_force
from .geometry import EPS, Obstacle, Vec2, saturate

PROTECTED_CAP = 1e3


@dataclass(frozen=True)
class PlanGains:
    K_Ta: float = 0.05
    K_Pr: float = 5.0
    K_r: float = 2.0
    Gamma_ect: float = 8.0

    def __post_init__(self) -> None:
        for name in ("K_Ta", "K_Pr", "K_r", "Gamma_ect"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class BeaconCommand:
    v_Fc: Vec2
    bound: float


def protected_repulsion(x: Vec2, x_Pc: Vec2, K_Pr: float) -> Vec2:
    """Inverse-square push away from the protected-area center, capped near it."""
    off = x - x_Pc
    d = off.norm()
    cap = PROTECTED_CAP * K_Pr
    if d < EPS:
        return Vec2(cap, 0.0)
    return saturate(off * (K_Pr / d**4), cap)


def defender_plan_force(
    x: Vec2, x_Tc: Vec2, x_Pc: Vec2, obstacles: Sequence[Obstacle], gains: PlanGains
) -> Vec2:
    f = (x_Tc - x) * gains.K_Ta + protected_repulsion(x, x_Pc, gains.K_Pr)
    for o in obstacles:
        f = f + repulsive_force(x, o, gains.K_r, gains.Gamma_ect)
    return f


def joint_force(
    defenders: Sequence[Vec2], x_Tc: Vec2, x_Pc: Vec2, obstacles: Sequence[Obstacle], gains: PlanGains
) -> Vec2:
    if not defenders:
        raise ValueError("need at least one defender")
    fx = fy = 0.0
    for x in defenders:
        f = defender_plan_force(x, x_Tc, x_Pc, obstacles, gains)
        fx += f.x
        fy += f.y
    return Vec2(fx, fy)


def beacon_speed_bound(V_D_max: float, V_A_max: float, alpha_hat: float) -> float:
    """Largest common fence speed preserving the design speed ratio."""
    if not alpha_hat < 1.0:
        raise ValueError("alpha_hat must be below 1")
    if alpha_hat * V_D_max <= V_A_max:
        if alpha_hat * V_D_max == V_A_max:
            return 0.0
        raise ValueError(
            f"alpha_hat={alpha_hat} does not exceed V_A/V_D={V_A_max / V_D_max:.6g}; no feasible fence speed"
        )
    vb = min((alpha_hat * V_D_max - V_A_max) / (1.0 + alpha_hat), V_A_max)
    # at the closed-form bound the ratio equals alpha_hat; back off a few ulps
    # so the floating-point check holds in both division and product form
    while vb > 0.0 and not (
        (V_A_max + vb) / (V_D_max - vb) <= alpha_hat and ratio_holds(vb, V_D_max, V_A_max, alpha_hat)
    ):
        vb = math.nextafter(vb, 0.0)
    return vb


def beacon_velocity(force: Vec2, V_B_max: float) -> BeaconCommand:
    if V_B_max <= 0.0:
        return BeaconCommand(Vec2(0.0, 0.0), 0.0)
    return BeaconCommand(saturate(force, V_B_max), V_B_max)


def ratio_holds(v_fc_norm: float, V_D_max: float, V_A_max: float, alpha_hat: float) -> bool:
    """Fence-frame speed-ratio check, cross-multiplied to avoid a division."""
    return V_A_max + v_fc_norm <= alpha_hat * (V_D_max - v_fc_norm)
