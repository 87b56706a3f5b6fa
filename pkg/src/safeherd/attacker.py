"""Attacker behaviors.

Randomness comes from :class:`random.Random` (Mersenne Twister), seeded once
per run and owned by :class:`AttackerState`, so equal seeds give identical
headings on every platform.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .geometry import EPS, Obstacle, Vec2, ZERO, min_distance_to_obstacle, saturate

STRATEGIES = ("seeker", "evade_random", "scripted")


@dataclass(frozen=True)
class AttackerConfig:
    V_A_max: float = 1.2
    escape_range: float = 0.8
    rng_seed: int = 1
    resample_period: int = 20
    strategy: str = "evade_random"
    K_seek: float = 10.0
    K_evade: float = 1.0
    K_obs: float = 1.0
    obstacle_range: float = 1.0
    script: tuple[tuple[float, Vec2], ...] = ()

    def __post_init__(self) -> None:
        if not self.V_A_max > 0:
            raise ValueError("V_A_max must be positive")
        if not self.escape_range > 0:
            raise ValueError("escape range must be positive")
        if self.resample_period < 1:
            raise ValueError("resample period must be at least one step")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown attacker strategy {self.strategy!r}")
        for name in ("K_seek", "K_evade", "K_obs", "obstacle_range"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        times = [t for t, _ in self.script]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("script end times must be strictly increasing")


@dataclass
class AttackerState:
    rng: random.Random
    heading: float = 0.0
    steps_left: int = 0

    @classmethod
    def seeded(cls, seed: int) -> AttackerState:
        return cls(random.Random(seed))

    def snapshot(self) -> tuple:
        return (self.rng.getstate(), self.heading, self.steps_left)


def obstacle_push(x: Vec2, obstacles: Sequence[Obstacle], K: float, reach: float) -> Vec2:
    f = ZERO
    for o in obstacles:
        d, p = min_distance_to_obstacle(x, o)
        if 0.0 < d < reach:
            f = f + (x - p) * (K * (1.0 / d - 1.0 / reach) / d**2)
    return f


def evasion_push(x: Vec2, defenders: Sequence[Vec2], K: float, r_e: float) -> tuple[Vec2, bool]:
    """Inverse-square repulsion from defenders strictly within ``r_e``."""
    f = ZERO
    active = False
    for xd in defenders:
        off = x - xd
        d = off.norm()
        if d < r_e:
            active = True
            if d > EPS:
                f = f + off * (K / d**3)
            else:
                # coincident: flee along +x at the magnitude reached at d = EPS
                f = f + Vec2(K / EPS**2, 0.0)
    return f, active


def seeker_input(xA: Vec2, x_Pc: Vec2, obstacles: Sequence[Obstacle], config: AttackerConfig) -> Vec2:
    f = (x_Pc - xA) * config.K_seek + obstacle_push(xA, obstacles, config.K_obs, config.obstacle_range)
    return saturate(f, config.V_A_max)


def evade_or_random(
    xA: Vec2, defenders: Sequence[Vec2], obstacles: Sequence[Obstacle], config: AttackerConfig, state: AttackerState
) -> tuple[Vec2, AttackerState]:
    """Flee defenders inside the escape range, otherwise wander on held headings.

    The heading schedule advances every call, evading or not, so the random
    sequence does not depend on how often evasion triggers.
    """
    if state.steps_left <= 0:
        state.heading = state.rng.uniform(-math.pi, math.pi)
        state.steps_left = config.resample_period
    state.steps_left -= 1
    push, active = evasion_push(xA, defenders, config.K_evade, config.escape_range)
    obs = obstacle_push(xA, obstacles, config.K_obs, config.obstacle_range)
    if active:
        return saturate(push + obs, config.V_A_max), state
    return saturate(Vec2.polar(config.V_A_max, state.heading) + obs, config.V_A_max), state


def scripted_input(t: float, script: Sequence[tuple[float, Vec2]], V_A_max: float) -> Vec2:
    """Piecewise-constant velocity: entry ``(t_end, v)`` applies until ``t_end``."""
    for t_end, v in script:
        if t < t_end:
            return saturate(v, V_A_max)
    return ZERO


def attacker_input(
    stage: str,
    t: float,
    xA: Vec2,
    x_Pc: Vec2,
    defenders: Sequence[Vec2],
    obstacles: Sequence[Obstacle],
    config: AttackerConfig,
    state: AttackerState,
) -> Vec2:
    """Dispatch on strategy and stage.

    ``evade_random`` seeks the protected area during capture (fleeing any
    defender inside the escape range) and wanders randomly during escort.
    """
    if config.strategy == "scripted":
        return scripted_input(t, config.script, config.V_A_max)
    if config.strategy == "seeker" or stage == "capture":
        push, active = evasion_push(xA, defenders, config.K_evade, config.escape_range)
        seek = seeker_input(xA, x_Pc, obstacles, config)
        if config.strategy == "evade_random" and active:
            return saturate(seek + push * config.V_A_max, config.V_A_max)
        return seek
    u, _ = evade_or_random(xA, defenders, obstacles, config, state)
    return u
