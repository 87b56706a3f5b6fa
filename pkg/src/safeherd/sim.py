"""Fixed-step simulation of the capture and escort stages.

Stages only move forward: ``capture -> escort -> done``, with ``failed``
reachable from either active stage.  All agents are single integrators
advanced by explicit Euler with the control period as step.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .assignment import build_problem, solve_assignment
from .attacker import AttackerConfig, AttackerState, attacker_input
from .capture import CaptureGains, capture_input
from .escort_game import (
    EscortChannel,
    EscortTelemetry,
    FunnelViolation,
    GameLayerParams,
    SingularChannel,
    channel_state,
    edge_errors,
    normalizers,
    ppf_rho,
)
from .escort_plan import PlanGains, beacon_speed_bound, beacon_velocity, joint_force, ratio_holds
from .formation import FormationParams, PursuitCircle, design_formation, layout, pc_update, point_in_fence
from .geometry import DefenseLineFrame, GeometryError, Obstacle, Vec2, ZERO, min_distance_to_obstacle
from .reach_avoid import edge_judgments

CAPTURE, ESCORT, DONE, FAILED = "capture", "escort", "done", "failed"

FAILURE_REASONS = (
    "protected_area_entry",
    "obstacle_collision",
    "fence_crossing",
    "judgment_nonpositive",
    "funnel_violation",
    "singular_channel",
    "speed_ratio",
)


class NumericError(RuntimeError):
    """A state became non-finite; carries a diagnostic dump."""


class ConfigError(ValueError):
    """Configuration rejected before stepping."""


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.05
    max_time: float = 200.0
    n: int = 3
    eps_p: float = 0.5
    k_p: float = 2.0
    alpha_hat: float = 0.65
    V_D: float = 3.0
    V_A: float = 1.2
    x_Pc: Vec2 = Vec2(5.0, 20.0)
    protected_radius: float = 2.0
    x_Tc: Vec2 = Vec2(20.0, 20.0)
    target_radius: float = 2.0
    attacker_start: Vec2 = Vec2(0.0, 0.0)
    defender_starts: tuple[Vec2, ...] | None = None
    start_ring_radius: float = 8.0
    obstacles: tuple[Obstacle, ...] = ()
    initial_stage: str = CAPTURE
    arrival_tol: float = 0.05
    arrival_speed_tol: float = 0.05
    funnel_entry: float = 0.95
    assignment_clearance: float = 0.5
    overlap_weight: float = 1.0
    capture: CaptureGains = CaptureGains()
    game: GameLayerParams = GameLayerParams()
    plan: PlanGains = PlanGains()
    attacker: AttackerConfig = AttackerConfig()

    def initial_defenders(self) -> tuple[Vec2, ...]:
        if self.defender_starts is not None:
            return self.defender_starts
        return tuple(
            self.x_Pc + Vec2.polar(self.start_ring_radius, 2 * math.pi * i / self.n) for i in range(self.n)
        )

    def formation(self) -> FormationParams:
        return design_formation(self.n, self.eps_p, self.k_p, self.alpha_hat)

    def beacon_bound(self) -> float:
        return beacon_speed_bound(self.V_D, self.V_A, self.alpha_hat)


def validate_config(cfg: SimConfig) -> FormationParams:
    """Check every engine precondition; returns the synthesized formation."""
    if not cfg.dt > 0:
        raise ConfigError("dt must be positive")
    if cfg.max_time < 0:
        raise ConfigError("max_time must be non-negative")
    if cfg.initial_stage not in (CAPTURE, ESCORT):
        raise ConfigError(f"initial_stage must be {CAPTURE!r} or {ESCORT!r}")
    if not (cfg.V_D > 0 and cfg.V_A > 0):
        raise ConfigError("speed limits must be positive")
    if cfg.attacker.V_A_max != cfg.V_A:
        raise ConfigError("attacker speed limit disagrees with V_A")
    if cfg.game.alpha_hat != cfg.alpha_hat:
        raise ConfigError("game-layer alpha_hat disagrees with the formation alpha_hat")
    if not cfg.alpha_hat > cfg.V_A / cfg.V_D:
        raise ConfigError(
            f"alpha_hat={cfg.alpha_hat} must exceed V_A/V_D={cfg.V_A / cfg.V_D:.6g} for a positive fence speed"
        )
    if not (cfg.protected_radius > 0 and cfg.target_radius > 0):
        raise ConfigError("area radii must be positive")
    try:
        params = cfg.formation()
    except ValueError as exc:
        raise ConfigError(f"formation synthesis failed: {exc}") from exc
    starts = cfg.initial_defenders()
    if len(starts) != cfg.n:
        raise ConfigError(f"expected {cfg.n} defender starts, got {len(starts)}")
    for o in cfg.obstacles:
        at0 = o.at(0.0)
        for p in (cfg.attacker_start, *starts):
            if min_distance_to_obstacle(p, at0)[0] <= 0.0:
                raise ConfigError(f"start position {tuple(p)} lies inside an obstacle")
    return params


@dataclass
class WorldState:
    k: int
    t: float
    stage: str
    attacker: Vec2
    defenders: tuple[Vec2, ...]
    beacons: tuple[Vec2, ...]
    pc: PursuitCircle
    slots: tuple[Vec2, ...]
    perm: tuple[int, ...]
    rng: AttackerState
    channels: tuple[EscortChannel, ...] = ()
    failure: str | None = None
    failure_detail: str = ""
    T_f1: float | None = None
    T_f2: float | None = None
    v_fc: Vec2 = ZERO


@dataclass(frozen=True)
class StepRecord:
    """State at ``t`` and the commands issued at ``t``."""

    k: int
    t: float
    stage: str
    attacker: Vec2
    defenders: tuple[Vec2, ...]
    beacons: tuple[Vec2, ...]
    pc_center: Vec2
    pc_update: bool
    u_attacker: Vec2
    u_defenders: tuple[Vec2, ...]
    v_fc: Vec2
    J: tuple[float, ...] | None = None
    telemetry: tuple[EscortTelemetry, ...] | None = None
    obstacle_centers: tuple[Vec2, ...] = ()
    perm: tuple[int, ...] = ()


@dataclass
class TrajectoryLog:
    dt: float
    records: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def at_time(self, t: float) -> StepRecord:
        k = round(t / self.dt)
        if not self.records or not 0 <= k < len(self.records) or abs(k * self.dt - t) > 1e-9 + self.dt / 2:
            raise ValueError(f"time {t} outside the log")
        return self.records[k]


@dataclass(frozen=True)
class Outcome:
    status: str
    failure: str | None
    detail: str
    T_f1: float | None
    T_f2: float | None
    steps: int
    pc_updates: int
    min_J: float | None
    max_funnel: float | None
    min_clearance: float
    max_fence_speed: float
    speed_ratio_ok: bool


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int
    value: float


def obstacles_at(cfg: SimConfig, t: float) -> tuple[Obstacle, ...]:
    return tuple(o.at(t) for o in cfg.obstacles)


def _assign(cfg: SimConfig, defenders: Sequence[Vec2], slots: Sequence[Vec2], t: float) -> tuple[int, ...]:
    obs = obstacles_at(cfg, t)
    try:
        problem, _ = build_problem(
            defenders, slots, obs, cfg.V_D, cfg.assignment_clearance, cfg.overlap_weight
        )
    except GeometryError:
        # a slot inside an obstacle: fall back to straight-line travel times
        problem, _ = build_problem(defenders, slots, (), cfg.V_D, cfg.assignment_clearance, cfg.overlap_weight)
    return solve_assignment(problem).perm


def _frames(beacons: Sequence[Vec2]) -> list[DefenseLineFrame]:
    n = len(beacons)
    return [DefenseLineFrame.from_segment(beacons[i], beacons[(i + 1) % n]) for i in range(n)]


def initial_world(cfg: SimConfig, params: FormationParams | None = None) -> WorldState:
    params = params or validate_config(cfg)
    rng = AttackerState.seeded(cfg.attacker.rng_seed)
    pc = PursuitCircle(cfg.attacker_start, cfg.eps_p)
    lay = layout(pc.center, params)
    if cfg.initial_stage == ESCORT:
        defenders = lay.defender_targets
        channels = tuple(
            EscortChannel.start(cfg.attacker_start, d, f, cfg.game)
            for d, f in zip(defenders, _frames(lay.beacon_targets))
        )
        return WorldState(
            0, 0.0, ESCORT, cfg.attacker_start, defenders, lay.beacon_targets, pc, lay.defender_targets,
            tuple(range(cfg.n)), rng, channels, T_f1=0.0,
        )
    defenders = cfg.initial_defenders()
    perm = _assign(cfg, defenders, lay.defender_targets, 0.0)
    return WorldState(0, 0.0, CAPTURE, cfg.attacker_start, defenders, (), pc, lay.defender_targets, perm, rng)


def _check_finite(world: WorldState) -> None:
    vals = [world.attacker.x, world.attacker.y]
    for p in (*world.defenders, *world.beacons):
        vals += [p.x, p.y]
    if not all(math.isfinite(v) for v in vals):
        raise NumericError(f"non-finite state at step {world.k}: {world!r}")


def _min_clearance(world: WorldState, obs: Sequence[Obstacle]) -> float:
    best = math.inf
    for o in obs:
        for p in (world.attacker, *world.defenders):
            best = min(best, min_distance_to_obstacle(p, o)[0])
    return best


def in_target(cfg: SimConfig, xa: Vec2) -> bool:
    return xa.dist(cfg.x_Tc) <= cfg.target_radius


def check_escort_guarantees(
    world: WorldState, cfg: SimConfig, channels: Sequence[EscortChannel] | None = None
) -> list[Violation]:
    """All escort-stage guarantee breaches present in ``world``."""
    out: list[Violation] = []
    beacons = world.beacons
    xa = world.attacker
    if not point_in_fence(xa, beacons):
        out.append(Violation("fence_crossing", -1, 0.0))
    ds = by_edge(world)
    for i, j in enumerate(edge_judgments(xa, ds, beacons, cfg.alpha_hat)):
        if not j > 0.0:
            out.append(Violation("judgment_nonpositive", i, j))
    rho = ppf_rho(max(world.t - (world.T_f1 or 0.0), 0.0), cfg.game)
    channels = channels if channels is not None else world.channels
    for i, frame in enumerate(_frames(beacons)):
        ch = channels[i] if i < len(channels) else EscortChannel(cfg.game)
        try:
            err = edge_errors(xa, ds[i], frame, cfg.game)
            g_t, f_t = normalizers(err.l_a, err.l_d, err.e_phi, cfg.game, ch.upper_side)
            channel_state(err.e_h, g_t, rho)
            channel_state(err.e_v, f_t, rho, ch.lo_v, ch.hi_v)
        except (FunnelViolation, SingularChannel):
            out.append(Violation("funnel_violation", i, float("nan")))
    clear = _min_clearance(world, obstacles_at(cfg, world.t))
    if not clear > 0.0:
        out.append(Violation("obstacle_collision", -1, clear))
    vn = world.v_fc.norm()
    if not ratio_holds(vn, cfg.V_D, cfg.V_A, cfg.alpha_hat) or vn > cfg.beacon_bound():
        out.append(Violation("speed_ratio", -1, vn))
    return out


def _fail(world: WorldState, reason: str, detail: str = "") -> WorldState:
    world.stage = FAILED
    world.failure = reason
    world.failure_detail = detail
    return world


def _capture_commands(world: WorldState, cfg: SimConfig, obs: Sequence[Obstacle]) -> tuple[Vec2, ...]:
    ds = world.defenders
    return tuple(
        capture_input(
            ds[i], world.slots[world.perm[i]], obs, [p for j, p in enumerate(ds) if j != i], cfg.capture, cfg.V_D
        )
        for i in range(len(ds))
    )


def by_edge_positions(defenders: Sequence[Vec2], perm: Sequence[int] | None) -> tuple[Vec2, ...]:
    """Reorder defenders so entry ``e`` is the one assigned to slot (and edge) ``e``."""
    if not perm:
        return tuple(defenders)
    out: list[Vec2] = [ZERO] * len(defenders)
    for i, e in enumerate(perm):
        out[e] = defenders[i]
    return tuple(out)


def by_edge(world: WorldState) -> tuple[Vec2, ...]:
    return by_edge_positions(world.defenders, world.perm)


def _funnel_ready(world: WorldState, cfg: SimConfig, params: FormationParams) -> bool:
    lay = layout(world.pc.center, params)
    frames = _frames(lay.beacon_targets)
    ds = by_edge(world)
    try:
        for i, frame in enumerate(frames):
            err = edge_errors(world.attacker, ds[i], frame, cfg.game)
            g_t, f_t = normalizers(err.l_a, err.l_d, err.e_phi, cfg.game)
            if abs(err.e_h / g_t) > cfg.funnel_entry or abs(err.e_v / f_t) > cfg.funnel_entry:
                return False
    except (FunnelViolation, SingularChannel):
        return False
    return True


def step(world: WorldState, cfg: SimConfig, params: FormationParams) -> tuple[WorldState, StepRecord]:
    """Advance one control period; returns the new world and the record of the old one."""
    if world.stage not in (CAPTURE, ESCORT):
        raise ValueError(f"cannot step a world in stage {world.stage!r}")
    w = copy.copy(world)
    w.rng = copy.deepcopy(world.rng)
    w.channels = tuple(copy.deepcopy(c) for c in world.channels)
    obs = obstacles_at(cfg, world.t)
    dt = cfg.dt
    updated = False
    J = tel = None
    v_fc = ZERO

    if world.stage == CAPTURE:
        new_pc = pc_update(world.pc, world.attacker)
        if new_pc is not None:
            updated = True
            w.pc = new_pc
            w.slots = layout(new_pc.center, params).defender_targets
            w.perm = _assign(cfg, world.defenders, w.slots, world.t)
        u_d = _capture_commands(w, cfg, obs)
        stage_name = CAPTURE
    else:
        v_fc = beacon_velocity(
            joint_force(world.defenders, cfg.x_Tc, cfg.x_Pc, obs, cfg.plan), cfg.beacon_bound()
        ).v_Fc
        frames = _frames(world.beacons)
        ds = by_edge(world)
        cmds, tels = [ZERO] * cfg.n, []
        try:
            for e, ch in enumerate(w.channels):
                u, tl = ch.command(world.attacker, ds[e], frames[e], world.t - world.T_f1, dt, cfg.V_D, v_fc)
                cmds[world.perm.index(e)] = u
                tels.append(tl)
        except FunnelViolation as exc:
            return _fail(w, "funnel_violation", str(exc)), _record(world, False, ZERO, (ZERO,) * cfg.n, v_fc, None, None, obs)
        except SingularChannel as exc:
            return _fail(w, "singular_channel", str(exc)), _record(world, False, ZERO, (ZERO,) * cfg.n, v_fc, None, None, obs)
        u_d = tuple(cmds)
        tel = tuple(tels)
        J = tuple(edge_judgments(world.attacker, ds, world.beacons, cfg.alpha_hat))
        stage_name = ESCORT

    u_a = attacker_input(
        stage_name, world.t, world.attacker, cfg.x_Pc, world.defenders, obs, cfg.attacker, w.rng
    )
    rec = _record(world, updated, u_a, u_d, v_fc, J, tel, obs, pc_center=w.pc.center)

    w.k = world.k + 1
    w.t = w.k * dt
    w.attacker = world.attacker + u_a * dt
    w.defenders = tuple(x + u * dt for x, u in zip(world.defenders, u_d))
    w.beacons = tuple(b + v_fc * dt for b in world.beacons)
    w.v_fc = v_fc
    _check_finite(w)

    obs_new = obstacles_at(cfg, w.t)
    if _min_clearance(w, obs_new) <= 0.0:
        return _fail(w, "obstacle_collision", f"t={w.t:.2f}"), rec

    if w.stage == CAPTURE:
        if w.attacker.dist(cfg.x_Pc) <= cfg.protected_radius:
            return _fail(w, "protected_area_entry", f"t={w.t:.2f}"), rec
        arrived = w.attacker.dist(w.pc.center) < w.pc.radius and all(
            w.defenders[i].dist(w.slots[w.perm[i]]) <= cfg.arrival_tol for i in range(cfg.n)
        )
        if arrived:
            speeds = _capture_commands(w, cfg, obs_new)
            arrived = all(u.norm() < cfg.arrival_speed_tol for u in speeds)
        if arrived and _funnel_ready(w, cfg, params):
            w.beacons = layout(w.pc.center, params).beacon_targets
            w.stage = ESCORT
            w.T_f1 = w.t
            w.channels = tuple(
                EscortChannel.start(w.attacker, d, f, cfg.game) for d, f in zip(by_edge(w), _frames(w.beacons))
            )
            if in_target(cfg, w.attacker):
                w.stage, w.T_f2 = DONE, w.t
        return w, rec

    for v in check_escort_guarantees(w, cfg):
        if v.kind == "obstacle_collision":
            continue
        return _fail(w, v.kind, f"t={w.t:.2f} index={v.index} value={v.value:.6g}"), rec
    if in_target(cfg, w.attacker):
        w.stage = DONE
        w.T_f2 = w.t
    return w, rec


def _record(
    world: WorldState,
    updated: bool,
    u_a: Vec2,
    u_d: tuple[Vec2, ...],
    v_fc: Vec2,
    J,
    tel,
    obs: Sequence[Obstacle],
    pc_center: Vec2 | None = None,
) -> StepRecord:
    return StepRecord(
        k=world.k,
        t=world.t,
        stage=world.stage,
        attacker=world.attacker,
        defenders=world.defenders,
        beacons=world.beacons,
        pc_center=pc_center if pc_center is not None else world.pc.center,
        pc_update=updated,
        u_attacker=u_a,
        u_defenders=u_d,
        v_fc=v_fc,
        J=J,
        telemetry=tel,
        obstacle_centers=tuple(o.center for o in obs),
        perm=world.perm,
    )


def _terminal_record(world: WorldState, cfg: SimConfig) -> StepRecord:
    obs = obstacles_at(cfg, world.t)
    J = None
    if world.stage in (ESCORT, DONE) and world.beacons:
        try:
            J = tuple(edge_judgments(world.attacker, by_edge(world), world.beacons, cfg.alpha_hat))
        except GeometryError:
            J = None
    return _record(world, False, ZERO, (ZERO,) * len(world.defenders), ZERO, J, None, obs)


def run(cfg: SimConfig) -> tuple[TrajectoryLog, Outcome]:
    params = validate_config(cfg)
    world = initial_world(cfg, params)
    log = TrajectoryLog(cfg.dt)
    n_steps = int(math.floor(cfg.max_time / cfg.dt + 1e-9))
    if world.stage == ESCORT and in_target(cfg, world.attacker):
        world.stage, world.T_f2 = DONE, world.t
    while world.stage in (CAPTURE, ESCORT) and world.k < n_steps:
        world, rec = step(world, cfg, params)
        log.records.append(rec)
    log.records.append(_terminal_record(world, cfg))
    return log, summarize(log, world, cfg)


def summarize(log: TrajectoryLog, world: WorldState, cfg: SimConfig) -> Outcome:
    status = world.stage if world.stage in (DONE, FAILED) else "timeout"
    js = [j for r in log.records if r.J is not None and r.stage in (ESCORT, DONE) for j in r.J]
    fun = [
        max(abs(tl.e_tilde_h), abs(tl.e_tilde_v)) / tl.rho
        for r in log.records
        if r.telemetry
        for tl in r.telemetry
    ]
    clear = math.inf
    for r in log.records:
        obs = obstacles_at(cfg, r.t)
        for o in obs:
            for p in (r.attacker, *r.defenders):
                clear = min(clear, min_distance_to_obstacle(p, o)[0])
    speeds = [r.v_fc.norm() for r in log.records if r.stage == ESCORT]
    return Outcome(
        status=status,
        failure=world.failure,
        detail=world.failure_detail,
        T_f1=world.T_f1,
        T_f2=world.T_f2,
        steps=len(log.records) - 1,
        pc_updates=sum(r.pc_update for r in log.records),
        min_J=min(js) if js else None,
        max_funnel=max(fun) if fun else None,
        min_clearance=clear,
        max_fence_speed=max(speeds) if speeds else 0.0,
        speed_ratio_ok=all(ratio_holds(s, cfg.V_D, cfg.V_A, cfg.alpha_hat) for s in speeds),
    )


def with_seed(cfg: SimConfig, seed: int) -> SimConfig:
    return replace(cfg, attacker=replace(cfg.attacker, rng_seed=seed))
