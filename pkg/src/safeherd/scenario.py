"""Scenario files: strict YAML schema mapped onto :class:`SimConfig`.

Every key is optional and falls back to the :class:`SimConfig` default, but
unknown keys are rejected with their line and column so that parameter typos
cannot pass silently.
"""

from __future__ import annotations

from dataclasses import replace
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .attacker import AttackerConfig
from .capture import CaptureGains
from .escort_game import GameLayerParams
from .escort_plan import PlanGains
from .geometry import Obstacle, Vec2
from .sim import SimConfig, validate_config


class ScenarioError(ValueError):
    """Malformed or invalid scenario; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


SCHEMA: dict[str, tuple[str, ...]] = {
    "sim": ("dt", "max_time", "initial_stage"),
    "formation": ("n", "eps_p", "k_p", "alpha_hat"),
    "speeds": ("V_D", "V_A"),
    "areas": ("protected_center", "protected_radius", "target_center", "target_radius"),
    "attacker": (
        "start", "strategy", "seed", "escape_range", "resample_period",
        "K_seek", "K_evade", "K_obs", "obstacle_range", "script",
    ),
    "defenders": ("starts", "start_ring_radius"),
    "capture": (
        "K_a", "K_r", "Gamma_cap", "K_int", "Gamma_int", "arrival_tol",
        "arrival_speed_tol", "funnel_entry", "assignment_clearance", "overlap_weight",
    ),
    "game": ("K_Delta", "kappa", "K_inf", "K_v", "K_h"),
    "plan": ("K_Ta", "protected_repulsion_gain", "K_r", "Gamma_ect"),
    "obstacles": (),
}
OBSTACLE_KEYS = ("center", "radius", "kind", "velocity", "script")


def _vec(v: Any, where: str) -> Vec2:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        raise ScenarioError(f"{where} must be a two-element list of numbers")
    return Vec2(float(v[0]), float(v[1]))


def _num(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where} must be a number")
    return float(v)


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"{where} must be an integer")
    return v


def _mark(root: yaml.Node | None, path: tuple) -> tuple[int | None, int | None]:
    """Line/column of the key at ``path`` in the composed document."""
    node = root
    mark = None
    for key in path:
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                if k.value == key:
                    mark, node = k.start_mark, v
                    break
            else:
                break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            mark = node.start_mark
        else:
            break
    if mark is None:
        return None, None
    return mark.line + 1, mark.column + 1


def parse_scenario(text: str) -> SimConfig:
    try:
        root = yaml.compose(text)
        doc = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark
        raise ScenarioError(f"YAML parse error: {exc.problem}", m.line + 1 if m else None, m.column + 1 if m else None) from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a mapping of sections")

    def fail(msg: str, *path) -> ScenarioError:
        return ScenarioError(msg, *_mark(root, path))

    for sec, body in doc.items():
        if sec not in SCHEMA:
            raise fail(f"unknown section {sec!r}", sec)
        if sec == "obstacles":
            if not isinstance(body, list):
                raise fail("obstacles must be a list", sec)
            for i, ob in enumerate(body):
                if not isinstance(ob, dict):
                    raise fail("obstacle entries must be mappings", sec, i)
                for k in ob:
                    if k not in OBSTACLE_KEYS:
                        raise fail(f"unknown obstacle key {k!r}", sec, i, k)
            continue
        if not isinstance(body, dict):
            raise fail(f"section {sec!r} must be a mapping", sec)
        for k in body:
            if k not in SCHEMA[sec]:
                raise fail(f"unknown key {k!r} in section {sec!r}", sec, k)

    try:
        return _build(doc)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc)) from exc


def _build(doc: dict) -> SimConfig:
    d = SimConfig()
    g = lambda sec: doc.get(sec) or {}  # noqa: E731
    sim, form, spd, areas = g("sim"), g("formation"), g("speeds"), g("areas")
    att, dfd, cap, game, plan = g("attacker"), g("defenders"), g("capture"), g("game"), g("plan")

    def num(sec, key, default):
        return _num(sec[key], key) if key in sec else default

    V_A = num(spd, "V_A", d.V_A)
    alpha_hat = num(form, "alpha_hat", d.alpha_hat)
    script = tuple(
        (_num(e[0], "attacker.script time"), _vec(e[1], "attacker.script velocity")) for e in att.get("script", [])
    )
    attacker = replace(
        d.attacker,
        V_A_max=V_A,
        escape_range=num(att, "escape_range", d.attacker.escape_range),
        rng_seed=_int(att["seed"], "attacker.seed") if "seed" in att else d.attacker.rng_seed,
        resample_period=_int(att["resample_period"], "resample_period") if "resample_period" in att else d.attacker.resample_period,
        strategy=str(att.get("strategy", d.attacker.strategy)),
        K_seek=num(att, "K_seek", d.attacker.K_seek),
        K_evade=num(att, "K_evade", d.attacker.K_evade),
        K_obs=num(att, "K_obs", d.attacker.K_obs),
        obstacle_range=num(att, "obstacle_range", d.attacker.obstacle_range),
        script=script,
    )
    starts = dfd.get("starts")
    obstacles = []
    for i, ob in enumerate(doc.get("obstacles") or []):
        where = f"obstacles[{i}]"
        if "center" not in ob or "radius" not in ob:
            raise ScenarioError(f"{where} needs center and radius")
        obstacles.append(
            Obstacle(
                center=_vec(ob["center"], where + ".center"),
                radius=_num(ob["radius"], where + ".radius"),
                kind=str(ob.get("kind", "static")),
                velocity=_vec(ob["velocity"], where + ".velocity") if "velocity" in ob else Vec2(0.0, 0.0),
                script=tuple((_num(t, where + ".script time"), _vec(p, where + ".script point")) for t, p in ob.get("script", [])),
            )
        )
    return SimConfig(
        dt=num(sim, "dt", d.dt),
        max_time=num(sim, "max_time", d.max_time),
        initial_stage=str(sim.get("initial_stage", d.initial_stage)),
        n=_int(form["n"], "n") if "n" in form else d.n,
        eps_p=num(form, "eps_p", d.eps_p),
        k_p=num(form, "k_p", d.k_p),
        alpha_hat=alpha_hat,
        V_D=num(spd, "V_D", d.V_D),
        V_A=V_A,
        x_Pc=_vec(areas["protected_center"], "protected_center") if "protected_center" in areas else d.x_Pc,
        protected_radius=num(areas, "protected_radius", d.protected_radius),
        x_Tc=_vec(areas["target_center"], "target_center") if "target_center" in areas else d.x_Tc,
        target_radius=num(areas, "target_radius", d.target_radius),
        attacker_start=_vec(att["start"], "attacker.start") if "start" in att else d.attacker_start,
        defender_starts=None if starts is None else tuple(_vec(p, "defenders.starts") for p in starts),
        start_ring_radius=num(dfd, "start_ring_radius", d.start_ring_radius),
        obstacles=tuple(obstacles),
        arrival_tol=num(cap, "arrival_tol", d.arrival_tol),
        arrival_speed_tol=num(cap, "arrival_speed_tol", d.arrival_speed_tol),
        funnel_entry=num(cap, "funnel_entry", d.funnel_entry),
        assignment_clearance=num(cap, "assignment_clearance", d.assignment_clearance),
        overlap_weight=num(cap, "overlap_weight", d.overlap_weight),
        capture=CaptureGains(
            K_a=num(cap, "K_a", d.capture.K_a),
            K_r=num(cap, "K_r", d.capture.K_r),
            Gamma_cap=num(cap, "Gamma_cap", d.capture.Gamma_cap),
            K_int=num(cap, "K_int", d.capture.K_int),
            Gamma_int=num(cap, "Gamma_int", d.capture.Gamma_int),
        ),
        game=GameLayerParams(
            K_Delta=num(game, "K_Delta", d.game.K_Delta),
            kappa=num(game, "kappa", d.game.kappa),
            K_inf=num(game, "K_inf", d.game.K_inf),
            K_v=num(game, "K_v", d.game.K_v),
            K_h=num(game, "K_h", d.game.K_h),
            alpha_hat=alpha_hat,
        ),
        plan=PlanGains(
            K_Ta=num(plan, "K_Ta", d.plan.K_Ta),
            K_Pr=num(plan, "protected_repulsion_gain", d.plan.K_Pr),
            K_r=num(plan, "K_r", d.plan.K_r),
            Gamma_ect=num(plan, "Gamma_ect", d.plan.Gamma_ect),
        ),
        attacker=attacker,
    )


def load_scenario(path: str | Path, validate: bool = True) -> SimConfig:
    """Read, parse and (by default) validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    cfg = parse_scenario(text)
    if validate:
        try:
            validate_config(cfg)
        except ValueError as exc:
            raise ScenarioError(f"invalid scenario: {exc}") from exc
    return cfg


def load_reference() -> SimConfig:
    text = resources.files("safeherd").joinpath("data/reference.yaml").read_text(encoding="utf-8")
    return parse_scenario(text)


def reference_path() -> Path:
    return Path(str(resources.files("safeherd").joinpath("data/reference.yaml")))


def _v(p: Vec2) -> list[float]:
    return [p.x, p.y]


def to_dict(cfg: SimConfig) -> dict:
    a = cfg.attacker
    return {
        "sim": {"dt": cfg.dt, "max_time": cfg.max_time, "initial_stage": cfg.initial_stage},
        "formation": {"n": cfg.n, "eps_p": cfg.eps_p, "k_p": cfg.k_p, "alpha_hat": cfg.alpha_hat},
        "speeds": {"V_D": cfg.V_D, "V_A": cfg.V_A},
        "areas": {
            "protected_center": _v(cfg.x_Pc),
            "protected_radius": cfg.protected_radius,
            "target_center": _v(cfg.x_Tc),
            "target_radius": cfg.target_radius,
        },
        "attacker": {
            "start": _v(cfg.attacker_start),
            "strategy": a.strategy,
            "seed": a.rng_seed,
            "escape_range": a.escape_range,
            "resample_period": a.resample_period,
            "K_seek": a.K_seek,
            "K_evade": a.K_evade,
            "K_obs": a.K_obs,
            "obstacle_range": a.obstacle_range,
            "script": [[t, _v(v)] for t, v in a.script],
        },
        "defenders": {
            "starts": None if cfg.defender_starts is None else [_v(p) for p in cfg.defender_starts],
            "start_ring_radius": cfg.start_ring_radius,
        },
        "capture": {
            "K_a": cfg.capture.K_a,
            "K_r": cfg.capture.K_r,
            "Gamma_cap": cfg.capture.Gamma_cap,
            "K_int": cfg.capture.K_int,
            "Gamma_int": cfg.capture.Gamma_int,
            "arrival_tol": cfg.arrival_tol,
            "arrival_speed_tol": cfg.arrival_speed_tol,
            "funnel_entry": cfg.funnel_entry,
            "assignment_clearance": cfg.assignment_clearance,
            "overlap_weight": cfg.overlap_weight,
        },
        "game": {
            "K_Delta": cfg.game.K_Delta,
            "kappa": cfg.game.kappa,
            "K_inf": cfg.game.K_inf,
            "K_v": cfg.game.K_v,
            "K_h": cfg.game.K_h,
        },
        "plan": {
            "K_Ta": cfg.plan.K_Ta,
            "protected_repulsion_gain": cfg.plan.K_Pr,
            "K_r": cfg.plan.K_r,
            "Gamma_ect": cfg.plan.Gamma_ect,
        },
        "obstacles": [
            {
                "center": _v(o.center),
                "radius": o.radius,
                "kind": o.kind,
                "velocity": _v(o.velocity),
                "script": [[t, _v(p)] for t, p in o.script],
            }
            for o in cfg.obstacles
        ],
    }


def dump_scenario(cfg: SimConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=None)
