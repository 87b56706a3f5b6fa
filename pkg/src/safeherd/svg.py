"""Static SVG snapshots of a run: areas, obstacles, fence, paths and Apollonius circles."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .reach_avoid import apollonius_circle
from .sim import ESCORT, DONE, SimConfig, StepRecord, TrajectoryLog, by_edge_positions, obstacles_at


@dataclass(frozen=True)
class Style:
    scale: float = 20.0
    margin: float = 3.0
    attacker: str = "#d62728"
    defender: str = "#1f77b4"
    fence: str = "#2ca02c"
    obstacle: str = "#7f7f7f"
    apollonius: str = "#000000"


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float


def apollonius_circles(rec: StepRecord, alpha: float) -> list[Circle]:
    """Apollonius circle of each defender against the attacker, in edge order."""
    ds = by_edge_positions(rec.defenders, rec.perm)
    out = []
    for xd in ds:
        c = apollonius_circle(rec.attacker, xd, alpha)
        out.append(Circle(c.center.x, c.center.y, c.radius))
    return out


def _bounds(log: TrajectoryLog, cfg: SimConfig, margin: float) -> tuple[float, float, float, float]:
    xs, ys = [], []
    for r in log.records:
        for p in (r.attacker, *r.defenders):
            xs.append(p.x)
            ys.append(p.y)
    for c, rad in ((cfg.x_Pc, cfg.protected_radius), (cfg.x_Tc, cfg.target_radius)):
        xs += [c.x - rad, c.x + rad]
        ys += [c.y - rad, c.y + rad]
    return min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin


def render(
    log: TrajectoryLog, t: float, cfg: SimConfig, style: Style = Style()
) -> str:
    rec = log.at_time(t)
    x0, y0, x1, y1 = _bounds(log, cfg, style.margin)
    s = style.scale

    def X(x: float) -> str:
        return f"{(x - x0) * s:.2f}"

    def Y(y: float) -> str:
        return f"{(y1 - y) * s:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{(x1 - x0) * s:.0f}" height="{(y1 - y0) * s:.0f}">',
        f'<text x="5" y="15" font-size="12">t = {rec.t:.2f} s ({rec.stage})</text>',
    ]
    for c, rad, col in ((cfg.x_Pc, cfg.protected_radius, "#ffbb78"), (cfg.x_Tc, cfg.target_radius, "#98df8a")):
        parts.append(f'<circle cx="{X(c.x)}" cy="{Y(c.y)}" r="{rad * s:.2f}" fill="{col}" fill-opacity="0.5"/>')
    for o in obstacles_at(cfg, rec.t):
        parts.append(f'<circle cx="{X(o.center.x)}" cy="{Y(o.center.y)}" r="{o.radius * s:.2f}" fill="{style.obstacle}"/>')
    upto = [r for r in log.records if r.k <= rec.k]
    for idx in range(len(rec.defenders)):
        pts = " ".join(f"{X(r.defenders[idx].x)},{Y(r.defenders[idx].y)}" for r in upto)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{style.defender}" stroke-width="1"/>')
    pts = " ".join(f"{X(r.attacker.x)},{Y(r.attacker.y)}" for r in upto)
    parts.append(f'<polyline points="{pts}" fill="none" stroke="{style.attacker}" stroke-width="1"/>')
    if rec.beacons:
        pts = " ".join(f"{X(b.x)},{Y(b.y)}" for b in rec.beacons)
        parts.append(f'<polygon points="{pts}" fill="none" stroke="{style.fence}" stroke-width="2"/>')
    if rec.stage in (ESCORT, DONE) and rec.beacons:
        for c in apollonius_circles(rec, cfg.alpha_hat):
            parts.append(
                f'<circle cx="{X(c.cx)}" cy="{Y(c.cy)}" r="{c.r * s:.2f}" fill="none" '
                f'stroke="{style.apollonius}" stroke-dasharray="3,3"/>'
            )
    for p in rec.defenders:
        parts.append(f'<circle cx="{X(p.x)}" cy="{Y(p.y)}" r="4" fill="{style.defender}"/>')
    parts.append(f'<circle cx="{X(rec.attacker.x)}" cy="{Y(rec.attacker.y)}" r="4" fill="{style.attacker}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_snapshots(
    log: TrajectoryLog,
    times: Sequence[float],
    cfg: SimConfig,
    out_dir: str | Path,
    style: Style = Style(),
) -> list[Path]:
    """Write one SVG per requested time; times outside the log raise ``ValueError``."""
    for t in times:
        log.at_time(t)
    out_dir = Path(out_dir)
    paths = []
    for t in times:
        out_dir.mkdir(parents=True, exist_ok=True)
        p = out_dir / f"snapshot_t{t:08.2f}.svg"
        p.write_text(render(log, t, cfg, style), encoding="utf-8")
        paths.append(p)
    return paths
