"""Planar vector algebra, defense-line frames and circular obstacles.

Everything here is a pure function of its arguments; no module state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

EPS = 1e-12


class GeometryError(ValueError):
    """Degenerate geometric input (coincident points, zero-length segments)."""


@dataclass(frozen=True, slots=True)
class Vec2:
    """Immutable 2D vector in meters (or meters/second for velocities)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite Vec2({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> Vec2:
        return Vec2(self.x / k, self.y / k)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> Vec2:
        n = self.norm()
        if n < EPS:
            return ZERO
        return Vec2(self.x / n, self.y / n)

    def dist(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    @staticmethod
    def polar(radius: float, theta: float) -> Vec2:
        return Vec2(radius * math.cos(theta), radius * math.sin(theta))


ZERO = Vec2(0.0, 0.0)


def wrap_angle(a: float) -> float:
    """Map an angle to [-pi, pi]."""
    return math.atan2(math.sin(a), math.cos(a))


def rotate90cw(v: Vec2) -> Vec2:
    """Apply the defense-line normal matrix ``[[0, -1], [1, 0]]``.

    For a counter-clockwise fence this turns the edge direction into the
    normal pointing at the fence interior.
    """
    return Vec2(-v.y, v.x)


def saturate(v: Vec2, bound: float) -> Vec2:
    """Clip ``v`` to norm ``bound``, keeping its direction.

    The scaled result is guaranteed ``norm() <= bound`` in floating point,
    which the beacon speed-ratio check relies on.
    """
    if bound <= 0.0:
        raise ValueError("saturation bound must be positive")
    n = v.norm()
    if n <= bound:
        return v
    k = bound / n
    out = Vec2(v.x * k, v.y * k)
    while out.norm() > bound:
        k = math.nextafter(k, 0.0)
        out = Vec2(v.x * k, v.y * k)
    return out


@dataclass(frozen=True, slots=True)
class LosGeometry:
    """Line-of-sight quantities of one attacker/defender pair against one edge.

    ``l_a`` and ``l_d`` are unsigned distances to the infinite line through the
    edge. ``opposite`` reports whether the two players are on strictly
    opposite sides of it.
    """

    l_a: float
    l_d: float
    phi: float
    e_phi: float
    opposite: bool


def signed_line_offset(p: Vec2, a: Vec2, b: Vec2) -> float:
    """Signed distance of ``p`` from line a->b, positive on the ``rotate90cw`` side."""
    d = b - a
    n = d.norm()
    if n < EPS:
        raise GeometryError("degenerate segment")
    return (p - a).dot(rotate90cw(d)) / n


def los_geometry(xa: Vec2, xd: Vec2, bi: Vec2, bnext: Vec2) -> LosGeometry:
    d = bnext - bi
    dn = d.norm()
    if dn < EPS:
        raise GeometryError("defense line has zero length")
    los = xa - xd
    ln = los.norm()
    if ln < EPS:
        raise GeometryError("attacker and defender coincide")
    normal = rotate90cw(d)
    sa = (xa - bi).dot(normal) / dn
    sd = (xd - bi).dot(normal) / dn
    c = los.dot(d) / (ln * dn)
    phi = math.pi - math.acos(max(-1.0, min(1.0, c)))
    return LosGeometry(
        l_a=abs(sa),
        l_d=abs(sd),
        phi=phi,
        e_phi=math.pi / 2 - phi,
        opposite=(sa > 0.0 > sd) or (sa < 0.0 < sd),
    )


def point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    d = b - a
    dd = d.dot(d)
    if dd < EPS * EPS:
        return p.dist(a)
    t = max(0.0, min(1.0, (p - a).dot(d) / dd))
    return p.dist(a + d * t)


def segment_intersects_segment(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    """Proper or touching intersection of two closed segments."""
    d1 = (p2 - p1).cross(q1 - p1)
    d2 = (p2 - p1).cross(q2 - p1)
    d3 = (q2 - q1).cross(p1 - q1)
    d4 = (q2 - q1).cross(p2 - q1)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return (
        (abs(d1) <= EPS and point_segment_distance(q1, p1, p2) <= EPS)
        or (abs(d2) <= EPS and point_segment_distance(q2, p1, p2) <= EPS)
        or (abs(d3) <= EPS and point_segment_distance(p1, q1, q2) <= EPS)
        or (abs(d4) <= EPS and point_segment_distance(p2, q1, q2) <= EPS)
    )


@dataclass(frozen=True, slots=True)
class DefenseLineFrame:
    """Local frame of one defense line.

    ``axis`` runs from beacon ``B_i`` to ``B_{i+1}``; the second frame axis is
    ``rotate90cw(axis)``. ``theta`` is measured clockwise from the ground x
    axis, so ``to_ground`` is exactly ``[[cos, sin], [-sin, cos]]``.
    """

    origin: Vec2
    axis: Vec2
    theta: float

    @classmethod
    def from_segment(cls, bi: Vec2, bnext: Vec2) -> DefenseLineFrame:
        d = bnext - bi
        n = d.norm()
        if n < EPS:
            raise GeometryError("defense line has zero length")
        axis = d / n
        return cls(origin=bi, axis=axis, theta=-math.atan2(axis.y, axis.x))

    @property
    def normal(self) -> Vec2:
        return rotate90cw(self.axis)

    def to_ground(self, g: Vec2) -> Vec2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Vec2(c * g.x + s * g.y, -s * g.x + c * g.y)

    def to_frame(self, v: Vec2) -> Vec2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Vec2(c * v.x - s * v.y, s * v.x + c * v.y)


@dataclass(frozen=True, slots=True)
class Obstacle:
    """Circular obstacle; dynamic ones follow a piecewise-linear waypoint script.

    ``script`` holds ``(time, center)`` pairs with increasing times. Before the
    first waypoint and after the last the obstacle is stationary. A dynamic
    obstacle without a script drifts with constant ``velocity``.
    """

    center: Vec2
    radius: float
    kind: str = "static"
    velocity: Vec2 = ZERO
    script: tuple[tuple[float, Vec2], ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("obstacle radius must be positive")
        if self.kind not in ("static", "dynamic"):
            raise ValueError(f"unknown obstacle kind {self.kind!r}")
        if self.kind == "static" and (self.velocity != ZERO or self.script):
            raise ValueError("static obstacles cannot move")
        times = [t for t, _ in self.script]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")

    def at(self, t: float) -> Obstacle:
        """Snapshot with ``center``/``velocity`` evaluated at time ``t``."""
        if self.kind == "static":
            return self
        if not self.script:
            return Obstacle(self.center + self.velocity * t, self.radius, "dynamic", self.velocity)
        pts = self.script
        if t <= pts[0][0]:
            return Obstacle(pts[0][1], self.radius, "dynamic", ZERO)
        for (t0, p0), (t1, p1) in zip(pts, pts[1:]):
            if t < t1:
                v = (p1 - p0) / (t1 - t0)
                return Obstacle(p0 + v * (t - t0), self.radius, "dynamic", v)
        return Obstacle(pts[-1][1], self.radius, "dynamic", ZERO)


def min_distance_to_obstacle(x: Vec2, obs: Obstacle) -> tuple[float, Vec2]:
    """Clearance from ``x`` to the obstacle boundary and the nearest boundary point.

    A negative clearance means ``x`` has penetrated the obstacle; callers
    treat that as a collision event.
    """
    off = x - obs.center
    r = off.norm()
    direction = off / r if r > EPS else Vec2(1.0, 0.0)
    return r - obs.radius, obs.center + direction * obs.radius


def polygon_area(pts: Sequence[Vec2]) -> float:
    n = len(pts)
    return 0.5 * sum(pts[i].cross(pts[(i + 1) % n]) for i in range(n))


def centroid(pts: Iterable[Vec2]) -> Vec2:
    pts = list(pts)
    return Vec2(sum(p.x for p in pts) / len(pts), sum(p.y for p in pts) / len(pts))
