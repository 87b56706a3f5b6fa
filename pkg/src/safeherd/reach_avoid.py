"""Apollonius reachability and the judgment function for one defense line.

A defender ``D`` guarding a line against an attacker ``A`` on the other side
wins the static sub-game when the attacker's Apollonius disc (points it reaches
first at speed ratio ``alpha``) stays clear of the line.  The sign test for
that is the judgment function ``J``; ``J / (1 - alpha**2)`` is the clearance
itself (the risk margin).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import EPS, GeometryError, Vec2, los_geometry, signed_line_offset

BARRIER_TOL = 1e-9


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"speed ratio must lie in (0, 1), got {alpha}")


def _check_phi(phi: float) -> float:
    s = math.sin(phi)
    if not 0.0 < phi < math.pi or s <= 0.0:
        raise ValueError(f"LOS angle must lie in (0, pi), got {phi}")
    return s


@dataclass(frozen=True, slots=True)
class ApolloniusCircle:
    center: Vec2
    radius: float

    def contains(self, p: Vec2, strict: bool = False) -> bool:
        d = p.dist(self.center)
        return d < self.radius if strict else d <= self.radius

    def boundary(self, n: int) -> list[Vec2]:
        return [self.center + Vec2.polar(self.radius, 2 * math.pi * k / n) for k in range(n)]


def apollonius_circle(xa: Vec2, xd: Vec2, alpha: float) -> ApolloniusCircle:
    """Locus of points ``p`` with ``|p - xa| = alpha * |p - xd|``."""
    _check_alpha(alpha)
    sep = xd.dist(xa)
    if sep < EPS:
        raise GeometryError("attacker and defender coincide")
    k = 1.0 - alpha * alpha
    center = (xa - xd * (alpha * alpha)) / k
    return ApolloniusCircle(center, alpha / k * sep)


def judgment(l_a: float, l_d: float, phi: float, alpha: float) -> float:
    """Judgment function; positive means the defender holds the line."""
    _check_alpha(alpha)
    s = _check_phi(phi)
    if l_a < 0 or l_d < 0:
        raise ValueError("line distances must be non-negative")
    return l_a * (1.0 - alpha / s) - l_d * (alpha / s - alpha * alpha)


def risk_margin(l_a: float, l_d: float, phi: float, alpha: float) -> float:
    """Clearance between the Apollonius disc and the line, from ``J``."""
    return judgment(l_a, l_d, phi, alpha) / (1.0 - alpha * alpha)


def risk_margin_direct(l_a: float, l_d: float, phi: float, alpha: float) -> float:
    """Same clearance computed as (center-to-line distance) minus radius.

    Independent of :func:`judgment`; used as its cross-check.
    """
    _check_alpha(alpha)
    s = _check_phi(phi)
    k = 1.0 - alpha * alpha
    l_p = alpha * alpha / k * l_d + l_a / k
    r_ac = alpha / k * (l_a + l_d) / s
    return l_p - r_ac


def conditions(l_a: float, l_d: float, phi: float, alpha: float) -> tuple[bool, bool]:
    """The angular (LOS band) and distance requirements for a defender win."""
    _check_alpha(alpha)
    s = _check_phi(phi)
    band = math.acos(alpha)
    cond1 = math.pi / 2 - band <= abs(phi) <= math.pi / 2 + band
    cond2 = l_d < l_a * (s - alpha) / (alpha * (1.0 - alpha * s))
    return cond1, cond2


class Outcome(enum.Enum):
    DEFENDER_WIN = "defender_win"
    ON_BARRIER = "on_barrier"
    ATTACKER_WIN = "attacker_win"


@dataclass(frozen=True, slots=True)
class GameStatus:
    tag: Outcome
    J: float
    RM: float


def game_status(l_a: float, l_d: float, phi: float, alpha: float, tol: float = BARRIER_TOL) -> GameStatus:
    j = judgment(l_a, l_d, phi, alpha)
    if j > tol:
        tag = Outcome.DEFENDER_WIN
    elif j < -tol:
        tag = Outcome.ATTACKER_WIN
    else:
        tag = Outcome.ON_BARRIER
    return GameStatus(tag, j, j / (1.0 - alpha * alpha))


def reachable_set_contains(p: Vec2, xa: Vec2, defenders: Sequence[Vec2], alpha: float) -> bool:
    """Whether the attacker reaches ``p`` no later than every defender."""
    if not defenders:
        raise ValueError("need at least one defender")
    da = xa.dist(p)
    return all(da <= alpha * xd.dist(p) for xd in defenders)


def _disc_segment_interval(c: ApolloniusCircle, a: Vec2, b: Vec2) -> tuple[float, float] | None:
    """Open parameter interval of segment a->b strictly inside the disc."""
    d = b - a
    f = a - c.center
    qa = d.dot(d)
    qb = 2.0 * f.dot(d)
    qc = f.dot(f) - c.radius * c.radius
    disc = qb * qb - 4.0 * qa * qc
    if disc <= 0.0:
        return None
    r = math.sqrt(disc)
    t0, t1 = (-qb - r) / (2 * qa), (-qb + r) / (2 * qa)
    lo, hi = max(t0, 0.0), min(t1, 1.0)
    return (lo, hi) if lo < hi else None


def fence_breach_possible(
    xa: Vec2,
    defenders: Sequence[Vec2],
    fence: Sequence[Vec2],
    alpha: float,
    method: str = "analytic",
    resolution: float = 0.01,
) -> bool:
    """Whether the combined reachable set strictly enters any fence edge.

    ``fence`` lists the beacons in counter-clockwise order; edge ``i`` runs
    from ``fence[i]`` to ``fence[i + 1]``. ``method="analytic"`` intersects the
    exact disc/segment intervals; ``method="sampled"`` tests points spaced
    ``resolution`` apart along each edge. Tangency counts as no breach.
    """
    if not defenders:
        raise ValueError("need at least one defender")
    n = len(fence)
    if n < 3:
        raise GeometryError("fence needs at least three beacons")
    discs = [apollonius_circle(xa, xd, alpha) for xd in defenders]
    for i in range(n):
        a, b = fence[i], fence[(i + 1) % n]
        if method == "analytic":
            lo, hi = 0.0, 1.0
            for c in discs:
                iv = _disc_segment_interval(c, a, b)
                if iv is None:
                    lo, hi = 1.0, 0.0
                    break
                lo, hi = max(lo, iv[0]), min(hi, iv[1])
            if lo < hi:
                return True
        elif method == "sampled":
            m = max(1, math.ceil(a.dist(b) / resolution))
            for k in range(m + 1):
                p = a + (b - a) * (k / m)
                if all(c.contains(p, strict=True) for c in discs):
                    return True
        else:
            raise ValueError(f"unknown method {method!r}")
    return False


def edge_judgments(xa: Vec2, defenders: Sequence[Vec2], beacons: Sequence[Vec2], alpha: float) -> list[float]:
    """Judgment value of defender ``i`` against edge ``i`` for every edge.

    Uses signed offsets: an attacker outside the fence or a defender inside it
    yields a negative value even where the unsigned formula would not.
    """
    n = len(beacons)
    out = []
    for i in range(n):
        bi, bn = beacons[i], beacons[(i + 1) % n]
        g = los_geometry(xa, defenders[i], bi, bn)
        j = judgment(g.l_a, g.l_d, min(max(g.phi, 1e-15), math.pi - 1e-15), alpha)
        inside = signed_line_offset(xa, bi, bn) > 0.0
        if not (inside and g.opposite):
            j = -abs(j) if j != 0.0 else -0.0
        out.append(j)
    return out
