"""Pursuit-circle triggering and synthesis of the initial encirclement.

The encirclement is a regular N-gon fence of beacons at radius ``eps_B``
around the pursuit-circle center, with one defender per edge at radius
``eps_D`` on the edge's perpendicular bisector.  ``eps_D`` is the smallest
radius keeping every line of sight from the (extended) pursuit circle inside
the admissible angular band; ``eps_B`` then makes the defender-to-line
distance small enough for the distance condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import EPS, GeometryError, Vec2


class FormationInfeasible(ValueError):
    """Parameters admit no encirclement satisfying the win conditions."""


@dataclass(frozen=True, slots=True)
class PursuitCircle:
    center: Vec2
    radius: float
    update_count: int = 0


def pc_update(pc: PursuitCircle, xa: Vec2) -> PursuitCircle | None:
    """Re-center the circle on the attacker once it reaches the boundary.

    In discrete time the attacker usually overshoots the boundary, so the
    trigger is ``|xa - center| >= radius`` rather than equality.
    """
    if xa.dist(pc.center) >= pc.radius:
        return PursuitCircle(xa, pc.radius, pc.update_count + 1)
    return None


def compute_eps_d(n: int, eps_p: float, k_p: float, alpha_hat: float) -> float:
    """Defender ring radius from the critical line-of-sight point."""
    if n < 3:
        raise ValueError("need at least three defenders")
    if not k_p > 1.0:
        raise ValueError("zoom factor K_p must exceed 1")
    if not 0.0 < alpha_hat < 1.0:
        raise ValueError("design speed ratio must lie in (0, 1)")
    if not eps_p > 0.0:
        raise ValueError("pursuit-circle radius must be positive")
    half = math.pi / n
    psi = math.asin(alpha_hat)
    root = math.sqrt(1.0 - alpha_hat * alpha_hat)
    if psi <= half:
        return k_p * eps_p / root
    return k_p * eps_p * (math.sin(half) * alpha_hat / root + math.cos(half))


def critical_profile(eta: float, eps_p: float, eps_d: float, alpha_hat: float) -> float:
    """Largest defender-to-line distance keeping ``J >= 0`` for the attacker
    on the pursuit circle at angle ``eta`` from the sector bisector."""
    rho = math.sqrt(eps_p**2 + eps_d**2 - 2.0 * eps_p * eps_d * math.cos(eta))
    return (eps_d - eps_p * math.cos(eta) - alpha_hat * rho) / (1.0 - alpha_hat**2)


def critical_vertical_distance(
    eps_p: float, eps_d: float, alpha_hat: float, lam: float
) -> tuple[float, float | None]:
    """Minimum of :func:`critical_profile` over half a sector.

    Returns ``(l_xi_min, eta_star)``; ``eta_star`` is ``None`` when the
    interior stationary point is absent or falls outside ``[0, lam/2]``.
    """
    if not eps_d > eps_p:
        raise ValueError("defender ring must lie outside the pursuit circle")
    chi = (eps_p**2 + (1.0 - alpha_hat**2) * eps_d**2) / (2.0 * eps_p * eps_d)
    cands = [critical_profile(0.0, eps_p, eps_d, alpha_hat), critical_profile(lam / 2, eps_p, eps_d, alpha_hat)]
    eta_star = None
    if chi <= 1.0:
        eta = math.acos(chi)
        if eta <= lam / 2:
            eta_star = eta
            cands.append(critical_profile(eta, eps_p, eps_d, alpha_hat))
    return min(cands), eta_star


def compute_eps_b(eps_d: float, l_xi_min: float, lam: float) -> float:
    """Smallest fence circumradius whose edges sit ``l_xi_min`` inside the defender ring."""
    if eps_d <= l_xi_min:
        raise FormationInfeasible(f"eps_D={eps_d:.6g} does not exceed l_xi_min={l_xi_min:.6g}")
    return (eps_d - l_xi_min) / math.cos(lam / 2)


@dataclass(frozen=True)
class FormationParams:
    n: int
    lam: float
    eps_p: float
    k_p: float
    alpha_hat: float
    eps_d: float
    l_xi_min: float
    eta_star: float | None
    eps_b: float
    psi: float
    psi_bar: float
    # min f(eta) read directly as a circumradius; kept only for comparison
    eps_b_literal: float

    @property
    def apothem(self) -> float:
        return self.eps_b * math.cos(self.lam / 2)

    @property
    def defender_line_distance(self) -> float:
        """Perpendicular distance from a formation slot to its defense line."""
        return self.eps_d - self.apothem


def design_formation(n: int, eps_p: float, k_p: float, alpha_hat: float) -> FormationParams:
    lam = 2.0 * math.pi / n
    eps_d = compute_eps_d(n, eps_p, k_p, alpha_hat)
    l_min, eta_star = critical_vertical_distance(eps_p, eps_d, alpha_hat, lam)
    if l_min <= 0.0:
        raise FormationInfeasible(f"critical defender distance {l_min:.6g} is not positive")
    eps_b = compute_eps_b(eps_d, l_min, lam)
    params = FormationParams(
        n=n,
        lam=lam,
        eps_p=eps_p,
        k_p=k_p,
        alpha_hat=alpha_hat,
        eps_d=eps_d,
        l_xi_min=l_min,
        eta_star=eta_star,
        eps_b=eps_b,
        psi=math.asin(alpha_hat),
        psi_bar=math.acos(alpha_hat),
        eps_b_literal=l_min,
    )
    if not params.apothem > eps_p:
        raise FormationInfeasible("fence apothem does not exceed the pursuit-circle radius")
    return params


@dataclass(frozen=True)
class FormationLayout:
    defender_targets: tuple[Vec2, ...]
    beacon_targets: tuple[Vec2, ...]


def layout(center: Vec2, params: FormationParams) -> FormationLayout:
    """Slots and beacons around a pursuit-circle center (counter-clockwise)."""
    lam = params.lam
    return FormationLayout(
        defender_targets=tuple(center + Vec2.polar(params.eps_d, (i + 0.5) * lam) for i in range(params.n)),
        beacon_targets=tuple(center + Vec2.polar(params.eps_b, i * lam) for i in range(params.n)),
    )


def _check_convex_ccw(beacons: Sequence[Vec2]) -> None:
    n = len(beacons)
    if n < 3:
        raise GeometryError("fence needs at least three beacons")
    for i in range(n):
        a, b, c = beacons[i], beacons[(i + 1) % n], beacons[(i + 2) % n]
        if (b - a).cross(c - b) <= EPS:
            raise GeometryError("beacons must form a strictly convex counter-clockwise polygon")


def point_in_fence(p: Vec2, beacons: Sequence[Vec2]) -> bool:
    """Strict interior test for a convex counter-clockwise beacon polygon."""
    _check_convex_ccw(beacons)
    n = len(beacons)
    return all((beacons[(i + 1) % n] - beacons[i]).cross(p - beacons[i]) > 0.0 for i in range(n))
