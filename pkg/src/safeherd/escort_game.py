"""Game-layer escort control: each defender holds its own defense line.

Per edge the defender tracks two errors in the line frame:

* horizontal ``e_h = <x_D - x_A, u>``, the offset of the defender from the
  foot of the attacker's perpendicular (``u`` runs along the edge);
* vertical ``e_v = ell_D - l_d``, the gap between the adaptive desired
  distance and the defender's actual distance outside the line.

Both are normalized, confined to a shrinking prescribed-performance funnel,
and mapped through a sigmoid inverse whose Lyapunov-derived control makes
the transformed error decay exponentially.  Keeping both inside the funnel
keeps the judgment value of the edge positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import DefenseLineFrame, Vec2, ZERO, saturate

SINGULAR_TOL = 1e-9


class FunnelViolation(RuntimeError):
    """A normalized error left its prescribed-performance funnel."""


class SingularChannel(RuntimeError):
    """The funnel width collapsed to zero."""


@dataclass(frozen=True)
class GameLayerParams:
    K_Delta: float = 0.5
    kappa: float = 1.0
    K_inf: float = 0.8
    K_v: float = 1.0
    K_h: float = 1.0
    alpha_hat: float = 0.65

    def __post_init__(self) -> None:
        if not 0.0 < self.K_Delta < 1.0:
            raise ValueError("K_Delta must lie in (0, 1)")
        if not 0.0 < self.K_inf < 1.0:
            raise ValueError("K_inf must lie in (0, 1)")
        if not (self.kappa > 0 and self.K_v > 0 and self.K_h > 0):
            raise ValueError("kappa, K_v and K_h must be positive")
        if not 0.0 < self.alpha_hat < 1.0:
            raise ValueError("alpha_hat must lie in (0, 1)")

    @property
    def psi_bar(self) -> float:
        return math.acos(self.alpha_hat)


def _angular_factor(e_phi: float, alpha_hat: float) -> float:
    c = math.cos(e_phi)
    return (c - alpha_hat) / (1.0 - alpha_hat * c)


def _check_domain(l_a: float, e_phi: float, params: GameLayerParams) -> None:
    if not l_a > 0.0:
        raise FunnelViolation(f"attacker is not inside the defense line (l_a={l_a:.6g})")
    if abs(e_phi) >= params.psi_bar:
        raise FunnelViolation(f"LOS angle error {e_phi:.6g} outside the admissible band")


def admissible_distance(l_a: float, e_phi: float, alpha_hat: float) -> float:
    """Largest ``l_d`` with a positive judgment value at this LOS angle."""
    return l_a / alpha_hat * _angular_factor(e_phi, alpha_hat)


def desired_distance(l_a: float, e_phi: float, params: GameLayerParams) -> float:
    _check_domain(l_a, e_phi, params)
    return (1.0 - params.K_Delta) * admissible_distance(l_a, e_phi, params.alpha_hat)


def normalizers(l_a: float, l_d: float, e_phi: float, params: GameLayerParams, upper_side: bool = True) -> tuple[float, float]:
    """``(g_tilde, f_tilde)``.

    With ``K_Delta != 1/2`` the vertical normalizer depends on which side of
    ``ell_D`` the error started; ``upper_side`` selects ``e_v >= 0``.
    """
    _check_domain(l_a, e_phi, params)
    g = (l_d + l_a) * math.tan(params.psi_bar)
    k = 1.0 - params.K_Delta if upper_side else params.K_Delta
    return g, k * admissible_distance(l_a, e_phi, params.alpha_hat)


def ppf_rho(t: float, params: GameLayerParams) -> float:
    if t < 0:
        raise ValueError("elapsed escort time must be non-negative")
    return (1.0 - params.K_inf) * math.exp(-params.kappa * t) + params.K_inf


def ppf_rho_dot(t: float, params: GameLayerParams) -> float:
    return -params.kappa * (1.0 - params.K_inf) * math.exp(-params.kappa * t)


def transform_error(e_tilde: float, rho: float, lo: float = 1.0, hi: float = 1.0) -> float:
    """Inverse sigmoid for the funnel ``-lo*rho < e_tilde < hi*rho``.

    With ``lo = hi = 1`` this is ``artanh(e_tilde / rho)``.
    """
    r = e_tilde / rho
    if not -lo < r < hi:
        raise FunnelViolation(f"normalized error {r:.6g} outside ({-lo:.6g}, {hi:.6g})")
    if lo == 1.0 and hi == 1.0:
        return math.atanh(r)
    return 0.5 * math.log((lo + r) / (hi - r))


def sigmoid(eps: float, lo: float = 1.0, hi: float = 1.0) -> float:
    """Inverse of :func:`transform_error` (in units of ``rho``)."""
    if lo == 1.0 and hi == 1.0:
        return math.tanh(eps)
    w = math.exp(2.0 * eps)
    return (hi * w - lo) / (w + 1.0)


def _inverse_slope(r: float, lo: float, hi: float) -> float:
    """d S^-1 / d r."""
    return 0.5 * (lo + hi) / ((lo + r) * (hi - r))


@dataclass(frozen=True)
class ChannelState:
    e: float
    normalizer: float
    e_tilde: float
    rho: float
    epsilon: float
    delta_f: float = 1.0
    delta_g: float = 1.0
    lo: float = 1.0
    hi: float = 1.0


def channel_state(e: float, normalizer: float, rho: float, lo: float = 1.0, hi: float = 1.0) -> ChannelState:
    if normalizer * rho < SINGULAR_TOL:
        raise SingularChannel(f"funnel width {normalizer * rho:.3g} too small")
    et = e / normalizer
    return ChannelState(e, normalizer, et, rho, transform_error(et, rho, lo, hi), lo=lo, hi=hi)


def _channel_law(state: ChannelState, norm_dot: float, rho_dot: float, gain: float) -> float:
    w = state.normalizer * state.rho
    if w < SINGULAR_TOL:
        raise SingularChannel(f"funnel width {w:.3g} too small")
    e = state.e
    r = e / w
    if state.lo == 1.0 and state.hi == 1.0:
        core = -gain * state.epsilon * (w * w - e * e) / w
    else:
        core = -gain * state.epsilon * w / _inverse_slope(r, state.lo, state.hi)
    return core + e * (norm_dot * state.rho + state.normalizer * rho_dot) / w


def vertical_control(
    state: ChannelState, f_tilde_dot: float, rho_dot: float, ell_D_dot: float, K_v: float
) -> float:
    """Rate of the inward line-frame coordinate that gives ``d eps_v/dt = -K_v eps_v``.

    The inward coordinate grows as ``l_d`` shrinks, hence ``d e_v/dt = g_v + ell_D_dot``.
    """
    return _channel_law(state, f_tilde_dot, rho_dot, K_v) - ell_D_dot


def horizontal_control(
    state: ChannelState, g_tilde_dot: float, rho_dot: float, attacker_dl_velocity: float, K_h: float
) -> float:
    return _channel_law(state, g_tilde_dot, rho_dot, K_h) + attacker_dl_velocity


def escort_input(g_h: float, g_v: float, frame: DefenseLineFrame, V_max: float, feedforward: Vec2 = ZERO) -> Vec2:
    """Rotate the line-frame command to ground and saturate.

    ``feedforward`` carries the common fence velocity so the channel laws act
    on fence-relative motion.
    """
    return saturate(frame.to_ground(Vec2(g_h, g_v)) + feedforward, V_max)


@dataclass(frozen=True)
class EdgeErrors:
    l_a: float
    l_d: float
    e_phi: float
    e_h: float
    e_v: float
    ell_D: float
    s_a: float


def edge_errors(xa: Vec2, xd: Vec2, frame: DefenseLineFrame, params: GameLayerParams) -> EdgeErrors:
    """Signed line distances (attacker inside and defender outside are positive) and channel errors."""
    n = frame.normal
    l_a = (xa - frame.origin).dot(n)
    l_d = -(xd - frame.origin).dot(n)
    e_h = (xd - xa).dot(frame.axis)
    if l_a + l_d <= 0.0:
        raise FunnelViolation("defender is not on the far side of the attacker")
    e_phi = math.atan2(e_h, l_a + l_d)
    ell = desired_distance(l_a, e_phi, params)
    return EdgeErrors(l_a, l_d, e_phi, e_h, ell - l_d, ell, (xa - frame.origin).dot(frame.axis))


@dataclass
class EscortTelemetry:
    e_h: float
    e_v: float
    e_tilde_h: float
    e_tilde_v: float
    rho: float
    eps_h: float
    eps_v: float
    g_h: float
    g_v: float
    l_a: float
    l_d: float
    e_phi: float


@dataclass
class EscortChannel:
    """Per-defender channel memory for backward-difference derivatives."""

    params: GameLayerParams
    upper_side: bool = True
    lo_v: float = 1.0
    hi_v: float = 1.0
    _prev: tuple[float, float, float, float] | None = field(default=None, repr=False)

    @classmethod
    def start(cls, xa: Vec2, xd: Vec2, frame: DefenseLineFrame, params: GameLayerParams) -> EscortChannel:
        """Fix the vertical funnel shape from the errors at the start of escort."""
        if params.K_Delta == 0.5:
            return cls(params)
        err = edge_errors(xa, xd, frame, params)
        kd = params.K_Delta
        if err.e_v >= 0.0:
            return cls(params, True, lo_v=min(kd / (1.0 - kd), 1.0), hi_v=1.0)
        return cls(params, False, lo_v=1.0, hi_v=min((1.0 - kd) / kd, 1.0))

    def command(
        self, xa: Vec2, xd: Vec2, frame: DefenseLineFrame, t: float, dt: float, V_max: float, v_fence: Vec2 = ZERO
    ) -> tuple[Vec2, EscortTelemetry]:
        p = self.params
        err = edge_errors(xa, xd, frame, p)
        g_t, f_t = normalizers(err.l_a, err.l_d, err.e_phi, p, self.upper_side)
        rho, rho_dot = ppf_rho(t, p), ppf_rho_dot(t, p)
        sh = channel_state(err.e_h, g_t, rho)
        sv = channel_state(err.e_v, f_t, rho, self.lo_v, self.hi_v)
        if self._prev is None:
            f_dot = g_dot = ell_dot = va = 0.0
        else:
            pf, pg, pl, ps = self._prev
            f_dot, g_dot, ell_dot, va = (f_t - pf) / dt, (g_t - pg) / dt, (err.ell_D - pl) / dt, (err.s_a - ps) / dt
        self._prev = (f_t, g_t, err.ell_D, err.s_a)
        g_v = vertical_control(sv, f_dot, rho_dot, ell_dot, p.K_v)
        g_h = horizontal_control(sh, g_dot, rho_dot, va, p.K_h)
        u = escort_input(g_h, g_v, frame, V_max, v_fence)
        tel = EscortTelemetry(
            err.e_h, err.e_v, sh.e_tilde, sv.e_tilde, rho, sh.epsilon, sv.epsilon, g_h, g_v, err.l_a, err.l_d, err.e_phi
        )
        return u, tel


def funnel_margin(tel: EscortTelemetry) -> float:
    """Smallest gap between a normalized error and its funnel edge."""
    return min(tel.rho - abs(tel.e_tilde_h), tel.rho - abs(tel.e_tilde_v))

