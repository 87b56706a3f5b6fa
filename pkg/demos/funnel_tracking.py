"""
One defense line, one sliding attacker
======================================

A single defender guards a horizontal edge while the attacker drifts along
it.  The two channel errors are normalized and must stay inside a funnel
that shrinks from 1 to 0.8; the printout shows how much room is left.
"""

import math

from safeherd.escort_game import EscortChannel, GameLayerParams, funnel_margin
from safeherd.geometry import DefenseLineFrame, Vec2
from safeherd.reach_avoid import judgment

params = GameLayerParams()
frame = DefenseLineFrame.from_segment(Vec2(0.0, 0.0), Vec2(20.0, 0.0))

# The fence interior is above the edge.  The defender starts off its desired
# spot, both along the line and in depth.
xa, xd = Vec2(3.0, 1.0), Vec2(3.6, -0.3)
channel = EscortChannel.start(xa, xd, frame, params)
dt = 0.05

for k in range(201):
    t = k * dt
    u, tel = channel.command(xa, xd, frame, t, dt, V_max=3.0)
    if k % 25 == 0:
        j = judgment(tel.l_a, tel.l_d, math.pi / 2 - abs(tel.e_phi), params.alpha_hat)
        print(
            f"t={t:5.2f}  e_h={tel.e_h:+.3f}  e_v={tel.e_v:+.3f}  rho={tel.rho:.3f}  "
            f"margin={funnel_margin(tel):.3f}  J={j:.3f}"
        )
    # The attacker slides right at 1 m/s with a gentle push toward the line.
    xa = xa + Vec2(1.0, -0.1 * math.sin(t)) * dt
    xd = xd + u * dt
