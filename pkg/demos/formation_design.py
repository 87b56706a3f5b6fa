"""
Designing the herding formation
===============================

How big must the defender ring be, and where do the fence edges go, so that
an attacker anywhere on its pursuit circle can be held by the defender of
its sector?
"""

import math

import numpy as np

from safeherd.formation import critical_profile, design_formation, layout
from safeherd.geometry import Vec2, los_geometry
from safeherd.reach_avoid import judgment

# The reference setting: three defenders, pursuit radius 0.5 m, zoom factor 2
# and a design speed ratio of 0.65.
f = design_formation(n=3, eps_p=0.5, k_p=2.0, alpha_hat=0.65)
print(f"defender ring radius  eps_D = {f.eps_d:.6f} m")
print(f"adjacent spacing            = {2 * f.eps_d * math.sin(f.lam / 2):.4f} m")
print(f"critical line distance      = {f.l_xi_min:.6f} m")
print(f"fence circumradius    eps_B = {f.eps_b:.6f} m  (apothem {f.apothem:.5f} m)")

# The critical profile gives, for each attacker angle on the pursuit circle,
# the largest admissible defender-to-line distance.  Its minimum over half a
# sector fixes where the defense line must sit.
eta = np.linspace(0.0, f.lam / 2, 7)
for e in eta:
    print(f"  eta = {e:5.3f} rad   profile = {critical_profile(e, f.eps_p, f.eps_d, f.alpha_hat):.5f} m")

# Place the formation around the origin and sweep the attacker around the
# pursuit circle.  For the defender of the attacker's sector the judgment
# value stays non-negative, touching zero at the critical angle.
lay = layout(Vec2(0.0, 0.0), f)
worst = math.inf
for k in range(720):
    th = 2 * math.pi * (k + 0.5) / 720
    i = int(th // f.lam) % f.n
    g = los_geometry(Vec2.polar(f.eps_p, th), lay.defender_targets[i], lay.beacon_targets[i], lay.beacon_targets[(i + 1) % f.n])
    worst = min(worst, judgment(g.l_a, g.l_d, g.phi, f.alpha_hat))
print(f"smallest judgment value on the pursuit circle: {worst:.3e}")
