"""
Many random attackers, with and without obstacles
=================================================

The escort guarantee does not depend on what the attacker does.  Sweep the
random seed, then repeat the sweep with the obstacles removed to see what
the detours cost.
"""

from dataclasses import replace

from safeherd.batch import run_batch
from safeherd.scenario import load_reference

cfg = load_reference()
seeds = range(1, 9)

for label, scenario in (("obstacles", cfg), ("free space", replace(cfg, obstacles=()))):
    summary = run_batch(scenario, seeds, workers=2)
    t2 = [o.T_f2 for _, o in summary.outcomes if o.T_f2 is not None]
    print(
        f"{label:>10}: {summary.n_done}/{summary.n_runs} done, "
        f"mean T_f2 {sum(t2) / len(t2):.1f} s, min J {summary.min_J:.3f}, "
        f"max funnel {summary.max_funnel:.3f}"
    )
