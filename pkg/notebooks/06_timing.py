"""
Per-round computation time
==========================

ESCB scans every matching, so its cost grows like q!; CUCB and the clipped
Thompson sampler call the assignment solver once per round.
"""

import dataclasses

from ctsbandit.harness import load_config, timing_report

base = load_config("timing_table")
print("q   " + "  ".join(f"{name:>18s}" for name in base.policy_names()))
for q in (3, 4, 5, 6):
    cfg = dataclasses.replace(base, sweep=None, repetitions=2, instance=dict(base.instance, q=q))
    ms = timing_report(cfg)
    print(f"{q}   " + "  ".join(f"{ms[name]:15.3f} ms" for name in base.policy_names()))
