"""
Shortest paths with Bernoulli costs
===================================

Arc costs are Bernoulli; outcomes are reported as rewards in [-1, 0]. The
conditioned variant fixes the total cost, which makes arcs negatively
dependent, and there we use D_i = 1/4 for the Gaussian samplers.
"""

import dataclasses

from ctsbandit.harness import load_config, run_experiment

for preset in ("shortest_path_indep", "shortest_path_cond"):
    base = load_config(preset)
    cfg = dataclasses.replace(base, sweep=None, horizon=1000, repetitions=2,
                              instance=dict(base.instance, s=90))
    result = run_experiment(cfg)
    print(preset)
    for name in result.policies:
        print(f"  {name:18s} {result.final_regret(name).mean():8.1f}")
