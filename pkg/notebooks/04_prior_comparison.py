"""
Independent, correlated and common Gaussian priors
==================================================

The correlated prior uses C_ij N_ij / (N_i N_j) as the sampling covariance,
the common prior a single shared normal scaled by 1/sqrt(N_i). Within a
block of m arms the common prior's score variance grows like m^2 / N
instead of m / N. With C = I the correlated and independent priors
sample from the same law, so any gap between them here is run-to-run
noise. All policies share one outcome stream per repetition.
"""

import dataclasses

from ctsbandit.harness import load_config, run_experiment


def summary(cfg):
    result = run_experiment(cfg.with_overrides(couple_streams=True))
    return {name: "%.0f +- %.0f" % (result.final_regret(name).mean(), result.final_regret(name).std(ddof=1))
            for name in result.policies}


matching = load_config("prior_comparison")
for c in (0.0, 1.0):
    cfg = dataclasses.replace(matching, sweep=None, horizon=2000, repetitions=4,
                              instance=dict(matching.instance, c=c))
    print(f"matching, c = {c}:", summary(cfg))

separated = load_config("separated_msets").with_overrides(horizon=2000, repetitions=4)
print("separated blocks:", summary(separated))
