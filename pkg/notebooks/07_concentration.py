"""
How often do Beta samples stray?
================================

Counts rounds where the sampled scores of the played action sit further
from the empirical means than sqrt(0.5 log(|A| 2^m T) sum 1/N_i). The
expected count is at most one per run.
"""

from ctsbandit.harness import ExperimentConfig, diagnostic_concentration

cfg = ExperimentConfig.from_dict({
    "name": "concentration",
    "horizon": 5000,
    "repetitions": 5,
    "master_seed": 3,
    "instance": {"family": "msets", "n": 6, "m": 2, "outcomes": "bernoulli"},
    "policies": [{"kind": "cts_beta"}],
})
for scale in (0.25, 0.5, 1.0):
    report = diagnostic_concentration(cfg, radius_scale=scale)
    print(f"radius x{scale}: {report.counts} (total {report.total})")
