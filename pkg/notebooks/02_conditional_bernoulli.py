"""
Bernoulli outcomes conditioned on their sum
===========================================

Independent Bernoulli(p_i) draws conditioned on summing to s. The inclusion
probabilities come from an elementary symmetric polynomial recursion, and
the sampler draws exactly from the conditional law.
"""

import itertools

import numpy as np

from ctsbandit.environments import (
    ConditionalBernoulli,
    conditional_inclusion_probabilities,
    elementary_symmetric,
    sample_conditional_bernoulli,
)

# e_2 of the odds (0.25, 4, 1) is 0.25*4 + 0.25*1 + 4*1
print("e_2 =", elementary_symmetric([0.25, 4, 1], 2)[0, 2])

# two arms, one success: 0.2*0.2 against 0.8*0.8, i.e. 1/17 and 16/17
print("pi =", conditional_inclusion_probabilities([0.2, 0.8], 1))

# against full enumeration on a small case
p = np.array([0.1, 0.35, 0.5, 0.7, 0.9, 0.25])
s = 3
weights, incl = 0.0, np.zeros(len(p))
for ones in itertools.combinations(range(len(p)), s):
    x = np.zeros(len(p))
    x[list(ones)] = 1
    w = np.prod(np.where(x == 1, p, 1 - p))
    weights += w
    incl += w * x
print("\nDP        ", np.round(conditional_inclusion_probabilities(p, s), 6))
print("enumerated", np.round(incl / weights, 6))

# sampling: every draw sums to s
rng = np.random.default_rng(1)
draws = np.array([sample_conditional_bernoulli(p, s, rng) for _ in range(50_000)])
print("\nsums seen:", set(draws.sum(axis=1)))
print("empirical ", np.round(draws.mean(axis=0), 3))

# The shortest-path environment negates costs; its mean is the exact
# conditional mean, which is what regret is measured against.
env = ConditionalBernoulli(p, s, sign=-1)
print("\nenvironment mean", np.round(env.mean, 3), "sample", env.sample(rng))
