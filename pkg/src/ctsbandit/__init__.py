"""Thompson sampling and UCB policies for combinatorial semi-bandits."""

from .core import Action, BanditInstance, CapabilityError, CapacityError, CounterState, RegretTrace, gap, linear_reward
from .environments import (
    ConditionalBernoulli,
    IndependentBernoulli,
    MultivariateGaussian,
    SubGaussianSpec,
    equicorrelated,
    subgaussian_proxy,
)
from .oracles import Enumerated, Matching, MSets, Partition, Path
from .policies import CTSBeta, CTSGaussian, ClipCTSGaussian, CUCB, CUCBKL, ESCB, PolicyParams, make_policy

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BanditInstance",
    "CapabilityError",
    "CapacityError",
    "CounterState",
    "RegretTrace",
    "gap",
    "linear_reward",
    "ConditionalBernoulli",
    "IndependentBernoulli",
    "MultivariateGaussian",
    "SubGaussianSpec",
    "equicorrelated",
    "subgaussian_proxy",
    "Enumerated",
    "Matching",
    "MSets",
    "Partition",
    "Path",
    "CTSBeta",
    "CTSGaussian",
    "ClipCTSGaussian",
    "CUCB",
    "CUCBKL",
    "ESCB",
    "PolicyParams",
    "make_policy",
]
