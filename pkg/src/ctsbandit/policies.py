"""Combinatorial semi-bandit policies.

Every policy follows the same life cycle::

    policy.reset(instance)
    for t in 1..T:
        action = policy.select(t, rng)
        policy.observe(t, action, outcomes, rng)   # outcomes = X_t[action]

Policies work in reward space (the oracle maximizes). Cost problems such as
shortest paths carry ``instance.sign == -1``: outcomes live in [-1, 0] and
the Beta/KL policies model the cost ``-X`` in [0, 1], negating back before
calling the oracle. Negation has no constant offset, so it does not bias
actions of different sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Action, BanditInstance, CapabilityError, CounterState
from .environments import subgaussian_proxy
from .numerics import ExplorationRate, cholesky, kllcb_indices, klucb_indices
from .oracles import Path

__all__ = [
    "PolicyParams",
    "Policy",
    "CTSBeta",
    "CTSGaussian",
    "ClipCTSGaussian",
    "CUCB",
    "CUCBKL",
    "ESCB",
    "POLICIES",
    "make_policy",
    "correlated_prior_covariance",
]

PRIOR_KINDS = ("independent", "correlated", "common")


@dataclass
class PolicyParams:
    """Tuning shared by the policy family.

    ``D`` and ``gamma`` default to values derived from the instance's
    sub-Gaussian matrix. ``D`` may be a scalar (broadcast to every arm).
    """

    beta: float = 1.0
    D: Optional[object] = None
    gamma: Optional[object] = None
    exploration: ExplorationRate = ExplorationRate.LOG_T_PLUS_4_LOGLOG_T
    prior: str = "independent"
    enumeration_cap: int = 10**6
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        self.exploration = ExplorationRate.parse(self.exploration)
        if self.prior not in PRIOR_KINDS:
            raise ValueError(f"prior must be one of {PRIOR_KINDS}")


class Policy:
    """Base class: counters, the initial cover, and oracle plumbing."""

    kind = "policy"
    uses_init_cover = True
    track_pairs = False

    def __init__(self, params: Optional[PolicyParams] = None, name: Optional[str] = None, **kwargs):
        self.params = params if params is not None else PolicyParams(**kwargs)
        self.name = name or self.kind
        self.instance: Optional[BanditInstance] = None

    # life cycle ---------------------------------------------------------

    def reset(self, instance: BanditInstance) -> "Policy":
        self.instance = instance
        self.space = instance.space
        self.n = instance.n
        self.counters = CounterState.fresh(self.n, track_pairs=self.track_pairs)
        self._pending = list(instance.init_cover) if (self.uses_init_cover and instance.init_cover) else []
        self._clamp = None
        if isinstance(self.space, Path):
            if instance.prior_range is None:
                raise CapabilityError(f"{self.name}: path spaces need a prior range")
            self._clamp = instance.prior_range
        self._setup()
        return self

    def _setup(self):
        pass

    def select(self, t: int, rng: np.random.Generator) -> Action:
        if self._pending:
            return self._pending.pop(0)
        return self._select(t, rng)

    def _select(self, t, rng) -> Action:
        raise NotImplementedError

    def observe(self, t: int, action, outcomes, rng: Optional[np.random.Generator] = None):
        self.counters.update(action, outcomes)

    # helpers ------------------------------------------------------------

    def _oracle(self, weights) -> Action:
        if self._clamp is not None:
            weights = np.clip(weights, *self._clamp)
        return self.space.oracle(weights)

    def _gamma(self) -> np.ndarray:
        g = self.params.gamma if self.params.gamma is not None else self.instance.gamma
        if g is None:
            raise CapabilityError(f"{self.name}: no sub-Gaussian matrix available")
        g = np.asarray(g, dtype=float)
        if g.ndim == 0:
            return g * np.eye(self.n)
        if g.ndim == 1:
            return np.diag(g)
        return g

    def _proxies(self, positive_part: bool) -> np.ndarray:
        if self.params.D is not None:
            D = np.broadcast_to(np.asarray(self.params.D, dtype=float), (self.n,)).copy()
        else:
            D = subgaussian_proxy(self._gamma(), self.space, positive_part=positive_part)
        if np.any(D < 0):
            raise ValueError("proxies must be non-negative")
        return D

    def _uniform_prior(self, rng, k):
        if self.instance.prior_range is None:
            raise CapabilityError(f"{self.name}: unpulled arm without a prior range")
        a, b = self.instance.prior_range
        return rng.uniform(a, b, size=k)

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r})"


# --- Thompson sampling ------------------------------------------------------

class CTSBeta(Policy):
    """Beta-Bernoulli Thompson sampling with Bernoulli binarization.

    ``a`` and ``b`` start at 1 (uniform prior). Each observed outcome, mapped
    to [0, 1], is replaced by a Bernoulli draw with that success probability,
    which updates exactly one of ``a_i``, ``b_i``. ``counters.sums`` holds the
    binarized draws, so ``counters.means`` is the empirical mean of Y.
    """

    kind = "cts_beta"
    uses_init_cover = False

    def _setup(self):
        self.sign = self.instance.sign
        if self.sign is None:
            raise CapabilityError(f"{self.name}: needs outcomes in a [0, 1] box (Bernoulli-type instance)")
        self.a = np.ones(self.n, dtype=np.int64)
        self.b = np.ones(self.n, dtype=np.int64)
        self.last_theta = None

    def _select(self, t, rng):
        theta = rng.beta(self.a, self.b)
        self.last_theta = theta
        return self._oracle(self.sign * theta)

    def observe(self, t, action, outcomes, rng=None):
        mapped = self.sign * np.asarray(outcomes, dtype=float)
        if np.any((mapped < -1e-12) | (mapped > 1 + 1e-12)):
            raise ValueError(f"{self.name}: outcome outside the unit box after mapping")
        y = (rng.random(mapped.shape) < mapped).astype(np.int64)
        idx = np.asarray(action, dtype=np.intp)
        self.a[idx] += y
        self.b[idx] += 1 - y
        self.counters.update(action, y)


def correlated_prior_covariance(C, pulls, pair_pulls, beta: float = 1.0) -> np.ndarray:
    """beta * C_ij N_ij / (N_i N_j) over the given (all pulled) arms."""
    N = np.asarray(pulls, dtype=float)
    return beta * np.asarray(C) * np.asarray(pair_pulls, dtype=float) / np.outer(N, N)


class CTSGaussian(Policy):
    """Gaussian Thompson sampling around the empirical means.

    ``prior`` selects the sampling covariance: ``independent`` uses
    beta*D_i/N_i per arm, ``correlated`` the full matrix
    beta*C_ij*N_ij/(N_i*N_j), ``common`` the rank-one beta/sqrt(N_i*N_j) (a
    single shared standard normal). Never-pulled arms are drawn uniformly on
    the prior range.
    """

    kind = "cts_gaussian"

    def __init__(self, params=None, name=None, **kwargs):
        super().__init__(params, name, **kwargs)
        self.track_pairs = self.params.prior == "correlated"
        if name is None and self.params.prior != "independent":
            self.name = f"{self.kind}_{self.params.prior}"

    def _setup(self):
        prior = self.params.prior
        if prior == "independent":
            self.D = self._proxies(positive_part=False)
        elif prior == "correlated":
            self.C = self._gamma()
        self.last_covariance = None

    def _sample(self, t, rng):
        N = self.counters.pulls
        seen = N > 0
        theta = np.empty(self.n)
        if not seen.all():
            theta[~seen] = self._uniform_prior(rng, int((~seen).sum()))
        if not seen.any():
            return theta
        idx = np.flatnonzero(seen)
        mean = self.counters.sums[idx] / N[idx]
        beta = self.params.beta
        prior = self.params.prior
        if prior == "independent":
            theta[idx] = mean + np.sqrt(beta * self.D[idx] / N[idx]) * rng.standard_normal(idx.size)
        elif prior == "correlated":
            cov = correlated_prior_covariance(self.C[np.ix_(idx, idx)], N[idx],
                                              self.counters.pair_pulls[np.ix_(idx, idx)], beta)
            self.last_covariance = cov
            theta[idx] = mean + cholesky(cov) @ rng.standard_normal(idx.size)
        else:
            g = rng.standard_normal()
            theta[idx] = mean + np.sqrt(beta) * g / np.sqrt(N[idx])
        return theta

    def _select(self, t, rng):
        return self._oracle(self._sample(t, rng))


class ClipCTSGaussian(CTSGaussian):
    """Independent Gaussian sampling clipped into [mean, UCB] per arm.

    The upper end is the CUCB index mean + sqrt(2 Gamma_ii rate(t) / N_i);
    D defaults to the positive-part proxies of Gamma.
    """

    kind = "clip_cts_gaussian"

    def __init__(self, params=None, name=None, **kwargs):
        super().__init__(params, name, **kwargs)
        if self.params.prior != "independent":
            raise ValueError("the clipped policy samples with an independent prior")
        self.track_pairs = False

    def _setup(self):
        self.D = self._proxies(positive_part=True)
        self.gamma_diag = np.diag(self._gamma()).copy()
        self.last_theta = None

    def _select(self, t, rng):
        theta = self._sample(t, rng)
        N = self.counters.pulls
        seen = N > 0
        if seen.any():
            idx = np.flatnonzero(seen)
            mean = self.counters.sums[idx] / N[idx]
            ucb = mean + np.sqrt(self.gamma_diag[idx] * 2.0 * self.params.exploration(t) / N[idx])
            theta[idx] = np.minimum(np.maximum(theta[idx], mean), ucb)
        self.last_theta = theta
        return self._oracle(theta)


# --- UCB baselines ------------------------------------------------------------

class CUCB(Policy):
    """Oracle on the per-arm UCB index mean + sqrt(2 Gamma_ii rate(t) / N_i)."""

    kind = "cucb"

    def _setup(self):
        self.gamma_diag = np.diag(self._gamma()).copy()

    def indices(self, t) -> np.ndarray:
        N = self.counters.pulls
        seen = N > 0
        out = np.empty(self.n)
        upper = self.instance.prior_range[1] if self.instance.prior_range else np.inf
        out[~seen] = upper
        idx = np.flatnonzero(seen)
        out[idx] = (self.counters.sums[idx] / N[idx]
                    + np.sqrt(self.gamma_diag[idx] * 2.0 * self.params.exploration(t) / N[idx]))
        return out

    def _select(self, t, rng):
        index = self.indices(t)
        if np.isinf(index).any():
            # only reachable without a prior range: force the unpulled arms
            index = np.where(np.isinf(index), 1.0, 0.0)
        return self._oracle(index)


class CUCBKL(Policy):
    """Oracle on KL-UCB indices of the mapped [0, 1] outcomes.

    For cost problems (sign -1) the optimistic reward is minus the lower KL
    confidence bound of the cost.
    """

    kind = "cucb_kl"

    def _setup(self):
        self.sign = self.instance.sign
        if self.sign is None:
            raise CapabilityError(f"{self.name}: needs Bernoulli-type outcomes")

    def indices(self, t) -> np.ndarray:
        N = self.counters.pulls
        mapped = np.where(N > 0, self.sign * self.counters.sums / np.maximum(N, 1), 0.0)
        rate = self.params.exploration(t)
        if self.sign > 0:
            return klucb_indices(mapped, N, rate)
        return -kllcb_indices(mapped, N, rate)

    def _select(self, t, rng):
        return self._oracle(self.indices(t))


class ESCB(Policy):
    """Ellipsoidal-confidence index maximized by exhaustive enumeration.

    index(A) = sum_{i in A} mean_i + sqrt(2 rate(t) sum_{i in A} Gamma_ii / N_i).
    Any action holding a never-pulled arm has an infinite index. Actions are
    scanned one by one in lexicographic incidence order, so the per-round cost
    grows with the size of the action space; ``extra={"vectorized": True}``
    evaluates all indices with one matrix product instead.
    """

    kind = "escb"

    def _setup(self):
        self.gamma_diag = np.diag(self._gamma()).copy()
        actions = self.space.enumerate(self.params.enumeration_cap)
        actions.sort(key=lambda A: tuple(A.incidence(self.n)))
        self.actions = actions
        self.vectorized = bool(self.params.extra.get("vectorized", False))
        if self.vectorized:
            self.incidence = np.array([A.incidence(self.n) for A in actions], dtype=float)

    def _stats(self):
        N = self.counters.pulls
        seen = N > 0
        safe_n = np.maximum(N, 1)
        mean = np.where(seen, self.counters.sums / safe_n, 0.0)
        var = np.where(seen, self.gamma_diag / safe_n, 0.0)
        return mean, var, seen

    def indices(self, t) -> np.ndarray:
        """All action indices, in the order of ``self.actions``."""
        mean, var, seen = self._stats()
        incidence = self.incidence if self.vectorized else np.array(
            [A.incidence(self.n) for A in self.actions], dtype=float)
        index = incidence @ mean + np.sqrt(2.0 * self.params.exploration(t) * (incidence @ var))
        if not seen.all():
            index[incidence @ (~seen) > 0] = np.inf
        return index

    def _select(self, t, rng):
        if self.vectorized:
            return self.actions[int(np.argmax(self.indices(t)))]
        mean, var, seen = self._stats()
        mean, var, unseen = mean.tolist(), var.tolist(), (~seen).tolist()
        scale = 2.0 * self.params.exploration(t)
        best, best_value = self.actions[0], -math.inf
        for A in self.actions:
            if any(unseen[i] for i in A):
                value = math.inf
            else:
                value = sum(mean[i] for i in A) + math.sqrt(scale * sum(var[i] for i in A))
            if value > best_value:
                best, best_value = A, value
        return best


POLICIES = {cls.kind: cls for cls in (CTSBeta, CTSGaussian, ClipCTSGaussian, CUCB, CUCBKL, ESCB)}


def make_policy(kind: str, name: Optional[str] = None, **params) -> Policy:
    try:
        cls = POLICIES[kind]
    except KeyError:
        raise ValueError(f"unknown policy kind {kind!r}; choose from {sorted(POLICIES)}") from None
    return cls(PolicyParams(**params), name=name)
