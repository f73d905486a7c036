"""Domain types shared by oracles, environments, policies and the harness."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from .environments import Environment
    from .oracles import ActionSpace

__all__ = [
    "CapabilityError",
    "CapacityError",
    "Action",
    "CounterState",
    "BanditInstance",
    "RegretTrace",
    "linear_reward",
    "gap",
    "update_counters",
]


class CapabilityError(ValueError):
    """An operation is not supported for this kind of space, instance or policy."""


class CapacityError(RuntimeError):
    """Enumeration would exceed the configured cap."""


class Action(tuple):
    """A super arm: a sorted, duplicate-free, non-empty tuple of arm indices."""

    __slots__ = ()

    def __new__(cls, arms: Sequence[int] = (), n: Optional[int] = None):
        arms = tuple(int(a) for a in arms)
        if not arms:
            raise ValueError("an action must contain at least one arm")
        if any(b <= a for a, b in zip(arms, arms[1:])):
            arms = tuple(sorted(set(arms)))
        if arms[0] < 0 or (n is not None and arms[-1] >= n):
            raise IndexError(f"arm index out of range in {arms} (n={n})")
        return super().__new__(cls, arms)

    @classmethod
    def from_mask(cls, mask) -> "Action":
        return cls(np.flatnonzero(mask))

    @property
    def index(self) -> np.ndarray:
        return np.fromiter(self, dtype=np.intp, count=len(self))

    def incidence(self, n: int) -> np.ndarray:
        e = np.zeros(n, dtype=np.int8)
        e[list(self)] = 1
        return e

    def __repr__(self):
        return f"Action{tuple(self)}"


def linear_reward(action: Sequence[int], mu) -> float:
    """r(A, mu) = sum of mu over the arms of A."""
    mu = np.asarray(mu, dtype=float)
    idx = np.asarray(action, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= mu.shape[0]):
        raise IndexError(f"action {tuple(action)} out of range for {mu.shape[0]} arms")
    return float(mu[idx].sum())


@dataclass
class CounterState:
    """Per-arm pull counters and outcome sums, optionally with pair counters.

    ``pair_pulls[i, j]`` counts rounds in which i and j were played together;
    its diagonal mirrors ``pulls``.
    """

    n: int
    pulls: np.ndarray = None
    sums: np.ndarray = None
    pair_pulls: Optional[np.ndarray] = None

    @classmethod
    def fresh(cls, n: int, track_pairs: bool = False) -> "CounterState":
        return cls(
            n=n,
            pulls=np.zeros(n, dtype=np.int64),
            sums=np.zeros(n),
            pair_pulls=np.zeros((n, n), dtype=np.int64) if track_pairs else None,
        )

    @property
    def means(self) -> np.ndarray:
        """Empirical means; NaN for arms never pulled."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.pulls > 0, self.sums / np.maximum(self.pulls, 1), np.nan)

    def update(self, action: Sequence[int], outcomes) -> "CounterState":
        idx = np.asarray(action, dtype=np.intp)
        x = np.asarray(outcomes, dtype=float)
        if x.shape != idx.shape:
            raise ValueError("outcomes must be given exactly for the arms of the action")
        self.pulls[idx] += 1
        self.sums[idx] += x
        if self.pair_pulls is not None:
            self.pair_pulls[np.ix_(idx, idx)] += 1
        return self


def update_counters(state: CounterState, action: Sequence[int], outcomes) -> CounterState:
    return state.update(action, outcomes)


@dataclass
class BanditInstance:
    """Everything a simulation needs about one problem.

    ``gamma`` is the sub-Gaussian matrix known to the agent (C, or Gamma for
    positive-orthant control); policies derive their variance proxies from it.
    """

    space: "ActionSpace"
    env: "Environment"
    mu_star: np.ndarray
    prior_range: Optional[tuple] = None
    init_cover: Optional[list] = None
    gamma: Optional[np.ndarray] = None

    def __post_init__(self):
        self.mu_star = np.asarray(self.mu_star, dtype=float)
        if self.mu_star.shape != (self.n,):
            raise ValueError(f"mu_star must have length {self.n}")
        if not np.all(np.isfinite(self.mu_star)):
            raise ValueError("mu_star must be finite")
        if not np.allclose(self.env.mean, self.mu_star, rtol=0, atol=1e-9):
            raise ValueError("mu_star disagrees with the environment's mean")
        if self.prior_range is not None:
            a, b = map(float, self.prior_range)
            if not a < b:
                raise ValueError("prior_range must satisfy a < b")
            self.prior_range = (a, b)
        if self.init_cover is not None:
            self.init_cover = [Action(A, self.n) for A in self.init_cover]
            covered = set().union(*self.init_cover)
            if len(covered) != self.n:
                raise ValueError("init_cover does not cover every arm")
        if self.prior_range is None and self.init_cover is None:
            raise ValueError("an instance needs a prior_range or an init_cover")
        if self.gamma is not None:
            self.gamma = np.asarray(self.gamma, dtype=float)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def sign(self) -> Optional[int]:
        """+1/-1 for Bernoulli-type outcomes (outcomes in sign*[0, 1]), else None."""
        return getattr(self.env, "sign", None)

    @cached_property
    def optimal_action(self):
        return self.space.oracle(self.mu_star)

    @cached_property
    def optimal_value(self) -> float:
        return linear_reward(self.optimal_action, self.mu_star)

    def gap(self, action: Sequence[int]) -> float:
        return gap(self, action)


def gap(instance: BanditInstance, action: Sequence[int]) -> float:
    """Reward shortfall of ``action`` against the oracle's action at mu*.

    Clipped at zero so float round-off on tied optima never yields a
    negative gap.
    """
    return max(0.0, instance.optimal_value - linear_reward(action, instance.mu_star))


@dataclass
class RegretTrace:
    gaps: np.ndarray
    select_times: Optional[np.ndarray] = None

    def __post_init__(self):
        self.gaps = np.asarray(self.gaps, dtype=float)
        if np.any(self.gaps < 0):
            raise ValueError("gaps must be non-negative")

    @property
    def horizon(self) -> int:
        return self.gaps.shape[0]

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.gaps)

    @property
    def regret(self) -> float:
        return float(self.gaps.sum())
