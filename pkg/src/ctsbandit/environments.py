"""Outcome samplers for the experiment families, and sub-Gaussian proxies.

Each environment draws a full outcome vector per round (the policy only
sees the coordinates of the action it played) and exposes ``mean``, the
exact expectation used as ground truth for regret.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .core import CapabilityError, CapacityError
from .numerics import cholesky

__all__ = [
    "Environment",
    "IndependentBernoulli",
    "ConditionalBernoulli",
    "MultivariateGaussian",
    "SubGaussianSpec",
    "sample_independent_bernoulli",
    "elementary_symmetric",
    "log_elementary_symmetric",
    "conditional_inclusion_probabilities",
    "sample_conditional_bernoulli",
    "sequential_inclusion_table",
    "sample_multivariate_gaussian",
    "subgaussian_proxy",
    "equicorrelated",
    "shortest_path_means",
]

P_CLAMP = 1e-12


class Environment:
    n: int
    mean: np.ndarray

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


# --- independent Bernoulli ---------------------------------------------------

def sample_independent_bernoulli(p, sign, rng):
    p = np.asarray(p, dtype=float)
    return sign * (rng.random(p.shape) < p).astype(float)


class IndependentBernoulli(Environment):
    """Coordinates are ``sign * Bernoulli(p_i)``, independent."""

    def __init__(self, p, sign: int = 1):
        self.p = np.asarray(p, dtype=float)
        if np.any((self.p < 0) | (self.p > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.sign = sign
        self.n = self.p.shape[0]
        self.mean = sign * self.p

    def sample(self, rng):
        return sample_independent_bernoulli(self.p, self.sign, rng)


# --- conditional Bernoulli -------------------------------------------------

def _log_odds(p):
    p = np.clip(np.asarray(p, dtype=float), P_CLAMP, 1.0 - P_CLAMP)
    return np.log(p) - np.log1p(-p)


def log_elementary_symmetric(log_w, k_max: int) -> np.ndarray:
    """Log of the suffix elementary symmetric polynomials.

    Row ``j`` holds ``log e_k(w_j, ..., w_{n-1})`` for ``k = 0..k_max``; row
    ``n`` is the empty suffix. Entries that are exactly zero are ``-inf``.
    """
    log_w = np.asarray(log_w, dtype=float)
    n = log_w.shape[0]
    if k_max > n:
        raise ValueError(f"k_max={k_max} exceeds the number of odds {n}")
    table = np.full((n + 1, k_max + 1), -np.inf)
    table[n, 0] = 0.0
    for j in range(n - 1, -1, -1):
        table[j, 0] = 0.0
        table[j, 1:] = np.logaddexp(table[j + 1, 1:], log_w[j] + table[j + 1, :-1])
    return table


def elementary_symmetric(odds, k_max: int) -> np.ndarray:
    """Suffix table of elementary symmetric polynomials of non-negative odds.

    ``elementary_symmetric(w, k)[0, k]`` is ``e_k(w)``. Computed in log space
    and exponentiated, so use :func:`log_elementary_symmetric` directly when
    the values may overflow.
    """
    odds = np.asarray(odds, dtype=float)
    if np.any(odds < 0):
        raise ValueError("odds must be non-negative")
    with np.errstate(divide="ignore"):
        return np.exp(log_elementary_symmetric(np.log(odds), k_max))


def conditional_inclusion_probabilities(p, s: int) -> np.ndarray:
    """P(X_i = 1 | sum X = s) for independent X_i ~ Bernoulli(p_i).

    pi_i = w_i e_{s-1}(w without i) / e_s(w), with odds w_i = p_i / (1 - p_i)
    after clamping p away from 0 and 1.
    """
    log_w = _log_odds(p)
    n = log_w.shape[0]
    if not 0 <= s <= n:
        raise ValueError("need 0 <= s <= n")
    if s == 0:
        return np.zeros(n)
    if s == n:
        return np.ones(n)
    suffix = log_elementary_symmetric(log_w, s)
    # prefix[i, k] = log e_k(w_0, ..., w_{i-1})
    prefix = log_elementary_symmetric(log_w[::-1], s)[::-1]
    log_es = suffix[0, s]
    ks = np.arange(s)
    out = np.empty(n)
    for i in range(n):
        # e_{s-1}(w without i) = sum_a e_a(w_{<i}) e_{s-1-a}(w_{>i})
        terms = prefix[i, ks] + suffix[i + 1, s - 1 - ks]
        out[i] = np.exp(log_w[i] + logsumexp(terms) - log_es)
    return np.clip(out, 0.0, 1.0)


def sequential_inclusion_table(log_w, log_table) -> np.ndarray:
    """``P[j, r - 1]``: chance arm j is drawn when r draws remain at position j.

    Equals ``w_j e_{r-1}(w_{>j}) / e_r(w_{>=j})``; entries with ``r > n - j``
    are unreachable and left as NaN.
    """
    log_w = np.asarray(log_w, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.exp(log_w[:, None] + log_table[1:, :-1] - log_table[:-1, 1:])


def sample_conditional_bernoulli(p, s: int, rng, log_table=None, step_table=None) -> np.ndarray:
    """Exact draw of a Bernoulli(p) vector conditioned on summing to ``s``.

    Sequential scheme: arm j is included with probability
    ``w_j e_{r-1}(w_{>j}) / e_r(w_{>=j})`` where r is the remaining budget.
    Pass ``step_table`` from :func:`sequential_inclusion_table` to reuse it
    across draws.
    """
    n = len(p)
    if not 0 <= s <= n:
        raise ValueError("need 0 <= s <= n")
    if step_table is None:
        log_w = _log_odds(p)
        if log_table is None:
            log_table = log_elementary_symmetric(log_w, s)
        step_table = sequential_inclusion_table(log_w, log_table)
    probs = step_table.tolist() if isinstance(step_table, np.ndarray) else step_table
    x = np.zeros(n)
    u = rng.random(n).tolist()
    r = s
    for j in range(n):
        if r == 0:
            break
        if n - j == r:
            x[j:] = 1.0
            break
        if u[j] < probs[j][r - 1]:
            x[j] = 1.0
            r -= 1
    return x


class ConditionalBernoulli(Environment):
    """``sign * X`` with X ~ Bernoulli(p) conditioned on ``sum X = s``.

    ``mean`` is the exact conditional mean, not ``sign * p``.
    """

    def __init__(self, p, s: int, sign: int = 1):
        self.p = np.asarray(p, dtype=float)
        if np.any((self.p < 0) | (self.p > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        self.n = self.p.shape[0]
        if int(s) != s or not 0 < s < self.n:
            raise ValueError("s must be an integer with 0 < s < n")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.s = int(s)
        self.sign = sign
        log_w = _log_odds(self.p)
        self._steps = sequential_inclusion_table(log_w, log_elementary_symmetric(log_w, self.s)).tolist()
        self.inclusion = conditional_inclusion_probabilities(self.p, self.s)
        self.mean = sign * self.inclusion

    def sample(self, rng):
        return self.sign * sample_conditional_bernoulli(self.p, self.s, rng, step_table=self._steps)


# --- Gaussian --------------------------------------------------------------

def sample_multivariate_gaussian(mu, chol, rng) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    return mu + chol @ rng.standard_normal(mu.shape[0])


def equicorrelated(n: int, c: float) -> np.ndarray:
    """Covariance with unit diagonal and ``c`` off the diagonal."""
    return np.full((n, n), float(c)) + (1.0 - c) * np.eye(n)


class MultivariateGaussian(Environment):
    def __init__(self, mu, sigma):
        self.mean = np.asarray(mu, dtype=float)
        self.n = self.mean.shape[0]
        self.sigma = np.asarray(sigma, dtype=float)
        if self.sigma.shape != (self.n, self.n):
            raise ValueError("covariance shape does not match the mean")
        if not np.allclose(self.sigma, self.sigma.T):
            raise ValueError("covariance must be symmetric")
        self.chol = cholesky(self.sigma)

    def sample(self, rng):
        return sample_multivariate_gaussian(self.mean, self.chol, rng)


# --- sub-Gaussian proxies ----------------------------------------------------

@dataclass
class SubGaussianSpec:
    matrix: np.ndarray
    proxies: np.ndarray
    positive_part: bool = False

    @classmethod
    def from_matrix(cls, matrix, space, positive_part: bool = False) -> "SubGaussianSpec":
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix, subgaussian_proxy(matrix, space, positive_part), positive_part)


def subgaussian_proxy(matrix, space, positive_part: bool = False) -> np.ndarray:
    """Per-arm proxies D_i = max over actions A containing i of sum_{j in A} g(C_ij).

    ``g`` is ``abs`` or, with ``positive_part``, ``max(0, .)``. Each D_i costs
    one oracle call: giving arm i a weight larger than every other weight
    combined forces it into the maximizer, whose remaining weight is then the
    constrained maximum.
    """
    C = np.asarray(matrix, dtype=float)
    n = space.n
    if C.shape != (n, n):
        raise ValueError("matrix shape does not match the action space")
    if not np.allclose(C, C.T):
        raise ValueError("matrix must be symmetric")
    G = np.maximum(C, 0.0) if positive_part else np.abs(C)
    off = G - np.diag(np.diag(G))
    if not off.any():
        return np.diag(G).copy()

    from .oracles import Path  # the path oracle cannot take positive weights

    if isinstance(space, Path):
        try:
            actions = space.enumerate()
        except CapacityError as exc:
            raise CapabilityError("proxy on a large path space: supply D directly") from exc
        return _proxy_by_enumeration(G, actions, n)

    D = np.empty(n)
    for i in range(n):
        x = 1.0 + G[i].sum()
        w = G[i].copy()
        w[i] = x
        A = space.oracle(w)
        if i not in A:
            raise CapabilityError(f"no action contains arm {i}")
        D[i] = G[i, list(A)].sum()
    return D


def _proxy_by_enumeration(G, actions, n):
    D = np.full(n, -np.inf)
    for A in actions:
        idx = list(A)
        for i in idx:
            D[i] = max(D[i], G[i, idx].sum())
    return D


# --- mean generation ---------------------------------------------------------

def shortest_path_means(n: int, s: float, rng, max_iter: int = 5) -> np.ndarray:
    """Means uniform on [-1, 0]^n, rescaled so they sum to ``-s``.

    Entries pushed below -1 by the rescale are clipped to -1 and the free
    entries rescaled again, at most ``max_iter`` times.
    """
    if not 0 < s < n:
        raise ValueError("need 0 < s < n")
    mu = -rng.random(n)
    for _ in range(max_iter):
        free = mu > -1.0
        fixed_sum = mu[~free].sum()
        free_sum = mu[free].sum()
        if free_sum == 0:
            break
        mu[free] *= (-s - fixed_sum) / free_sum
        if np.all(mu >= -1.0):
            break
        mu = np.maximum(mu, -1.0)
    return np.maximum(mu, -1.0)
