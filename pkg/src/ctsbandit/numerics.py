"""Numerical kernels shared by the policies.

KL divergences and their bisection-based confidence indices, a Cholesky
factorization tolerant of rank-deficient PSD input, exploration rates, and
thin wrappers over the RNG primitives so every draw goes through a
caller-owned :class:`numpy.random.Generator`.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy.special import rel_entr

__all__ = [
    "ExplorationRate",
    "NotPSDError",
    "bernoulli_kl",
    "klucb_index",
    "klucb_indices",
    "kllcb_indices",
    "cholesky",
    "standard_normal",
    "beta_sample",
    "make_rng",
]

PIVOT_TOL = 1e-10


class NotPSDError(ValueError):
    """Raised when a matrix handed to :func:`cholesky` is not PSD."""


class ExplorationRate(enum.Enum):
    LOG_T = "log_t"
    LOG_T_PLUS_4_LOGLOG_T = "log_t_plus_4_loglog_t"

    def __call__(self, t: float) -> float:
        if t <= 1:
            return 0.0
        value = np.log(t)
        if self is ExplorationRate.LOG_T_PLUS_4_LOGLOG_T:
            value += 4.0 * np.log(np.log(t))
        return max(0.0, float(value))

    @classmethod
    def parse(cls, value) -> "ExplorationRate":
        if isinstance(value, cls):
            return value
        aliases = {"log": cls.LOG_T, "logt": cls.LOG_T, "log_t": cls.LOG_T,
                   "log_t_plus_4_loglog_t": cls.LOG_T_PLUS_4_LOGLOG_T,
                   "loglog": cls.LOG_T_PLUS_4_LOGLOG_T}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown exploration rate {value!r}") from None


def bernoulli_kl(p, q):
    """Bernoulli KL divergence kl(p, q), vectorized.

    Uses the conventions 0 log 0 = 0 and x log(x/0) = +inf, so a mismatched
    boundary q returns +inf instead of raising.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = rel_entr(p, q) + rel_entr(1.0 - p, 1.0 - q)
    return out[()] if out.ndim == 0 else out


def _bisect_upper(mean, count, threshold, max_iter=100, xtol=1e-9, ftol=1e-9):
    """Bisection for the largest q in [mean, 1] with count * kl(mean, q) <= threshold.

    Stops once the bracket is narrower than ``xtol`` and count * kl differs by
    at most ``ftol`` (relative to the threshold) across it, or when the
    bracket no longer shrinks in floating point.
    """
    p = np.atleast_1d(np.asarray(mean, dtype=float))
    count = np.broadcast_to(np.asarray(count, dtype=float), p.shape)
    # kl(p, q) = neg_entropy - p log q - (1 - p) log(1 - q)
    neg_entropy = rel_entr(p, 1.0) + rel_entr(1.0 - p, 1.0)
    budget = threshold / count
    fscale = ftol * max(threshold, 1.0) / count
    lo = p.copy()
    hi = np.ones_like(p)
    f_lo = np.zeros_like(p)
    f_hi = np.full_like(p, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            active = (mid > lo) & (mid < hi) & ((hi - lo > xtol) | (f_hi - f_lo > fscale))
            if not active.any():
                break
            f_mid = neg_entropy - p * np.log(mid) - (1.0 - p) * np.log1p(-mid)
            up = active & (f_mid <= budget)
            down = active & ~up
            lo = np.where(up, mid, lo)
            f_lo = np.where(up, f_mid, f_lo)
            hi = np.where(down, mid, hi)
            f_hi = np.where(down, f_mid, f_hi)
    # the bracket never left 1: the whole interval is feasible
    lo = np.where(f_hi == np.inf, 1.0, lo)
    return lo if np.ndim(mean) else lo[0]


def klucb_index(mean: float, count: float, threshold: float) -> float:
    """Largest q in [mean, 1] with ``count * kl(mean, q) <= threshold``.

    Bisection stops once the bracket is below 1e-9 and the divergence is
    pinned to within 1e-9 of the threshold (at most 100 halvings).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if threshold <= 0:
        return float(mean)
    return float(_bisect_upper(mean, count, threshold))


def klucb_indices(means, counts, threshold: float) -> np.ndarray:
    """Vectorized :func:`klucb_index`; arms with zero count get index 1."""
    means = np.asarray(means, dtype=float)
    counts = np.asarray(counts, dtype=float)
    out = np.ones_like(means)
    seen = counts > 0
    if threshold <= 0:
        out[seen] = means[seen]
    elif seen.any():
        out[seen] = _bisect_upper(means[seen], counts[seen], threshold)
    return out


def kllcb_indices(means, counts, threshold: float) -> np.ndarray:
    """Smallest q in [0, mean] with ``count * kl(mean, q) <= threshold``.

    Obtained from the upper index via kl(p, q) = kl(1 - p, 1 - q); arms with
    zero count get index 0.
    """
    return 1.0 - klucb_indices(1.0 - np.asarray(means, dtype=float), counts, threshold)


def cholesky(sigma, tol: float = PIVOT_TOL) -> np.ndarray:
    """Lower Cholesky factor of a symmetric PSD matrix.

    Pivots in ``[-tol, 0]`` are flattened to zero so rank-deficient PSD input
    factorizes; a pivot below ``-tol`` raises :class:`NotPSDError`.
    """
    a = np.array(sigma, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if pivot < -tol:
            raise NotPSDError(f"pivot {pivot:.3e} at column {j}")
        if pivot <= tol:
            # rank-deficient direction; the residual column is numerically zero
            continue
        d = np.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / d
    return L


def make_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator determined by ``(master_seed, *key)``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))


def standard_normal(rng: np.random.Generator, size=None):
    return rng.standard_normal(size)


def beta_sample(a, b, rng: np.random.Generator):
    """Beta(a, b) draws, elementwise over array-valued parameters."""
    return rng.beta(a, b)
