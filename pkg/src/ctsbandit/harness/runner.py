"""Seeded simulation runs, aggregation, timing and the concentration diagnostic.

Random streams are keyed on ``(master_seed, stream, repetition, policy)`` so
results do not depend on worker count, scheduling or which subset of
policies is run. Policy streams are keyed on a CRC of the policy name.
"""

from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import BanditInstance, CapabilityError, CapacityError, RegretTrace
from ..numerics import make_rng
from ..policies import CTSBeta, Policy
from .config import ExperimentConfig, build_instance, build_policies, check_compatibility, instance_rng

__all__ = [
    "AggregatedResult",
    "simulate",
    "run_repetition",
    "run_experiment",
    "timing_report",
    "diagnostic_concentration",
    "ConcentrationReport",
]

POLICY_STREAM, ENV_STREAM = 2, 3


def _policy_key(name: str) -> int:
    return zlib.crc32(name.encode())


def simulate(instance: BanditInstance, policy: Policy, horizon: int, policy_rng, env_rng,
             timing: bool = False, callback=None) -> RegretTrace:
    """Run one policy for ``horizon`` rounds and record its gaps.

    ``callback(t, policy, action)`` is invoked after ``select`` and before
    ``observe``; the concentration diagnostic hooks in there.
    """
    policy.reset(instance)
    gaps = np.empty(horizon)
    times = np.empty(horizon) if timing else None
    env = instance.env
    for t in range(1, horizon + 1):
        if timing:
            start = time.perf_counter()
            action = policy.select(t, policy_rng)
            times[t - 1] = time.perf_counter() - start
        else:
            action = policy.select(t, policy_rng)
        if callback is not None:
            callback(t, policy, action)
        x = env.sample(env_rng)
        idx = list(action)
        policy.observe(t, action, x[idx], policy_rng)
        gaps[t - 1] = instance.gap(action)
    return RegretTrace(gaps, times)


def run_repetition(config: ExperimentConfig, repetition: int) -> dict:
    """All policies of ``config`` on repetition ``repetition``; name -> RegretTrace."""
    instance = build_instance(config.instance, instance_rng(config, repetition), config.base_dir)
    out = {}
    for policy in build_policies(config):
        key = _policy_key(policy.name)
        if config.couple_streams:
            env_rng = make_rng(config.master_seed, ENV_STREAM, repetition)
        else:
            env_rng = make_rng(config.master_seed, ENV_STREAM, repetition, key)
        policy_rng = make_rng(config.master_seed, POLICY_STREAM, repetition, key)
        out[policy.name] = simulate(instance, policy, config.horizon, policy_rng, env_rng, config.timing)
    return out


def _run_repetition_args(args):
    return run_repetition(*args)


@dataclass
class AggregatedResult:
    """Per-policy curves over repetitions.

    ``cumulative[name]`` is an R x T array of cumulative regret, one row per
    repetition; ``select_seconds[name]`` (timing mode only) likewise holds
    per-round select() wall time.
    """

    horizon: int
    policies: list
    cumulative: dict
    select_seconds: dict = field(default_factory=dict)
    label: str = ""

    @property
    def repetitions(self) -> int:
        return next(iter(self.cumulative.values())).shape[0]

    def mean_curve(self, name) -> np.ndarray:
        return self.cumulative[name].mean(axis=0)

    def std_curve(self, name) -> np.ndarray:
        curves = self.cumulative[name]
        if curves.shape[0] < 2:
            return np.zeros(curves.shape[1])
        return curves.std(axis=0, ddof=1)

    def final_regret(self, name) -> np.ndarray:
        """Total regret of each repetition."""
        return self.cumulative[name][:, -1]

    def mean_select_ms(self, name) -> Optional[np.ndarray]:
        if name not in self.select_seconds:
            return None
        return 1e3 * self.select_seconds[name].mean(axis=0)

    @property
    def has_timing(self) -> bool:
        return bool(self.select_seconds)


def run_experiment(config: ExperimentConfig, label: Optional[str] = None) -> AggregatedResult:
    """Run every repetition of a (sweep-free) config and aggregate.

    Capability problems are detected before any simulation starts, and the
    error names the offending policy.
    """
    if config.sweep:
        raise ValueError("expand the sweep first (ExperimentConfig.expand_sweep)")
    check_compatibility(config)
    jobs = [(config, r) for r in range(config.repetitions)]
    if config.workers > 1 and config.repetitions > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reps = list(pool.map(_run_repetition_args, jobs))
    else:
        reps = [run_repetition(*job) for job in jobs]
    names = config.policy_names()
    cumulative = {name: np.array([rep[name].cumulative for rep in reps]) for name in names}
    select_seconds = {}
    if config.timing:
        select_seconds = {name: np.array([rep[name].select_times for rep in reps]) for name in names}
    return AggregatedResult(config.horizon, names, cumulative, select_seconds, label or config.name)


def timing_report(config: ExperimentConfig, result: Optional[AggregatedResult] = None) -> dict:
    """Mean select() time per round in milliseconds, per policy, over T * R calls."""
    if result is None:
        if not config.timing:
            raise ValueError("timing_report needs timing mode on")
        result = run_experiment(config)
    return {name: float(1e3 * result.select_seconds[name].mean()) for name in result.policies}


# --- concentration diagnostic --------------------------------------------------

@dataclass
class ConcentrationReport:
    counts: list
    horizon: int
    radius_scale: float

    @property
    def total(self) -> int:
        return int(sum(self.counts))


def diagnostic_concentration(config: ExperimentConfig, radius_scale: float = 1.0,
                             policy_name: Optional[str] = None) -> ConcentrationReport:
    """Count rounds where the sampled scores stray far from the empirical means.

    For CTS-Beta, the event is
    ``sum_{i in A_t} |theta_i - mean_i| >= sqrt(0.5 log(|A| 2^m T) sum_{i in A_t} 1/N_i)``
    with means of the binarized observations, evaluated only once every arm
    of A_t has been observed. Its expected count per run is at most 1.
    """
    if config.sweep:
        raise ValueError("expand the sweep first")
    specs = [p for p in config.policies if p["kind"] == "cts_beta"]
    if policy_name is not None:
        specs = [p for p in specs if p.get("name", p["kind"]) == policy_name]
    if not specs:
        raise CapabilityError("the concentration diagnostic needs a cts_beta policy")
    spec = specs[0]
    name = spec.get("name", spec["kind"])
    counts = []
    T = config.horizon
    for r in range(config.repetitions):
        instance = build_instance(config.instance, instance_rng(config, r), config.base_dir)
        try:
            actions = instance.space.enumerate()
        except CapacityError as exc:
            raise CapabilityError(f"concentration diagnostic needs an enumerable space: {exc}") from exc
        m = max(len(A) for A in actions)
        log_term = 0.5 * (math.log(len(actions)) + m * math.log(2.0) + math.log(T))
        policy = build_policies(config.select_policies([name]))[0]
        assert isinstance(policy, CTSBeta)
        fired = [0]

        def check(t, pol, action, fired=fired):
            idx = np.asarray(action, dtype=np.intp)
            N = pol.counters.pulls[idx]
            if pol.last_theta is None or np.any(N == 0):
                return
            mean = pol.counters.sums[idx] / N
            deviation = np.abs(pol.last_theta[idx] - mean).sum()
            radius = radius_scale * math.sqrt(log_term * float((1.0 / N).sum()))
            if deviation >= radius:
                fired[0] += 1

        key = _policy_key(name)
        simulate(instance, policy, T,
                 make_rng(config.master_seed, POLICY_STREAM, r, key),
                 make_rng(config.master_seed, ENV_STREAM, r, key), callback=check)
        counts.append(fired[0])
    return ConcentrationReport(counts, T, radius_scale)
