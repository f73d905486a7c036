"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line; the terminal summary repeats all
of them. Criteria 6, 7 and 10 share two matching experiments (about a
minute each), cached per module.
"""

import dataclasses
import itertools
import time

import numpy as np
import pytest

from ctsbandit.core import BanditInstance, linear_reward
from ctsbandit.environments import (
    MultivariateGaussian,
    conditional_inclusion_probabilities,
    equicorrelated,
    sample_conditional_bernoulli,
    subgaussian_proxy,
)
from ctsbandit.harness import ExperimentConfig, diagnostic_concentration, format_csv, load_config, run_experiment
from ctsbandit.harness import timing_report
from ctsbandit.harness.runner import simulate
from ctsbandit.numerics import bernoulli_kl, klucb_index
from ctsbandit.oracles import Matching, MSets, Partition, Path
from ctsbandit.policies import CTSGaussian

MATCHING_HORIZON = 10_000
MATCHING_REPS = 20
RUN_BUDGET_S = 300.0

_matching_runs = {}


def matching_config(c):
    base = load_config("matching_gaussian")
    return dataclasses.replace(base, sweep=None, horizon=MATCHING_HORIZON, repetitions=MATCHING_REPS,
                               instance=dict(base.instance, c=c), name=f"matching_c={c:g}")


def matching_run(c):
    if c not in _matching_runs:
        start = time.perf_counter()
        result = run_experiment(matching_config(c))
        _matching_runs[c] = (result, time.perf_counter() - start)
    return _matching_runs[c]


def random_graph(rng, nodes):
    while True:
        arcs = [(u, v) for u in range(nodes) for v in range(nodes) if u != v and rng.random() < 0.3]
        try:
            return Path(arcs, 0, nodes - 1)
        except Exception:
            continue


def test_criterion_01_oracle_equivalence(acceptance_report):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    mismatches = checked = 0
    spaces = [random_graph(rng, int(rng.integers(4, 9))) for _ in range(5)]
    spaces += [Matching(4), Matching(5), MSets(7, 3), Partition(8, 2)]
    for space in spaces:
        actions = space.enumerate()
        for _ in range(50):
            w = -rng.random(space.n) if isinstance(space, Path) else rng.normal(size=space.n)
            best = max(linear_reward(a, w) for a in actions)
            got = linear_reward(space.oracle(w), w)
            mismatches += got != pytest.approx(best, abs=1e-12)
            checked += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 10
    acceptance_report(1, "oracle equivalence", ok, f"{checked} checks, {mismatches} mismatches, {elapsed:.1f}s")
    assert ok


def test_criterion_02_proxy_equivalence(acceptance_report):
    rng = np.random.default_rng(202)
    mismatches = checked = 0
    for space in (Matching(3), MSets(8, 3)):
        actions = space.enumerate()
        for _ in range(20):
            M = rng.normal(size=(space.n, space.n))
            C = (M + M.T) / 2
            for positive_part in (False, True):
                G = np.maximum(C, 0) if positive_part else np.abs(C)
                brute = np.full(space.n, -np.inf)
                for A in actions:
                    idx = list(A)
                    for i in idx:
                        brute[i] = max(brute[i], G[i, idx].sum())
                mismatches += int(not np.array_equal(subgaussian_proxy(C, space, positive_part), brute))
                checked += 1
    acceptance_report(2, "sub-Gaussian proxy equivalence", mismatches == 0, f"{checked} matrices, {mismatches} mismatches")
    assert mismatches == 0


def test_criterion_03_conditional_bernoulli(acceptance_report):
    rng = np.random.default_rng(303)
    worst = 0.0
    for n in range(2, 13):
        p = rng.uniform(0.02, 0.98, n)
        for s in range(1, n):
            total, incl = 0.0, np.zeros(n)
            for ones in itertools.combinations(range(n), s):
                x = np.zeros(n)
                x[list(ones)] = 1
                w = np.prod(np.where(x == 1, p, 1 - p))
                total += w
                incl += w * x
            worst = max(worst, np.max(np.abs(conditional_inclusion_probabilities(p, s) - incl / total)))
    p = rng.uniform(0.05, 0.95, 10)
    s = 4
    draws = np.array([sample_conditional_bernoulli(p, s, rng) for _ in range(100_000)])
    sums_ok = bool(np.all(draws[:10_000].sum(axis=1) == s) and np.all(draws.sum(axis=1) == s))
    pi = conditional_inclusion_probabilities(p, s)
    z = np.abs(draws.mean(axis=0) - pi) / np.sqrt(pi * (1 - pi) / len(draws))
    ok = worst < 1e-9 and sums_ok and z.max() < 3
    acceptance_report(3, "conditional Bernoulli exactness", ok,
                      f"DP error {worst:.1e}, sums exact {sums_ok}, max |z| {z.max():.2f}")
    assert ok


def test_criterion_04_klucb_self_consistency(acceptance_report):
    rng = np.random.default_rng(404)
    worst, interior = 0.0, 0
    for _ in range(100):
        mean, count, threshold = rng.random(), int(rng.integers(1, 10_001)), rng.uniform(0.01, 20.0)
        q = klucb_index(mean, count, threshold)
        if q < 1:
            interior += 1
            worst = max(worst, abs(count * bernoulli_kl(mean, q) - threshold))
    ok = worst < 1e-6
    acceptance_report(4, "klucb self-consistency", ok, f"{interior} interior indices, max error {worst:.1e}")
    assert ok


def test_criterion_05_correlated_prior_psd(acceptance_report):
    failures, factored = [], 0
    for c in (0.0, 0.5, 1.0):
        rng = np.random.default_rng(505)
        space = Matching(4)
        cov = equicorrelated(space.n, c)
        mu = rng.random(space.n)
        inst = BanditInstance(space, MultivariateGaussian(mu, cov), mu, init_cover=space.initial_cover(),
                              prior_range=(0.0, 1.0), gamma=cov)
        counted = [0]

        def hook(t, policy, action, counted=counted):
            if t > space.q:
                counted[0] += 1
                assert policy.last_covariance is not None

        try:
            simulate(inst, CTSGaussian(prior="correlated"), 10_000, rng, np.random.default_rng(506), callback=hook)
        except Exception as exc:  # a failed factorization surfaces here
            failures.append(f"c={c}: {exc}")
        factored += counted[0]
    ok = not failures
    acceptance_report(5, "correlated prior stays PSD", ok, f"{factored} factorizations" + (f"; {failures}" if failures else ""))
    assert ok


@pytest.mark.slow
def test_criterion_06_matching_ordering(acceptance_report):
    res0, t0 = matching_run(0.0)
    res1, t1 = matching_run(1.0)
    cts0, cucb0 = res0.final_regret("cts_gaussian").mean(), res0.final_regret("cucb").mean()
    escb1, cts1 = res1.final_regret("escb").mean(), res1.final_regret("cts_gaussian").mean()
    ok = cts0 < cucb0 and escb1 < cts1 and max(t0, t1) < RUN_BUDGET_S
    acceptance_report(6, "matching regret ordering", ok,
                      f"c=0: cts {cts0:.1f} < cucb {cucb0:.1f}; c=1: escb {escb1:.1f} < cts {cts1:.1f}; "
                      f"runs {t0:.0f}s/{t1:.0f}s")
    assert ok


@pytest.mark.slow
def test_criterion_07_sublinearity(acceptance_report):
    result, _ = matching_run(0.0)
    half = MATCHING_HORIZON // 2
    ratios = {}
    for name in ("cts_gaussian", "clip_cts_gaussian"):
        curve = result.mean_curve(name)
        ratios[name] = (curve[-1] - curve[half - 1]) / curve[half - 1]
    ok = all(r < 0.8 for r in ratios.values())
    acceptance_report(7, "sublinear regret", ok, ", ".join(f"{k} {v:.2f}" for k, v in ratios.items()))
    assert ok


def test_criterion_08_timing_ratios(acceptance_report):
    base = load_config("timing_table")
    ms = {}
    for q in (5, 6):
        cfg = dataclasses.replace(base, sweep=None, instance=dict(base.instance, q=q))
        cfg = cfg.select_policies(["cucb", "escb"])
        ms[q] = timing_report(cfg)
    r1 = ms[5]["escb"] / ms[5]["cucb"]
    r2 = ms[6]["escb"] / ms[5]["escb"]
    ok = r1 >= 3 and r2 >= 3
    acceptance_report(8, "timing ratios", ok,
                      f"ESCB/CUCB on K5,5 {r1:.1f}x, ESCB K6,6/K5,5 {r2:.1f}x "
                      f"(ms: cucb {ms[5]['cucb']:.3f}, escb {ms[5]['escb']:.3f} -> {ms[6]['escb']:.3f})")
    assert ok


@pytest.mark.slow
def test_criterion_09_concentration(acceptance_report):
    cfg = ExperimentConfig.from_dict({
        "name": "concentration",
        "horizon": 10_000,
        "repetitions": 20,
        "master_seed": 909,
        "instance": {"family": "msets", "n": 6, "m": 2, "outcomes": "bernoulli"},
        "policies": [{"kind": "cts_beta"}],
    })
    report = diagnostic_concentration(cfg)
    ok = report.total <= 10
    acceptance_report(9, "concentration event count", ok, f"{report.total} events over 20 runs")
    assert ok


@pytest.mark.slow
def test_criterion_10_determinism(acceptance_report, tmp_path):
    first, _ = matching_run(0.0)
    again = run_experiment(matching_config(0.0))
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text(format_csv(first))
    b.write_text(format_csv(again))
    ok = a.read_bytes() == b.read_bytes()
    acceptance_report(10, "byte-identical rerun", ok, f"{a.stat().st_size} bytes")
    assert ok
