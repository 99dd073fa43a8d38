import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from complexspread.contagion import SimConfig, StepRule, run_trial
from complexspread.netgen import build_ring_lattice
from complexspread.stats import (CellSummary, ConditionSummary, RegionLabel, bootstrap_min_ratio,
                                 classify_region_ks, classify_region_margin, classify_samples_ks,
                                 ks_two_sample, mean_time_to_saturation, region_shares,
                                 time_to_saturation)

from reference_sim import wavefront_times

L = RegionLabel


def make_cell(p1, p2, clustered, random, index=0, times=None):
    conds = {}
    for fraction, finals in ((0.0, clustered), (1.0, random)):
        finals = np.asarray(finals, dtype=float)
        conds[fraction] = ConditionSummary(fraction, finals,
                                           times or [None] * len(finals),
                                           [1] * len(finals), list(range(len(finals))))
    return CellSummary(index=index, k=8, i=2, T=1, n=100, topology="ring", p1=p1, p2=p2,
                       conditions=conds)


# -- margin rule ------------------------------------------------------------------

def test_margin_examples():
    assert classify_region_margin(0.90, 0.30) is L.CLUSTER_ADVANTAGE
    assert classify_region_margin(0.95, 0.97) is L.FULL_EQUAL
    assert classify_region_margin(0.02, 0.04) is L.MINIMAL_EQUAL
    assert classify_region_margin(0.30, 0.90) is L.RANDOM_ADVANTAGE
    # a difference of exactly the margin counts, despite float noise
    assert classify_region_margin(0.35, 0.30) is L.CLUSTER_ADVANTAGE
    assert classify_region_margin(0.62, 0.58) is L.MINIMAL_EQUAL


@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from([0.001, 0.01, 0.05, 0.1]))
def test_margin_antisymmetry(a, b, margin):
    forward = classify_region_margin(a, b, margin)
    backward = classify_region_margin(b, a, margin)
    swap = {L.CLUSTER_ADVANTAGE: L.RANDOM_ADVANTAGE, L.RANDOM_ADVANTAGE: L.CLUSTER_ADVANTAGE,
            L.FULL_EQUAL: L.FULL_EQUAL, L.MINIMAL_EQUAL: L.MINIMAL_EQUAL}
    assert backward is swap[forward]


# -- KS ---------------------------------------------------------------------------

def test_ks_examples():
    same = [0.1, 0.5, 0.5, 1.0]
    assert ks_two_sample(same, same) == (0.0, 1.0)
    res = ks_two_sample(np.zeros(100), np.ones(100))
    assert res.D == 1.0 and res.p < 1e-20
    assert ks_two_sample([1, 2, 3], [2, 3, 4]).D == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        ks_two_sample([], [1.0])


@pytest.mark.filterwarnings("ignore::RuntimeWarning")  # scipy's p-value on tiny samples
@settings(max_examples=60)
@given(st.lists(st.integers(0, 10), min_size=1, max_size=80),
       st.lists(st.integers(0, 10), min_size=1, max_size=80))
def test_ks_D_matches_scipy_with_ties(a, b):
    ours = ks_two_sample(np.array(a) / 10, np.array(b) / 10)
    ref = sps.ks_2samp(np.array(a) / 10, np.array(b) / 10, method="exact")
    assert ours.D == pytest.approx(ref.statistic, abs=1e-12)
    assert 0.0 <= ours.D <= 1.0


def test_ks_p_matches_kolmogorov_tail():
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=100), rng.normal(0.4, size=100)
    res = ks_two_sample(a, b)
    en = 100 * 100 / 200
    assert res.p == pytest.approx(sps.kstwobign.sf(math.sqrt(en) * res.D), rel=1e-12)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=40),
       st.lists(st.integers(-50, 50), min_size=1, max_size=40))
def test_ks_symmetry_and_transform_invariance(a, b):
    # values on a 0.1 grid keep the transform strictly increasing after rounding
    a, b = np.array(a) / 10, np.array(b) / 10
    ab, ba = ks_two_sample(a, b), ks_two_sample(b, a)
    assert ab.D == pytest.approx(ba.D) and ab.p == pytest.approx(ba.p)
    ta, tb = np.exp(a) * 3 + 1, np.exp(b) * 3 + 1
    assert ks_two_sample(ta, tb).D == pytest.approx(ab.D)


def test_ks_classification_examples():
    label, _ = classify_samples_ks(np.ones(100), np.ones(100))
    assert label is L.FULL_EQUAL
    assert classify_samples_ks(np.full(100, 0.95), np.full(100, 0.02))[0] is L.CLUSTER_ADVANTAGE
    rng = np.random.default_rng(3)
    a, b = rng.uniform(0.2, 0.4, 100), rng.uniform(0.2, 0.4, 100)
    assert classify_samples_ks(a, b)[0] is L.MINIMAL_EQUAL
    cell = make_cell(0.1, 0.2, np.full(100, 0.02), np.full(100, 0.95))
    assert classify_region_ks(cell) is L.RANDOM_ADVANTAGE


def test_region_shares_sum_to_one():
    rng = np.random.default_rng(5)
    cells = [make_cell(0.1, 0.2, rng.uniform(0, 1, 20), rng.uniform(0, 1, 20), index=j)
             for j in range(30)]
    for rule in ("margin", "ks"):
        shares = region_shares(cells, rule)
        assert set(shares) == set(L)
        assert sum(shares.values()) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        region_shares(cells, "vote")


# -- time to saturation -------------------------------------------------------------

def test_time_to_saturation_examples():
    series = [2, 5, 10, 20, 40, 60, 80, 100]
    assert time_to_saturation(series, 0.6, n=100) == 5
    assert time_to_saturation([2, 10, 40, 40], 0.6, n=100) is None
    assert time_to_saturation(series, 1.0, n=100) == 7
    with pytest.raises(ValueError):
        time_to_saturation(series, 0.0, n=100)


def test_time_to_saturation_matches_wavefront():
    n, k = 100, 4
    net = build_ring_lattice(n, k)
    for start in (0, 37, 98):
        seeds = [start, (start + 1) % n]
        rec = run_trial(net, StepRule(1, 1), SimConfig(T=1), np.random.default_rng(0),
                        seeds=seeds)
        cum = wavefront_times(n, k, seeds)
        assert rec.cumulative.tolist() == cum
        for fraction in (0.1, 0.6, 0.9, 1.0):
            target = math.ceil(fraction * n)
            expected = next(t for t, c in enumerate(cum) if c >= target)
            assert time_to_saturation(rec, fraction) == expected
        assert time_to_saturation(rec, 1.0) == 25  # 98 others, 4 per step


def test_mean_time_excludes_unsaturated():
    cond = ConditionSummary(1.0, np.array([0.9, 0.9, 0.1]), [4, 6, None], [5, 7, 3], [0, 1, 2])
    stat = mean_time_to_saturation(cond, 0.6)
    assert stat.mean == 5.0 and stat.reached == 2 and stat.trials == 3
    low = ConditionSummary(1.0, np.array([0.9, 0.1, 0.1]), [4, None, None], [5, 3, 3], [0, 1, 2])
    assert mean_time_to_saturation(low, 0.6).mean is None


# -- bootstrap ------------------------------------------------------------------------

def test_bootstrap_single_qualifying_cell():
    cells = [make_cell(0.2, 0.8, np.ones(20), np.zeros(20)),
             make_cell(0.2, 0.2, np.full(20, 0.5), np.full(20, 0.5), index=1),
             make_cell(0.0, 0.4, np.ones(20), np.zeros(20), index=2)]  # p1=0 is skipped
    est = bootstrap_min_ratio(cells, 0.05, rng=np.random.default_rng(0))
    assert est.estimate == 4.0 and est.ci_low == 4.0 and est.ci_high == 4.0
    assert est.replicates == 1000


def test_bootstrap_none_without_advantage():
    cells = [make_cell(0.2, 0.4, np.zeros(20), np.ones(20))]
    assert bootstrap_min_ratio(cells, 0.05, rng=np.random.default_rng(0)) is None


def test_bootstrap_needs_enough_trials():
    with pytest.raises(ValueError):
        bootstrap_min_ratio([make_cell(0.1, 0.3, np.ones(5), np.zeros(5))], 0.05,
                            rng=np.random.default_rng(0))


def test_bootstrap_matches_loop_oracle():
    rng = np.random.default_rng(9)
    cells = []
    for j, (p1, p2) in enumerate([(0.1, 0.15), (0.1, 0.2), (0.1, 0.3), (0.05, 0.2)]):
        gap = 0.03 * j
        cells.append(make_cell(p1, p2, rng.uniform(0.2 + gap, 0.5 + gap, 30),
                               rng.uniform(0.2, 0.5, 30), index=j))
    est = bootstrap_min_ratio(cells, 0.05, reps=4000, rng=np.random.default_rng(1))
    # plain loop with its own stream: same estimator, so statistically close
    loop = np.random.default_rng(2)
    minima = []
    for _ in range(4000):
        best = math.inf
        for c in cells:
            a = loop.choice(c.clustered.finals, 10, replace=False).mean()
            b = loop.choice(c.random.finals, 10, replace=False).mean()
            if a - b >= 0.05:
                best = min(best, c.p2 / c.p1)
        if best < math.inf:
            minima.append(best)
    assert est.replicates == pytest.approx(len(minima), rel=0.05)
    assert est.estimate == pytest.approx(np.mean(minima), rel=0.03)
    assert est.ci_low <= est.estimate <= est.ci_high


def test_bootstrap_reproducible():
    rng = np.random.default_rng(4)
    cells = [make_cell(0.1, 0.1 * r, rng.uniform(0, 1, 20), rng.uniform(0, 0.8, 20), index=r)
             for r in range(1, 8)]
    a = bootstrap_min_ratio(cells, 0.05, rng=np.random.default_rng(7))
    b = bootstrap_min_ratio(cells, 0.05, rng=np.random.default_rng(7))
    assert a == b
    med = bootstrap_min_ratio(cells, 0.05, rng=np.random.default_rng(7), statistic="median")
    assert med.ci_low <= med.estimate <= med.ci_high
