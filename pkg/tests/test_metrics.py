"""Measure-layer tests: frozen examples, error contracts, oracle agreement."""

import math
import random

import pytest

from evop2p.metrics import (MetricsConfig, homeostasis,
                            measures_from_information,
                            normalized_information)

CFG6 = MetricsConfig(n=6, q=3, w=3)


def brute_force_information(window, n):
    """Independent histogram oracle: count every slot, plain entropy."""
    flat = [g for genotype in window for g in genotype]
    entropy = 0.0
    for v in range(1, n + 1):
        c = flat.count(v)
        if c:
            p = c / len(flat)
            entropy -= p * math.log2(p)
    return entropy / math.log2(n)


def random_window(rng, n, q, w):
    return [tuple(rng.randint(1, n) for _ in range(q))
            for _ in range(rng.randint(1, w))]


def test_worked_example():
    window = [(1, 3, 5), (1, 3, 6), (1, 4, 6)]
    info = normalized_information(window, CFG6)
    assert abs(info - 0.85) <= 0.005


def test_single_repeated_value_is_zero():
    window = [(2, 2, 2)] * 3
    assert normalized_information(window, CFG6) == 0.0


def test_uniform_distribution_is_one():
    window = [(1, 2, 3), (4, 5, 6)]
    assert abs(normalized_information(window, MetricsConfig(6, 3, 2)) - 1.0) < 1e-12


def test_empty_window_rejected():
    with pytest.raises(ValueError, match="no data"):
        normalized_information([], CFG6)


def test_alphabet_violation_rejected():
    with pytest.raises(ValueError, match="alphabet violation"):
        normalized_information([(1, 2, 7)], CFG6)
    with pytest.raises(ValueError, match="alphabet violation"):
        normalized_information([(0, 2, 3)], CFG6)


def test_measures_examples():
    assert measures_from_information(0.5) == (0.5, 0.5, 1.0)
    assert measures_from_information(0.0) == (0.0, 1.0, 0.0)
    e, s, c = measures_from_information(0.85)
    assert abs(e - 0.85) < 1e-12
    assert abs(s - 0.15) < 1e-12
    assert abs(c - 0.51) < 1e-12


def test_measures_domain():
    with pytest.raises(ValueError):
        measures_from_information(-0.01)
    with pytest.raises(ValueError):
        measures_from_information(1.01)


def test_homeostasis_examples():
    assert homeostasis((1, 3, 5), (1, 3, 5)) == 1.0
    assert abs(homeostasis((1, 3, 5), (1, 3, 6)) - 2 / 3) < 1e-12
    assert homeostasis((1, 1, 1), (2, 2, 2)) == 0.0


def test_homeostasis_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        homeostasis((1, 2), (1, 2, 3))


def test_oracle_agreement_random_windows():
    rng = random.Random(42)
    for _ in range(1000):
        n = rng.randint(2, 8)
        q = rng.randint(1, 5)
        w = rng.randint(1, 10)
        window = random_window(rng, n, q, w)
        cfg = MetricsConfig(n=n, q=q, w=w)
        info = normalized_information(window, cfg)
        assert 0.0 <= info <= 1.0 + 1e-12
        assert abs(info - brute_force_information(window, n)) < 1e-12


def test_information_extremes():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 6)
        value = rng.randint(1, n)
        window = [(value,) * 3 for _ in range(rng.randint(1, 5))]
        assert normalized_information(window, MetricsConfig(n, 3, 5)) == 0.0
    # all n values equally frequent maximizes information
    for n in (2, 3, 6):
        window = [tuple(range(1, n + 1))]
        cfg = MetricsConfig(n=n, q=n, w=1)
        assert abs(normalized_information(window, cfg) - 1.0) < 1e-12


def test_identities_and_permutation_invariance():
    rng = random.Random(11)
    for _ in range(500):
        window = random_window(rng, 6, 3, 6)
        info = normalized_information(window, MetricsConfig(6, 3, 6))
        e, s, c = measures_from_information(info)
        assert abs(e + s - 1.0) < 1e-12
        assert abs(c - 4 * e * s) < 1e-12
        assert c <= 1.0 + 1e-12
        shuffled = window[:]
        rng.shuffle(shuffled)
        shuffled = [tuple(rng.sample(g, len(g))) for g in shuffled]
        info2 = normalized_information(shuffled, MetricsConfig(6, 3, 6))
        assert abs(info - info2) < 1e-12


def test_complexity_maximal_at_half():
    values = [i / 100 for i in range(101)]
    cs = [measures_from_information(v)[2] for v in values]
    assert max(cs) == cs[50] == 1.0


def test_uncorrelated_homeostasis_expectation():
    # two independent uniform models match per gene with probability 1/n
    rng = random.Random(5)
    n = 6
    total = 0.0
    trials = 20000
    for _ in range(trials):
        a = tuple(rng.randint(1, n) for _ in range(3))
        b = tuple(rng.randint(1, n) for _ in range(3))
        total += homeostasis(a, b)
    assert abs(total / trials - 1 / n) < 0.01


def test_config_invariants():
    with pytest.raises(ValueError):
        MetricsConfig(n=1, q=3, w=1)
    with pytest.raises(ValueError):
        MetricsConfig(n=6, q=0, w=1)
    with pytest.raises(ValueError):
        MetricsConfig(n=6, q=3, w=0)
