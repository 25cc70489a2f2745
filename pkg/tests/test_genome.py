"""Genotype/phenotype mapping and fitness function tests."""

import math
import random

import pytest

from evop2p.genome import (FitnessParams, all_genotypes, avg_qhr, fitness,
                           make_model_fitness, phenotype_of, phi_of,
                           random_genotype)

P = FitnessParams()  # phi weights (100, 10, 5), beta 0.8, delta 0.01, n 6


def test_phenotype_examples():
    ph = phenotype_of((6, 6, 6), P)
    assert ph.f_k == 1.0 and ph.t_max == 6 and ph.d_max == 12
    assert abs(ph.phi - 220.0) < 1e-12
    ph = phenotype_of((1, 1, 1), P)
    assert abs(ph.f_k - 1 / 6) < 1e-12 and ph.t_max == 1 and ph.d_max == 2
    assert abs(ph.phi - (100 / 6 + 10 + 10)) < 1e-12
    ph = phenotype_of((3, 2, 4), P)
    assert ph.f_k == 0.5 and ph.t_max == 2 and ph.d_max == 8
    assert abs(ph.phi - 110.0) < 1e-12


def test_phi_bounds_and_max():
    phis = [phi_of(g, P) for g in all_genotypes(6)]
    assert abs(min(phis) - (100 / 6 + 10 + 10)) < 1e-12
    assert abs(max(phis) - 220.0) < 1e-12
    assert abs(P.phi_max - 220.0) < 1e-12
    assert abs(P.phi_min - min(phis)) < 1e-12
    # phi_max follows the weights instead of being hard-coded
    assert FitnessParams(phi1=20.0).phi_max == 100 + 120 + 60


def test_phenotype_injective_over_genotypes():
    seen = {}
    for g in all_genotypes(6):
        ph = phenotype_of(g, P)
        key = (ph.f_k, ph.t_max, ph.d_max)
        assert key not in seen, f"{g} collides with {seen[key]}"
        seen[key] = g
    assert len(seen) == 216


def test_genotype_validation():
    with pytest.raises(ValueError):
        phenotype_of((0, 1, 1), P)
    with pytest.raises(ValueError):
        phenotype_of((1, 7, 1), P)
    with pytest.raises(ValueError):
        phenotype_of((1, 1), P)


def test_avg_qhr():
    assert abs(avg_qhr(0.8, [0.9, 1.0]) - 0.9) < 1e-12
    assert avg_qhr(0.5, []) == 0.5
    assert avg_qhr(0.0, [0.0, 0.0, 0.0]) == 0.0


def test_fitness_values():
    # F1 keeps raw phi; the threshold picks the branch (<= beta goes low)
    assert abs(fitness("F1", 220.0, 0.5, P) - 1 / 220) < 1e-9
    assert fitness("F1", 220.0, 0.8, P) == 1 / 220
    assert fitness("F1", 220.0, 0.81, P) == 220.0
    # F2/F3 run on phi/phi_max
    assert abs(fitness("F2", 220.0, 0.5, P) - 1.0) < 1e-12
    assert abs(fitness("F2", 110.0, 1.0, P) - 0.5) < 1e-12
    assert abs(fitness("F2", 220.0, 1.0, P) - 1.0) < 1e-12
    # F4 frozen points
    assert abs(fitness("F4", 123.0, 0.8, P) - (1 - 0.8)) < 1e-12
    assert abs(fitness("F4", 220.0, 1.0, P) - 0.25) < 1e-12


def test_fitness_domain():
    with pytest.raises(ValueError):
        fitness("F2", 0.0, 0.5, P)
    with pytest.raises(ValueError):
        fitness("F2", -1.0, 0.5, P)
    with pytest.raises(ValueError):
        fitness("F2", 100.0, 1.5, P)
    with pytest.raises(ValueError):
        fitness("F9", 100.0, 0.5, P)


def test_f3_guard_finite_at_zero_qhr():
    for g in ((1, 1, 1), (6, 6, 6)):
        value = fitness("F3", phi_of(g, P), 0.0, P)
        assert math.isfinite(value) and value > 0


def _assert_monotone(kind, qhr, increasing):
    pairs = sorted((phi_of(g, P), g) for g in all_genotypes(6))
    values = [fitness(kind, phi, qhr, P) for phi, _ in pairs]
    for a, b, (pa, _), (pb, _) in zip(values, values[1:], pairs, pairs[1:]):
        if pb - pa < 1e-9:
            continue  # equal-phi genotypes
        if increasing:
            assert b > a - 1e-12
        else:
            assert b < a + 1e-12


def test_fitness_monotonicity_in_phi():
    _assert_monotone("F2", 0.99, increasing=True)
    _assert_monotone("F2", 0.01, increasing=False)
    _assert_monotone("F3", 0.99, increasing=True)
    _assert_monotone("F3", 0.01, increasing=False)
    _assert_monotone("F4", 0.9, increasing=True)    # above beta
    _assert_monotone("F4", 0.5, increasing=False)   # below beta


def test_model_fitness_table_matches_direct():
    rng = random.Random(3)
    for kind in ("F1", "F2", "F3", "F4"):
        table = make_model_fitness(kind, P)
        for _ in range(200):
            g = random_genotype(rng)
            q = rng.random()
            assert abs(table(g, q) - fitness(kind, phi_of(g, P), q, P)) < 1e-12


def test_random_genotype_bounds():
    rng = random.Random(1)
    for _ in range(1000):
        g = random_genotype(rng, 6)
        assert len(g) == 3 and all(1 <= x <= 6 for x in g)


def test_params_validation():
    with pytest.raises(ValueError):
        FitnessParams(beta=0.0)
    with pytest.raises(ValueError):
        FitnessParams(beta=1.0)
    with pytest.raises(ValueError):
        FitnessParams(delta=0.0)
    with pytest.raises(ValueError):
        FitnessParams(n=1)
