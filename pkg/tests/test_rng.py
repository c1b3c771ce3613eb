import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from perturb_lab.graph import Graph, complete_graph, union_graphs
from perturb_lab.rng import (
    DomainError,
    sample_gnp,
    sample_perturbation,
    sample_two_round,
    spawn,
    trial_seed,
    two_round_split,
)


def test_extreme_probabilities():
    assert sample_gnp(5, 1.0, 0) == complete_graph(5)
    assert sample_gnp(5, 1.0, 0).m == 10
    assert sample_gnp(7, 0.0, 0) == Graph.empty(7)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_domain_error(p):
    with pytest.raises(DomainError):
        sample_gnp(5, p, 0)
    with pytest.raises(DomainError):
        two_round_split(p)


def test_edge_count_within_four_sigma():
    n, p = 10_000, 1e-4
    pairs = n * (n - 1) // 2
    mean, sd = pairs * p, math.sqrt(pairs * p * (1 - p))
    for s in range(200):
        m = sample_gnp(n, p, s).m
        assert abs(m - mean) <= 4 * sd


def test_edge_count_variance():
    n, p = 300, 0.02
    pairs = n * (n - 1) // 2
    counts = np.array([sample_gnp(n, p, s).m for s in range(1500)])
    var = pairs * p * (1 - p)
    assert 0.5 * var <= counts.var(ddof=1) <= 2 * var


def test_pairs_are_uniform():
    # each specific pair should appear with frequency p
    n, p, trials = 12, 0.3, 3000
    hits = np.zeros((n, n))
    for s in range(trials):
        e = sample_gnp(n, p, s).edges()
        hits[e[:, 0], e[:, 1]] += 1
    freq = hits[np.triu_indices(n, 1)] / trials
    sd = math.sqrt(p * (1 - p) / trials)
    assert np.all(np.abs(freq - p) < 5 * sd)


def test_determinism():
    assert sample_gnp(500, 0.01, 42) == sample_gnp(500, 0.01, 42)
    assert sample_gnp(500, 0.01, 42) != sample_gnp(500, 0.01, 43)
    a = trial_seed(7, 3).generate_state(2)
    b = trial_seed(7, 3).generate_state(2)
    assert a.tolist() == b.tolist()
    assert trial_seed(7, 4).generate_state(2).tolist() != a.tolist()
    assert [s.generate_state(1)[0] for s in spawn(5, 3)] == [s.generate_state(1)[0] for s in spawn(5, 3)]


def test_split_examples():
    assert two_round_split(0.0) == (0.0, 0.0)
    p1, p2 = two_round_split(0.75)
    assert p1 == pytest.approx(0.5, abs=1e-15) and p2 == pytest.approx(0.5, abs=1e-15)
    p1, _ = two_round_split(0.02)
    assert p1 == pytest.approx(1 - math.sqrt(0.98), rel=1e-12)
    assert abs(p1 - 0.0100505) < 1e-7 and p1 >= 0.01


@settings(max_examples=500)
@given(st.floats(0, 1))
def test_split_identity(p):
    p1, p2 = two_round_split(p)
    assert 0 <= p1 <= p and p1 == p2
    assert abs((1 - p1) * (1 - p2) - (1 - p)) <= 1e-12


def test_two_round_extremes():
    g1, g2 = sample_two_round(9, 0.0, 1)
    assert g1.m == 0 and g2.m == 0
    g1, g2 = sample_two_round(9, 1.0, 1)
    assert union_graphs(g1, g2) == complete_graph(9)
    assert sample_perturbation(9, 1.0, 2) == complete_graph(9)
