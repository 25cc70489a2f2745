"""Topology construction and churn invariants."""

import math
import random
from collections import deque

import pytest
from scipy.stats import chi2

from evop2p.overlay import OverlayGraph, TopologyParams, generate, dump_topology


def assert_symmetric(graph):
    for a, nbs in graph.adjacency.items():
        assert a not in nbs, "self-loop"
        for b in nbs:
            assert a in graph.adjacency[b], f"asymmetric edge {a}-{b}"


def is_connected(graph):
    nodes = list(graph.alive)
    if not nodes:
        return True
    seen = {nodes[0]}
    frontier = deque([nodes[0]])
    while frontier:
        v = frontier.popleft()
        for nb in graph.neighbors(v):
            if nb not in seen:
                seen.add(nb)
                frontier.append(nb)
    return len(seen) == len(nodes)


def test_clique_only():
    g = generate(TopologyParams(n=5, n0=5, m=3), random.Random(0))
    assert len(g) == 5
    assert all(g.degree(v) == 4 for v in g.alive)
    assert_symmetric(g)


def test_first_attached_node():
    g = generate(TopologyParams(n=6, n0=5, m=3), random.Random(0))
    assert g.degree(5) == 3
    assert_symmetric(g)


def test_generate_connected_and_symmetric():
    g = generate(TopologyParams(n=300, n0=5, m=3), random.Random(1))
    assert len(g) == 300
    assert_symmetric(g)
    assert is_connected(g)
    assert all(g.degree(v) >= 3 for v in g.alive)


def test_join_degree_and_no_duplicates():
    rng = random.Random(2)
    g = generate(TopologyParams(n=5, n0=5, m=3), rng)
    node = g.join(3, rng)
    assert g.degree(node) == 3
    assert len(set(g.neighbors(node))) == 3


def test_join_sweep_preserves_invariants():
    rng = random.Random(3)
    g = generate(TopologyParams(n=5, n0=5, m=3), rng)
    for _ in range(10000):
        g.join(3, rng)
    assert_symmetric(g)
    assert len(g) == 10005


def test_join_requires_enough_nodes():
    g = OverlayGraph()
    g.add_node()
    with pytest.raises(ValueError):
        g.join(3, random.Random(0))


def test_leave_examples():
    rng = random.Random(4)
    g = generate(TopologyParams(n=5, n0=5, m=3), rng)
    g.leave(0)
    assert len(g) == 4
    assert all(g.degree(v) == 3 for v in g.alive)  # K5 -> K4
    leaf = g.join(1, rng)
    anchor = next(iter(g.neighbors(leaf)))
    before = g.degree(anchor)
    g.leave(leaf)
    assert g.degree(anchor) == before - 1


def test_leave_unknown_node():
    g = generate(TopologyParams(n=5, n0=5, m=3), random.Random(0))
    with pytest.raises(ValueError):
        g.leave(99)


def test_churn_interleaving_invariants():
    rng = random.Random(5)
    g = generate(TopologyParams(n=50, n0=5, m=3), rng)
    for _ in range(2000):
        if rng.random() < 0.5 and len(g) > 4:
            g.leave(rng.choice(g.alive_list()))
        else:
            g.join(3, rng)
    assert_symmetric(g)


def test_ids_never_reused():
    rng = random.Random(6)
    g = generate(TopologyParams(n=10, n0=5, m=3), rng)
    g.leave(7)
    node = g.join(3, rng)
    assert node == 10
    assert 7 not in g


def test_degree_law_of_uniform_attachment():
    """Adding m links per join fixes the mean at ~2m, and the bulk degree
    law is geometric with ratio m/(m+1); the generator must match it."""
    m = 3
    counts = {}
    nodes = 0
    total = 0
    for seed in range(3):
        g = generate(TopologyParams(n=10000, n0=5, m=m), random.Random(seed))
        for v in g.alive:
            k = g.degree(v)
            counts[k] = counts.get(k, 0) + 1
            nodes += 1
            total += k
    mean = total / nodes
    assert abs(mean - 2 * m) / (2 * m) < 0.02
    ratio = m / (m + 1)
    bins = list(range(m, m + 16))
    probs = [(1 - ratio) * ratio ** (k - m) for k in bins]
    probs.append(ratio ** 16)  # tail
    observed = [counts.get(k, 0) for k in bins]
    observed.append(nodes - sum(observed))
    stat = sum((o - p * nodes) ** 2 / (p * nodes)
               for o, p in zip(observed, probs))
    assert chi2.sf(stat, len(observed) - 1) > 0.01


def test_dump_topology(tmp_path):
    g = generate(TopologyParams(n=6, n0=5, m=3), random.Random(0))
    path = tmp_path / "edges.csv"
    dump_topology(g, path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 13  # K5 has 10 edges, the join adds 3
    for line in lines:
        a, b = map(int, line.split(","))
        assert a < b
    assert lines == sorted(lines)


def test_params_validation():
    with pytest.raises(ValueError):
        TopologyParams(n=4, n0=5, m=3)
    with pytest.raises(ValueError):
        TopologyParams(n=10, n0=5, m=6)
    with pytest.raises(ValueError):
        TopologyParams(n=10, n0=5, m=0)
    with pytest.raises(ValueError):
        TopologyParams(n=10, n0=1, m=1)
