"""Sparse-MIS subroutine: labeling, load balance, round bound, correctness."""

import math

import numpy as np
import pytest

from facloc.graphs import adjacency_from_edges, gnp_adjacency, induced_edge_count
from facloc.sparse_mis import (
    DETERMINISTIC_SLACK,
    edge_labeling,
    greedy_mis,
    run_sparse_mis,
)


def test_greedy_mis_examples():
    triangle = {0: [1, 2], 1: [0, 2], 2: [0, 1]}
    assert greedy_mis(triangle, [0, 1, 2]) == {0}
    edgeless = {u: [] for u in range(5)}
    assert greedy_mis(edgeless, range(5)) == set(range(5))
    path = {0: [1], 1: [0, 2], 2: [1]}
    assert greedy_mis(path, [0, 1, 2]) == {0, 2}


def test_greedy_mis_respects_order():
    path = {0: [1], 1: [0, 2], 2: [1]}
    assert greedy_mis(path, [1, 0, 2]) == {1}


def test_edge_labeling_hand_example():
    # Triangle on three ranked nodes: outdegrees (2, 1, 0), ranges (0..1, 2..2).
    adj = adjacency_from_edges(3, [(0, 1), (0, 2), (1, 2)])
    lab = edge_labeling(3, [0, 1, 2], adj)
    assert lab.outdeg.tolist() == [2, 1, 0]
    assert lab.prefix.tolist() == [0, 2, 3]
    assert lab.labels == {(0, 1): 0, (0, 2): 1, (1, 2): 2}
    # Relay of label l is rank l mod n: one edge per node.
    relays = sorted(l % 3 for l in lab.labels.values())
    assert relays == [0, 1, 2]
    result = run_sparse_mis(3, [0, 1, 2], adj, seed=0)
    assert result.receipts.tolist() == [1, 1, 1]
    assert result.mis == (0,)


def test_labels_are_distinct_and_cover_range():
    for t in range(10):
        n = 32
        adj = gnp_adjacency(n, 0.12, seed=3000 + t)
        members = list(range(0, n, 2))
        mask = np.zeros(n, dtype=bool)
        mask[members] = True
        restricted = [a[mask[a]] if mask[u] else np.empty(0, dtype=np.int64)
                      for u, a in enumerate(adj)]
        lab = edge_labeling(n, members, restricted)
        e = induced_edge_count(adj, mask)
        assert sorted(lab.labels.values()) == list(range(e))


def test_edgeless_member_set():
    n = 16
    adj = [np.empty(0, dtype=np.int64) for _ in range(n)]
    members = [1, 4, 9]
    result = run_sparse_mis(n, members, adj, seed=0)
    assert result.mis == (1, 4, 9)
    assert result.rounds <= DETERMINISTIC_SLACK


def _central_mis(n, members, adj):
    member_set = set(members)
    nbr = {u: [int(v) for v in adj[u] if v in member_set] for u in member_set}
    return tuple(sorted(greedy_mis(nbr, sorted(member_set))))


@pytest.mark.parametrize("n,p", [(32, 0.2), (64, 0.1), (64, 0.25)])
def test_distributed_matches_central_oracle(n, p):
    rng = np.random.default_rng(n * 1000 + int(p * 100))
    for t in range(8):
        adj = gnp_adjacency(n, p, seed=4000 + t)
        members = rng.choice(n, size=int(rng.integers(2, n + 1)), replace=False)
        mask = np.zeros(n, dtype=bool)
        mask[members] = True
        e = induced_edge_count(adj, mask)
        result = run_sparse_mis(n, members, adj, seed=t)
        assert result.edge_total == e
        assert result.mis == _central_mis(n, members, adj)
        assert result.rounds <= math.ceil(e / n) + DETERMINISTIC_SLACK
        assert int(result.receipts.max()) <= math.ceil(e / n) + 1


def test_output_is_independent_and_dominating():
    n = 48
    adj = gnp_adjacency(n, 0.15, seed=9)
    members = list(range(0, n, 3))
    member_set = set(members)
    result = run_sparse_mis(n, members, adj, seed=1)
    mis = set(result.mis)
    assert mis <= member_set
    for u in mis:
        assert not any(v in mis for v in adj[u] if v in member_set)
    for u in member_set - mis:
        assert any(v in mis for v in adj[u] if v in member_set)
