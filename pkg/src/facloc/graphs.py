"""Small adjacency-list helpers shared by the graph algorithms and the harness.

A graph on nodes 0..n-1 is a list of sorted integer arrays, one per node,
holding that node's neighbors.  Graphs here are simple and undirected.
"""

from __future__ import annotations

import json

import numpy as np


def adjacency_from_edges(n: int, edges) -> list[np.ndarray]:
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    return [np.array(sorted(s), dtype=np.int64) for s in nbrs]


def gnp_adjacency(n: int, p: float, seed: int) -> list[np.ndarray]:
    """Erdos-Renyi style spanning subgraph, row-sampled for reproducibility."""
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n - 1):
        hits = np.nonzero(rng.random(n - u - 1) < p)[0]
        edges.extend((u, u + 1 + int(h)) for h in hits)
    return adjacency_from_edges(n, edges)


def complete_adjacency(n: int) -> list[np.ndarray]:
    all_nodes = np.arange(n, dtype=np.int64)
    return [np.delete(all_nodes, i) for i in range(n)]


def edge_list(adj) -> list[tuple[int, int]]:
    return [(u, int(v)) for u in range(len(adj)) for v in adj[u] if u < v]


def edge_count(adj) -> int:
    return sum(len(a) for a in adj) // 2


def degrees(adj) -> np.ndarray:
    return np.array([len(a) for a in adj], dtype=np.int64)


def induced_edge_count(adj, member_mask: np.ndarray) -> int:
    """Edges of the subgraph induced by the mask's nodes."""
    total = 0
    for u in np.nonzero(member_mask)[0]:
        nbrs = adj[u]
        total += int(np.count_nonzero(member_mask[nbrs] & (nbrs > u)))
    return total


def read_graph(path: str) -> list[np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return adjacency_from_edges(int(data["n"]), data["edges"])


def write_graph(adj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"n": len(adj), "edges": [list(e) for e in edge_list(adj)]}, fh)
        fh.write("\n")
