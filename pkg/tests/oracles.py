"""Independent reference implementations used by several test modules."""
from __future__ import annotations

import itertools

import numpy as np

from feedercolor.graph import InterferenceGraph


def all_colorings(n: int, num_colors: int) -> np.ndarray:
    """Every coloring in {1..C}^n as rows, shape (C^n, n)."""
    grids = np.indices((num_colors,) * n, dtype=np.int8).reshape(n, -1).T
    return grids + 1


def brute_force_min_conflicts(graph: InterferenceGraph, num_colors: int) -> int:
    e = graph.edges
    if len(e) == 0:
        return 0
    sols = all_colorings(graph.n, num_colors)
    conflicts = np.zeros(len(sols), dtype=np.int16)
    for u, v in e.tolist():
        conflicts += sols[:, u] == sols[:, v]
    return int(conflicts.min())


def naive_conflicts(graph: InterferenceGraph, colors) -> int:
    return sum(1 for u, v in itertools.combinations(range(graph.n), 2) if graph.adj[u, v] and colors[u] == colors[v])


def mags_like_graph(rng, n_blocks: int, block_size: int, p_inter: float, p_missing: float = 0.0):
    """Gateway blocks that are (quasi-)cliques plus sparse inter-block edges.

    Returns the graph and its blocks (consecutive vertex ranges).
    """
    n = n_blocks * block_size
    gateway = np.repeat(np.arange(n_blocks), block_size)
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        same = gateway[u] == gateway[v]
        if (same and rng.random() >= p_missing) or (not same and rng.random() < p_inter):
            edges.append((u, v))
    g = InterferenceGraph.from_edges(n, edges, gateway=gateway)
    blocks = [np.arange(b * block_size, (b + 1) * block_size) for b in range(n_blocks)]
    return g, blocks


def union_find_components(n: int, edges) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())
