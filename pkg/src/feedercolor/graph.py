"""Interference graph with per-victim adaptive thresholds."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass
class InterferenceGraph:
    """Undirected graph over the links of one slot.

    Vertices are positions ``0..n-1``; ``sat_ids`` holds -1 for vacant
    antennas, which are always isolated.
    """

    sat_ids: np.ndarray
    gateway: np.ndarray
    adj: np.ndarray
    thresholds: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.sat_ids = np.asarray(self.sat_ids, dtype=int)
        self.gateway = np.asarray(self.gateway, dtype=int)
        self.adj = np.asarray(self.adj, dtype=bool)
        n = len(self.sat_ids)
        if self.adj.shape != (n, n):
            raise ValueError(f"adjacency must be {n}x{n}")
        if np.any(np.diag(self.adj)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(self.adj, self.adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(self.adj[self.sat_ids < 0]):
            raise ValueError("virtual vertices must be isolated")

    @classmethod
    def from_edges(cls, n: int, edges, gateway=None, sat_ids=None) -> "InterferenceGraph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            adj[u, v] = adj[v, u] = True
        if sat_ids is None:
            sat_ids = np.arange(n)
        if gateway is None:
            gateway = np.zeros(n, dtype=int)
        return cls(np.asarray(sat_ids), np.asarray(gateway), adj)

    @property
    def n(self) -> int:
        return len(self.sat_ids)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    @cached_property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adj, 1)))

    @cached_property
    def edges(self) -> np.ndarray:
        """Edge list, shape ``(|E|, 2)`` with ``u < v``."""
        u, v = np.nonzero(np.triu(self.adj, 1))
        return np.stack([u, v], axis=1)

    @cached_property
    def neighbors(self) -> list[list[int]]:
        return [np.flatnonzero(row).tolist() for row in self.adj]

    def subgraph(self, idx) -> "InterferenceGraph":
        idx = np.asarray(idx, dtype=int)
        return InterferenceGraph(self.sat_ids[idx], self.gateway[idx], self.adj[np.ix_(idx, idx)])

    def conflict_count(self, colors) -> int:
        return conflict_count(self, colors)


def adaptive_threshold(i_over_n_row, weak_threshold: float, itu_threshold: float, order_key=None):
    """Adaptive threshold of one victim and the mask of interferers it connects to.

    Interferers at or above ``weak_threshold`` are sorted ascending (ties by
    ``order_key``, default position) and the longest prefix whose sum stays
    within ``itu_threshold`` is tolerated. The threshold is the I/N of the
    first interferer past that prefix, or +inf when everything fits.
    """
    row = np.asarray(i_over_n_row, dtype=float)
    key = np.arange(len(row)) if order_key is None else np.asarray(order_key)
    strong = np.flatnonzero(row >= weak_threshold)
    edge_mask = np.zeros(len(row), dtype=bool)
    if len(strong) == 0:
        return np.inf, edge_mask
    ranked = strong[np.lexsort((key[strong], row[strong]))]
    csum = np.cumsum(row[ranked])
    k = int(np.searchsorted(csum, itu_threshold, side="right"))  # prefix length with sum <= itu
    if k == len(ranked):
        return np.inf, edge_mask
    edge_mask[ranked[k:]] = True
    return float(row[ranked[k]]), edge_mask


def adaptive_thresholds(i_over_n: np.ndarray, weak_threshold: float, itu_threshold: float, order_key=None):
    """Per-victim thresholds and the directed qualification matrix (victim, interferer)."""
    n = i_over_n.shape[0]
    thresholds = np.full(n, np.inf)
    directed = np.zeros((n, n), dtype=bool)
    for v in range(n):
        thresholds[v], directed[v] = adaptive_threshold(i_over_n[v], weak_threshold, itu_threshold, order_key)
    return thresholds, directed


def build_graph(geom, weak_threshold: float | None = None, itu_threshold: float | None = None) -> InterferenceGraph:
    """Interference graph of a slot from its pairwise I/N table.

    Interference is assessed over every co-visible working satellite, before
    any channel is assigned. Edges are the union of both directed
    qualifications.
    """
    weak = geom.weak_threshold_linear if weak_threshold is None else weak_threshold
    itu = geom.itu_threshold_linear if itu_threshold is None else itu_threshold
    inn = geom.i_over_n.copy()
    real = geom.sat_ids >= 0
    inn[~real, :] = 0.0
    inn[:, ~real] = 0.0
    # zero entries (invisible, vacant, self) never qualify, even with a weak threshold of 0
    inn[inn <= 0] = -np.inf
    thresholds, directed = adaptive_thresholds(inn, weak, itu, order_key=geom.sat_ids)
    adj = directed | directed.T
    np.fill_diagonal(adj, False)
    adj[~real, :] = False
    adj[:, ~real] = False
    return InterferenceGraph(geom.sat_ids, geom.gateway, adj, thresholds)


def conflict_count(graph: InterferenceGraph, colors) -> int:
    """Monochromatic edges, each unordered edge counted once.

    The ordered double sum over vertex pairs is exactly twice this value.
    """
    c = np.asarray(colors)
    if np.any(c <= 0):
        raise ValueError("all vertices must be colored (color 0 found)")
    e = graph.edges
    if len(e) == 0:
        return 0
    return int(np.count_nonzero(c[e[:, 0]] == c[e[:, 1]]))


def conflicted_vertices(graph: InterferenceGraph, colors) -> np.ndarray:
    c = np.asarray(colors)
    same = graph.adj & (c[:, None] == c[None, :])
    return np.flatnonzero(same.any(axis=1))


def clique_partition(graph: InterferenceGraph) -> list[np.ndarray]:
    """One block of vertex positions per gateway, in ascending gateway id."""
    return [np.flatnonzero(graph.gateway == g) for g in np.unique(graph.gateway)]


def subgraph_density(graph: InterferenceGraph, subset) -> float:
    """``2 |E(subset)| / (k (k - 1))``; 1 for a complete subgraph."""
    idx = np.asarray(subset, dtype=int)
    k = len(idx)
    if k < 2:
        return 0.0
    e = np.count_nonzero(np.triu(graph.adj[np.ix_(idx, idx)], 1))
    return 2.0 * e / (k * (k - 1))


def write_dimacs(graph: InterferenceGraph, path, comment: str | None = None) -> None:
    """DIMACS ``.col`` edge list (1-based vertices)."""
    with open(path, "w", encoding="utf-8") as fh:
        if comment:
            fh.write(f"c {comment}\n")
        fh.write(f"p edge {graph.n} {graph.edge_count}\n")
        for u, v in graph.edges.tolist():
            fh.write(f"e {u + 1} {v + 1}\n")


def read_dimacs(path) -> InterferenceGraph:
    n, edges = 0, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                n = int(parts[2])
            elif parts[0] == "e":
                edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
    return InterferenceGraph.from_edges(n, edges)
