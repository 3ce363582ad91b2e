"""Vacant subchannel utilisation: give compliant links a second subchannel.

The reuse color of a link must differ from its own color, from every
neighbor's color and from every neighbor's reuse color, so reuse never adds
an edge-worthy interferer to any channel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coloring.base import descending_order


@dataclass
class ReuseGraph:
    """Original vertices ``0..n-1`` (fixed colors) plus duplicates ``n..2n-1``."""

    n: int
    adj: np.ndarray
    fixed_colors: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adj, 1)))


def feasible_color_sets(graph, base_colors, num_colors: int) -> list[set[int]]:
    """Colors absent from each vertex's closed neighborhood."""
    c = np.asarray(base_colors, dtype=int)
    palette = set(range(1, num_colors + 1))
    return [palette - {int(c[v])} - {int(c[u]) for u in graph.neighbors[v]} for v in range(graph.n)]


def build_reuse_graph(graph, base_colors) -> ReuseGraph:
    """Duplicate ``graph``; link each ``s`` to ``s^r`` and each ``u`` to ``s^r`` when ``u ~ s``.

    Duplicates are also joined to each other when their originals are
    adjacent, so two neighbors cannot take the same reuse color.
    """
    n = graph.n
    adj = np.zeros((2 * n, 2 * n), dtype=bool)
    a = graph.adj
    adj[:n, :n] = a
    adj[:n, n:] = a | np.eye(n, dtype=bool)
    adj[n:, :n] = adj[:n, n:].T
    adj[n:, n:] = a
    fixed = np.concatenate([np.asarray(base_colors, dtype=int), np.zeros(n, dtype=int)])
    return ReuseGraph(n, adj, fixed)


def assign_vacant(graph, base_colors, num_colors: int) -> np.ndarray:
    """Reuse color per vertex (0 = none) by greedy list coloring.

    Duplicates are taken in descending degree order and receive the smallest
    color of their feasible set not already used as a reuse color by a
    neighbor. Vacant antennas never receive a reuse color.
    """
    base = np.asarray(base_colors, dtype=int)
    if np.any(base <= 0):
        raise ValueError("base coloring must be complete (color 0 found)")
    feasible = feasible_color_sets(graph, base, num_colors)
    reuse = [0] * graph.n
    nbrs = graph.neighbors
    real = graph.sat_ids >= 0
    for v in descending_order(graph.degrees):
        if not real[v]:
            continue
        taken = {reuse[u] for u in nbrs[v]}
        options = sorted(feasible[v] - taken)
        reuse[v] = options[0] if options else 0
    return np.array(reuse, dtype=int)


def reuse_violations(graph, base_colors, reuse) -> list[tuple[int, str]]:
    """Every (vertex, constraint) that a reuse vector breaks; empty when valid."""
    base = np.asarray(base_colors, dtype=int)
    reuse = np.asarray(reuse, dtype=int)
    bad = []
    for v in range(graph.n):
        r = int(reuse[v])
        if r == 0:
            continue
        if r == base[v]:
            bad.append((v, "own color"))
        for u in graph.neighbors[v]:
            if r == base[u]:
                bad.append((v, "neighbor color"))
            if r == reuse[u]:
                bad.append((v, "neighbor reuse"))
    return bad


def reuse_count(reuse) -> int:
    return int(np.count_nonzero(np.asarray(reuse)))


def reused_capacity(sinr, bandwidth_hz: float, reused, constant_psd: bool = False) -> np.ndarray:
    """Capacity of each link once reused links span two subchannels.

    With fixed total transmit power the per-hertz SINR halves over the doubled
    band; ``constant_psd`` keeps the SINR instead.
    """
    sinr = np.asarray(sinr, dtype=float)
    reused = np.asarray(reused, dtype=bool)
    base = bandwidth_hz * np.log2(1.0 + sinr)
    wide_sinr = sinr if constant_psd else sinr / 2.0
    wide = 2.0 * bandwidth_hz * np.log2(1.0 + wide_sinr)
    return np.where(reused, wide, base)


def capacity_gain(sinr, bandwidth_hz: float, reused, constant_psd: bool = False) -> float:
    """``sum(R^r) / sum(R) - 1`` over the given links."""
    sinr = np.asarray(sinr, dtype=float)
    if sinr.size == 0:
        return 0.0
    r = np.sum(bandwidth_hz * np.log2(1.0 + sinr))
    r_r = np.sum(reused_capacity(sinr, bandwidth_hz, reused, constant_psd))
    return float(r_r / r - 1.0)
