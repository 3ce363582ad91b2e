"""Shared coloring primitives and the Random / Global baselines."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ColoringScheme:
    """Subchannel per vertex (1..C, 0 = uncolored) and an optional reuse vector."""

    colors: np.ndarray
    slot: int = 0
    reuse: np.ndarray | None = None

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=int)

    def validate(self, num_colors: int) -> None:
        if np.any(self.colors < 1) or np.any(self.colors > num_colors):
            raise ValueError(f"colors must lie in 1..{num_colors}")


def neighbor_color_counts(v: int, neighbors, colors, num_colors: int) -> list[int]:
    """Histogram of neighbor colors of ``v``; index 0 counts uncolored neighbors."""
    counts = [0] * (num_colors + 1)
    for u in neighbors[v]:
        counts[colors[u]] += 1
    return counts


def _argmin_color(counts, num_colors: int, rng=None) -> int:
    best = min(counts[1 : num_colors + 1])
    if rng is None:
        return counts.index(best, 1)
    ties = [c for c in range(1, num_colors + 1) if counts[c] == best]
    return ties[int(rng.integers(len(ties)))]


def least_used_color(v: int, neighbors, colors, num_colors: int, rng=None) -> int:
    """Color in 1..C used by the fewest neighbors of ``v``.

    Ties go to the smallest index, or uniformly at random when ``rng`` is given.
    """
    return _argmin_color(neighbor_color_counts(v, neighbors, colors, num_colors), num_colors, rng)


def switch_probability(gain: int, k_c: int, p_s: float, eps: float = 1e-9) -> float:
    """Acceptance probability ``min(gain * p_s / (k_c + eps), 1)`` of a switch.

    ``gain`` is the conflict reduction; negative values count as zero.
    """
    gain = max(gain, 0)
    if gain == 0 or p_s <= 0:
        return 0.0
    return min(gain * p_s / (k_c + eps), 1.0)


def descending_order(keys) -> list[int]:
    """Vertex positions by descending key, ties by ascending position."""
    keys = np.asarray(keys, dtype=float)
    return np.lexsort((np.arange(len(keys)), -keys)).tolist()


def random_coloring(n: int, num_colors: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(1, num_colors + 1, size=n)


def global_coloring(graph, num_colors: int, seed=None) -> np.ndarray:
    """Greedy coloring in descending degree order with the smallest free color.

    Vertices whose smallest free color exceeds ``num_colors`` get a uniformly
    random color instead.
    """
    rng = np.random.default_rng(seed)
    nbrs = graph.neighbors
    raw = [0] * graph.n
    for v in descending_order(graph.degrees):
        used = {raw[u] for u in nbrs[v]}
        c = 1
        while c in used:
            c += 1
        raw[v] = c
    out = np.array(raw, dtype=int)
    over = np.flatnonzero(out > num_colors)
    if len(over):
        out[over] = rng.integers(1, num_colors + 1, size=len(over))
    return out
