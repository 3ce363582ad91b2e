"""Generalized Global and its time-continuous variant."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .base import descending_order, neighbor_color_counts, switch_probability


@dataclass(frozen=True)
class GGParams:
    n_restarts: int = 100
    perturb_sigma: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be >= 1")
        if self.perturb_sigma < 0:
            raise ValueError("perturb_sigma must be >= 0")


@dataclass(frozen=True)
class TCFAParams:
    """Continuity constraints for one slot.

    ``constrained`` holds vertex positions whose color is inherited from
    ``previous_colors`` (a full-length array; only constrained entries are read).
    """

    switch_proportionality: float = 0.0
    epsilon: float = 1e-9
    constrained: frozenset[int] = field(default_factory=frozenset)
    previous_colors: np.ndarray | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.switch_proportionality < 0:
            raise ValueError("switch_proportionality must be >= 0")

    def inherited(self, n: int, num_colors: int) -> np.ndarray:
        """Length-``n`` array with the constrained colors filled in, zeros elsewhere."""
        colors = np.zeros(n, dtype=int)
        if not self.constrained:
            return colors
        if self.previous_colors is None:
            raise ValueError("constrained vertices need previous colors")
        prev = np.asarray(self.previous_colors, dtype=int)
        for v in self.constrained:
            c = int(prev[v])
            if not 1 <= c <= num_colors:
                raise ValueError(f"constrained vertex {v} has no valid previous color ({c})")
            colors[v] = c
        return colors

    def restrict(self, idx) -> "TCFAParams":
        """Constraints re-indexed onto the sub-vertex list ``idx``."""
        idx = list(map(int, idx))
        pos = {v: i for i, v in enumerate(idx)}
        prev = None
        if self.previous_colors is not None:
            prev = np.asarray(self.previous_colors)[idx]
        return TCFAParams(
            self.switch_proportionality,
            self.epsilon,
            frozenset(pos[v] for v in self.constrained if v in pos),
            prev,
        )


def _gg_pass(nbrs, degrees, num_colors, tcfa: TCFAParams, rng, sigma):
    n = len(degrees)
    colors = tcfa.inherited(n, num_colors).tolist()
    constrained = tcfa.constrained
    perturbed = np.asarray(degrees, dtype=float) + rng.normal(0.0, sigma, size=n) if sigma > 0 else np.asarray(degrees, dtype=float)
    desc = [v for v in descending_order(perturbed) if v not in constrained]

    # stage 1: conflict-free colors only
    for v in desc:
        counts = neighbor_color_counts(v, nbrs, colors, num_colors)
        if min(counts[1:]) == 0:
            colors[v] = counts.index(0, 1)
    # stage 2: least used color for the rest
    for v in desc:
        if colors[v] == 0:
            counts = neighbor_color_counts(v, nbrs, colors, num_colors)
            colors[v] = counts.index(min(counts[1:]), 1)
    # stage 3: reverse order; constrained vertices switch only with probability
    asc = descending_order(-perturbed)
    for v in asc:
        if v not in constrained:
            continue
        counts = neighbor_color_counts(v, nbrs, colors, num_colors)
        new = counts.index(min(counts[1:]), 1)
        gain = counts[colors[v]] - counts[new]
        p = switch_probability(gain, 1, tcfa.switch_proportionality, tcfa.epsilon)
        if p >= 1.0 or (p > 0.0 and rng.random() < p):
            colors[v] = new
    for v in asc:
        if v in constrained:
            continue
        counts = neighbor_color_counts(v, nbrs, colors, num_colors)
        colors[v] = counts.index(min(counts[1:]), 1)
    return np.array(colors, dtype=int)


def tcfa_gg(graph, num_colors: int, params: GGParams | None = None, tcfa: TCFAParams | None = None, ranker=None):
    """Time-continuous Generalized Global.

    Runs ``n_restarts`` independent passes, each with its own degree
    perturbation, and keeps the pass with the smallest ``ranker`` score
    (earliest pass on ties). ``ranker`` defaults to the conflict count.
    Without constrained vertices this is plain GG.
    """
    params = params or GGParams()
    tcfa = tcfa or TCFAParams()
    ranker = ranker or graph.conflict_count
    nbrs = graph.neighbors
    seeds = np.random.SeedSequence(params.rng_seed).spawn(params.n_restarts)
    best, best_score = None, None
    for ss in seeds:
        colors = _gg_pass(nbrs, graph.degrees, num_colors, tcfa, np.random.default_rng(ss), params.perturb_sigma)
        score = ranker(colors)
        if best_score is None or score < best_score:
            best, best_score = colors, score
    return best


def generalized_global(graph, num_colors: int, params: GGParams | None = None, ranker=None):
    return tcfa_gg(graph, num_colors, params, None, ranker)
