"""Clique-based tabu search (CTS) and its time-continuous variant.

Every gateway block holds a permutation of ``1..C``, so links sharing a
gateway never share a subchannel. Moves swap the colors of two vertices of the
same block, which keeps that structure intact.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .base import switch_probability
from .gg import TCFAParams


@dataclass(frozen=True)
class CTSParams:
    n_initial: int = 200
    n_candidates: int = 20
    n_iterations: int = 100
    n_neighbors: int = 10
    tabu_length: int = 7
    rng_seed: int = 0
    attempt_factor: int = 100

    def __post_init__(self):
        for name in ("n_initial", "n_candidates", "n_iterations", "n_neighbors", "tabu_length", "attempt_factor"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_candidates > self.n_initial:
            raise ValueError("n_candidates must not exceed n_initial")


def _fixed_colors(blocks, base: np.ndarray) -> tuple[np.ndarray, frozenset[int]]:
    """Inherited colors with in-block duplicates released (first position keeps it)."""
    fixed = base.copy()
    for blk in blocks:
        seen = set()
        for v in blk:
            c = fixed[v]
            if c == 0:
                continue
            if c in seen:
                fixed[v] = 0
            else:
                seen.add(c)
    return fixed, frozenset(np.flatnonzero(fixed).tolist())


def initial_solutions(blocks, num_colors: int, fixed: np.ndarray, count: int, rng) -> np.ndarray:
    """``count`` random block-permutation colorings honouring the fixed colors."""
    n = len(fixed)
    sols = np.zeros((count, n), dtype=int)
    palette = np.arange(1, num_colors + 1)
    plans = []
    for blk in blocks:
        blk = np.asarray(blk)
        fc = fixed[blk]
        free_pos = blk[fc == 0]
        leftover = np.setdiff1d(palette, fc[fc > 0])
        plans.append((blk[fc > 0], fc[fc > 0], free_pos, leftover))
    for i in range(count):
        row = sols[i]
        for fixed_pos, fixed_col, free_pos, leftover in plans:
            row[fixed_pos] = fixed_col
            if len(free_pos):
                row[free_pos] = rng.permutation(leftover)[: len(free_pos)]
    return sols


def _batch_conflicts(graph, sols: np.ndarray) -> np.ndarray:
    e = graph.edges
    if len(e) == 0:
        return np.zeros(len(sols), dtype=int)
    return np.count_nonzero(sols[:, e[:, 0]] == sols[:, e[:, 1]], axis=1)


def tabu_search(
    graph,
    blocks,
    colors,
    num_colors: int,
    *,
    n_iterations: int,
    n_neighbors: int,
    tabu_length: int,
    rng,
    constrained: frozenset[int] = frozenset(),
    p_s: float = 0.0,
    eps: float = 1e-9,
    patience: int | None = None,
    attempt_factor: int = 100,
    trace: list | None = None,
):
    """Swap-move tabu search starting from ``colors``; returns ``(best, best_f_con)``.

    Each iteration samples up to ``n_neighbors`` swaps of a conflicted vertex
    with a random partner of its block. A swap that touches constrained
    vertices enters the pool only with the continuity switch probability;
    other swaps always do. The incumbent moves to the best non-tabu pool member
    and the tabu list holds the last ``tabu_length`` incumbents. Stops early
    when no conflict remains, or after ``patience`` iterations without
    improving the best f_con. If ``trace`` is a list, every incumbent is
    appended to it.
    """
    nbrs = graph.neighbors
    adj = graph.adj
    n = graph.n
    block_of = np.full(n, -1, dtype=int)
    members = []
    for b, blk in enumerate(blocks):
        blk = [int(v) for v in blk]
        members.append(blk)
        block_of[blk] = b
    arr = np.asarray(colors, dtype=int).copy()
    col = arr.tolist()
    nc = [[0] * (num_colors + 1) for _ in range(n)]
    for v in range(n):
        row = nc[v]
        for u in nbrs[v]:
            row[col[u]] += 1
    f = sum(nc[v][col[v]] for v in range(n)) // 2
    best, best_f = arr.copy(), f
    tabu = deque([arr.tobytes()], maxlen=tabu_length)
    if trace is not None:
        trace.append(arr.copy())
    stale = 0
    max_attempts = attempt_factor * n_neighbors

    for _ in range(n_iterations):
        conflicted = [v for v in range(n) if nc[v][col[v]] > 0 and block_of[v] >= 0 and len(members[block_of[v]]) > 1]
        if not conflicted:
            break
        pool = []
        attempts = 0
        while len(pool) < n_neighbors and attempts < max_attempts:
            attempts += 1
            x = conflicted[int(rng.integers(len(conflicted)))]
            blk = members[block_of[x]]
            j = int(rng.integers(len(blk) - 1))
            y = blk[j] if blk[j] != x else blk[-1]
            a, b = col[x], col[y]
            if a == b:
                continue
            link = int(adj[x, y])
            gain = (nc[x][a] + nc[y][b]) - (nc[x][b] - link + nc[y][a] - link)
            k_c = (x in constrained) + (y in constrained)
            if k_c:
                p = switch_probability(gain, k_c, p_s, eps)
                if not (p >= 1.0 or (p > 0.0 and rng.random() < p)):
                    continue
            pool.append((gain, x, y))

        moved = False
        for gain, x, y in sorted(pool, key=lambda t: -t[0]):
            arr[x], arr[y] = arr[y], arr[x]
            key = arr.tobytes()
            if key in tabu:
                arr[x], arr[y] = arr[y], arr[x]
                continue
            a, b = col[x], col[y]
            for u in nbrs[x]:
                nc[u][a] -= 1
                nc[u][b] += 1
            for u in nbrs[y]:
                nc[u][b] -= 1
                nc[u][a] += 1
            col[x], col[y] = b, a
            f -= gain
            tabu.append(key)
            if trace is not None:
                trace.append(arr.copy())
            moved = True
            break
        if moved and f < best_f:
            best, best_f = arr.copy(), f
            stale = 0
        else:
            stale += 1
        if patience is not None and stale >= patience:
            break
    return best, best_f


def tcfa_cts(graph, blocks, num_colors: int, params: CTSParams | None = None, tcfa: TCFAParams | None = None, ranker=None):
    """Time-continuous clique-based tabu search.

    Stage 1 draws ``n_initial`` block-permutation colorings (inherited colors
    fixed) and keeps the ``n_candidates`` with fewest conflicts. Stage 2 runs
    tabu search from each candidate and returns the result with the smallest
    ``ranker`` score (default: conflict count), earliest candidate on ties.
    """
    params = params or CTSParams()
    tcfa = tcfa or TCFAParams()
    ranker = ranker or graph.conflict_count
    covered = np.concatenate([np.asarray(b, dtype=int) for b in blocks]) if blocks else np.array([], dtype=int)
    if len(covered) != graph.n or len(np.unique(covered)) != graph.n:
        raise ValueError("blocks must partition the vertex set")
    for blk in blocks:
        if len(blk) != num_colors:
            raise ValueError(f"CTS needs every block to hold exactly C={num_colors} vertices, got {len(blk)}")

    fixed, constrained = _fixed_colors(blocks, tcfa.inherited(graph.n, num_colors))
    root = np.random.SeedSequence(params.rng_seed)
    init_ss, *cand_ss = root.spawn(params.n_candidates + 1)
    sols = initial_solutions(blocks, num_colors, fixed, params.n_initial, np.random.default_rng(init_ss))
    f0 = _batch_conflicts(graph, sols)
    chosen = np.argsort(f0, kind="stable")[: params.n_candidates]

    best, best_score = None, None
    for i, idx in enumerate(chosen):
        result, _ = tabu_search(
            graph,
            blocks,
            sols[idx],
            num_colors,
            n_iterations=params.n_iterations,
            n_neighbors=params.n_neighbors,
            tabu_length=params.tabu_length,
            rng=np.random.default_rng(cand_ss[i]),
            constrained=constrained,
            p_s=tcfa.switch_proportionality,
            eps=tcfa.epsilon,
            attempt_factor=params.attempt_factor,
        )
        score = ranker(result)
        if best_score is None or score < best_score:
            best, best_score = result, score
    return best


def clique_tabu_search(graph, blocks, num_colors: int, params: CTSParams | None = None, ranker=None):
    return tcfa_cts(graph, blocks, num_colors, params, None, ranker)
