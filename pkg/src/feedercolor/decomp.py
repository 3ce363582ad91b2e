"""Graph decomposition for parallel coloring: connected components and gateway clustering."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coloring.base import least_used_color, neighbor_color_counts, switch_probability
from .coloring.cts import tabu_search
from .coloring.gg import TCFAParams


@dataclass
class Decomposition:
    subgraph_vertex_sets: list[np.ndarray]
    cut_edges: list[tuple[int, int]] = field(default_factory=list)
    kind: str = "ccd"


def connected_components(graph) -> Decomposition:
    """Components by iterative depth-first search, ordered by smallest vertex."""
    nbrs = graph.neighbors
    seen = [False] * graph.n
    comps = []
    for root in range(graph.n):
        if seen[root]:
            continue
        stack = [root]
        seen[root] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in nbrs[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(np.array(sorted(comp), dtype=int))
    return Decomposition(comps, [], "ccd")


def merge_by_blocks(decomp: Decomposition, blocks) -> Decomposition:
    """Coarsen a vertex partition so no gateway block is split across parts."""
    part_of = {}
    for i, part in enumerate(decomp.subgraph_vertex_sets):
        for v in part.tolist():
            part_of[v] = i
    parent = list(range(len(decomp.subgraph_vertex_sets)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for blk in blocks:
        ids = [find(part_of[int(v)]) for v in blk]
        for j in ids[1:]:
            a, b = find(ids[0]), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i, part in enumerate(decomp.subgraph_vertex_sets):
        groups.setdefault(find(i), []).extend(part.tolist())
    parts = [np.array(sorted(vs), dtype=int) for _, vs in sorted(groups.items())]
    return Decomposition(parts, list(decomp.cut_edges), decomp.kind)


def _kmeans_pp_init(x: np.ndarray, k: int, rng) -> np.ndarray:
    centers = [x[int(rng.integers(len(x)))]]
    for _ in range(1, k):
        d2 = np.min(((x[:, None, :] - np.array(centers)[None]) ** 2).sum(-1), axis=1)
        total = d2.sum()
        if total == 0:
            centers.append(x[int(rng.integers(len(x)))])
        else:
            centers.append(x[int(rng.choice(len(x), p=d2 / total))])
    return np.array(centers)


def kmeans(x, k: int, seed=0, tol_m: float = 1e-6, max_iter: int = 300) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd's algorithm with k-means++ seeding.

    Returns ``(labels, centers, wcss)``. An emptied cluster is re-seeded at the
    point farthest from its current center.
    """
    x = np.asarray(x, dtype=float)
    if not 1 <= k <= len(x):
        raise ValueError(f"k must lie in 1..{len(x)}, got {k}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(x, k, rng)
    labels = np.zeros(len(x), dtype=int)
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centers[None]) ** 2).sum(-1)
        labels = np.argmin(d2, axis=1)
        new = centers.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = x[members].mean(axis=0)
            else:
                far = int(np.argmax(d2[np.arange(len(x)), labels]))
                new[j] = x[far]
                labels[far] = j
        shift = np.max(np.linalg.norm(new - centers, axis=1))
        centers = new
        if shift < tol_m:
            break
    d2 = ((x[:, None, :] - centers[None]) ** 2).sum(-1)
    labels = np.argmin(d2, axis=1)
    wcss = float(d2[np.arange(len(x)), labels].sum())
    return labels, centers, wcss


def gs_kmeans(gateway_ecef, k: int, seed=0) -> np.ndarray:
    """Cluster index per gateway from ECEF coordinates (m)."""
    labels, _, _ = kmeans(gateway_ecef, k, seed)
    return labels


def partition_by_clusters(graph, blocks, block_cluster) -> Decomposition:
    """Group gateway blocks by cluster; edges between groups become cut edges.

    ``block_cluster[i]`` is the cluster of ``blocks[i]``.
    """
    clusters = sorted(set(int(c) for c in block_cluster))
    parts = []
    label = np.full(graph.n, -1, dtype=int)
    for j, c in enumerate(clusters):
        vs = np.concatenate([np.asarray(b, dtype=int) for b, bc in zip(blocks, block_cluster) if int(bc) == c])
        vs = np.sort(vs)
        parts.append(vs)
        label[vs] = j
    e = graph.edges
    cut = [(int(u), int(v)) for u, v in e if label[u] != label[v]]
    return Decomposition(parts, cut, "gscd")


def edge_conservation(graph, decomp: Decomposition) -> tuple[int, int, int]:
    """(sum of intra-part edges, cut edges, total edges)."""
    intra = sum(graph.subgraph(p).edge_count for p in decomp.subgraph_vertex_sets)
    return intra, len(decomp.cut_edges), graph.edge_count


def stitch(n: int, decomp: Decomposition, part_colors) -> np.ndarray:
    colors = np.zeros(n, dtype=int)
    for part, c in zip(decomp.subgraph_vertex_sets, part_colors):
        colors[part] = c
    return colors


def recolor_boundary(
    graph,
    colors,
    cut_edges,
    num_colors: int,
    mode: str = "gg",
    blocks=None,
    tcfa: TCFAParams | None = None,
    patience: int = 20,
    n_neighbors: int = 10,
    tabu_length: int = 7,
    max_iterations: int = 10_000,
    seed=0,
) -> np.ndarray:
    """Repair a stitched coloring on the restored graph.

    ``gg`` recolors each cut-edge endpoint (ascending satellite id) with its
    least used color; constrained endpoints switch only with the continuity
    probability. ``cts`` runs swap-move tabu search on the whole graph until
    the conflict count stops improving for ``patience`` iterations.
    Neither mode increases the conflict count.
    """
    colors = np.asarray(colors, dtype=int).copy()
    if not len(cut_edges):
        return colors
    tcfa = tcfa or TCFAParams()
    rng = np.random.default_rng(seed)
    if mode == "gg":
        nbrs = graph.neighbors
        col = colors.tolist()
        ends = sorted({v for e in cut_edges for v in e}, key=lambda v: (graph.sat_ids[v], v))
        for v in ends:
            if v in tcfa.constrained:
                counts = neighbor_color_counts(v, nbrs, col, num_colors)
                new = counts.index(min(counts[1:]), 1)
                p = switch_probability(counts[col[v]] - counts[new], 1, tcfa.switch_proportionality, tcfa.epsilon)
                if p >= 1.0 or (p > 0.0 and rng.random() < p):
                    col[v] = new
            else:
                col[v] = least_used_color(v, nbrs, col, num_colors)
        return np.array(col, dtype=int)
    if mode == "cts":
        if blocks is None:
            raise ValueError("cts recoloring needs the clique partition")
        best, _ = tabu_search(
            graph,
            blocks,
            colors,
            num_colors,
            n_iterations=max_iterations,
            n_neighbors=n_neighbors,
            tabu_length=tabu_length,
            rng=rng,
            constrained=tcfa.constrained,
            p_s=tcfa.switch_proportionality,
            eps=tcfa.epsilon,
            patience=patience,
        )
        return best
    raise ValueError(f"unknown recoloring mode {mode!r}")
