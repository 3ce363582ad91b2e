import itertools

import numpy as np
import pytest

from feedercolor.coloring import (
    CTSParams,
    GGParams,
    TCFAParams,
    clique_tabu_search,
    generalized_global,
    global_coloring,
    least_used_color,
    random_coloring,
    switch_probability,
    tabu_search,
    tcfa_cts,
    tcfa_gg,
)
from feedercolor.coloring.gg import _gg_pass
from feedercolor.graph import InterferenceGraph, conflict_count
from oracles import all_colorings, brute_force_min_conflicts, mags_like_graph

SMALL_CTS = CTSParams(n_initial=40, n_candidates=5, n_iterations=60, n_neighbors=6, tabu_length=5)


def triangle():
    return InterferenceGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


# --- clique permutations ---------------------------------------------------------


@pytest.mark.parametrize("C", range(2, 7))
def test_clique_zero_conflict_iff_permutation(C):
    kc = InterferenceGraph.from_edges(C, itertools.combinations(range(C), 2))
    sols = all_colorings(C, C)
    conflicts = np.zeros(len(sols), dtype=int)
    for u, v in kc.edges.tolist():
        conflicts += sols[:, u] == sols[:, v]
    is_perm = np.array([len(set(row.tolist())) == C for row in sols])
    assert np.array_equal(conflicts == 0, is_perm)
    assert is_perm.sum() == np.prod(range(1, C + 1))


# --- random / global / primitives ----------------------------------------------------


def test_random_single_color_and_determinism():
    assert random_coloring(10, 1, 0).tolist() == [1] * 10
    assert np.array_equal(random_coloring(50, 4, 7), random_coloring(50, 4, 7))


def test_random_uniform_chi_square():
    c = random_coloring(100_000, 4, 3)
    counts = np.bincount(c, minlength=5)[1:]
    chi2 = float(((counts - 25_000) ** 2 / 25_000).sum())
    assert chi2 < 16.27  # 99.9% quantile, 3 dof
    assert c.min() == 1 and c.max() == 4


def test_global_path():
    path = InterferenceGraph.from_edges(3, [(0, 1), (1, 2)])
    assert global_coloring(path, 2).tolist() == [2, 1, 2]


@pytest.mark.parametrize("seed", range(10))
def test_global_triangle_one_conflict(seed):
    assert conflict_count(triangle(), global_coloring(triangle(), 2, seed)) == 1


def test_global_edgeless():
    assert global_coloring(InterferenceGraph.from_edges(5, []), 3).tolist() == [1] * 5


def test_least_used_color_examples():
    nbrs = [[1, 2, 3], [], [], []]
    assert least_used_color(0, nbrs, [0, 1, 1, 2], 3) == 3
    assert least_used_color(0, nbrs, [0, 1, 2, 3], 3) == 1
    rng = np.random.default_rng(0)
    picks = {least_used_color(0, nbrs, [0, 1, 2, 3], 3, rng) for _ in range(50)}
    assert picks == {1, 2, 3}


@pytest.mark.parametrize("seed", range(10))
def test_least_used_color_histogram(seed):
    rng = np.random.default_rng(seed)
    colors = rng.integers(1, 6, 12).tolist()
    nbrs = [list(range(1, 12))] + [[] for _ in range(11)]
    got = least_used_color(0, nbrs, colors, 5)
    hist = {c: sum(1 for u in nbrs[0] if colors[u] == c) for c in range(1, 6)}
    assert hist[got] == min(hist.values())
    assert got == min(c for c in hist if hist[c] == min(hist.values()))


def test_switch_probability_examples():
    assert switch_probability(2, 1, 0.1) == pytest.approx(0.2, rel=1e-8)
    assert switch_probability(0, 1, 0.5) == 0.0
    assert switch_probability(-3, 1, 0.5) == 0.0
    assert switch_probability(1, 0, 1e-3, 1e-9) == 1.0


# --- GG / TCFA-GG -----------------------------------------------------------------


def test_gg_triangle_one_conflict():
    assert conflict_count(triangle(), generalized_global(triangle(), 2, GGParams(n_restarts=5))) == 1
    assert conflict_count(triangle(), tcfa_gg(triangle(), 2, GGParams(n_restarts=5), TCFAParams())) == 1


def test_tcfa_gg_empty_constraints_equals_gg():
    rng = np.random.default_rng(0)
    g, _ = mags_like_graph(rng, 4, 3, 0.2)
    p = GGParams(n_restarts=10, rng_seed=5)
    assert np.array_equal(tcfa_gg(g, 3, p, TCFAParams(0.7)), generalized_global(g, 3, p))


def test_gg_is_argmin_over_passes():
    rng = np.random.default_rng(1)
    g, _ = mags_like_graph(rng, 4, 3, 0.3)
    p = GGParams(n_restarts=12, rng_seed=9)
    passes = [
        _gg_pass(g.neighbors, g.degrees, 3, TCFAParams(), np.random.default_rng(ss), 0.5)
        for ss in np.random.SeedSequence(9).spawn(12)
    ]
    scores = [conflict_count(g, c) for c in passes]
    assert np.array_equal(generalized_global(g, 3, p), passes[int(np.argmin(scores))])


@pytest.mark.parametrize("seed", range(10))
def test_tcfa_gg_ps_zero_freezes_constrained(seed):
    rng = np.random.default_rng(seed)
    g, _ = mags_like_graph(rng, 4, 3, 0.4)
    prev = rng.integers(1, 4, g.n)
    constrained = frozenset(rng.choice(g.n, 5, replace=False).tolist())
    out = tcfa_gg(g, 3, GGParams(n_restarts=5, rng_seed=seed), TCFAParams(0.0, 1e-9, constrained, prev))
    for v in constrained:
        assert out[v] == prev[v]
    assert out.min() >= 1 and out.max() <= 3


def test_tcfa_gg_missing_previous_color_rejected():
    g = triangle()
    with pytest.raises(ValueError):
        tcfa_gg(g, 2, GGParams(n_restarts=1), TCFAParams(0.1, 1e-9, frozenset({0}), np.zeros(3, int)))
    with pytest.raises(ValueError):
        tcfa_gg(g, 2, GGParams(n_restarts=1), TCFAParams(0.1, 1e-9, frozenset({0}), None))


def _constrained_switch_graph():
    # s3 (2) gains edges to s2 (1) and s5 (4); all three inherited color 1.
    # s1, s6 pin s2 and s4, s7 pin s5, so only s3 benefits from switching.
    edges = [(1, 2), (2, 4), (0, 1), (1, 5), (3, 4), (4, 6)]
    g = InterferenceGraph.from_edges(7, edges)
    prev = np.array([2, 1, 1, 2, 1, 3, 3])
    return g, prev


def test_constrained_vertex_with_new_conflicts_switches():
    g, prev = _constrained_switch_graph()
    everyone = frozenset(range(7))
    for seed in range(20):
        out = tcfa_gg(g, 3, GGParams(n_restarts=1, rng_seed=seed), TCFAParams(10.0, 1e-9, everyone, prev))
        assert out[2] != 1
        assert [out[v] for v in (0, 1, 3, 4, 5, 6)] == [2, 1, 2, 1, 3, 3]
        assert conflict_count(g, out) == 0
    frozen = tcfa_gg(g, 3, GGParams(n_restarts=1), TCFAParams(0.0, 1e-9, everyone, prev))
    assert np.array_equal(frozen, prev) and conflict_count(g, frozen) == 2


@pytest.mark.parametrize("seed", range(5))
def test_gg_ge_optimum_and_beats_global(seed):
    wins, total = 0, 0
    for k in range(20):
        rng = np.random.default_rng(1000 * seed + k)
        edges = [(u, v) for u, v in itertools.combinations(range(12), 2) if rng.random() < 0.35]
        g = InterferenceGraph.from_edges(12, edges)
        opt = brute_force_min_conflicts(g, 3)
        gg = conflict_count(g, generalized_global(g, 3, GGParams(n_restarts=30, rng_seed=k)))
        gl = conflict_count(g, global_coloring(g, 3, k))
        assert gg >= opt
        wins += gg <= gl
        total += 1
    assert wins / total >= 0.95


# --- CTS ----------------------------------------------------------------------------


@pytest.mark.parametrize("C", [2, 3, 5])
def test_cts_single_clique(C):
    kc = InterferenceGraph.from_edges(C, itertools.combinations(range(C), 2))
    out = clique_tabu_search(kc, [np.arange(C)], C, SMALL_CTS)
    assert sorted(out.tolist()) == list(range(1, C + 1))


def test_cts_two_blocks_one_edge():
    g = InterferenceGraph.from_edges(4, [(0, 1), (2, 3), (1, 2)], gateway=[0, 0, 1, 1])
    blocks = [np.array([0, 1]), np.array([2, 3])]
    states = [(a, b) for a in itertools.permutations([1, 2]) for b in itertools.permutations([1, 2])]
    best = min(conflict_count(g, list(a) + list(b)) for a, b in states)
    assert best == 0
    for seed in range(5):
        out = tcfa_cts(g, blocks, 2, CTSParams(n_initial=2, n_candidates=1, n_iterations=20, n_neighbors=3, rng_seed=seed))
        assert conflict_count(g, out) == best


def test_cts_block_size_mismatch_rejected():
    g = InterferenceGraph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError, match="exactly C"):
        clique_tabu_search(g, [np.arange(3)], 2, SMALL_CTS)
    with pytest.raises(ValueError, match="partition"):
        clique_tabu_search(g, [np.arange(2)], 2, SMALL_CTS)


def test_cts_params_validation():
    with pytest.raises(ValueError):
        CTSParams(n_initial=5, n_candidates=6)
    with pytest.raises(ValueError):
        CTSParams(tabu_length=0)


@pytest.mark.parametrize("seed", range(8))
def test_tabu_trace_invariants(seed):
    rng = np.random.default_rng(seed)
    g, blocks = mags_like_graph(rng, 5, 3, 0.35)
    start = np.concatenate([rng.permutation([1, 2, 3]) for _ in blocks])
    trace = []
    best, best_f = tabu_search(g, blocks, start, 3, n_iterations=50, n_neighbors=5, tabu_length=4,
                               rng=np.random.default_rng(seed), trace=trace)
    for inc in trace:
        for b in blocks:
            assert sorted(inc[b].tolist()) == [1, 2, 3]
    keys = [t.tobytes() for t in trace]
    for i in range(1, len(keys)):
        assert keys[i] not in keys[max(0, i - 4):i]
    assert best_f == conflict_count(g, best) <= conflict_count(g, start)
    assert best_f == min(conflict_count(g, t) for t in trace)


@pytest.mark.parametrize("seed", range(5))
def test_tcfa_cts_constrained_inheritance(seed):
    rng = np.random.default_rng(seed)
    g, blocks = mags_like_graph(rng, 4, 3, 0.3)
    prev = np.concatenate([rng.permutation([1, 2, 3]) for _ in blocks])
    constrained = frozenset(rng.choice(g.n, 6, replace=False).tolist())
    out = tcfa_cts(g, blocks, 3, CTSParams(20, 4, 30, 5, 4, seed), TCFAParams(0.0, 1e-9, constrained, prev))
    for v in constrained:
        assert out[v] == prev[v]
    for b in blocks:
        assert sorted(out[b].tolist()) == [1, 2, 3]


def test_tcfa_cts_duplicate_inherited_colors_released():
    g = InterferenceGraph.from_edges(2, [(0, 1)])
    prev = np.array([1, 1])
    out = tcfa_cts(g, [np.arange(2)], 2, SMALL_CTS, TCFAParams(0.0, 1e-9, frozenset({0, 1}), prev))
    assert sorted(out.tolist()) == [1, 2]
    assert out[0] == 1


def test_cts_empty_constraints_any_ps_equals_cts():
    rng = np.random.default_rng(4)
    g, blocks = mags_like_graph(rng, 4, 3, 0.3)
    a = tcfa_cts(g, blocks, 3, SMALL_CTS, TCFAParams(0.0))
    b = tcfa_cts(g, blocks, 3, SMALL_CTS, TCFAParams(123.0))
    assert np.array_equal(a, b)


def test_cts_deterministic():
    rng = np.random.default_rng(2)
    g, blocks = mags_like_graph(rng, 4, 3, 0.3)
    assert np.array_equal(clique_tabu_search(g, blocks, 3, SMALL_CTS), clique_tabu_search(g, blocks, 3, SMALL_CTS))


def test_conflict_ordering_on_mags_like_graphs():
    f = {"random": [], "global": [], "gg": [], "cts": []}
    for seed in range(100):
        rng = np.random.default_rng(seed)
        g, blocks = mags_like_graph(rng, 6, 4, 0.12)
        f["random"].append(conflict_count(g, random_coloring(g.n, 4, seed)))
        f["global"].append(conflict_count(g, global_coloring(g, 4, seed)))
        f["gg"].append(conflict_count(g, generalized_global(g, 4, GGParams(n_restarts=10, rng_seed=seed))))
        f["cts"].append(conflict_count(g, clique_tabu_search(g, blocks, 4, CTSParams(40, 5, 60, 6, 5, seed))))
    m = {k: np.mean(v) for k, v in f.items()}
    assert m["cts"] <= m["gg"] <= m["global"] <= m["random"]
