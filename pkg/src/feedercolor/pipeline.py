"""Per-slot simulation pipeline and run-level metrics."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import decomp as dc
from .antenna import masks_for
from .coloring import CTSParams, GGParams, TCFAParams, global_coloring, random_coloring, tcfa_cts, tcfa_gg
from .graph import build_graph, clique_partition, conflict_count, subgraph_density
from .rf import LFRanker, LinkBudgetConfig, aggregate_i_over_n, capacity_degradation, compute_geometry, slot_capacity
from .scenario import (
    OMEGA_EARTH,
    ScenarioConfig,
    build_ephemeris,
    ecef_to_geodetic,
    elevation_matrix,
    gateway_positions,
    geodetic_to_ecef,
    rotate_z,
)
from .selection import continuity_mask, select_satellites
from .vsu import assign_vacant, capacity_gain, reuse_count

log = logging.getLogger(__name__)

ALGORITHMS = ("random", "global", "gg", "cts")
DECOMPOSITIONS = ("none", "ccd", "gscd")


@dataclass(frozen=True)
class RunOptions:
    algo: str = "cts"
    tcfa: bool = False
    p_s: float = 0.0
    epsilon: float = 1e-9
    decomp: str = "none"
    clusters: int | None = None
    vsu: bool = False
    constant_psd: bool = False
    seed: int | None = None
    gg: GGParams = field(default_factory=GGParams)
    cts: CTSParams = field(default_factory=CTSParams)
    recolor_patience: int = 20
    workers: int = 1

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {ALGORITHMS}")
        if self.decomp not in DECOMPOSITIONS:
            raise ValueError(f"unknown decomposition {self.decomp!r}; choose from {DECOMPOSITIONS}")
        if self.tcfa and self.algo not in ("gg", "cts"):
            raise ValueError("time-continuous allocation is only defined for gg and cts")
        if self.clusters is not None and self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SlotMetrics:
    slot: int
    n_working: int
    n_vacant: int
    lf_count: int
    lf_rate: float
    f_con: int
    edge_count: int
    delta_r_hat: float
    gamma_v: float
    f3: int
    switch_events: int
    continuity_events: int
    mean_block_density: float


@dataclass
class RunReport:
    slots: list[SlotMetrics]
    fsr: float
    mean_lf_rate: float
    max_lf_rate: float
    mean_delta_r_hat: float
    mean_gamma_v: float
    config: dict
    options: dict
    seed: int
    # not serialised into report.json
    allocations: list[dict] = field(default_factory=list, repr=False)
    i_over_n_db: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    timings: list[dict] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "aggregate": {
                "fsr": self.fsr,
                "mean_lf_rate": self.mean_lf_rate,
                "max_lf_rate": self.max_lf_rate,
                "mean_delta_r_hat": self.mean_delta_r_hat,
                "mean_gamma_v": self.mean_gamma_v,
                "switch_events": sum(s.switch_events for s in self.slots),
                "continuity_events": sum(s.continuity_events for s in self.slots),
            },
            "config": self.config,
            "options": self.options,
            "seed": self.seed,
            "slots": [asdict(s) for s in self.slots],
        }


def derive_seed(*keys) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


@dataclass
class ColorTask:
    """One independent coloring job (whole graph or one part of a decomposition)."""

    graph: object
    geom: object
    blocks: list
    num_colors: int
    algo: str
    tcfa: TCFAParams
    gg: GGParams
    cts: CTSParams
    seed: int


def run_color_task(task: ColorTask) -> tuple[np.ndarray, float]:
    start = time.perf_counter()
    g, C = task.graph, task.num_colors
    ranker = LFRanker(task.geom, g)
    if task.algo == "random":
        colors = random_coloring(g.n, C, task.seed)
    elif task.algo == "global":
        colors = global_coloring(g, C, task.seed)
    elif task.algo == "gg":
        params = GGParams(task.gg.n_restarts, task.gg.perturb_sigma, task.seed)
        colors = tcfa_gg(g, C, params, task.tcfa, ranker)
    else:
        p = task.cts
        params = CTSParams(p.n_initial, p.n_candidates, p.n_iterations, p.n_neighbors, p.tabu_length, task.seed, p.attempt_factor)
        colors = tcfa_cts(g, task.blocks, C, params, task.tcfa, ranker)
    return colors, (time.perf_counter() - start) * 1e3


def _sub_blocks(blocks, part) -> list[np.ndarray]:
    pos = {int(v): i for i, v in enumerate(part)}
    out = [np.array([pos[int(v)] for v in b if int(v) in pos], dtype=int) for b in blocks]
    return [b for b in out if len(b)]


def allocate(graph, geom, blocks, num_colors: int, options: RunOptions, tcfa: TCFAParams, seed: int,
             block_cluster=None, executor=None) -> tuple[np.ndarray, dict]:
    """Color one slot, optionally through a decomposition. Returns colors and stage timings (ms)."""
    timing: dict = {}
    if options.decomp == "none":
        task = ColorTask(graph, geom, blocks, num_colors, options.algo, tcfa, options.gg, options.cts, seed)
        colors, ms = run_color_task(task)
        timing["color_ms"] = ms
        timing["parts_ms"] = [ms]
        return colors, timing

    start = time.perf_counter()
    if options.decomp == "ccd":
        parts = dc.connected_components(graph)
        if options.algo == "cts":
            parts = dc.merge_by_blocks(parts, blocks)
    else:
        if block_cluster is None:
            raise ValueError("gscd needs a cluster label per gateway block")
        parts = dc.partition_by_clusters(graph, blocks, block_cluster)
    tasks = []
    for i, part in enumerate(parts.subgraph_vertex_sets):
        tasks.append(
            ColorTask(
                graph.subgraph(part), geom.subset(part), _sub_blocks(blocks, part), num_colors, options.algo,
                tcfa.restrict(part), options.gg, options.cts, derive_seed(seed, i),
            )
        )
    results = list(executor.map(run_color_task, tasks)) if executor is not None else [run_color_task(t) for t in tasks]
    stitched = dc.stitch(graph.n, parts, [r[0] for r in results])
    timing["parts_ms"] = [r[1] for r in results]
    timing["pre_recolor_f_con"] = conflict_count(graph, stitched)
    t_rec = time.perf_counter()
    colors = dc.recolor_boundary(
        graph, stitched, parts.cut_edges, num_colors, mode="cts" if options.algo == "cts" else "gg",
        blocks=blocks, tcfa=tcfa, patience=options.recolor_patience,
        n_neighbors=options.cts.n_neighbors, tabu_length=options.cts.tabu_length, seed=seed,
    )
    timing["recolor_ms"] = (time.perf_counter() - t_rec) * 1e3
    timing["color_ms"] = (time.perf_counter() - start) * 1e3
    timing["n_parts"] = len(parts.subgraph_vertex_sets)
    timing["cut_edges"] = len(parts.cut_edges)
    return colors, timing


def default_clusters(n_gateways: int) -> int:
    return max(1, round(n_gateways / 10))


def frequency_switching_rate(assignments, colorings) -> float:
    """Share of continuing links (same satellite, same gateway) whose subchannel changed.

    ``colorings[t]`` is aligned with the rows of ``assignments[t]``.
    """
    switches = continuing = 0
    for t in range(1, len(assignments)):
        prev_col = {
            int(s): int(c) for s, c in zip(assignments[t - 1].sat_id, colorings[t - 1]) if s >= 0
        }
        m_c, _ = continuity_mask(assignments[t - 1], assignments[t])
        for s, c in zip(assignments[t].sat_id.tolist(), np.asarray(colorings[t]).tolist()):
            if s >= 0 and m_c.get(s):
                continuing += 1
                switches += int(prev_col[s] != c)
    return switches / continuing if continuing else 0.0


def i_over_n_ccdf(values_db, grid_db) -> np.ndarray:
    """Fraction of values strictly above each grid point."""
    v = np.sort(np.asarray(values_db, dtype=float))
    if v.size == 0:
        return np.zeros(len(grid_db))
    return (v.size - np.searchsorted(v, np.asarray(grid_db, dtype=float), side="right")) / v.size


def lf_rate_series(report: RunReport) -> list[tuple[int, float]]:
    return [(s.slot, s.lf_rate) for s in report.slots]


def run_simulation(config: ScenarioConfig, options: RunOptions | None = None, ephemeris=None, on_slot=None) -> RunReport:
    """Run selection, graph construction, coloring and metrics over every slot.

    ``on_slot(slot, assignment, graph, colors, reuse)`` is called after each
    slot is colored, e.g. to dump graphs or inspect intermediate state.
    """
    options = options or RunOptions()
    seed = config.rng_seed if options.seed is None else options.seed
    eph = ephemeris if ephemeris is not None else build_ephemeris(config)
    sat_mask, gs_mask = masks_for(config)
    budget = LinkBudgetConfig.from_scenario(config)
    C = config.num_subchannels
    gws = sorted(config.gateways, key=lambda g: g.id)
    grid = config.time_grid

    cluster_of_gateway = None
    if options.decomp == "gscd":
        k = options.clusters or default_clusters(len(gws))
        ecef = np.array([geodetic_to_ecef(g.latitude_deg, g.longitude_deg, g.altitude_m, config.ellipsoidal) for g in gws])
        labels = dc.gs_kmeans(ecef, min(k, len(gws)), seed)
        cluster_of_gateway = {g.id: int(lab) for g, lab in zip(gws, labels)}

    executor = ProcessPoolExecutor(options.workers) if options.workers > 1 and options.decomp != "none" else None
    slots, allocations, timings, inn_values = [], [], [], []
    prev_assign, prev_color_of = None, {}
    try:
        for slot in range(grid.num_slots):
            try:
                t_s = slot * grid.dt_s
                t0 = time.perf_counter()
                gs_pos = gateway_positions(gws, t_s, config.ellipsoidal)
                sat_pos = eph.positions[slot]
                assign = select_satellites(elevation_matrix(gs_pos, sat_pos), gws, config.elevation_threshold_deg, slot)
                t1 = time.perf_counter()
                geom = compute_geometry(
                    assign.sat_id, assign.gateway, sat_pos, {g.id: gs_pos[i] for i, g in enumerate(gws)},
                    sat_mask, gs_mask, budget,
                )
                graph = build_graph(geom)
                blocks = clique_partition(graph)
                t2 = time.perf_counter()

                m_c, s_c = continuity_mask(prev_assign, assign)
                if options.tcfa and slot > 0:
                    prev = np.zeros(graph.n, dtype=int)
                    constrained = set()
                    for i, s in enumerate(assign.sat_id.tolist()):
                        if s in s_c:
                            constrained.add(i)
                            prev[i] = prev_color_of[s]
                    tcfa = TCFAParams(options.p_s, options.epsilon, frozenset(constrained), prev)
                else:
                    tcfa = TCFAParams(options.p_s, options.epsilon)
                block_cluster = None
                if cluster_of_gateway is not None:
                    block_cluster = [cluster_of_gateway[int(graph.gateway[b[0]])] for b in blocks]
                colors, ctiming = allocate(
                    graph, geom, blocks, C, options, tcfa, derive_seed(seed, slot), block_cluster, executor
                )
                t3 = time.perf_counter()

                real = assign.real
                reuse = assign_vacant(graph, colors, C) if options.vsu else np.zeros(graph.n, dtype=int)
                lf_mask = aggregate_i_over_n(geom, colors) > geom.itu_threshold_linear
                n_working = int(real.sum())
                lf_count = int(np.count_nonzero(lf_mask & real))
                cn, sinr, _ = slot_capacity(geom, colors)
                _, drh = capacity_degradation(cn, sinr)
                gamma = capacity_gain(sinr, geom.bandwidth_hz, reuse[real] > 0, options.constant_psd) if options.vsu else 0.0
                switches = sum(
                    1 for s, c in zip(assign.sat_id.tolist(), colors.tolist()) if s >= 0 and m_c[s] and prev_color_of[s] != c
                )
                continuing = sum(m_c.values())
                dens = [subgraph_density(graph, b[real[b]]) for b in blocks if real[b].sum() >= 2]
                slots.append(
                    SlotMetrics(
                        slot=slot,
                        n_working=n_working,
                        n_vacant=int((~real).sum()),
                        lf_count=lf_count,
                        lf_rate=lf_count / n_working if n_working else 0.0,
                        f_con=conflict_count(graph, colors),
                        edge_count=graph.edge_count,
                        delta_r_hat=drh,
                        gamma_v=gamma,
                        f3=reuse_count(reuse),
                        switch_events=switches,
                        continuity_events=continuing,
                        mean_block_density=float(np.mean(dens)) if dens else 0.0,
                    )
                )
                agg = aggregate_i_over_n(geom, colors)[real]
                with np.errstate(divide="ignore"):
                    inn_values.append(10.0 * np.log10(agg))
                sat_ecef = rotate_z(sat_pos, -OMEGA_EARTH * t_s)
                for i in range(graph.n):
                    s = int(assign.sat_id[i])
                    row = {
                        "slot": slot,
                        "gateway": int(assign.gateway[i]),
                        "antenna": int(assign.antenna[i]),
                        "sat": s,
                        "color": int(colors[i]) if s >= 0 else 0,
                        "reuse": int(reuse[i]),
                        "elevation_deg": float(assign.elevation_deg[i]),
                        "lf": bool(lf_mask[i]) if s >= 0 else False,
                    }
                    if s >= 0:
                        lat, lon = ecef_to_geodetic(sat_ecef[s])
                        row["sat_lat"], row["sat_lon"] = float(lat), float(lon)
                    allocations.append(row)
                timings.append(
                    {
                        "slot": slot,
                        "select_ms": (t1 - t0) * 1e3,
                        "graph_ms": (t2 - t1) * 1e3,
                        "color_ms": ctiming["color_ms"],
                        "recolor_ms": ctiming.get("recolor_ms", 0.0),
                        "max_part_ms": max(ctiming["parts_ms"]),
                        "sum_part_ms": sum(ctiming["parts_ms"]),
                        "n_parts": ctiming.get("n_parts", 1),
                        "cut_edges": ctiming.get("cut_edges", 0),
                        "pre_recolor_f_con": ctiming.get("pre_recolor_f_con", -1),
                        "metrics_ms": (time.perf_counter() - t3) * 1e3,
                    }
                )
                if on_slot is not None:
                    on_slot(slot, assign, graph, colors, reuse)
                prev_assign = assign
                prev_color_of = {s: int(c) for s, c in zip(assign.sat_id.tolist(), colors.tolist()) if s >= 0}
                log.debug("slot %d: |W|=%d lf=%d f_con=%d", slot, n_working, lf_count, slots[-1].f_con)
            except Exception as exc:
                raise RuntimeError(f"slot {slot}: {exc}") from exc
    finally:
        if executor is not None:
            executor.shutdown()

    sw = sum(s.switch_events for s in slots)
    ce = sum(s.continuity_events for s in slots)
    lf = [s.lf_rate for s in slots]
    return RunReport(
        slots=slots,
        fsr=sw / ce if ce else 0.0,
        mean_lf_rate=float(np.mean(lf)),
        max_lf_rate=float(np.max(lf)),
        mean_delta_r_hat=float(np.mean([s.delta_r_hat for s in slots])),
        mean_gamma_v=float(np.mean([s.gamma_v for s in slots])),
        config=config.to_dict(),
        options=options.to_dict(),
        seed=seed,
        allocations=allocations,
        i_over_n_db=np.concatenate(inn_values) if inn_values else np.zeros(0),
        timings=timings,
    )
