import csv
import json

import numpy as np
import pytest

from feedercolor.antenna import masks_for
from feedercolor.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from feedercolor.coloring import GGParams, TCFAParams, tcfa_gg
from feedercolor.graph import build_graph, clique_partition, conflict_count
from feedercolor.pipeline import (
    RunOptions,
    derive_seed,
    frequency_switching_rate,
    i_over_n_ccdf,
    lf_rate_series,
    run_simulation,
)
from feedercolor.rf import LFRanker, LinkBudgetConfig, aggregate_i_over_n, compute_geometry
from feedercolor.scenario import build_ephemeris, elevation_matrix, gateway_positions, save_scenario
from feedercolor.selection import LinkAssignment, continuity_mask, select_satellites
from scenarios import frozen_ephemeris, make_config


def la(slot, gateway, sat_id):
    n = len(sat_id)
    return LinkAssignment(slot, np.asarray(gateway), np.zeros(n, int), np.asarray(sat_id), np.full(n, 60.0))


def test_isolated_single_gateway():
    cfg = make_config([(50.0, 10.0)], n_antennas=4, num_subchannels=4)
    rep = run_simulation(cfg, RunOptions(algo="cts"))
    assert rep.slots[0].n_working == 4
    assert rep.mean_lf_rate == 0.0 and rep.fsr == 0.0
    assert rep.slots[0].f_con == 0


def test_identical_slots_tcfa_ps_zero_never_switch():
    cfg = make_config([(50.0, 10.0), (50.3, 10.4), (49.8, 9.7)], n_antennas=4, num_subchannels=4, num_slots=2)
    eph = frozen_ephemeris(cfg, 2)
    for algo in ("gg", "cts"):
        rep = run_simulation(cfg, RunOptions(algo=algo, tcfa=True, p_s=0.0), ephemeris=eph)
        assert rep.slots[1].continuity_events == rep.slots[0].n_working > 0
        assert rep.slots[1].switch_events == 0 and rep.fsr == 0.0


def test_three_slot_run_matches_manual_pipeline():
    cfg = make_config([(50.0, 10.0), (50.5, 10.5), (49.5, 11.0)], n_antennas=4, num_subchannels=3, num_slots=3)
    opts = RunOptions(algo="gg", tcfa=True, p_s=0.5, gg=GGParams(n_restarts=4))
    seen = []
    rep = run_simulation(cfg, opts, on_slot=lambda s, a, g, c, r: seen.append(c.copy()))

    eph = build_ephemeris(cfg)
    sat_mask, gs_mask = masks_for(cfg)
    budget = LinkBudgetConfig.from_scenario(cfg)
    gws = sorted(cfg.gateways, key=lambda g: g.id)
    prev_a, prev_col = None, {}
    for t in range(3):
        gs = gateway_positions(gws, t * cfg.time_grid.dt_s)
        a = select_satellites(elevation_matrix(gs, eph.positions[t]), gws, cfg.elevation_threshold_deg, t)
        geom = compute_geometry(a.sat_id, a.gateway, eph.positions[t], {g.id: gs[i] for i, g in enumerate(gws)},
                                sat_mask, gs_mask, budget)
        g = build_graph(geom)
        m_c, s_c = continuity_mask(prev_a, a)
        if t == 0:
            tc = TCFAParams(0.5, 1e-9)
        else:
            idx = [i for i, s in enumerate(a.sat_id.tolist()) if s in s_c]
            prev = np.zeros(g.n, int)
            prev[idx] = [prev_col[int(a.sat_id[i])] for i in idx]
            tc = TCFAParams(0.5, 1e-9, frozenset(idx), prev)
        colors = tcfa_gg(g, 3, GGParams(4, GGParams().perturb_sigma, derive_seed(cfg.rng_seed, t)), tc, LFRanker(geom, g))
        assert np.array_equal(colors, seen[t])
        assert len(clique_partition(g)) == 3
        real = a.real
        lf = int(np.count_nonzero((aggregate_i_over_n(geom, colors) > geom.itu_threshold_linear) & real))
        sm = rep.slots[t]
        assert (sm.lf_count, sm.f_con, sm.n_working, sm.edge_count) == (lf, conflict_count(g, colors), int(real.sum()), g.edge_count)
        sw = sum(1 for s, c in zip(a.sat_id.tolist(), colors.tolist()) if s >= 0 and m_c[s] and prev_col[s] != c)
        assert sm.switch_events == sw
        prev_a, prev_col = a, {s: int(c) for s, c in zip(a.sat_id.tolist(), colors.tolist()) if s >= 0}


def test_fsr_all_keep_and_all_switch():
    a = [la(0, [0, 0, 1], [5, 6, 7]), la(1, [0, 0, 1], [5, 6, 7])]
    assert frequency_switching_rate(a, [[1, 2, 1], [1, 2, 1]]) == 0.0
    assert frequency_switching_rate(a, [[1, 2, 1], [2, 1, 3]]) == 1.0
    assert frequency_switching_rate(a[:1], [[1, 2, 1]]) == 0.0


def test_fsr_mixed_trace():
    # slot 1: sats 0-7 continue, 8 and 9 change gateway; colors of 1, 4, 6 change
    a0 = la(0, [i % 2 for i in range(10)], list(range(10)))
    a1 = la(1, [i % 2 for i in range(8)] + [1, 0], list(range(10)))
    # slot 2: sats 0-4 continue, 5-9 leave; sat 20 appears; colors of 0 and 3 change
    a2 = la(2, [i % 2 for i in range(5)] + [0], [0, 1, 2, 3, 4, 20])
    c0 = [1, 2, 3, 4, 1, 2, 3, 4, 1, 2]
    c1 = [1, 3, 3, 4, 2, 2, 1, 4, 2, 1]
    c2 = [2, 3, 3, 1, 2, 4]
    assert frequency_switching_rate([a0, a1, a2], [c0, c1, c2]) == pytest.approx(5 / 13)


def test_fsr_ignores_virtual_rows():
    a0 = la(0, [0, 0], [3, -1])
    a1 = la(1, [0, 0], [3, -1])
    assert frequency_switching_rate([a0, a1], [[1, 2], [1, 1]]) == 0.0


def test_ccdf_below_threshold_is_zero():
    vals = np.array([-30.0, -20.0, -15.0, -12.5])
    assert i_over_n_ccdf(vals, [-12.2])[0] == 0.0


def test_ccdf_sorted_rank_oracle_and_monotone():
    rng = np.random.default_rng(3)
    vals = rng.normal(-20, 6, 500)
    grid = np.arange(-40, 10, 0.5)
    got = i_over_n_ccdf(vals, grid)
    oracle = [sum(v > x for v in vals) / len(vals) for x in grid]
    assert np.allclose(got, oracle, atol=0, rtol=0)
    assert np.all(np.diff(got) <= 0)
    assert i_over_n_ccdf([], grid).sum() == 0


def test_report_invariants_and_series():
    cfg = make_config([(50.0, 10.0), (50.2, 10.3), (45.0, 5.0)], n_antennas=4, num_subchannels=4, num_slots=3)
    rep = run_simulation(cfg, RunOptions(algo="random", vsu=True))
    for s in rep.slots:
        assert 0 <= s.lf_rate <= 1 and s.switch_events <= s.continuity_events
    sw = sum(s.switch_events for s in rep.slots)
    ce = sum(s.continuity_events for s in rep.slots)
    assert rep.fsr == (sw / ce if ce else 0.0)
    assert lf_rate_series(rep) == [(s.slot, s.lf_rate) for s in rep.slots]
    assert len(rep.timings) == 3 and "color_ms" in rep.timings[0]


def test_run_options_validation():
    with pytest.raises(ValueError):
        RunOptions(algo="nope")
    with pytest.raises(ValueError):
        RunOptions(algo="global", tcfa=True)
    with pytest.raises(ValueError):
        RunOptions(decomp="nope")


def test_slot_error_has_context():
    cfg = make_config([(50.0, 10.0)], n_antennas=4, num_subchannels=3)
    with pytest.raises(RuntimeError, match="slot 0"):
        run_simulation(cfg, RunOptions(algo="cts"))


@pytest.fixture
def toy_config_file(tmp_path):
    cfg = make_config([(50.0, 10.0), (50.4, 10.5), (48.0, 2.0)], n_antennas=4, num_subchannels=4, num_slots=3)
    path = tmp_path / "toy.json"
    save_scenario(cfg, path)
    return path


def test_cli_writes_all_outputs(toy_config_file, tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--config", str(toy_config_file), "--algo", "gg", "--tcfa", "--ps", "0.1",
                 "--vsu", "--dump-graphs", "--out", str(out)])
    assert code == EXIT_OK
    for name in ("report.json", "metrics.csv", "allocation.csv", "allocation.geojson", "ccdf.csv", "timing.csv",
                 "lf_rate.png", "ccdf.png", "allocation_map.png", "graphs/slot_0000.col"):
        assert (out / name).stat().st_size > 0, name
    rep = json.loads((out / "report.json").read_text())
    assert len(rep["slots"]) == 3 and rep["options"]["algo"] == "gg"
    with open(out / "allocation.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["slot", "gateway", "antenna", "sat", "color", "reuse"]
    assert len(rows) == 3 * 12
    geo = json.loads((out / "allocation.geojson").read_text())
    assert sum(f["properties"]["kind"] == "gateway" for f in geo["features"]) == 3
    assert "mean_lf_rate" in capsys.readouterr().out


def test_cli_overrides_and_decomp(toy_config_file, tmp_path):
    out = tmp_path / "run"
    code = main(["simulate", "--config", str(toy_config_file), "--algo", "cts", "--decomp", "gscd", "--clusters", "2",
                 "--nat", "2", "--subchannels", "2", "--slots", "2", "--cts-iterations", "50", "--no-figures",
                 "--out", str(out)])
    assert code == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["num_subchannels"] == 2 and len(rep["slots"]) == 2
    assert not (out / "lf_rate.png").exists()


def test_cli_config_errors(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"shells": [], "gateways": []}))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_cli_runtime_error(toy_config_file, tmp_path):
    code = main(["simulate", "--config", str(toy_config_file), "--algo", "cts", "--subchannels", "3",
                 "--no-figures", "--out", str(tmp_path / "o")])
    assert code == EXIT_RUNTIME


def test_cli_report_deterministic(toy_config_file, tmp_path):
    blobs = []
    for i in range(2):
        out = tmp_path / f"r{i}"
        assert main(["simulate", "--config", str(toy_config_file), "--algo", "cts", "--seed", "7",
                     "--no-figures", "--out", str(out)]) == EXIT_OK
        blobs.append((out / "report.json").read_bytes())
    assert blobs[0] == blobs[1]


def test_cli_propagate_and_sample(tmp_path, toy_config_file):
    assert main(["sample-config", "--out", str(tmp_path / "s.json")]) == EXIT_OK
    assert json.loads((tmp_path / "s.json").read_text())["gateways"]
    assert main(["propagate", "--config", str(toy_config_file), "--out", str(tmp_path / "eph.csv")]) == EXIT_OK
    lines = (tmp_path / "eph.csv").read_text().splitlines()
    assert lines[0] == "slot,sat_id,x_m,y_m,z_m" and len(lines) == 1 + 3 * 1584
