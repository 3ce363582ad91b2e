"""Command-line entry point: ``feedercolor simulate|propagate|sample-config``."""
from __future__ import annotations

import argparse
import logging
import shutil
import sys
from pathlib import Path

from .coloring import CTSParams, GGParams
from .graph import write_dimacs
from .outputs import write_outputs
from .pipeline import ALGORITHMS, RunOptions, run_simulation
from .scenario import ConfigError, TimeGrid, build_ephemeris, load_scenario, sample_scenario_path, save_ephemeris

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
log = logging.getLogger("feedercolor")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feedercolor", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the per-slot allocation pipeline")
    sim.add_argument("--config", required=True, help="scenario JSON file")
    sim.add_argument("--algo", choices=ALGORITHMS, default="cts")
    sim.add_argument("--tcfa", action="store_true", help="keep subchannels of continuing links")
    sim.add_argument("--ps", type=float, default=0.0, help="switch proportionality p_s")
    sim.add_argument("--decomp", choices=("none", "ccd", "gscd"), default="none")
    sim.add_argument("--clusters", type=int, default=None, help="gateway clusters for gscd")
    sim.add_argument("--workers", type=int, default=1, help="worker processes for decomposed coloring")
    sim.add_argument("--vsu", action="store_true", help="reuse vacant subchannels")
    sim.add_argument("--constant-psd", action="store_true", help="reused links keep their per-hertz SINR")
    sim.add_argument("--subchannels", type=int, default=None, help="override the number of subchannels C")
    sim.add_argument("--nat", type=int, default=None, help="override antennas per gateway")
    sim.add_argument("--slots", type=int, default=None, help="override the number of slots")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--restarts", type=int, default=None, help="GG restarts")
    sim.add_argument("--cts-initial", type=int, default=None)
    sim.add_argument("--cts-candidates", type=int, default=None)
    sim.add_argument("--cts-iterations", type=int, default=None)
    sim.add_argument("--dump-graphs", action="store_true", help="write one DIMACS file per slot")
    sim.add_argument("--no-figures", action="store_true")
    sim.add_argument("--out", required=True, help="output directory")

    prop = sub.add_parser("propagate", help="write the constellation ephemeris as CSV")
    prop.add_argument("--config", required=True)
    prop.add_argument("--out", required=True)

    sample = sub.add_parser("sample-config", help="copy the bundled sample scenario")
    sample.add_argument("--out", required=True)
    return p


def _options(args) -> RunOptions:
    gg, cts = GGParams(), CTSParams()
    if args.restarts is not None:
        gg = GGParams(n_restarts=args.restarts)
    overrides = {
        k: v
        for k, v in (
            ("n_initial", args.cts_initial),
            ("n_candidates", args.cts_candidates),
            ("n_iterations", args.cts_iterations),
        )
        if v is not None
    }
    if overrides:
        base = {f: getattr(cts, f) for f in ("n_initial", "n_candidates", "n_iterations", "n_neighbors", "tabu_length")}
        base.update(overrides)
        base["n_candidates"] = min(base["n_candidates"], base["n_initial"])
        cts = CTSParams(**base)
    return RunOptions(
        algo=args.algo, tcfa=args.tcfa, p_s=args.ps, decomp=args.decomp, clusters=args.clusters,
        vsu=args.vsu, constant_psd=args.constant_psd, seed=args.seed, gg=gg, cts=cts, workers=args.workers,
    )


def _simulate(args) -> int:
    try:
        config = load_scenario(args.config)
        changes = {}
        if args.subchannels is not None:
            changes["num_subchannels"] = args.subchannels
        if args.nat is not None:
            changes["n_antennas"] = args.nat
        if args.slots is not None:
            g = config.time_grid
            changes["time_grid"] = TimeGrid(g.t0, g.dt_s, args.slots)
        config = config.with_overrides(**changes)
        options = _options(args)
    except (ConfigError, ValueError, OSError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    on_slot = None
    if args.dump_graphs:
        gdir = out / "graphs"
        gdir.mkdir(exist_ok=True)

        def on_slot(slot, assign, graph, colors, reuse):
            write_dimacs(graph, gdir / f"slot_{slot:04d}.col", comment=f"slot {slot}")

    try:
        report = run_simulation(config, options, on_slot=on_slot)
        paths = write_outputs(report, config, out, figures=not args.no_figures)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.error("runtime failure: %s", exc)
        return EXIT_RUNTIME
    print(f"slots={len(report.slots)} mean_lf_rate={report.mean_lf_rate:.4f} "
          f"max_lf_rate={report.max_lf_rate:.4f} fsr={report.fsr:.4f} gamma_v={report.mean_gamma_v:.4f}")
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


def _propagate(args) -> int:
    try:
        config = load_scenario(args.config)
    except (ConfigError, OSError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    try:
        save_ephemeris(build_ephemeris(config), args.out)
    except Exception as exc:  # noqa: BLE001
        log.error("runtime failure: %s", exc)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    if args.command == "simulate":
        return _simulate(args)
    if args.command == "propagate":
        return _propagate(args)
    shutil.copyfile(sample_scenario_path(), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
