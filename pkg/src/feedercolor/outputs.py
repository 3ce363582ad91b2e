"""Writers for run artefacts: JSON report, CSV tables, GeoJSON and figures."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from .pipeline import RunReport, SlotMetrics, i_over_n_ccdf

CCDF_GRID_DB = np.round(np.arange(-40.0, 40.0 + 1e-9, 0.5), 1)
ALLOCATION_COLUMNS = ("slot", "gateway", "antenna", "sat", "color", "reuse")
TIMING_COLUMNS = (
    "slot", "select_ms", "graph_ms", "color_ms", "recolor_ms", "max_part_ms", "sum_part_ms", "n_parts", "metrics_ms",
)


def _clean(obj):
    """JSON-safe copy: numpy scalars/arrays to Python, sets to sorted lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_clean(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def report_json(report: RunReport) -> str:
    return json.dumps(_clean(report.to_dict()), indent=2, sort_keys=True) + "\n"


def write_report(report: RunReport, path) -> None:
    Path(path).write_text(report_json(report), encoding="utf-8")


def write_metrics_csv(report: RunReport, path) -> None:
    names = [f.name for f in fields(SlotMetrics)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for s in report.slots:
            d = asdict(s)
            w.writerow([repr(d[k]) if isinstance(d[k], float) else d[k] for k in names])


def write_allocation_csv(report: RunReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(ALLOCATION_COLUMNS)
        for r in report.allocations:
            w.writerow([r[k] for k in ALLOCATION_COLUMNS])


def allocation_geojson(report: RunReport, gateways) -> dict:
    feats = []
    for g in sorted(gateways, key=lambda g: g.id):
        feats.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [g.longitude_deg, g.latitude_deg]},
                "properties": {"kind": "gateway", "gateway": g.id, "n_antennas": g.n_antennas},
            }
        )
    gw = {g.id: g for g in gateways}
    for r in report.allocations:
        if r["sat"] < 0:
            continue
        g = gw[r["gateway"]]
        feats.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[g.longitude_deg, g.latitude_deg], [round(r["sat_lon"], 6), round(r["sat_lat"], 6)]],
                },
                "properties": {
                    "kind": "link",
                    "slot": r["slot"],
                    "gateway": r["gateway"],
                    "antenna": r["antenna"],
                    "sat": r["sat"],
                    "color": r["color"],
                    "reuse": r["reuse"],
                    "lf": r["lf"],
                },
            }
        )
    return {"type": "FeatureCollection", "features": feats}


def write_ccdf_csv(report: RunReport, path, grid_db=CCDF_GRID_DB) -> np.ndarray:
    ccdf = i_over_n_ccdf(report.i_over_n_db, grid_db)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["i_over_n_db", "ccdf"])
        for x, y in zip(np.asarray(grid_db).tolist(), ccdf.tolist()):
            w.writerow([repr(x), repr(y)])
    return ccdf


def write_timing_csv(report: RunReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TIMING_COLUMNS)
        for t in report.timings:
            w.writerow([f"{t[k]:.3f}" if isinstance(t[k], float) else t[k] for k in TIMING_COLUMNS])


def write_outputs(report: RunReport, config, out_dir, figures: bool = True) -> dict[str, Path]:
    """Write every artefact into ``out_dir``; returns the written paths by name.

    ``report.json`` holds no wall-clock values so it is reproducible byte for
    byte; stage timings go to ``timing.csv``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.json",
        "metrics": out / "metrics.csv",
        "allocation": out / "allocation.csv",
        "geojson": out / "allocation.geojson",
        "ccdf": out / "ccdf.csv",
        "timing": out / "timing.csv",
    }
    write_report(report, paths["report"])
    write_metrics_csv(report, paths["metrics"])
    write_allocation_csv(report, paths["allocation"])
    paths["geojson"].write_text(json.dumps(allocation_geojson(report, config.gateways), indent=1) + "\n", encoding="utf-8")
    ccdf = write_ccdf_csv(report, paths["ccdf"])
    write_timing_csv(report, paths["timing"])
    if figures:
        from . import plotting

        paths["fig_lf_rate"] = plotting.plot_lf_rate(report, out / "lf_rate.png")
        paths["fig_ccdf"] = plotting.plot_ccdf(CCDF_GRID_DB, ccdf, config.itu_threshold_db, out / "ccdf.png")
        paths["fig_allocation"] = plotting.plot_allocation(
            report.allocations, config.gateways, config.num_subchannels, out / "allocation_map.png"
        )
    return paths
