"""Static figures for a simulation run (LF rate, I/N CCDF, allocation map)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PARAMS = {
    "axes.labelsize": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "figure.figsize": (5.0, 3.2),
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_lf_rate(report, path) -> Path:
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        slots = [s.slot for s in report.slots]
        ax.plot(slots, [100 * s.lf_rate for s in report.slots], marker="o", ms=2, label="LF rate")
        ax.set_xlabel("slot")
        ax.set_ylabel("LF rate (%)")
        ax.set_ylim(bottom=0)
        ax.legend(loc="upper right")
        return _save(fig, path)


def plot_ccdf(grid_db, ccdf, threshold_db: float, path) -> Path:
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots()
        ax.step(grid_db, ccdf, where="post")
        ax.axvline(threshold_db, ls="--", color="k", lw=0.8, label=f"threshold {threshold_db:g} dB")
        ax.set_xlabel("aggregate I/N (dB)")
        ax.set_ylabel("CCDF")
        ax.set_ylim(0, 1.02)
        ax.legend(loc="upper right")
        return _save(fig, path)


def plot_allocation(rows, gateways, num_colors: int, path, slot: int = 0) -> Path:
    """Gateways as black triangles, links coloured by subchannel for one slot."""
    cmap = plt.get_cmap("tab10" if num_colors <= 10 else "tab20")
    gw = {g.id: g for g in gateways}
    with plt.rc_context(PARAMS):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        used = set()
        for r in rows:
            if r["slot"] != slot or r["sat"] < 0:
                continue
            g = gw[r["gateway"]]
            c = r["color"]
            ax.plot(
                [g.longitude_deg, r["sat_lon"]], [g.latitude_deg, r["sat_lat"]],
                color=cmap((c - 1) % cmap.N), lw=0.8, label=f"subchannel {c}" if c not in used else None,
            )
            ax.plot(r["sat_lon"], r["sat_lat"], ".", color=cmap((c - 1) % cmap.N), ms=3)
            used.add(c)
        lon = np.array([g.longitude_deg for g in gateways])
        lat = np.array([g.latitude_deg for g in gateways])
        ax.plot(lon, lat, "k^", ms=5, label="gateway")
        ax.set_xlabel("longitude (deg)")
        ax.set_ylabel("latitude (deg)")
        ax.set_title(f"slot {slot}")
        handles, labels = ax.get_legend_handles_labels()
        order = sorted(range(len(labels)), key=lambda i: labels[i])
        ax.legend([handles[i] for i in order], [labels[i] for i in order], fontsize=6, loc="best")
        return _save(fig, path)
