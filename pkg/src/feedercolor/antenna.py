"""Piecewise off-axis gain masks for the satellite and gateway antennas.

The envelope has three regions::

    main lobe   G0 - 3 (phi / phi_b)^2                phi <= phi_m
    sidelobes   min(G0 + L_N, K - slope * log10(phi))  phi >  phi_m
    floor       max(..., G_floor)

where ``phi_m`` is the angle at which the main lobe falls to the near-sidelobe
level ``G0 + L_N``. The two presets are shaped after ITU-R S.1528 (satellite)
and S.1428 (gateway) but their coefficients are approximations.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np


@dataclass(frozen=True)
class GainMask:
    peak_gain_db: float
    half_beamwidth_deg: float
    sidelobe_floor_db: float
    near_sidelobe_db: float = -25.0  # relative to peak
    sidelobe_const_db: float = 29.0
    sidelobe_slope_db: float = 25.0

    def __post_init__(self):
        if not self.half_beamwidth_deg > 0:
            raise ValueError("half_beamwidth_deg must be > 0")
        if self.near_sidelobe_db >= 0:
            raise ValueError("near_sidelobe_db must be negative (relative to peak)")
        if self.sidelobe_slope_db < 0:
            raise ValueError("sidelobe_slope_db must be >= 0")
        if self.sidelobe_floor_db > self.peak_gain_db + self.near_sidelobe_db:
            raise ValueError("sidelobe_floor_db must not exceed the near-sidelobe level")

    @property
    def main_lobe_edge_deg(self) -> float:
        return self.half_beamwidth_deg * np.sqrt(-self.near_sidelobe_db / 3.0)

    def gain_db(self, off_axis_deg):
        return gain_db(self, off_axis_deg)

    def gain_linear(self, off_axis_deg):
        return 10.0 ** (gain_db(self, off_axis_deg) / 10.0)

    def to_dict(self) -> dict:
        return asdict(self)


def gain_db(mask: GainMask, off_axis_deg):
    """Gain (dBi) of ``mask`` at ``off_axis_deg`` in [0, 180]; scalars or arrays."""
    phi = np.asarray(off_axis_deg, dtype=float)
    if np.any(phi < 0) or np.any(phi > 180.0 + 1e-9):
        raise ValueError("off-axis angle must lie in [0, 180] degrees")
    main = mask.peak_gain_db - 3.0 * (phi / mask.half_beamwidth_deg) ** 2
    with np.errstate(divide="ignore"):
        slope = mask.sidelobe_const_db - mask.sidelobe_slope_db * np.log10(np.maximum(phi, 1e-12))
    side = np.minimum(mask.peak_gain_db + mask.near_sidelobe_db, slope)
    g = np.where(phi <= mask.main_lobe_edge_deg, main, side)
    g = np.maximum(g, mask.sidelobe_floor_db)
    return float(g) if g.ndim == 0 else g


PRESETS: dict[str, GainMask] = {
    "s1528-like": GainMask(
        peak_gain_db=35.0,
        half_beamwidth_deg=1.8,
        sidelobe_floor_db=-5.0,
        near_sidelobe_db=-25.0,
        sidelobe_const_db=32.0,
        sidelobe_slope_db=25.0,
    ),
    "s1428-like": GainMask(
        peak_gain_db=45.76,
        half_beamwidth_deg=0.47,
        sidelobe_floor_db=-10.0,
        near_sidelobe_db=-15.76,
        sidelobe_const_db=29.0,
        sidelobe_slope_db=25.0,
    ),
}


def preset(name: str, peak_gain_db: float | None = None, **overrides) -> GainMask:
    """Named preset, optionally with a different peak gain or coefficients."""
    try:
        mask = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown antenna preset {name!r}; choose from {sorted(PRESETS)}") from None
    if peak_gain_db is not None:
        overrides["peak_gain_db"] = peak_gain_db
    return replace(mask, **overrides) if overrides else mask


def masks_for(config) -> tuple[GainMask, GainMask]:
    """(satellite, gateway) masks for a scenario, honouring inline overrides."""
    sat_over = dict(config.antennas.get("satellite", {}))
    gs_over = dict(config.antennas.get("gateway", {}))
    sat_name = sat_over.pop("preset", "s1528-like")
    gs_name = gs_over.pop("preset", "s1428-like")
    sat_over.setdefault("peak_gain_db", config.peak_gain_sat_db)
    gs_over.setdefault("peak_gain_db", config.peak_gain_gs_db)
    return preset(sat_name, **sat_over), preset(gs_name, **gs_over)
