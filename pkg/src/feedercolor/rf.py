"""Link budget: interference, noise, I/N, capacity and link-failure counting.

Everything is linear inside; dB only appears at the boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .antenna import GainMask
from .scenario import elevation_angle

BOLTZMANN = 1.380649e-23  # J/K
SPEED_OF_LIGHT = 299_792_458.0  # m/s


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


@dataclass(frozen=True)
class LinkBudgetConfig:
    carrier_wavelength_m: float
    subchannel_bandwidth_hz: float
    noise_temp_k: float
    tx_power_w: float
    itu_threshold_linear: float
    weak_threshold_linear: float
    boltzmann: float = BOLTZMANN
    carrier_model: str = "tx_power"

    def __post_init__(self):
        for name in ("carrier_wavelength_m", "subchannel_bandwidth_hz", "noise_temp_k", "tx_power_w"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @classmethod
    def from_scenario(cls, config) -> "LinkBudgetConfig":
        return cls(
            carrier_wavelength_m=SPEED_OF_LIGHT / config.carrier_freq_hz,
            subchannel_bandwidth_hz=config.subchannel_bandwidth_hz,
            noise_temp_k=config.noise_temp_k,
            tx_power_w=float(db_to_linear(config.tx_power_dbw)),
            itu_threshold_linear=float(db_to_linear(config.itu_threshold_db)),
            weak_threshold_linear=float(db_to_linear(config.weak_threshold_db)),
            carrier_model=config.carrier_model,
        )

    @property
    def noise_w(self) -> float:
        return noise_power(self.boltzmann, self.noise_temp_k, self.subchannel_bandwidth_hz)


def free_space_loss(distance_m, wavelength_m):
    """Linear free-space path loss ``(4 pi d / lambda)^2``."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    return (4.0 * math.pi * d / wavelength_m) ** 2


def single_link_interference(
    tx_power_w, off_axis_tx_deg, off_axis_rx_deg, distance_m, sat_mask: GainMask, gs_mask: GainMask, wavelength_m
):
    """Interference power (W) from one satellite into one gateway antenna."""
    g_tx = sat_mask.gain_linear(off_axis_tx_deg)
    g_rx = gs_mask.gain_linear(off_axis_rx_deg)
    return tx_power_w * g_tx * g_rx / free_space_loss(distance_m, wavelength_m)


def noise_power(boltzmann: float, noise_temp_k: float, bandwidth_hz: float) -> float:
    return boltzmann * noise_temp_k * bandwidth_hz


def i_over_n(interference_w, noise_w):
    return np.asarray(interference_w, dtype=float) / noise_w


def off_axis_angle(vertex, target_a, target_b):
    """Angle (deg) at ``vertex`` between the directions to ``target_a`` and ``target_b``."""
    a = np.asarray(target_a, dtype=float) - vertex
    b = np.asarray(target_b, dtype=float) - vertex
    cos = np.sum(a * b, axis=-1) / (np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1))
    return np.degrees(np.arccos(np.clip(cos, -1.0, 1.0)))


@dataclass
class LinkGeometry:
    """Pairwise interference between the links of one slot.

    Vertex ``i`` is row ``i`` of the assignment. ``interference_w[v, u]`` is
    the power satellite ``u`` puts into the antenna of victim link ``v``; it is
    zero on the diagonal, for vacant antennas and for interferers below the
    victim gateway's horizon.
    """

    sat_ids: np.ndarray
    gateway: np.ndarray
    interference_w: np.ndarray
    carrier_w: np.ndarray
    noise_w: float
    bandwidth_hz: float
    itu_threshold_linear: float
    weak_threshold_linear: float

    @property
    def n(self) -> int:
        return len(self.sat_ids)

    @property
    def real(self) -> np.ndarray:
        return self.sat_ids >= 0

    @property
    def i_over_n(self) -> np.ndarray:
        return self.interference_w / self.noise_w

    @property
    def carrier_to_noise(self) -> np.ndarray:
        return self.carrier_w / self.noise_w

    def subset(self, idx) -> "LinkGeometry":
        idx = np.asarray(idx, dtype=int)
        return LinkGeometry(
            sat_ids=self.sat_ids[idx],
            gateway=self.gateway[idx],
            interference_w=self.interference_w[np.ix_(idx, idx)],
            carrier_w=self.carrier_w[idx],
            noise_w=self.noise_w,
            bandwidth_hz=self.bandwidth_hz,
            itu_threshold_linear=self.itu_threshold_linear,
            weak_threshold_linear=self.weak_threshold_linear,
        )


def compute_geometry(
    sat_ids, gateway_ids, sat_pos: np.ndarray, gs_pos_by_id: dict, sat_mask: GainMask, gs_mask: GainMask,
    budget: LinkBudgetConfig,
) -> LinkGeometry:
    """Pairwise interference for the links ``(sat_ids[i] -> gateway_ids[i])``."""
    sat_ids = np.asarray(sat_ids, dtype=int)
    gateway_ids = np.asarray(gateway_ids, dtype=int)
    n = len(sat_ids)
    real = sat_ids >= 0
    interference = np.zeros((n, n))
    carrier = np.zeros(n)
    idx = np.flatnonzero(real)
    if len(idx):
        s_pos = sat_pos[sat_ids[idx]]  # (m, 3)
        g_pos = np.array([gs_pos_by_id[g] for g in gateway_ids[idx]])  # (m, 3)
        # rows: victim v (gateway g_pos[v], own satellite s_pos[v]); cols: interferer u
        victim_gs = g_pos[:, None, :]
        interferer = s_pos[None, :, :]
        theta_tr = off_axis_angle(interferer, g_pos[None, :, :], victim_gs)
        theta_rx = off_axis_angle(victim_gs, s_pos[:, None, :], interferer)
        dist = np.linalg.norm(interferer - victim_gs, axis=-1)
        visible = elevation_angle(victim_gs, interferer) > 0.0
        power = single_link_interference(
            budget.tx_power_w, theta_tr, theta_rx, dist, sat_mask, gs_mask, budget.carrier_wavelength_m
        )
        power = np.where(visible, power, 0.0)
        np.fill_diagonal(power, 0.0)
        interference[np.ix_(idx, idx)] = power
        if budget.carrier_model == "link_budget":
            own = np.linalg.norm(s_pos - g_pos, axis=-1)
            carrier[idx] = (
                budget.tx_power_w * sat_mask.gain_linear(0.0) * gs_mask.gain_linear(0.0)
                / free_space_loss(own, budget.carrier_wavelength_m)
            )
        else:
            carrier[idx] = budget.tx_power_w
    return LinkGeometry(
        sat_ids=sat_ids,
        gateway=gateway_ids,
        interference_w=interference,
        carrier_w=carrier,
        noise_w=budget.noise_w,
        bandwidth_hz=budget.subchannel_bandwidth_hz,
        itu_threshold_linear=budget.itu_threshold_linear,
        weak_threshold_linear=budget.weak_threshold_linear,
    )


def interferer_set(geom: LinkGeometry, victim: int) -> set[int]:
    """Indices of working satellites above the victim gateway's horizon."""
    return set(np.flatnonzero(geom.interference_w[victim] > 0).tolist())


def aggregate_interference(single_powers) -> float:
    return float(np.sum(np.asarray(single_powers, dtype=float)))


def aggregate_i_over_n(geom: LinkGeometry, colors) -> np.ndarray:
    """Aggregate I/N (linear) per vertex under a coloring; vacant antennas get 0."""
    c = np.asarray(colors)
    cochannel = c[:, None] == c[None, :]
    agg = np.sum(geom.interference_w * cochannel, axis=1) / geom.noise_w
    return np.where(geom.real, agg, 0.0)


def count_link_failures(geom: LinkGeometry, colors, itu_threshold_linear: float | None = None) -> int:
    """Links whose aggregate I/N strictly exceeds the ITU threshold."""
    c = np.asarray(colors)
    if np.any(c[geom.real] <= 0):
        raise ValueError("every working satellite must be colored before counting link failures")
    thr = geom.itu_threshold_linear if itu_threshold_linear is None else itu_threshold_linear
    return int(np.count_nonzero(aggregate_i_over_n(geom, c)[geom.real] > thr))


class LFRanker:
    """Scores colorings by link failures, then by conflicts; picklable."""

    def __init__(self, geom: LinkGeometry, graph=None):
        self.geom = geom
        self.graph = graph

    def __call__(self, colors):
        lf = count_link_failures(self.geom, colors)
        if self.graph is None:
            return lf
        return (lf, self.graph.conflict_count(colors))


def cn_sinr_capacity(carrier_w, interference_w, noise_w, bandwidth_hz):
    """C/N, SINR and Shannon capacity ``B log2(1 + SINR)`` (bit/s)."""
    carrier_w = np.asarray(carrier_w, dtype=float)
    cn = carrier_w / noise_w
    sinr = carrier_w / (np.asarray(interference_w, dtype=float) + noise_w)
    return cn, sinr, bandwidth_hz * np.log2(1.0 + sinr)


def link_capacity_degradation(cn, sinr):
    """``1 - log2(1 + SINR) / log2(1 + C/N)`` per link."""
    return 1.0 - np.log2(1.0 + np.asarray(sinr, dtype=float)) / np.log2(1.0 + np.asarray(cn, dtype=float))


def capacity_degradation(cn, sinr, bandwidth_hz=1.0) -> tuple[np.ndarray, float]:
    """Per-link degradation and the system degradation over the same links."""
    cn = np.asarray(cn, dtype=float)
    sinr = np.asarray(sinr, dtype=float)
    per_link = link_capacity_degradation(cn, sinr)
    if cn.size == 0:
        return per_link, 0.0
    r = np.sum(bandwidth_hz * np.log2(1.0 + sinr))
    r_bar = np.sum(bandwidth_hz * np.log2(1.0 + cn))
    return per_link, float(1.0 - r / r_bar)


def slot_capacity(geom: LinkGeometry, colors):
    """(C/N, SINR, capacity) for the real links of a slot under ``colors``."""
    agg = aggregate_i_over_n(geom, colors) * geom.noise_w
    real = geom.real
    return cn_sinr_capacity(geom.carrier_w[real], agg[real], geom.noise_w, geom.bandwidth_hz)


def prop1_bound(cn, itu_threshold_linear):
    """Upper bound ``log_{C/N}(1 + I_th)`` on the degradation of a compliant link."""
    return np.log1p(itu_threshold_linear) / np.log(np.asarray(cn, dtype=float))


def delta_r(cn, sinr):
    """Gap between the capacity ratio and the log-SINR/log-C/N ratio (positive when SINR > 1)."""
    cn = np.asarray(cn, dtype=float)
    sinr = np.asarray(sinr, dtype=float)
    return np.log2(1.0 + sinr) / np.log2(1.0 + cn) - np.log2(sinr) / np.log2(cn)


def prop1_bound_check(cn, i_over_n_linear, itu_threshold_linear) -> tuple[bool, float]:
    """Check the degradation bound for one compliant link with SINR > 1.

    Returns ``(holds, bound)``.
    """
    if i_over_n_linear > itu_threshold_linear:
        raise ValueError("link violates the ITU threshold")
    sinr = cn / (1.0 + i_over_n_linear)
    if sinr <= 1.0:
        raise ValueError("bound requires SINR > 1")
    bound = float(prop1_bound(cn, itu_threshold_linear))
    degradation = float(link_capacity_degradation(cn, sinr))
    return degradation <= bound, bound
