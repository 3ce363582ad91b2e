"""Scenario configuration, constellation propagation and coordinate geometry.

Satellites follow circular Keplerian orbits on a spherical Earth. Positions
are expressed in an Earth-centred inertial frame that coincides with ECEF at
the grid epoch; gateway positions are rotated by the sidereal rate instead, so
the satellite/gateway geometry evolves as it would in a rotating Earth frame
while a single orbital period returns a satellite to its starting point.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

R_EARTH = 6_371_000.0  # m, spherical mean radius
MU_EARTH = 3.986004418e14  # m^3 / s^2
OMEGA_EARTH = 7.2921159e-5  # rad / s, sidereal rotation rate
WGS84_A = 6_378_137.0
WGS84_F = 1.0 / 298.257223563


class ConfigError(ValueError):
    """Raised when a scenario or ephemeris file violates its schema."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class OrbitalShell:
    altitude_km: float
    inclination_deg: float
    num_planes: int
    sats_per_plane: int
    phasing_offset: float = 0.0
    raan_spread_deg: float = 360.0

    def __post_init__(self):
        if not self.altitude_km > 0:
            raise ConfigError("altitude_km", f"must be > 0, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ConfigError("inclination_deg", f"must lie in [0, 180], got {self.inclination_deg}")
        for name in ("num_planes", "sats_per_plane"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")

    @property
    def num_sats(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def radius_m(self) -> float:
        return R_EARTH + self.altitude_km * 1e3

    @property
    def period_s(self) -> float:
        return 2.0 * math.pi * math.sqrt(self.radius_m**3 / MU_EARTH)


@dataclass(frozen=True)
class GatewayStation:
    id: int
    latitude_deg: float
    longitude_deg: float
    altitude_m: float = 0.0
    n_antennas: int = 1

    def __post_init__(self):
        if abs(self.latitude_deg) > 90.0:
            raise ConfigError("latitude_deg", f"|latitude| must be <= 90, got {self.latitude_deg}")
        if abs(self.longitude_deg) > 180.0:
            raise ConfigError("longitude_deg", f"|longitude| must be <= 180, got {self.longitude_deg}")
        if not isinstance(self.n_antennas, int) or self.n_antennas < 1:
            raise ConfigError("n_antennas", f"must be a positive integer, got {self.n_antennas!r}")


@dataclass(frozen=True)
class TimeGrid:
    t0: str = "2024-01-01T00:00:00Z"
    dt_s: float = 10.0
    num_slots: int = 1

    def __post_init__(self):
        if not self.dt_s > 0:
            raise ConfigError("dt_s", f"must be > 0, got {self.dt_s}")
        if not isinstance(self.num_slots, int) or self.num_slots < 1:
            raise ConfigError("num_slots", f"must be a positive integer, got {self.num_slots!r}")

    def times(self) -> np.ndarray:
        return np.arange(self.num_slots, dtype=float) * self.dt_s


@dataclass(frozen=True)
class ScenarioConfig:
    shells: tuple[OrbitalShell, ...]
    gateways: tuple[GatewayStation, ...]
    time_grid: TimeGrid
    elevation_threshold_deg: float = 40.0
    carrier_freq_hz: float = 20e9
    total_bandwidth_hz: float = 500e6
    num_subchannels: int = 8
    tx_power_dbw: float = 12.0
    noise_temp_k: float = 398.0
    peak_gain_sat_db: float = 35.0
    peak_gain_gs_db: float = 45.76
    itu_threshold_db: float = -12.2
    weak_threshold_db: float = -13.0
    rng_seed: int = 0
    # optional extensions
    antennas: dict[str, dict[str, Any]] = field(default_factory=dict)
    ellipsoidal: bool = False
    carrier_model: str = "tx_power"
    ephemeris_file: str | None = None

    def __post_init__(self):
        if not isinstance(self.num_subchannels, int) or self.num_subchannels < 1:
            raise ConfigError("num_subchannels", f"must be a positive integer, got {self.num_subchannels!r}")
        if not self.total_bandwidth_hz > 0:
            raise ConfigError("total_bandwidth_hz", "must be > 0")
        if not self.carrier_freq_hz > 0:
            raise ConfigError("carrier_freq_hz", "must be > 0")
        if not self.noise_temp_k > 0:
            raise ConfigError("noise_temp_k", "must be > 0")
        if not self.shells and self.ephemeris_file is None:
            raise ConfigError("shells", "at least one shell (or an ephemeris_file) is required")
        if not self.gateways:
            raise ConfigError("gateways", "at least one gateway is required")
        ids = [g.id for g in self.gateways]
        if len(set(ids)) != len(ids):
            raise ConfigError("gateways", "gateway ids must be unique")
        if self.carrier_model not in ("tx_power", "link_budget"):
            raise ConfigError("carrier_model", f"unknown model {self.carrier_model!r}")
        unknown = set(self.antennas) - {"satellite", "gateway"}
        if unknown:
            raise ConfigError("antennas", f"unknown antenna keys {sorted(unknown)}")

    @property
    def num_sats(self) -> int:
        return sum(s.num_sats for s in self.shells)

    @property
    def subchannel_bandwidth_hz(self) -> float:
        return self.total_bandwidth_hz / self.num_subchannels

    def with_overrides(self, **changes) -> "ScenarioConfig":
        """Copy with top-level fields replaced; ``n_antennas`` applies to every gateway."""
        nat = changes.pop("n_antennas", None)
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        if nat is not None:
            data["gateways"] = tuple(
                GatewayStation(g.id, g.latitude_deg, g.longitude_deg, g.altitude_m, int(nat))
                for g in data["gateways"]
            )
        return ScenarioConfig(**data)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["shells"] = [asdict(s) for s in self.shells]
        out["gateways"] = [asdict(g) for g in self.gateways]
        out["time_grid"] = asdict(self.time_grid)
        return out


@dataclass(frozen=True)
class Ephemeris:
    """Satellite positions, shape ``(num_slots, num_sats, 3)`` in metres."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 3:
            raise ConfigError("positions", f"expected shape (slots, sats, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ConfigError("positions", "non-finite values present")
        if pos.size and np.min(np.linalg.norm(pos, axis=2)) < R_EARTH * (1 - 1e-9):
            raise ConfigError("positions", "satellite below the Earth surface")
        object.__setattr__(self, "positions", pos)

    @property
    def num_slots(self) -> int:
        return self.positions.shape[0]

    @property
    def num_sats(self) -> int:
        return self.positions.shape[1]


def propagate_constellation(shells, grid: TimeGrid) -> Ephemeris:
    """Walker-style circular propagation of every shell over ``grid``.

    Satellite ids run shell by shell, plane by plane. In plane ``p`` of a shell
    with ``P`` planes the ascending node sits at ``raan_spread * p / P`` and the
    ``k``-th satellite starts at argument of latitude
    ``360 k / sats_per_plane + p * phasing_offset`` degrees.
    """
    t = grid.times()
    blocks = []
    for shell in shells:
        r = shell.radius_m
        mean_motion = math.sqrt(MU_EARTH / r**3)
        inc = math.radians(shell.inclination_deg)
        p_idx, k_idx = np.meshgrid(
            np.arange(shell.num_planes), np.arange(shell.sats_per_plane), indexing="ij"
        )
        p_idx = p_idx.ravel()
        k_idx = k_idx.ravel()
        raan = np.radians(shell.raan_spread_deg * p_idx / shell.num_planes)
        u0 = np.radians(360.0 * k_idx / shell.sats_per_plane + p_idx * shell.phasing_offset)
        u = u0[None, :] + mean_motion * t[:, None]
        cos_u, sin_u = np.cos(u), np.sin(u)
        cos_o, sin_o = np.cos(raan)[None, :], np.sin(raan)[None, :]
        x = cos_o * cos_u - sin_o * sin_u * math.cos(inc)
        y = sin_o * cos_u + cos_o * sin_u * math.cos(inc)
        z = sin_u * math.sin(inc) * np.ones_like(cos_o)
        blocks.append(r * np.stack([x, y, z], axis=-1))
    if not blocks:
        return Ephemeris(np.zeros((grid.num_slots, 0, 3)))
    return Ephemeris(np.concatenate(blocks, axis=1))


def geodetic_to_ecef(lat_deg, lon_deg, alt_m=0.0, ellipsoidal: bool = False) -> np.ndarray:
    if np.any(np.abs(lat_deg) > 90.0):
        raise ValueError(f"latitude out of range: {lat_deg}")
    lat = np.radians(lat_deg)
    lon = np.radians(lon_deg)
    if ellipsoidal:
        e2 = WGS84_F * (2.0 - WGS84_F)
        n = WGS84_A / np.sqrt(1.0 - e2 * np.sin(lat) ** 2)
        x = (n + alt_m) * np.cos(lat) * np.cos(lon)
        y = (n + alt_m) * np.cos(lat) * np.sin(lon)
        z = (n * (1.0 - e2) + alt_m) * np.sin(lat)
    else:
        r = R_EARTH + alt_m
        x = r * np.cos(lat) * np.cos(lon)
        y = r * np.cos(lat) * np.sin(lon)
        z = r * np.sin(lat)
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def ecef_to_geodetic(pos) -> tuple[np.ndarray, np.ndarray]:
    """Spherical latitude/longitude (deg) of ECEF points."""
    pos = np.asarray(pos, dtype=float)
    r = np.linalg.norm(pos, axis=-1)
    lat = np.degrees(np.arcsin(pos[..., 2] / r))
    lon = np.degrees(np.arctan2(pos[..., 1], pos[..., 0]))
    return lat, lon


def rotate_z(pos, angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return np.asarray(pos, dtype=float) @ rot.T


def gateway_positions(gateways, t_s: float = 0.0, ellipsoidal: bool = False) -> np.ndarray:
    """Gateway positions at time ``t_s`` in the ephemeris frame, shape ``(Q, 3)``."""
    base = np.array(
        [geodetic_to_ecef(g.latitude_deg, g.longitude_deg, g.altitude_m, ellipsoidal) for g in gateways]
    ).reshape(-1, 3)
    return rotate_z(base, OMEGA_EARTH * t_s)


def elevation_angle(gs_pos, sat_pos) -> np.ndarray:
    """Elevation (deg) of ``sat_pos`` above the local horizontal plane at ``gs_pos``.

    The local vertical is the geocentric radial. Broadcasts over leading axes.
    """
    gs_pos = np.asarray(gs_pos, dtype=float)
    sat_pos = np.asarray(sat_pos, dtype=float)
    los = sat_pos - gs_pos
    dist = np.linalg.norm(los, axis=-1)
    if np.any(dist == 0):
        raise ValueError("gateway and satellite positions coincide")
    up = gs_pos / np.linalg.norm(gs_pos, axis=-1, keepdims=True)
    sin_el = np.sum(los * up, axis=-1) / dist
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))


def elevation_matrix(gs_pos: np.ndarray, sat_pos: np.ndarray) -> np.ndarray:
    """Elevations of every satellite from every gateway, shape ``(Q, S)``."""
    return elevation_angle(gs_pos[:, None, :], sat_pos[None, :, :])


# ---------------------------------------------------------------------------
# file I/O

_SCENARIO_KEYS = {f.name for f in fields(ScenarioConfig)}
_SHELL_KEYS = {f.name for f in fields(OrbitalShell)}
_GATEWAY_KEYS = {f.name for f in fields(GatewayStation)}
_GRID_KEYS = {f.name for f in fields(TimeGrid)}


def _check_keys(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(sorted(unknown)[0], f"unknown key in {where}")
    return obj


def _build(cls, obj: dict, where: str):
    try:
        return cls(**obj)
    except TypeError as exc:
        raise ConfigError(where, str(exc)) from exc


def scenario_from_dict(data: dict) -> ScenarioConfig:
    data = dict(_check_keys(data, _SCENARIO_KEYS, "scenario"))
    for required in ("gateways", "time_grid"):
        if required not in data:
            raise ConfigError(required, "missing required field")
    shells = []
    for i, s in enumerate(data.get("shells", [])):
        shells.append(_build(OrbitalShell, _check_keys(s, _SHELL_KEYS, f"shells[{i}]"), f"shells[{i}]"))
    gateways = []
    for i, g in enumerate(data["gateways"]):
        gateways.append(_build(GatewayStation, _check_keys(g, _GATEWAY_KEYS, f"gateways[{i}]"), f"gateways[{i}]"))
    grid = _build(TimeGrid, _check_keys(data["time_grid"], _GRID_KEYS, "time_grid"), "time_grid")
    data["shells"] = tuple(shells)
    data["gateways"] = tuple(gateways)
    data["time_grid"] = grid
    return _build(ScenarioConfig, data, "scenario")


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("json", f"{path}: {exc}") from exc
    config = scenario_from_dict(data)
    if config.ephemeris_file is not None and not Path(config.ephemeris_file).is_absolute():
        config = config.with_overrides(ephemeris_file=str(path.parent / config.ephemeris_file))
    return config


def save_scenario(config: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True), encoding="utf-8")


def sample_scenario_path() -> Path:
    return Path(__file__).parent / "data" / "starlink_sample.json"


EPHEMERIS_HEADER = "slot,sat_id,x_m,y_m,z_m"


def save_ephemeris(eph: Ephemeris, path) -> None:
    n_slots, n_sats, _ = eph.positions.shape
    slot = np.repeat(np.arange(n_slots), n_sats)
    sat = np.tile(np.arange(n_sats), n_slots)
    xyz = eph.positions.reshape(-1, 3)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(EPHEMERIS_HEADER + "\n")
        for row in zip(slot.tolist(), sat.tolist(), xyz[:, 0].tolist(), xyz[:, 1].tolist(), xyz[:, 2].tolist()):
            fh.write(f"{row[0]},{row[1]},{row[2]!r},{row[3]!r},{row[4]!r}\n")


def load_ephemeris(path) -> Ephemeris:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != EPHEMERIS_HEADER:
            raise ConfigError("header", f"expected {EPHEMERIS_HEADER!r}, got {header!r}")
        raw = np.loadtxt(fh, delimiter=",", ndmin=2)
    if raw.size == 0:
        raise ConfigError("rows", "ephemeris file holds no rows")
    slot = raw[:, 0].astype(int)
    sat = raw[:, 1].astype(int)
    n_slots, n_sats = slot.max() + 1, sat.max() + 1
    if len(raw) != n_slots * n_sats:
        raise ConfigError("rows", f"expected {n_slots * n_sats} rows (slot x sat), got {len(raw)}")
    pos = np.full((n_slots, n_sats, 3), np.nan)
    pos[slot, sat] = raw[:, 2:5]
    if np.isnan(pos).any():
        raise ConfigError("rows", "duplicate or missing (slot, sat_id) rows")
    return Ephemeris(pos)


def build_ephemeris(config: ScenarioConfig) -> Ephemeris:
    if config.ephemeris_file is not None:
        eph = load_ephemeris(config.ephemeris_file)
        if eph.num_slots < config.time_grid.num_slots:
            raise ConfigError("ephemeris_file", "ephemeris holds fewer slots than time_grid.num_slots")
        return eph
    return propagate_constellation(config.shells, config.time_grid)
