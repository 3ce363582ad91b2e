"""Maximum-elevation satellite selection and link continuity across slots."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VIRTUAL = -1


@dataclass(frozen=True)
class LinkAssignment:
    """One row per (gateway, antenna), ordered by gateway id then antenna index.

    ``sat_id`` is ``VIRTUAL`` (-1) for a vacant antenna, whose elevation is NaN.
    """

    slot: int
    gateway: np.ndarray
    antenna: np.ndarray
    sat_id: np.ndarray
    elevation_deg: np.ndarray

    def __len__(self) -> int:
        return len(self.sat_id)

    @property
    def entries(self) -> list[tuple[int, int, int, float]]:
        return list(
            zip(self.gateway.tolist(), self.antenna.tolist(), self.sat_id.tolist(), self.elevation_deg.tolist())
        )

    @property
    def real(self) -> np.ndarray:
        return self.sat_id != VIRTUAL

    @property
    def working_set(self) -> frozenset[int]:
        return frozenset(self.sat_id[self.real].tolist())

    def gateway_of(self) -> dict[int, int]:
        """Map from working satellite to its serving gateway."""
        m = self.real
        return dict(zip(self.sat_id[m].tolist(), self.gateway[m].tolist()))


def select_satellites(elevations: np.ndarray, gateways, threshold_deg: float, slot: int = 0) -> LinkAssignment:
    """Round-robin maximum-elevation selection.

    Gateways take turns in ascending id order, each filling one antenna per turn
    with the unassigned satellite of highest elevation at or above
    ``threshold_deg`` (ties go to the smaller satellite id). A gateway with no
    candidate left stops; its remaining antennas stay vacant.

    ``elevations`` has shape ``(Q, S)`` with rows in the order of ``gateways``.
    """
    order = sorted(range(len(gateways)), key=lambda i: gateways[i].id)
    candidates = {}
    for i in order:
        row = elevations[i]
        vis = np.flatnonzero(row >= threshold_deg)
        # lexsort: last key is primary
        ranked = vis[np.lexsort((vis, -row[vis]))]
        candidates[i] = ranked.tolist()
    pointer = {i: 0 for i in order}
    chosen: dict[int, list[int]] = {i: [] for i in order}
    taken: set[int] = set()
    active = [i for i in order if gateways[i].n_antennas > 0]
    while active:
        still = []
        for i in active:
            cand = candidates[i]
            p = pointer[i]
            while p < len(cand) and cand[p] in taken:
                p += 1
            pointer[i] = p
            if p == len(cand):
                continue
            sat = cand[p]
            taken.add(sat)
            chosen[i].append(sat)
            pointer[i] = p + 1
            if len(chosen[i]) < gateways[i].n_antennas:
                still.append(i)
        active = still

    gw, ant, sid, elev = [], [], [], []
    for i in order:
        g = gateways[i]
        for a in range(g.n_antennas):
            gw.append(g.id)
            ant.append(a)
            if a < len(chosen[i]):
                s = chosen[i][a]
                sid.append(s)
                elev.append(float(elevations[i, s]))
            else:
                sid.append(VIRTUAL)
                elev.append(float("nan"))
    return LinkAssignment(
        slot=slot,
        gateway=np.array(gw, dtype=int),
        antenna=np.array(ant, dtype=int),
        sat_id=np.array(sid, dtype=int),
        elevation_deg=np.array(elev, dtype=float),
    )


def continuity_mask(prev: LinkAssignment | None, cur: LinkAssignment) -> tuple[dict[int, int], frozenset[int]]:
    """``m_c`` over the current working set and the constrained set ``S_c``.

    A satellite is constrained when it serves the same gateway in both slots.
    With no predecessor every flag is 0.
    """
    cur_gw = cur.gateway_of()
    prev_gw = prev.gateway_of() if prev is not None else {}
    m_c = {s: int(prev_gw.get(s) == g) for s, g in cur_gw.items()}
    return m_c, frozenset(s for s, v in m_c.items() if v)


ASSIGNMENT_HEADER = "slot,gateway,antenna,sat_id,elevation_deg"


def save_assignments(assignments, path) -> None:
    """One CSV row per (slot, gateway, antenna); vacant antennas carry sat_id -1."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(ASSIGNMENT_HEADER + "\n")
        for a in assignments:
            for g, n, s, e in a.entries:
                fh.write(f"{a.slot},{g},{n},{s},{'' if s == VIRTUAL else repr(e)}\n")
