"""Temporal and spatiotemporal queries over a computed Tveg."""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .temporal import EventSets, ScoreTuple, Tveg
from .tracks import Track


@dataclass
class QuerySpec:
    """Declarative query: one of the five primitive kinds."""

    kind: str  # length-threshold | least-deviation | region | window-events | neighborhood
    k: int | None = None
    n: int | None = None
    box: tuple | None = None  # ((x0,y0,z0), (x1,y1,z1)), closed
    window: tuple[int, int] | None = None
    seeds: list[int] = dfield(default_factory=list)
    hops: int = 0

    def __post_init__(self):
        if self.window is not None and self.window[0] > self.window[1]:
            raise ValueError("window start must be <= end")
        if self.box is not None:
            lo, hi = np.asarray(self.box[0]), np.asarray(self.box[1])
            if np.any(lo > hi):
                raise ValueError("box min must be <= max per axis")


@dataclass
class Selection:
    """Subset of a Tveg: node ids, spatial arcs, and temporal arcs."""

    maxima: list[int]
    saddles: list[int]
    spatial_arcs: list[tuple[int, int]]
    temporal_arcs: list[ScoreTuple]


def tracks_longer_than(tracks: list[Track], k: int) -> list[Track]:
    """Tracks of length >= k, original order preserved."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return [tr for tr in tracks if tr.length >= k]


def least_deviation(tracks: list[Track], tveg: Tveg, n: int) -> list[Track]:
    """The n tracks with smallest mean per-step spatial movement.

    Ties break by the track's first node id; length-1 tracks have
    deviation 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ranked = sorted(
        tracks, key=lambda tr: (tr.deviation(tveg), tr.nodes[0][1] if tr.nodes else -1)
    )
    return ranked[:n]


def select_in_region(
    tveg: Tveg, box: tuple, window: tuple[int, int]
) -> Selection:
    """Maxima inside the closed box and time window, plus local context.

    Context: spatial arcs incident to a selected maximum (with their
    saddles) and temporal arcs with both endpoints selected.
    """
    lo = np.asarray(box[0], dtype=np.float64)
    hi = np.asarray(box[1], dtype=np.float64)
    t0, t1 = window
    chosen: set[int] = set()
    saddles: set[int] = set()
    spatial: list[tuple[int, int]] = []
    for g in tveg.graphs:
        if g.t < t0 or g.t > t1:
            continue
        for m in g.maxima:
            if np.all(m.coords >= lo) and np.all(m.coords <= hi):
                chosen.add(m.id)
        for m, s in g.arcs:
            if m in chosen:
                spatial.append((m, s))
                saddles.add(s)
    temporal = [
        a
        for t in sorted(tveg.arcs_by_pair)
        for a in tveg.arcs_by_pair[t]
        if a.m0 in chosen and a.m1 in chosen
    ]
    return Selection(
        maxima=sorted(chosen),
        saddles=sorted(saddles),
        spatial_arcs=sorted(spatial),
        temporal_arcs=temporal,
    )


def events_in_window(tveg: Tveg, window: tuple[int, int]) -> EventSets:
    """Cumulative event records whose time lies in [t0, t1]."""
    t0, t1 = window
    ev = tveg.events
    return EventSets(
        merges=[e for e in ev.merges if t0 <= e["time"] <= t1],
        splits=[e for e in ev.splits if t0 <= e["time"] <= t1],
        deletions=[e for e in ev.deletions if t0 <= e[1] <= t1],
        generations=[e for e in ev.generations if t0 <= e[1] <= t1],
    )


def track_neighborhood(
    tveg: Tveg, track: Track, hops: int
) -> dict[int, list[int]]:
    """Graph ball of radius `hops` around each track node in its G^t.

    Returns {t: sorted node ids}; layers alternate between maxima and
    saddles as BFS expands through extremum-graph arcs.
    """
    if hops < 0:
        raise ValueError("hops must be >= 0")
    out: dict[int, set[int]] = {}
    for t, mid in track.nodes:
        g = tveg.graph_at(t)
        adj: dict[int, set[int]] = {}
        for m, s in g.arcs:
            adj.setdefault(m, set()).add(s)
            adj.setdefault(s, set()).add(m)
        frontier = {mid}
        seen = {mid}
        for _ in range(hops):
            frontier = {
                nb for node in frontier for nb in adj.get(node, ()) if nb not in seen
            }
            seen |= frontier
        out.setdefault(t, set()).update(seen)
    return {t: sorted(nodes) for t, nodes in sorted(out.items())}
