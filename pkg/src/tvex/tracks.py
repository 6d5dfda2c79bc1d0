"""Track extraction from temporal arcs and overlap-based refinement."""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .exgraph import split_node_id
from .temporal import ScoreTuple, Tveg


@dataclass
class Track:
    """Monotone-in-time sequence of maxima joined by temporal arcs.

    In components mode a Track is a bundle: nodes are all maxima of one
    connected component of the temporal-arc graph, and length is the
    component's time extent. In simple-paths mode nodes advance by
    exactly one step at a time.
    """

    nodes: list[tuple[int, int]]  # (t, max_id), sorted
    arcs: list[tuple[int, int]] = dfield(default_factory=list)

    @property
    def length(self) -> int:
        times = {t for t, _ in self.nodes}
        return max(times) - min(times) + 1 if times else 0

    def deviation(self, tveg: Tveg) -> float:
        """Mean step distance of the track's node coordinates."""
        if len(self.nodes) < 2:
            return 0.0
        coords = []
        for t, mid in self.nodes:
            coords.append(tveg.graph_at(t).node(mid).coords)
        steps = [
            float(np.linalg.norm(b - a)) for a, b in zip(coords, coords[1:])
        ]
        return sum(steps) / (len(self.nodes) - 1)


def _node_time(node_id: int) -> int:
    return split_node_id(node_id)[0]


def _components(arcs: list[ScoreTuple]) -> list[Track]:
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in arcs:
        parent.setdefault(a.m0, a.m0)
        parent.setdefault(a.m1, a.m1)
        ra, rb = find(a.m0), find(a.m1)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    out = []
    for root in sorted(groups):
        nodes = sorted((_node_time(n), n) for n in groups[root])
        comp_arcs = sorted(
            (a.m0, a.m1) for a in arcs if find(a.m0) == root
        )
        out.append(Track(nodes=nodes, arcs=comp_arcs))
    return out


def _simple_paths(arcs: list[ScoreTuple]) -> list[Track]:
    """Split the arc graph into monotone paths at every branch node.

    A path passes through a node only if that node has in-degree 1 and
    out-degree 1; branch nodes terminate paths but are shared as
    endpoints, so every arc lands in exactly one path. Output is ordered
    longest first, ties by first node id.
    """
    out_arcs: dict[int, list[ScoreTuple]] = {}
    in_deg: dict[int, int] = {}
    out_deg: dict[int, int] = {}
    for a in arcs:
        out_arcs.setdefault(a.m0, []).append(a)
        out_deg[a.m0] = out_deg.get(a.m0, 0) + 1
        in_deg[a.m1] = in_deg.get(a.m1, 0) + 1

    def chains_through(n: int) -> bool:
        return in_deg.get(n, 0) == 1 and out_deg.get(n, 0) == 1

    tracks = []
    used: set[tuple[int, int]] = set()
    # start arcs: source is not a pass-through node
    for a in sorted(arcs, key=lambda a: (a.m0, a.m1)):
        if (a.m0, a.m1) in used:
            continue
        if chains_through(a.m0):
            continue
        path = [a]
        used.add((a.m0, a.m1))
        cur = a.m1
        while chains_through(cur):
            nxt = out_arcs[cur][0]
            path.append(nxt)
            used.add((nxt.m0, nxt.m1))
            cur = nxt.m1
        nodes = [(_node_time(path[0].m0), path[0].m0)]
        nodes += [(_node_time(p.m1), p.m1) for p in path]
        tracks.append(Track(nodes=nodes, arcs=[(p.m0, p.m1) for p in path]))
    # arcs in cycles cannot occur (time strictly increases), so all used
    return sorted(tracks, key=lambda tr: (-tr.length, tr.nodes[0][1]))


def extract_tracks(tveg: Tveg, mode: str = "simple-paths") -> list[Track]:
    """Tracks of the temporal-arc graph.

    mode "components": one bundle per connected component.
    mode "simple-paths": monotone paths, split at branch nodes, each
    temporal arc in exactly one path.
    """
    arcs = tveg.all_arcs()
    if mode == "components":
        return _components(arcs)
    if mode == "simple-paths":
        return _simple_paths(arcs)
    raise ValueError(f"unknown mode {mode!r}")


def spatial_overlap(geom_a: np.ndarray, geom_b: np.ndarray) -> int:
    """Number of voxels shared by two region voxel-id sets."""
    return int(np.intersect1d(geom_a, geom_b, assume_unique=False).size)


def refine_by_overlap(
    tveg: Tveg, isovalue: float, min_len: int = 10
) -> list[Track]:
    """Resolve two-way correspondences by clipped-region overlap.

    Each maximum's region is its descending manifold clipped by the
    superlevel set at `isovalue`. For a source with two arcs only the
    larger-overlap arc survives (ties: lower score); arcs with zero
    overlap are dropped. Tracks shorter than min_len are discarded.
    """
    geom: dict[int, np.ndarray] = {}
    for g in tveg.graphs:
        f = g.segmentation.field if g.segmentation else None
        if f is None:
            raise ValueError("refinement needs stored segmentations")
        mask = f.values >= isovalue
        for m in g.maxima:
            if m.dscmfold is None:
                raise ValueError("refinement needs descending manifolds")
            geom[m.id] = m.dscmfold[mask[m.dscmfold]]

    kept: list[ScoreTuple] = []
    for t in sorted(tveg.arcs_by_pair):
        by_src: dict[int, list[ScoreTuple]] = {}
        for a in tveg.arcs_by_pair[t]:
            by_src.setdefault(a.m0, []).append(a)
        for src in sorted(by_src):
            cands = by_src[src]
            overlaps = [spatial_overlap(geom[a.m0], geom[a.m1]) for a in cands]
            if len(cands) == 2:
                best = min(
                    range(2), key=lambda i: (-overlaps[i], cands[i].s, cands[i].m1)
                )
                cands, overlaps = [cands[best]], [overlaps[best]]
            for a, ov in zip(cands, overlaps):
                if ov > 0:
                    kept.append(a)

    pruned = _simple_paths(kept)
    return [tr for tr in pruned if tr.length >= min_len]


def collate_by_saddle(tracks: list[Track], tveg: Tveg) -> list[list[int]]:
    """Group tracks whose maxima share a saddle at some common time step.

    Returns groups of track indices (transitive closure across time
    steps), sorted by smallest member.
    """
    parent = list(range(len(tracks)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    # saddle adjacency per time step: maximum id -> incident saddles
    node_tracks: dict[tuple[int, int], list[int]] = {}
    for i, tr in enumerate(tracks):
        for node in tr.nodes:
            node_tracks.setdefault(node, []).append(i)

    for g in tveg.graphs:
        saddle_maxima: dict[int, list[int]] = {}
        for m, s in g.arcs:
            saddle_maxima.setdefault(s, []).append(m)
        for s, maxes in saddle_maxima.items():
            holders = []
            for m in maxes:
                holders.extend(node_tracks.get((g.t, m), []))
            for a, b in zip(holders, holders[1:]):
                union(a, b)

    groups: dict[int, list[int]] = {}
    for i in range(len(tracks)):
        groups.setdefault(find(i), []).append(i)
    return [sorted(groups[r]) for r in sorted(groups)]
