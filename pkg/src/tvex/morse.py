"""Maxima, descending-manifold segmentation, saddles, and persistence.

Discrete pipeline on the 26-connected voxel grid. All comparisons use a
strict total order on voxels given by the pair (value, voxel id), so
every field behaves like a Morse function: no two voxels compare equal.
Boundary voxels use clipped neighborhoods.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .field import ScalarField3D

# (dz, dy, dx) offsets of the 26-neighborhood
NEIGHBOR_OFFSETS = [
    (dz, dy, dx)
    for dz in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dx in (-1, 0, 1)
    if (dz, dy, dx) != (0, 0, 0)
]
# the 13 "positive" offsets; each undirected grid edge is visited once
HALF_OFFSETS = [o for o in NEIGHBOR_OFFSETS if o > (0, 0, 0)]


@dataclass
class CriticalPoint:
    """One critical point with its attributes.

    index is 3 for maxima and 2 for saddles (3D data). `vertex` is the
    linear voxel id hosting the point; `dscmfold` holds the voxel ids
    of the descending manifold (maxima only); `geom` is the optional
    clipped region.
    """

    id: int
    index: int
    coords: np.ndarray
    value: float
    pers: float = 0.0
    eta: float = 0.0
    vertex: int = -1
    t: int = 0
    dscmfold: np.ndarray | None = None
    geom: np.ndarray | None = None


@dataclass
class Segmentation:
    """Descending-manifold segmentation of one field.

    labels[v] is the voxel id of the maximum owning voxel v. adjacency
    maps unordered maximum-id pairs to the mediating saddle's position
    in `saddles`.
    """

    field: ScalarField3D
    labels: np.ndarray
    maxima: list[CriticalPoint] = dfield(default_factory=list)
    saddles: list[CriticalPoint] = dfield(default_factory=list)
    adjacency: dict[tuple[int, int], int] = dfield(default_factory=dict)

    def maximum(self, max_id: int) -> CriticalPoint:
        for m in self.maxima:
            if m.id == max_id:
                return m
        raise KeyError(f"unknown maximum id {max_id}")


def vertex_order(f: ScalarField3D) -> np.ndarray:
    """Rank of every voxel under the (value, voxel id) total order.

    Ranks are unique integers in [0, n); a higher rank means a greater
    voxel. This is the simulated-simplicity tie-break used everywhere.
    """
    n = f.num_voxels
    order = np.lexsort((np.arange(n), f.values))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    return rank


def _steepest_neighbor(f: ScalarField3D, rank: np.ndarray) -> np.ndarray:
    """next[v] = 26-neighbor of greatest rank if it beats v, else v."""
    nx, ny, nz = f.dims
    n = f.num_voxels
    r3 = rank.reshape(nz, ny, nx)
    padded = np.full((nz + 2, ny + 2, nx + 2), -1, dtype=np.int64)
    padded[1:-1, 1:-1, 1:-1] = r3

    best = np.full(n, -1, dtype=np.int64)
    best_idx = np.full(n, -1, dtype=np.int64)
    for dz, dy, dx in NEIGHBOR_OFFSETS:
        nb = padded[1 + dz : 1 + dz + nz, 1 + dy : 1 + dy + ny, 1 + dx : 1 + dx + nx]
        nb = nb.ravel()
        off = dx + nx * (dy + ny * dz)
        better = nb > best
        best = np.where(better, nb, best)
        if np.any(better):
            idx = np.arange(n, dtype=np.int64) + off
            best_idx = np.where(better, idx, best_idx)
    nxt = np.where(best > rank, best_idx, np.arange(n, dtype=np.int64))
    return nxt


def find_maxima(f: ScalarField3D) -> list[int]:
    """Voxel ids that beat all 26-neighbors under the total order."""
    rank = vertex_order(f)
    nxt = _steepest_neighbor(f, rank)
    return sorted(np.flatnonzero(nxt == np.arange(f.num_voxels)).tolist())


def compute_segmentation(f: ScalarField3D) -> Segmentation:
    """Label every voxel with the maximum its steepest-ascent path reaches."""
    rank = vertex_order(f)
    nxt = _steepest_neighbor(f, rank)
    labels = nxt.copy()
    while True:
        jumped = labels[labels]
        if np.array_equal(jumped, labels):
            break
        labels = jumped
    maxima_ids = sorted(np.flatnonzero(nxt == np.arange(f.num_voxels)).tolist())
    maxima = [
        CriticalPoint(
            id=v,
            index=3,
            coords=f.world_coords(v),
            value=float(f.values[v]),
            vertex=v,
            t=f.time_index,
        )
        for v in maxima_ids
    ]
    return Segmentation(field=f, labels=labels, maxima=maxima)


def compute_saddles(f: ScalarField3D, seg: Segmentation) -> Segmentation:
    """Fill in saddles and the region-adjacency map.

    For each unordered pair of adjacent labels the saddle is the
    crossing edge maximizing min(f(u), f(v)) under the total order; the
    saddle sits at the lower endpoint of that edge. Exactly one saddle
    is kept per pair.
    """
    nx, ny, nz = f.dims
    n = f.num_voxels
    rank = vertex_order(f)
    labels = seg.labels
    r3 = rank.reshape(nz, ny, nx)
    l3 = labels.reshape(nz, ny, nx)
    base3 = np.arange(n, dtype=np.int64).reshape(nz, ny, nx)

    pair_keys = []
    edge_ranks = []
    lo_verts = []
    for dz, dy, dx in HALF_OFFSETS:
        zs = slice(0, nz - dz)
        ys_a = slice(max(0, -dy), ny - max(0, dy))
        xs_a = slice(max(0, -dx), nx - max(0, dx))
        zs_b = slice(dz, nz)
        ys_b = slice(max(0, dy), ny + min(0, dy))
        xs_b = slice(max(0, dx), nx + min(0, dx))
        la = l3[zs, ys_a, xs_a].ravel()
        lb = l3[zs_b, ys_b, xs_b].ravel()
        cross = la != lb
        if not np.any(cross):
            continue
        ra = r3[zs, ys_a, xs_a].ravel()[cross]
        rb = r3[zs_b, ys_b, xs_b].ravel()[cross]
        va = base3[zs, ys_a, xs_a].ravel()[cross]
        vb = base3[zs_b, ys_b, xs_b].ravel()[cross]
        la = la[cross]
        lb = lb[cross]
        lo_rank = np.minimum(ra, rb)
        lo_vert = np.where(ra < rb, va, vb)
        pmin = np.minimum(la, lb)
        pmax = np.maximum(la, lb)
        pair_keys.append(pmin.astype(np.int64) * n + pmax)
        edge_ranks.append(lo_rank)
        lo_verts.append(lo_vert)

    seg.saddles = []
    seg.adjacency = {}
    if not pair_keys:
        return seg
    pair_keys = np.concatenate(pair_keys)
    edge_ranks = np.concatenate(edge_ranks)
    lo_verts = np.concatenate(lo_verts)

    uniq, inverse = np.unique(pair_keys, return_inverse=True)
    best = np.full(uniq.size, -1, dtype=np.int64)
    np.maximum.at(best, inverse, edge_ranks)
    # pick the achieving edge for each pair (ranks are unique per vertex,
    # so ties can only repeat the same saddle vertex)
    achieving = edge_ranks == best[inverse]
    sad_vert = np.full(uniq.size, -1, dtype=np.int64)
    sad_vert[inverse[achieving]] = lo_verts[achieving]

    n_vox = n
    for k in range(uniq.size):
        key = int(uniq[k])
        la, lb = key // n_vox, key % n_vox
        v = int(sad_vert[k])
        sid = n_vox + k  # saddle ids offset past voxel-id maxima ids
        cp = CriticalPoint(
            id=sid,
            index=2,
            coords=f.world_coords(v),
            value=float(f.values[v]),
            vertex=v,
            t=f.time_index,
        )
        seg.saddles.append(cp)
        seg.adjacency[(la, lb)] = sid
    return seg


def _pairing(
    f: ScalarField3D,
    maxima: list[CriticalPoint],
    adjacency: dict[tuple[int, int], int],
    saddle_by_id: dict[int, CriticalPoint],
    rank: np.ndarray,
) -> dict[int, tuple[float, int, int]]:
    """Merge-order persistence pairing on the region-adjacency graph.

    Edges are processed in decreasing saddle order (Kruskal style); when
    two components merge, the component whose best maximum is lower gets
    paired: pers = f(m) - f(saddle). Returns
    {max_id: (pers, partner_label, saddle_id)}; the global maximum maps
    to (f(max) - f(min), -1, -1).
    """
    max_ids = [m.id for m in maxima]
    mrank = {m.id: rank[m.vertex] for m in maxima}
    parent = {mid: mid for mid in max_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comp_best = dict(mrank)  # root -> rank of its best maximum
    comp_best_id = {mid: mid for mid in max_ids}
    by_val = {m.id: m.value for m in maxima}

    edges = []
    for (la, lb), sid in adjacency.items():
        edges.append((rank[saddle_by_id[sid].vertex], la, lb, sid))
    edges.sort(reverse=True)

    result: dict[int, tuple[float, int, int]] = {}
    for _, la, lb, sid in edges:
        ra, rb = find(la), find(lb)
        if ra == rb:
            continue
        if comp_best[ra] < comp_best[rb]:
            loser_root, winner_root = ra, rb
            loser_side, winner_side = la, lb
        else:
            loser_root, winner_root = rb, ra
            loser_side, winner_side = lb, la
        loser_max = comp_best_id[loser_root]
        sval = saddle_by_id[sid].value
        result[loser_max] = (by_val[loser_max] - sval, winner_side, sid)
        parent[loser_root] = winner_root  # winner keeps its best maximum

    fmin = float(f.values.min())
    for mid in max_ids:
        if mid not in result:
            result[mid] = (by_val[mid] - fmin, -1, -1)
    return result


def compute_persistence(f: ScalarField3D, seg: Segmentation) -> dict[int, float]:
    """Persistence of every maximum; also stored on the CriticalPoints.

    The globally greatest maximum gets the essential value
    f(global max) - f(global min).
    """
    rank = vertex_order(f)
    saddle_by_id = {s.id: s for s in seg.saddles}
    pairing = _pairing(f, seg.maxima, seg.adjacency, saddle_by_id, rank)
    pers = {mid: p for mid, (p, _, _) in pairing.items()}
    for m in seg.maxima:
        m.pers = pers[m.id]
    return pers


def simplify(seg: Segmentation, theta: float) -> Segmentation:
    """Cancel maximum-saddle pairs with persistence below theta.

    Pairs are canceled in increasing persistence order (ties by maximum
    id). Each cancellation relabels the canceled maximum's region to the
    maximum across the pairing saddle and re-merges adjacencies, keeping
    the highest saddle per surviving pair. The global maximum is never
    canceled.
    """
    if theta < 0:
        raise ValueError("theta must be >= 0")
    f = seg.field
    rank = vertex_order(f)
    labels = seg.labels.copy()
    maxima = {m.id: m for m in seg.maxima}
    saddle_by_id = {s.id: s for s in seg.saddles}
    adjacency = dict(seg.adjacency)

    while len(maxima) > 1:
        pairing = _pairing(f, list(maxima.values()), adjacency, saddle_by_id, rank)
        candidates = [
            (p, mid, partner, sid)
            for mid, (p, partner, sid) in pairing.items()
            if partner != -1
        ]
        if not candidates:
            break
        p, mid, partner, sid = min(candidates)
        if p >= theta:
            break
        # relabel the canceled region across the pairing saddle
        labels[labels == mid] = partner
        new_adj: dict[tuple[int, int], int] = {}
        for (la, lb), s in adjacency.items():
            if mid in (la, lb):
                other = lb if la == mid else la
                if other == partner:
                    continue
                key = (min(partner, other), max(partner, other))
            else:
                key = (la, lb)
            if key in new_adj:
                keep = new_adj[key]
                if rank[saddle_by_id[s].vertex] > rank[saddle_by_id[keep].vertex]:
                    new_adj[key] = s
            else:
                new_adj[key] = s
        adjacency = new_adj
        del maxima[mid]

    out = Segmentation(
        field=f,
        labels=labels,
        maxima=sorted(maxima.values(), key=lambda m: m.id),
        saddles=sorted(
            (saddle_by_id[s] for s in set(adjacency.values())), key=lambda s: s.id
        ),
        adjacency=adjacency,
    )
    compute_persistence(f, out)
    attach_manifolds(out)
    return out


def attach_manifolds(seg: Segmentation) -> None:
    """Store each maximum's descending-manifold voxel set on it."""
    for m in seg.maxima:
        m.dscmfold = np.flatnonzero(seg.labels == m.id)


def descending_geometry(seg: Segmentation, mask: np.ndarray) -> dict[int, np.ndarray]:
    """Clip each descending manifold by a per-voxel boolean mask."""
    if mask.shape != seg.labels.shape:
        raise ValueError("mask shape does not match field")
    out = {}
    for m in seg.maxima:
        out[m.id] = np.flatnonzero((seg.labels == m.id) & mask)
    return out


def merge_tree_oracle(f: ScalarField3D) -> dict[int, float]:
    """Independent persistence oracle: superlevel-set sweep over voxels.

    Walks voxels in decreasing (value, id) order, unioning each new
    voxel with already-active 26-neighbors. When two components merge,
    the component with the lower best maximum is paired at the current
    voxel's value. Shares nothing with the segmentation pipeline.
    """
    nx, ny, nz = f.dims
    n = f.num_voxels
    vals = f.values
    order = np.lexsort((np.arange(n), vals))[::-1]  # decreasing

    parent = np.full(n, -1, dtype=np.int64)  # -1 = not yet active
    best_max = np.full(n, -1, dtype=np.int64)  # root -> maximum voxel id
    pers: dict[int, float] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    nxy = nx * ny
    for v in order:
        v = int(v)
        parent[v] = v
        best_max[v] = v
        ix = v % nx
        iy = (v // nx) % ny
        iz = v // nxy
        for dz, dy, dx in NEIGHBOR_OFFSETS:
            jx, jy, jz = ix + dx, iy + dy, iz + dz
            if jx < 0 or jy < 0 or jz < 0 or jx >= nx or jy >= ny or jz >= nz:
                continue
            u = jx + nx * (jy + ny * jz)
            if parent[u] < 0:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                continue
            bu, bv = int(best_max[ru]), int(best_max[rv])
            # lower maximum under (value, id) gets paired at f(v)
            if (vals[bu], bu) < (vals[bv], bv):
                loser, winner, lroot, wroot = bu, bv, ru, rv
            else:
                loser, winner, lroot, wroot = bv, bu, rv, ru
            if loser != v:
                # two components that predate v merge here: real pairing
                pers[loser] = float(vals[loser] - vals[v])
            parent[lroot] = wroot
            best_max[wroot] = winner
    # essential class: the surviving global maximum
    top = int(best_max[find(int(order[0]))])
    pers[top] = float(vals[top] - vals.min())
    return pers
