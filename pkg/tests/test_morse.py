"""Maxima, segmentation, saddles, persistence, and simplification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tvex.field import ScalarField3D
from tvex.morse import (
    NEIGHBOR_OFFSETS,
    compute_persistence,
    compute_saddles,
    compute_segmentation,
    descending_geometry,
    find_maxima,
    merge_tree_oracle,
    simplify,
    vertex_order,
)

from conftest import random_field


def brute_force_maxima(f: ScalarField3D) -> list[int]:
    """Reference maxima scan: explicit 26-neighbor loops per voxel."""
    nx, ny, nz = f.dims
    rank = vertex_order(f)
    out = []
    for v in range(f.num_voxels):
        ix, iy, iz = f.voxel_coords(v)
        is_max = True
        for dz, dy, dx in NEIGHBOR_OFFSETS:
            jx, jy, jz = ix + dx, iy + dy, iz + dz
            if 0 <= jx < nx and 0 <= jy < ny and 0 <= jz < nz:
                u = jx + nx * (jy + ny * jz)
                if rank[u] > rank[v]:
                    is_max = False
                    break
        if is_max:
            out.append(v)
    return out


small_fields = arrays(
    dtype=np.float64,
    shape=st.tuples(
        st.integers(2, 5), st.integers(2, 5), st.integers(2, 5)
    ),
    elements=st.floats(0.0, 1.0, allow_nan=False, width=32),
)


def as_field(a: np.ndarray) -> ScalarField3D:
    nz, ny, nx = a.shape
    return ScalarField3D(
        dims=(nx, ny, nz),
        origin=np.zeros(3),
        spacing=np.ones(3),
        values=a.ravel(),
    )


class TestVertexOrder:
    def test_is_a_permutation(self, rng):
        f = random_field(rng, (4, 4, 4))
        r = vertex_order(f)
        assert sorted(r.tolist()) == list(range(f.num_voxels))

    def test_orders_by_value_then_id(self):
        f = ScalarField3D(
            dims=(4, 1, 1),
            origin=np.zeros(3),
            spacing=np.ones(3),
            values=[0.5, 0.2, 0.5, 0.1],
        )
        r = vertex_order(f)
        # 0.1 < 0.2 < 0.5(id 0) < 0.5(id 2)
        assert r.tolist() == [2, 1, 3, 0]


class TestFindMaxima:
    def test_constant_field_single_maximum(self):
        f = ScalarField3D(
            dims=(3, 3, 3), origin=np.zeros(3), spacing=np.ones(3), values=np.ones(27)
        )
        # ties break by voxel id, so the last voxel wins everywhere
        assert find_maxima(f) == [26]

    def test_matches_brute_force_random(self, rng):
        for _ in range(20):
            dims = tuple(int(d) for d in rng.integers(2, 7, 3))
            f = random_field(rng, dims)
            assert find_maxima(f) == brute_force_maxima(f)

    @given(small_fields)
    @settings(max_examples=40, deadline=None)
    def test_matches_brute_force_property(self, a):
        f = as_field(a)
        assert find_maxima(f) == brute_force_maxima(f)


class TestSegmentation:
    def test_labels_are_maxima(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_segmentation(f)
        maxima = set(find_maxima(f))
        assert set(np.unique(seg.labels)) == maxima

    def test_maxima_label_themselves(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_segmentation(f)
        for m in seg.maxima:
            assert seg.labels[m.vertex] == m.id

    def test_steepest_path_reaches_label(self, rng):
        """Following the steepest 26-neighbor from any voxel preserves its label."""
        f = random_field(rng, (5, 5, 5))
        seg = compute_segmentation(f)
        rank = vertex_order(f)
        nx, ny, nz = f.dims
        for v in rng.integers(0, f.num_voxels, 30):
            v = int(v)
            while True:
                ix, iy, iz = f.voxel_coords(v)
                best, best_u = rank[v], v
                for dz, dy, dx in NEIGHBOR_OFFSETS:
                    jx, jy, jz = ix + dx, iy + dy, iz + dz
                    if 0 <= jx < nx and 0 <= jy < ny and 0 <= jz < nz:
                        u = jx + nx * (jy + ny * jz)
                        if rank[u] > best:
                            best, best_u = rank[u], u
                if best_u == v:
                    break
                assert seg.labels[best_u] == seg.labels[v]
                v = best_u

    def test_region_partition_covers_domain(self, rng):
        f = random_field(rng, (5, 5, 5))
        seg = compute_segmentation(f)
        total = sum(int(np.count_nonzero(seg.labels == m.id)) for m in seg.maxima)
        assert total == f.num_voxels


class TestSaddles:
    def test_one_saddle_per_adjacent_pair(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        assert len(seg.saddles) == len(seg.adjacency)
        assert len({s.id for s in seg.saddles}) == len(seg.saddles)

    def test_adjacency_pairs_are_labels(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        labels = {m.id for m in seg.maxima}
        for (la, lb) in seg.adjacency:
            assert la < lb
            assert la in labels and lb in labels

    def test_saddle_below_both_maxima(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        rank = vertex_order(f)
        sid_to_cp = {s.id: s for s in seg.saddles}
        for (la, lb), sid in seg.adjacency.items():
            s = sid_to_cp[sid]
            assert rank[s.vertex] < rank[la]
            assert rank[s.vertex] < rank[lb]

    def test_saddle_is_highest_crossing_edge(self, rng):
        """Brute-force the best crossing edge for every adjacent pair."""
        f = random_field(rng, (4, 4, 4))
        seg = compute_saddles(f, compute_segmentation(f))
        rank = vertex_order(f)
        nx, ny, nz = f.dims
        best: dict[tuple[int, int], int] = {}
        for v in range(f.num_voxels):
            ix, iy, iz = f.voxel_coords(v)
            for dz, dy, dx in NEIGHBOR_OFFSETS:
                jx, jy, jz = ix + dx, iy + dy, iz + dz
                if not (0 <= jx < nx and 0 <= jy < ny and 0 <= jz < nz):
                    continue
                u = jx + nx * (jy + ny * jz)
                la, lb = seg.labels[v], seg.labels[u]
                if la == lb:
                    continue
                key = (min(la, lb), max(la, lb))
                lo = v if rank[v] < rank[u] else u
                if key not in best or rank[lo] > rank[best[key]]:
                    best[key] = lo
        sid_to_cp = {s.id: s for s in seg.saddles}
        assert set(seg.adjacency) == set(best)
        for key, sid in seg.adjacency.items():
            assert sid_to_cp[sid].vertex == best[key]


class TestPersistence:
    def test_matches_oracle_random(self, rng):
        for _ in range(25):
            dims = tuple(int(d) for d in rng.integers(3, 9, 3))
            f = random_field(rng, dims)
            seg = compute_saddles(f, compute_segmentation(f))
            pers = compute_persistence(f, seg)
            assert pers == merge_tree_oracle(f)

    @given(small_fields)
    @settings(max_examples=30, deadline=None)
    def test_matches_oracle_property(self, a):
        f = as_field(a)
        seg = compute_saddles(f, compute_segmentation(f))
        assert compute_persistence(f, seg) == merge_tree_oracle(f)

    def test_global_max_gets_essential_value(self, rng):
        f = random_field(rng, (5, 5, 5))
        seg = compute_saddles(f, compute_segmentation(f))
        pers = compute_persistence(f, seg)
        top = max(seg.maxima, key=lambda m: (m.value, m.id))
        assert pers[top.id] == top.value - float(f.values.min())

    def test_persistence_positive(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        pers = compute_persistence(f, seg)
        assert all(p > 0 for p in pers.values())

    def test_two_peak_field_exact(self):
        """1D-like ridge: two peaks with a known col between them."""
        vals = np.zeros((1, 1, 7))
        vals[0, 0, :] = [0.1, 0.9, 0.3, 0.2, 0.4, 1.0, 0.5]
        f = ScalarField3D(
            dims=(7, 1, 1), origin=np.zeros(3), spacing=np.ones(3), values=vals.ravel()
        )
        seg = compute_saddles(f, compute_segmentation(f))
        pers = compute_persistence(f, seg)
        # peak 0.9 dies at the 0.2 col; peak 1.0 is essential
        assert pers == {1: pytest.approx(0.7), 5: pytest.approx(0.9)}


class TestSimplify:
    def test_theta_zero_is_identity(self, rng):
        f = random_field(rng, (5, 5, 5))
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        out = simplify(seg, 0.0)
        assert {m.id for m in out.maxima} == {m.id for m in seg.maxima}

    def test_rejects_negative_theta(self, rng):
        f = random_field(rng, (4, 4, 4))
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        with pytest.raises(ValueError):
            simplify(seg, -0.1)

    def test_survivors_exceed_threshold(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        theta = 0.3
        out = simplify(seg, theta)
        assert all(m.pers >= theta for m in out.maxima)

    def test_global_max_survives_any_threshold(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        out = simplify(seg, 1e9)
        top = max(seg.maxima, key=lambda m: (m.value, m.id))
        assert [m.id for m in out.maxima] == [top.id]
        assert np.all(out.labels == top.id)

    def test_labels_remain_partition(self, rng):
        f = random_field(rng, (6, 6, 6))
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        out = simplify(seg, 0.25)
        assert set(np.unique(out.labels)) == {m.id for m in out.maxima}

    def test_canceled_region_joins_pairing_neighbor(self):
        vals = np.zeros((1, 1, 7))
        vals[0, 0, :] = [0.1, 0.9, 0.3, 0.2, 0.4, 1.0, 0.5]
        f = ScalarField3D(
            dims=(7, 1, 1), origin=np.zeros(3), spacing=np.ones(3), values=vals.ravel()
        )
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        out = simplify(seg, 0.8)  # cancels the 0.9 peak (pers 0.7)
        assert [m.id for m in out.maxima] == [5]
        assert np.all(out.labels == 5)

    def test_manifolds_attached(self, rng):
        f = random_field(rng, (5, 5, 5))
        seg = compute_saddles(f, compute_segmentation(f))
        compute_persistence(f, seg)
        out = simplify(seg, 0.2)
        for m in out.maxima:
            assert m.dscmfold is not None
            assert np.array_equal(m.dscmfold, np.flatnonzero(out.labels == m.id))


def test_descending_geometry_clips(rng):
    f = random_field(rng, (5, 5, 5))
    seg = compute_saddles(f, compute_segmentation(f))
    compute_persistence(f, seg)
    mask = f.values >= 0.5
    geom = descending_geometry(seg, mask)
    for m in seg.maxima:
        expect = np.flatnonzero((seg.labels == m.id) & mask)
        assert np.array_equal(geom[m.id], expect)


def test_descending_geometry_shape_check(rng):
    f = random_field(rng, (4, 4, 4))
    seg = compute_segmentation(f)
    with pytest.raises(ValueError):
        descending_geometry(seg, np.ones(5, dtype=bool))
