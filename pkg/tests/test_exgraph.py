"""Per-step extremum graph assembly and node attributes."""

import numpy as np
import pytest

from tvex.exgraph import (
    build_extremum_graph,
    make_node_id,
    neighborhood_contribution,
    split_node_id,
)
from tvex.morse import compute_persistence, compute_saddles, compute_segmentation

from conftest import random_field


def test_node_id_roundtrip():
    for t, local in [(0, 0), (1, 5), (50, 2**20), (1000, 0xFFFFFFFF)]:
        assert split_node_id(make_node_id(t, local)) == (t, local)


def test_ids_encode_time(rng):
    f = random_field(rng, (6, 6, 6), time_index=7)
    g = build_extremum_graph(f, 0.1)
    for cp in g.maxima + g.saddles:
        assert split_node_id(cp.id)[0] == 7
        assert cp.t == 7


def test_maxima_before_saddles_in_local_index(rng):
    f = random_field(rng, (6, 6, 6), time_index=3)
    g = build_extremum_graph(f, 0.1)
    max_locals = [split_node_id(m.id)[1] for m in g.maxima]
    sad_locals = [split_node_id(s.id)[1] for s in g.saddles]
    assert max_locals == list(range(len(max_locals)))
    assert sad_locals == list(
        range(len(max_locals), len(max_locals) + len(sad_locals))
    )


def test_every_saddle_has_degree_two(rng):
    f = random_field(rng, (7, 7, 7), time_index=1)
    g = build_extremum_graph(f, 0.15)
    deg = {}
    for m, s in g.arcs:
        deg[s] = deg.get(s, 0) + 1
    assert set(deg) == {s.id for s in g.saddles}
    assert all(d == 2 for d in deg.values())


def test_arcs_join_maxima_to_saddles(rng):
    f = random_field(rng, (6, 6, 6), time_index=1)
    g = build_extremum_graph(f, 0.1)
    max_ids = {m.id for m in g.maxima}
    sad_ids = {s.id for s in g.saddles}
    for m, s in g.arcs:
        assert m in max_ids
        assert s in sad_ids
    assert g.arcs == sorted(g.arcs)


def test_graph_matches_simplified_segmentation(rng):
    f = random_field(rng, (6, 6, 6), time_index=1)
    theta = 0.2
    seg = compute_saddles(f, compute_segmentation(f))
    compute_persistence(f, seg)
    from tvex.morse import simplify

    ref = simplify(seg, theta)
    g = build_extremum_graph(f, theta)
    assert len(g.maxima) == len(ref.maxima)
    assert sorted(m.vertex for m in g.maxima) == sorted(m.vertex for m in ref.maxima)
    assert len(g.saddles) == len(ref.adjacency)


def test_eta_is_sum_of_saddle_gaps(rng):
    f = random_field(rng, (6, 6, 6), time_index=1)
    g = build_extremum_graph(f, 0.15)
    by_id = {cp.id: cp for cp in g.maxima + g.saddles}
    for m in g.maxima:
        expect = sum(
            abs(m.value - by_id[s].value) for mm, s in g.arcs if mm == m.id
        )
        assert m.eta == pytest.approx(expect)
        assert neighborhood_contribution(g, m.id) == pytest.approx(expect)


def test_neighborhood_contribution_rejects_saddle(rng):
    f = random_field(rng, (5, 5, 5), time_index=1)
    g = build_extremum_graph(f, 0.1)
    if g.saddles:
        with pytest.raises(KeyError):
            neighborhood_contribution(g, g.saddles[0].id)


def test_incident_saddles_sorted(rng):
    f = random_field(rng, (6, 6, 6), time_index=1)
    g = build_extremum_graph(f, 0.1)
    for m in g.maxima:
        inc = g.incident_saddles(m.id)
        assert inc == sorted(inc)


def test_keep_segmentation_flag(rng):
    f = random_field(rng, (5, 5, 5), time_index=1)
    assert build_extremum_graph(f, 0.1, keep_segmentation=True).segmentation is not None
    assert build_extremum_graph(f, 0.1, keep_segmentation=False).segmentation is None


def test_saddle_persistence_is_cancellation_value(rng):
    f = random_field(rng, (6, 6, 6), time_index=1)
    g = build_extremum_graph(f, 0.1)
    by_id = {cp.id: cp for cp in g.maxima + g.saddles}
    touching = {}
    for m, s in g.arcs:
        touching.setdefault(s, []).append(m)
    for s in g.saddles:
        pair = touching[s.id]
        expect = min(by_id[m].value - s.value for m in pair)
        assert s.pers == pytest.approx(expect)
