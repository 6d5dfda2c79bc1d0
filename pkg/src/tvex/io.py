"""Canonical exporters and loaders for graphs, tracks, and segmentations.

All JSON output is canonical: keys sorted, floats printed with 17
significant digits, so identical inputs produce byte-identical files
and export -> parse -> export round-trips exactly.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .exgraph import ExtremumGraph
from .field import ScalarField3D
from .morse import CriticalPoint, Segmentation
from .temporal import EventSets, FilterMeta, ScoreTuple, ScoreWeights, Tveg
from .tracks import Track


def _canon(obj, out: list) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _canon(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _canon(item, out)
        out.append("]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format(float(obj), ".17g"))
    elif obj is None:
        out.append("null")
    else:
        out.append(json.dumps(obj))


def canonical_json(obj) -> str:
    """Deterministic JSON text for a tree of dicts/lists/scalars."""
    out: list[str] = []
    _canon(obj, out)
    out.append("\n")
    return "".join(out)


def _node_dict(cp: CriticalPoint) -> dict:
    return {
        "id": cp.id,
        "index": cp.index,
        "x": [float(v) for v in cp.coords],
        "value": cp.value,
        "pers": cp.pers,
        "eta": cp.eta,
        "vertex": cp.vertex,
        "t": cp.t,
    }


def _node_from_dict(d: dict) -> CriticalPoint:
    return CriticalPoint(
        id=int(d["id"]),
        index=int(d["index"]),
        coords=np.asarray(d["x"], dtype=np.float64),
        value=float(d["value"]),
        pers=float(d["pers"]),
        eta=float(d["eta"]),
        vertex=int(d["vertex"]),
        t=int(d["t"]),
    )


def tveg_to_dict(tveg: Tveg) -> dict:
    return {
        "theta": tveg.theta,
        "weights": {
            "G": tveg.weights.G,
            "L1": tveg.weights.L1,
            "L2": tveg.weights.L2,
            "L3": tveg.weights.L3,
        },
        "steps": [
            {
                "t": g.t,
                "nodes": [_node_dict(cp) for cp in g.maxima + g.saddles],
                "arcs": [[m, s] for m, s in g.arcs],
            }
            for g in tveg.graphs
        ],
        "temporal_arcs": [
            {
                "t": t,
                "arcs": [[a.m0, a.m1, a.s] for a in tveg.arcs_by_pair[t]],
                "filter": {
                    "mu": tveg.filter_meta[t].mu,
                    "sigma": tveg.filter_meta[t].sigma,
                    "tau": tveg.filter_meta[t].tau,
                },
            }
            for t in sorted(tveg.arcs_by_pair)
        ],
        "events": {
            "merges": tveg.events.merges,
            "splits": tveg.events.splits,
            "deletions": [[n, t] for n, t in tveg.events.deletions],
            "generations": [[n, t] for n, t in tveg.events.generations],
        },
    }


def export_tveg_json(tveg: Tveg, path: str) -> None:
    """Write the whole structure as canonical JSON."""
    with open(path, "w") as fh:
        fh.write(canonical_json(tveg_to_dict(tveg)))


def load_tveg_json(path: str) -> Tveg:
    """Rebuild a Tveg from an exported file (without voxel geometry)."""
    with open(path) as fh:
        doc = json.load(fh)
    graphs = []
    for step in doc["steps"]:
        nodes = [_node_from_dict(d) for d in step["nodes"]]
        graphs.append(
            ExtremumGraph(
                t=int(step["t"]),
                maxima=[n for n in nodes if n.index == 3],
                saddles=[n for n in nodes if n.index == 2],
                arcs=[(int(a), int(b)) for a, b in step["arcs"]],
            )
        )
    arcs_by_pair = {}
    filter_meta = {}
    for pair in doc["temporal_arcs"]:
        t = int(pair["t"])
        arcs_by_pair[t] = [
            ScoreTuple(m0=int(a), m1=int(b), s=float(s)) for a, b, s in pair["arcs"]
        ]
        fm = pair["filter"]
        filter_meta[t] = FilterMeta(
            mu=float(fm["mu"]), sigma=float(fm["sigma"]), tau=float(fm["tau"])
        )
    ev = doc["events"]
    events = EventSets(
        merges=[
            {
                "node": int(e["node"]),
                "time": int(e["time"]),
                "participants": [int(p) for p in e["participants"]],
            }
            for e in ev["merges"]
        ],
        splits=[
            {
                "node": int(e["node"]),
                "time": int(e["time"]),
                "participants": [int(p) for p in e["participants"]],
            }
            for e in ev["splits"]
        ],
        deletions=[(int(n), int(t)) for n, t in ev["deletions"]],
        generations=[(int(n), int(t)) for n, t in ev["generations"]],
    )
    w = doc["weights"]
    return Tveg(
        graphs=graphs,
        arcs_by_pair=arcs_by_pair,
        events=events,
        weights=ScoreWeights(
            G=float(w["G"]), L1=float(w["L1"]), L2=float(w["L2"]), L3=float(w["L3"])
        ),
        filter_meta=filter_meta,
        theta=float(doc["theta"]),
    )


def tracks_to_dict(tracks: list[Track]) -> dict:
    return {
        "tracks": [
            {
                "nodes": [[t, n] for t, n in tr.nodes],
                "arcs": [[a, b] for a, b in tr.arcs],
                "length": tr.length,
            }
            for tr in tracks
        ]
    }


def export_tracks_json(tracks: list[Track], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(tracks_to_dict(tracks)))


def load_tracks_json(path: str) -> list[Track]:
    with open(path) as fh:
        doc = json.load(fh)
    return [
        Track(
            nodes=[(int(t), int(n)) for t, n in tr["nodes"]],
            arcs=[(int(a), int(b)) for a, b in tr["arcs"]],
        )
        for tr in doc["tracks"]
    ]


def _event_codes(tveg: Tveg) -> dict[tuple[int, int], int]:
    """Per-(t, node) event code: 1 merge, 2 split, 3 deletion, 4 generation.

    First match in that order wins when a node participates in several.
    """
    codes: dict[tuple[int, int], int] = {}
    for n, t in reversed(tveg.events.generations):
        codes[(t, n)] = 4
    for n, t in reversed(tveg.events.deletions):
        codes[(t, n)] = 3
    for e in reversed(tveg.events.splits):
        codes[(e["time"], e["node"])] = 2
    for e in reversed(tveg.events.merges):
        codes[(e["time"], e["node"])] = 1
    return codes


def export_tracks_geometry(
    tracks: list[Track],
    tveg: Tveg,
    path: str,
    z_scale: float = 0.1,
    slab_height: float | None = None,
    include_spatial: bool = False,
) -> None:
    """Legacy ASCII polydata export of tracks stacked along z.

    Point z' = z * z_scale + t * slab_height; slab_height defaults to
    the scaled z-extent of the domain so consecutive steps do not
    overlap. Point scalars: time index, track id, event code.
    """
    if slab_height is None:
        slab_height = _default_slab_height(tveg, z_scale)
    codes = _event_codes(tveg)

    points: list[tuple[float, float, float]] = []
    ptime: list[int] = []
    ptrack: list[int] = []
    pevent: list[int] = []
    lines: list[tuple[int, int]] = []

    for track_id, tr in enumerate(tracks):
        index: dict[tuple[int, int], int] = {}
        for t, mid in tr.nodes:
            cp = tveg.graph_at(t).node(mid)
            x, y, z = (float(v) for v in cp.coords)
            index[(t, mid)] = len(points)
            points.append((x, y, z * z_scale + t * slab_height))
            ptime.append(t)
            ptrack.append(track_id)
            pevent.append(codes.get((t, mid), 0))
        for a, b in tr.arcs:
            ta, tb = a >> 32, b >> 32
            lines.append((index[(ta, a)], index[(tb, b)]))
        if include_spatial:
            for t, mid in tr.nodes:
                g = tveg.graph_at(t)
                for m, s in g.arcs:
                    if m != mid:
                        continue
                    cp = g.node(s)
                    x, y, z = (float(v) for v in cp.coords)
                    sid = len(points)
                    points.append((x, y, z * z_scale + t * slab_height))
                    ptime.append(t)
                    ptrack.append(track_id)
                    pevent.append(0)
                    lines.append((index[(t, mid)], sid))

    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("tvex tracks\n")
        fh.write("ASCII\n")
        fh.write("DATASET POLYDATA\n")
        fh.write(f"POINTS {len(points)} float\n")
        for x, y, z in points:
            fh.write(f"{x:.9g} {y:.9g} {z:.9g}\n")
        fh.write(f"LINES {len(lines)} {3 * len(lines)}\n")
        for a, b in lines:
            fh.write(f"2 {a} {b}\n")
        fh.write(f"POINT_DATA {len(points)}\n")
        for name, data in (
            ("time_index", ptime),
            ("track_id", ptrack),
            ("event_code", pevent),
        ):
            fh.write(f"SCALARS {name} int 1\n")
            fh.write("LOOKUP_TABLE default\n")
            for v in data:
                fh.write(f"{v}\n")


def _default_slab_height(tveg: Tveg, z_scale: float) -> float:
    for g in tveg.graphs:
        if g.segmentation is not None:
            f = g.segmentation.field
            return float((f.dims[2] - 1) * f.spacing[2] * z_scale)
    # fall back to the z-extent of the stored node coordinates
    zs = [float(cp.coords[2]) for g in tveg.graphs for cp in g.maxima + g.saddles]
    if not zs:
        return 1.0
    extent = max(zs) - min(zs)
    return float(extent * z_scale) if extent > 0 else 1.0


def export_segmentation(seg: Segmentation, path_prefix: str) -> tuple[str, str]:
    """Raw 32-bit unsigned label volume plus a JSON sidecar.

    Returns (labels_path, sidecar_path).
    """
    labels_path = path_prefix + ".labels.raw"
    sidecar_path = path_prefix + ".labels.json"
    seg.labels.astype("<u4").tofile(labels_path)
    sidecar = {
        "dims": list(seg.field.dims),
        "dtype": "<u4",
        "order": "x-fastest",
        "maxima": [
            {
                "label": m.id,
                "x": [float(v) for v in m.coords],
                "value": m.value,
                "pers": m.pers,
                "vertex": m.vertex,
                "region_voxels": int(np.count_nonzero(seg.labels == m.id)),
            }
            for m in seg.maxima
        ],
    }
    with open(sidecar_path, "w") as fh:
        fh.write(canonical_json(sidecar))
    return labels_path, sidecar_path


def load_segmentation_labels(labels_path: str, dims) -> np.ndarray:
    n = dims[0] * dims[1] * dims[2]
    labels = np.fromfile(labels_path, dtype="<u4")
    if labels.size != n:
        raise ValueError(f"size mismatch: expected {n} got {labels.size}")
    return labels.astype(np.int64)


def export_extremum_graph_json(g: ExtremumGraph, path: str) -> None:
    doc = {
        "t": g.t,
        "nodes": [_node_dict(cp) for cp in g.maxima + g.saddles],
        "arcs": [[m, s] for m, s in g.arcs],
    }
    with open(path, "w") as fh:
        fh.write(canonical_json(doc))
