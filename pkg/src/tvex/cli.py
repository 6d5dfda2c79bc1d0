"""Command-line driver.

Subcommands: gen | eg | tveg | events | tracks | query | export.
Each stage prints a one-line summary (counts + timing) and exits 0 on
success, nonzero with a diagnostic otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import io as tvio
from . import morse, pipeline, query as tvquery, tracks as tvtracks
from .field import generate_gauss8, load_series, save_series
from .temporal import ScoreWeights


def _parse_dims(text: str) -> tuple[int, int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        parts = parts * 3
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("dims must be N or NX,NY,NZ")
    return tuple(parts)


def _parse_weights(text: str) -> ScoreWeights:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("weights must be G,L1,L2,L3")
    return ScoreWeights(G=parts[0], L1=parts[1], L2=parts[2], L3=parts[3])


def _load_theta_series(args):
    series = load_series(args.manifest)
    theta = pipeline.resolve_theta(args.theta, series)
    return series, theta


def cmd_gen(args) -> int:
    t0 = time.perf_counter()
    if not args.gauss8:
        raise ValueError("only --gauss8 generation is supported")
    series = generate_gauss8(
        dims=args.dims, steps=args.steps, amplitude=args.amplitude, sigma=args.sigma
    )
    manifest = save_series(series, args.output)
    print(
        f"gen: {len(series)} steps of {args.dims[0]}x{args.dims[1]}x{args.dims[2]} "
        f"-> {manifest} [{time.perf_counter() - t0:.2f}s]"
    )
    return 0


def cmd_eg(args) -> int:
    t0 = time.perf_counter()
    series, theta = _load_theta_series(args)
    os.makedirs(args.output, exist_ok=True)
    fields = series.fields
    if args.t is not None:
        fields = [f for f in fields if f.time_index == args.t]
        if not fields:
            raise ValueError(f"no time step {args.t} in series")
    n_nodes = 0
    for f in fields:
        g = pipeline.build_graphs(
            type(series)(fields=[f]), theta, keep_segmentation=False
        )[0]
        path = os.path.join(args.output, f"exgraph_{f.time_index:04d}.json")
        tvio.export_extremum_graph_json(g, path)
        n_nodes += len(g.maxima) + len(g.saddles)
    print(
        f"eg: {len(fields)} graphs, {n_nodes} nodes, theta={theta:.6g} "
        f"-> {args.output} [{time.perf_counter() - t0:.2f}s]"
    )
    return 0


def cmd_tveg(args) -> int:
    t0 = time.perf_counter()
    series, theta = _load_theta_series(args)
    t_range = tuple(args.range) if args.range else None
    tveg = pipeline.compute_tveg(
        series, theta, args.weights, t_range=t_range
    )
    os.makedirs(args.output, exist_ok=True)
    path = os.path.join(args.output, "tveg.json")
    tvio.export_tveg_json(tveg, path)
    n_arcs = sum(len(v) for v in tveg.arcs_by_pair.values())
    ev = tveg.events
    print(
        f"tveg: {len(tveg.graphs)} steps, {n_arcs} temporal arcs, "
        f"{len(ev.merges)} merges, {len(ev.splits)} splits, "
        f"{len(ev.deletions)} deletions, {len(ev.generations)} generations "
        f"-> {path} [{time.perf_counter() - t0:.2f}s]"
    )
    return 0


def cmd_events(args) -> int:
    t0 = time.perf_counter()
    tveg = tvio.load_tveg_json(args.tveg)
    if args.window:
        ev = tvquery.events_in_window(tveg, tuple(args.window))
    else:
        ev = tveg.events
    doc = {
        "merges": ev.merges,
        "splits": ev.splits,
        "deletions": [[n, t] for n, t in ev.deletions],
        "generations": [[n, t] for n, t in ev.generations],
    }
    text = tvio.canonical_json(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(
        f"events: {len(ev.merges)} merges, {len(ev.splits)} splits, "
        f"{len(ev.deletions)} deletions, {len(ev.generations)} generations "
        f"[{time.perf_counter() - t0:.2f}s]"
    )
    return 0


def cmd_tracks(args) -> int:
    t0 = time.perf_counter()
    if args.refine:
        if not args.manifest:
            raise ValueError("--refine needs --manifest to recompute geometry")
        series, theta = _load_theta_series(args)
        tveg = pipeline.compute_tveg(series, theta, args.weights)
        result = tvtracks.refine_by_overlap(
            tveg, isovalue=args.isovalue, min_len=args.min_len
        )
    else:
        tveg = tvio.load_tveg_json(args.tveg)
        result = tvtracks.extract_tracks(tveg, mode=args.mode)
    tvio.export_tracks_json(result, args.output)
    print(
        f"tracks: {len(result)} tracks -> {args.output} "
        f"[{time.perf_counter() - t0:.2f}s]"
    )
    return 0


def cmd_query(args) -> int:
    t0 = time.perf_counter()
    tveg = tvio.load_tveg_json(args.tveg)
    if args.spec:
        with open(args.spec) as fh:
            raw = json.load(fh)
        spec = tvquery.QuerySpec(
            kind=raw["kind"],
            k=raw.get("k"),
            n=raw.get("n"),
            box=tuple(map(tuple, raw["box"])) if "box" in raw else None,
            window=tuple(raw["window"]) if "window" in raw else None,
            seeds=raw.get("seeds", []),
            hops=raw.get("hops", 0),
        )
    else:
        spec = tvquery.QuerySpec(
            kind=args.kind,
            k=args.k,
            n=args.n,
            box=(tuple(args.box[:3]), tuple(args.box[3:])) if args.box else None,
            window=tuple(args.window) if args.window else None,
            hops=args.hops,
        )
    doc = _run_query(tveg, spec, args)
    text = tvio.canonical_json(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"query: kind={spec.kind} [{time.perf_counter() - t0:.2f}s]")
    return 0


def _run_query(tveg, spec, args) -> dict:
    if spec.kind in ("length-threshold", "least-deviation"):
        if args.tracks:
            track_list = tvio.load_tracks_json(args.tracks)
        else:
            track_list = tvtracks.extract_tracks(tveg, mode="simple-paths")
        if spec.kind == "length-threshold":
            result = tvquery.tracks_longer_than(track_list, spec.k or 1)
        else:
            result = tvquery.least_deviation(track_list, tveg, spec.n or 1)
        return tvio.tracks_to_dict(result)
    if spec.kind == "region":
        if spec.box is None or spec.window is None:
            raise ValueError("region query needs --box and --window")
        sel = tvquery.select_in_region(tveg, spec.box, spec.window)
        return {
            "maxima": sel.maxima,
            "saddles": sel.saddles,
            "spatial_arcs": [[a, b] for a, b in sel.spatial_arcs],
            "temporal_arcs": [[a.m0, a.m1, a.s] for a in sel.temporal_arcs],
        }
    if spec.kind == "window-events":
        if spec.window is None:
            raise ValueError("window-events query needs --window")
        ev = tvquery.events_in_window(tveg, spec.window)
        return {
            "merges": ev.merges,
            "splits": ev.splits,
            "deletions": [[n, t] for n, t in ev.deletions],
            "generations": [[n, t] for n, t in ev.generations],
        }
    if spec.kind == "neighborhood":
        if not spec.seeds:
            raise ValueError("neighborhood query needs --seeds")
        track = tvtracks.Track(
            nodes=sorted((s >> 32, s) for s in spec.seeds), arcs=[]
        )
        nb = tvquery.track_neighborhood(tveg, track, spec.hops)
        return {"neighborhood": {str(t): nodes for t, nodes in nb.items()}}
    raise ValueError(f"unknown query kind {spec.kind!r}")


def cmd_export(args) -> int:
    t0 = time.perf_counter()
    if args.what == "geometry":
        tveg = tvio.load_tveg_json(args.tveg)
        if args.tracks:
            track_list = tvio.load_tracks_json(args.tracks)
        else:
            track_list = tvtracks.extract_tracks(tveg, mode="simple-paths")
        tvio.export_tracks_geometry(
            track_list,
            tveg,
            args.output,
            z_scale=args.z_scale,
            slab_height=args.slab_height,
            include_spatial=args.spatial_arcs,
        )
        print(
            f"export: {len(track_list)} tracks -> {args.output} "
            f"[{time.perf_counter() - t0:.2f}s]"
        )
        return 0
    # segmentation export needs the field
    series, theta = _load_theta_series(args)
    f = next((f for f in series.fields if f.time_index == args.t), None)
    if f is None:
        raise ValueError(f"no time step {args.t} in series")
    seg = morse.compute_saddles(f, morse.compute_segmentation(f))
    morse.compute_persistence(f, seg)
    seg = morse.simplify(seg, theta)
    labels_path, sidecar = tvio.export_segmentation(seg, args.output)
    print(
        f"export: {len(seg.maxima)} regions -> {labels_path} "
        f"[{time.perf_counter() - t0:.2f}s]"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tvex",
        description="Extremum graphs of time-varying scalar fields: "
        "temporal linking, events, tracks, queries, exports.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic series")
    g.add_argument("--gauss8", action="store_true", help="eight moving Gaussians")
    g.add_argument("--dims", type=_parse_dims, default=(32, 32, 32))
    g.add_argument("--steps", type=int, default=50)
    g.add_argument("--amplitude", type=float, default=1.0)
    g.add_argument("--sigma", type=float, default=0.08)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("eg", help="compute per-step extremum graphs")
    e.add_argument("--manifest", required=True)
    e.add_argument("--theta", default="0.0")
    e.add_argument("--t", type=int, default=None)
    e.add_argument("-o", "--output", required=True)
    e.set_defaults(func=cmd_eg)

    tv = sub.add_parser("tveg", help="compute the full time-varying graph")
    tv.add_argument("--manifest", required=True)
    tv.add_argument("--theta", default="0.0")
    tv.add_argument("--weights", type=_parse_weights, default=ScoreWeights())
    tv.add_argument("--range", type=int, nargs=2, default=None, metavar=("P", "R"))
    tv.add_argument("-o", "--output", required=True)
    tv.set_defaults(func=cmd_tveg)

    ev = sub.add_parser("events", help="list topological events")
    ev.add_argument("--tveg", required=True)
    ev.add_argument("--window", type=int, nargs=2, default=None, metavar=("T0", "T1"))
    ev.add_argument("-o", "--output", default=None)
    ev.set_defaults(func=cmd_events)

    tr = sub.add_parser("tracks", help="extract or refine tracks")
    tr.add_argument("--tveg", default=None)
    tr.add_argument("--mode", choices=["components", "simple-paths"],
                    default="simple-paths")
    tr.add_argument("--refine", action="store_true",
                    help="resolve two-way arcs by clipped-region overlap")
    tr.add_argument("--manifest", default=None)
    tr.add_argument("--theta", default="0.0")
    tr.add_argument("--weights", type=_parse_weights, default=ScoreWeights())
    tr.add_argument("--isovalue", type=float, default=0.1)
    tr.add_argument("--min-len", type=int, default=10)
    tr.add_argument("-o", "--output", required=True)
    tr.set_defaults(func=cmd_tracks)

    q = sub.add_parser("query", help="query a computed tveg")
    q.add_argument("--tveg", required=True)
    q.add_argument("--spec", default=None, help="JSON query file")
    q.add_argument("--kind", default=None,
                   choices=["length-threshold", "least-deviation", "region",
                            "window-events", "neighborhood"])
    q.add_argument("--k", type=int, default=None)
    q.add_argument("--n", type=int, default=None)
    q.add_argument("--box", type=float, nargs=6, default=None,
                   metavar=("X0", "Y0", "Z0", "X1", "Y1", "Z1"))
    q.add_argument("--window", type=int, nargs=2, default=None,
                   metavar=("T0", "T1"))
    q.add_argument("--hops", type=int, default=0)
    q.add_argument("--tracks", default=None)
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_query)

    ex = sub.add_parser("export", help="export geometry or segmentation")
    ex.add_argument("--what", choices=["geometry", "segmentation"],
                    default="geometry")
    ex.add_argument("--tveg", default=None)
    ex.add_argument("--tracks", default=None)
    ex.add_argument("--z-scale", type=float, default=0.1)
    ex.add_argument("--slab-height", type=float, default=None)
    ex.add_argument("--spatial-arcs", action="store_true")
    ex.add_argument("--manifest", default=None)
    ex.add_argument("--theta", default="0.0")
    ex.add_argument("--t", type=int, default=1)
    ex.add_argument("-o", "--output", required=True)
    ex.set_defaults(func=cmd_export)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
