"""Temporal arcs between consecutive extremum graphs and event detection.

Correspondence scores combine four normalized components: persistence
difference, function-value difference, Euclidean distance, and
neighborhood-contribution difference. Each maximum keeps its two
best-scoring targets; a statistical filter drops outliers; z-shaped
configurations (an arc whose source splits while its target merges) are
removed greedily by score.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .exgraph import ExtremumGraph
from .morse import CriticalPoint


@dataclass(frozen=True)
class ScoreWeights:
    """Weights of the four score components; must sum to 1."""

    G: float = 0.25  # persistence
    L1: float = 0.25  # function value
    L2: float = 0.25  # distance
    L3: float = 0.25  # neighborhood

    def __post_init__(self):
        w = (self.G, self.L1, self.L2, self.L3)
        if any(x < 0 for x in w):
            raise ValueError(f"weights must be >= 0, got {w}")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(w)!r}")


@dataclass(frozen=True, order=True)
class ScoreTuple:
    """Candidate correspondence (m0 at t) -> (m1 at t+1) with score s."""

    m0: int
    m1: int
    s: float


@dataclass
class EventSets:
    """Topological events; merge/split records carry their participants."""

    merges: list[dict] = dfield(default_factory=list)
    splits: list[dict] = dfield(default_factory=list)
    deletions: list[tuple[int, int]] = dfield(default_factory=list)
    generations: list[tuple[int, int]] = dfield(default_factory=list)

    def extend(self, other: "EventSets") -> None:
        self.merges.extend(other.merges)
        self.splits.extend(other.splits)
        self.deletions.extend(other.deletions)
        self.generations.extend(other.generations)


@dataclass
class FilterMeta:
    mu: float
    sigma: float
    tau: float


@dataclass
class Tveg:
    """All per-step graphs plus temporal arcs and cumulative events."""

    graphs: list[ExtremumGraph]
    arcs_by_pair: dict[int, list[ScoreTuple]]
    events: EventSets
    weights: ScoreWeights
    filter_meta: dict[int, FilterMeta]
    theta: float = 0.0

    def all_arcs(self) -> list[ScoreTuple]:
        out = []
        for t in sorted(self.arcs_by_pair):
            out.extend(self.arcs_by_pair[t])
        return out

    def graph_at(self, t: int) -> ExtremumGraph:
        for g in self.graphs:
            if g.t == t:
                return g
        raise KeyError(f"no graph at time {t}")


def _attr_arrays(maxima: list[CriticalPoint]):
    pers = np.array([m.pers for m in maxima])
    val = np.array([m.value for m in maxima])
    pos = np.array([m.coords for m in maxima])
    eta = np.array([m.eta for m in maxima])
    return pers, val, pos, eta


def normalize_components(
    M0: list[CriticalPoint], M1: list[CriticalPoint]
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Component matrices P, J, D, N of shape (|M0|, |M1|), scaled to [0, 1].

    Each raw matrix is divided by its maximum over all candidate pairs;
    an all-equal component (max 0) normalizes to zeros.
    """
    if not M0 or not M1:
        raise ValueError("both maxima sets must be non-empty")
    p0, v0, x0, e0 = _attr_arrays(M0)
    p1, v1, x1, e1 = _attr_arrays(M1)
    P = np.abs(p0[:, None] - p1[None, :])
    J = np.abs(v0[:, None] - v1[None, :])
    D = np.linalg.norm(x0[:, None, :] - x1[None, :, :], axis=2)
    N = np.abs(e0[:, None] - e1[None, :])
    out = []
    for comp in (P, J, D, N):
        peak = comp.max()
        out.append(comp / peak if peak > 0 else np.zeros_like(comp))
    return tuple(out)


def compute_scores(
    M0: list[CriticalPoint], M1: list[CriticalPoint], w: ScoreWeights
) -> list[ScoreTuple]:
    """Two lowest-scoring targets per source (one if |M1| == 1).

    score = G*P + L1*J + L2*D + L3*N over the normalized components.
    Ties break by (score, target id) ascending. Output is sorted by
    (m0, m1) for determinism.
    """
    P, J, D, N = normalize_components(M0, M1)
    S = w.G * P + w.L1 * J + w.L2 * D + w.L3 * N
    ids1 = [m.id for m in M1]
    out = []
    for i, m0 in enumerate(M0):
        ranked = sorted(zip(S[i], ids1), key=lambda p: (p[0], p[1]))
        for s, mid in ranked[:2]:
            out.append(ScoreTuple(m0=m0.id, m1=mid, s=float(s)))
    return sorted(out, key=lambda a: (a.m0, a.m1))


def filter_scores(S: list[ScoreTuple]) -> tuple[list[ScoreTuple], FilterMeta]:
    """Drop tuples with score >= mu + sigma (population std).

    If sigma == 0 every score ties and nothing is an outlier; the set is
    returned unchanged.
    """
    if not S:
        return [], FilterMeta(mu=0.0, sigma=0.0, tau=0.0)
    ys = np.array([a.s for a in S])
    mu = float(ys.mean())
    # all-equal scores must yield exactly zero spread; the mean can pick
    # up rounding noise that would otherwise leak into sigma
    sigma = 0.0 if ys.min() == ys.max() else float(ys.std())
    tau = mu + sigma
    meta = FilterMeta(mu=mu, sigma=sigma, tau=tau)
    if sigma == 0.0:
        return list(S), meta
    return [a for a in S if a.s < tau], meta


def detect_events(
    arcs: list[ScoreTuple], M0_ids: list[int], M1_ids: list[int], t: int
) -> EventSets:
    """Classify events from arc degrees between steps t and t+1.

    merge: target with in-degree > 1; split: source with out-degree > 1;
    deletion: source-side maximum with out-degree 0 (recorded at t);
    generation: target-side maximum with in-degree 0 (recorded at t+1).
    """
    out_deg: dict[int, list[int]] = {}
    in_deg: dict[int, list[int]] = {}
    for a in arcs:
        out_deg.setdefault(a.m0, []).append(a.m1)
        in_deg.setdefault(a.m1, []).append(a.m0)
    ev = EventSets()
    for m1 in sorted(in_deg):
        srcs = sorted(in_deg[m1])
        if len(srcs) > 1:
            ev.merges.append({"node": m1, "time": t + 1, "participants": srcs})
    for m0 in sorted(out_deg):
        dsts = sorted(out_deg[m0])
        if len(dsts) > 1:
            ev.splits.append({"node": m0, "time": t, "participants": dsts})
    ev.deletions = [(m, t) for m in sorted(M0_ids) if m not in out_deg]
    ev.generations = [(m, t + 1) for m in sorted(M1_ids) if m not in in_deg]
    return ev


def remove_z_configurations(arcs: list[ScoreTuple]) -> list[ScoreTuple]:
    """Greedily delete arcs that sit in a split and a merge at once.

    Repeat until fixpoint: among arcs whose source has out-degree >= 2
    and whose target has in-degree >= 2, remove the one with the
    greatest score (ties: greater source id, then greater target id).
    """
    arcs = list(arcs)
    while True:
        out_deg: dict[int, int] = {}
        in_deg: dict[int, int] = {}
        for a in arcs:
            out_deg[a.m0] = out_deg.get(a.m0, 0) + 1
            in_deg[a.m1] = in_deg.get(a.m1, 0) + 1
        offenders = [a for a in arcs if out_deg[a.m0] >= 2 and in_deg[a.m1] >= 2]
        if not offenders:
            return sorted(arcs, key=lambda a: (a.m0, a.m1))
        worst = max(offenders, key=lambda a: (a.s, a.m0, a.m1))
        arcs.remove(worst)


def link_pair(
    g0: ExtremumGraph, g1: ExtremumGraph, w: ScoreWeights
) -> tuple[list[ScoreTuple], EventSets, FilterMeta]:
    """Full correspondence computation for one consecutive pair."""
    M0, M1 = g0.maxima, g1.maxima
    ids0 = [m.id for m in M0]
    ids1 = [m.id for m in M1]
    if not M0 or not M1:
        ev = detect_events([], ids0, ids1, g0.t)
        return [], ev, FilterMeta(mu=0.0, sigma=0.0, tau=0.0)
    S = compute_scores(M0, M1, w)
    S, meta = filter_scores(S)
    S = remove_z_configurations(S)
    ev = detect_events(S, ids0, ids1, g0.t)
    return S, ev, meta


def temporal_arcs(graphs: list[ExtremumGraph], w: ScoreWeights) -> Tveg:
    """Link every consecutive pair of extremum graphs into a Tveg.

    Pairs are independent of each other; events are re-detected on the
    surviving arcs after z-removal, which yields the same final sets as
    incremental updates.
    """
    if len(graphs) < 2:
        raise ValueError("need at least 2 time steps")
    for a, b in zip(graphs, graphs[1:]):
        if b.t != a.t + 1:
            raise ValueError("graphs must be contiguous in t")
    arcs_by_pair: dict[int, list[ScoreTuple]] = {}
    filter_meta: dict[int, FilterMeta] = {}
    events = EventSets()
    for g0, g1 in zip(graphs, graphs[1:]):
        S, ev, meta = link_pair(g0, g1, w)
        arcs_by_pair[g0.t] = S
        filter_meta[g0.t] = meta
        events.extend(ev)
    return Tveg(
        graphs=list(graphs),
        arcs_by_pair=arcs_by_pair,
        events=events,
        weights=w,
        filter_meta=filter_meta,
    )
