"""Blow-up simulation of plane-curve singularities and the marked combinatorial type.

Branches are smooth or (p, q) cusps with symbolic tangent labels.  A branch
near an infinitely near point is tracked as a local form ``y^a = c x^b``
with respect to two axes ``X = {x = 0}`` and ``Y = {y = 0}``, each either an
exceptional curve or unrelated to the configuration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence

from .graph import GraphBuilder, isomorphisms, relabel
from .plumbing import DecoratedPlumbingGraph, definiteness, intersection_form, validate_dpg


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class BranchSpec:
    component: str
    kind: str = "smooth"
    p: int = 1
    q: int = 2
    tangent: str = ""
    id: str = ""

    def __post_init__(self) -> None:
        if self.kind == "smooth":
            object.__setattr__(self, "p", 1)
            object.__setattr__(self, "q", 2)
        elif self.kind == "cusp":
            if not (2 <= self.p < self.q) or gcd(self.p, self.q) != 1:
                raise CurveError(f"cusp exponents ({self.p},{self.q}) must be coprime with 2 <= p < q")
        else:
            raise CurveError(f"unknown branch kind {self.kind!r}")

    @property
    def multiplicity(self) -> int:
        return self.p


def smooth(component: str, tangent: str, id: str = "") -> BranchSpec:
    return BranchSpec(component, "smooth", 1, 2, tangent, id)


def cusp(component: str, p: int, q: int, tangent: str, id: str = "") -> BranchSpec:
    return BranchSpec(component, "cusp", p, q, tangent, id)


@dataclass(frozen=True)
class SingularPointSpec:
    id: str
    branches: tuple[BranchSpec, ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise CurveError(f"point {self.id!r} has no branches")
        seen = set()
        for b in self.branches:
            key = (b.component, b.tangent)
            if key in seen:
                raise CurveError(f"point {self.id!r}: two branches of {b.component!r} share tangent {b.tangent!r}")
            seen.add(key)
        ids = [b.id for b in self.branches if b.id]
        if len(set(ids)) != len(ids):
            raise CurveError(f"point {self.id!r}: duplicate branch ids")

    def branch_ids(self, prefix: str = "") -> list[str]:
        return [b.id or f"{prefix}b{k + 1}" for k, b in enumerate(self.branches)]


@dataclass(frozen=True)
class CurveSpec:
    components: tuple[tuple[str, int], ...]
    points: tuple[SingularPointSpec, ...] = ()
    complete: bool = True

    def degree(self, c: str) -> int:
        return dict(self.components)[c]


@dataclass(frozen=True)
class HistoryRecord:
    """One blow-up: the center, objects through it with multiplicities, the new curve."""

    center: str
    point: str
    incident: tuple[tuple[str, int], ...]
    branches: tuple[tuple[str, int], ...]
    new: str

    def to_json(self) -> dict:
        return {
            "center": self.center,
            "point": self.point,
            "incident": [list(x) for x in self.incident],
            "branches": [list(x) for x in self.branches],
            "new": self.new,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> HistoryRecord:
        return cls(
            d["center"],
            d["point"],
            tuple((a, b) for a, b in d["incident"]),
            tuple((a, b) for a, b in d["branches"]),
            d["new"],
        )


# multiplicity sequences -------------------------------------------------------------


def multiplicity_sequence(p: int, q: int) -> list[int]:
    """Multiplicities at the blown-up points of the (p, q) branch, by Euclid on (q, p)."""
    if not (1 <= p < q) or gcd(p, q) != 1:
        raise CurveError(f"({p},{q}) must be coprime with 1 <= p < q")
    if p == 1:
        return [1]
    out: list[int] = []
    a, b = q, p
    while b:
        k, r = divmod(a, b)
        out.extend([b] * k)
        a, b = b, r
    return out


# simulation ---------------------------------------------------------------------------


@dataclass
class _Branch:
    id: str
    component: str
    a: int
    b: int | None

    @property
    def mult(self) -> int:
        return self.a if self.b is None else min(self.a, self.b)


@dataclass
class _Resolution:
    exceptional: list[str] = field(default_factory=list)
    euler: dict[str, int] = field(default_factory=dict)
    adjacent: list[tuple[str, str]] = field(default_factory=list)
    final: dict[str, str] = field(default_factory=dict)
    history: list[HistoryRecord] = field(default_factory=list)


def _needs_blow_up(X: str | None, Y: str | None, brs: list[_Branch]) -> bool:
    if not brs:
        return False
    if len(brs) >= 2:
        return True
    (br,) = brs
    if X is not None and Y is not None:
        return True
    if br.mult != 1:
        return True
    if X is not None and br.a != 1:
        return True
    if Y is not None and br.b != 1:
        return True
    return X is None and Y is None


def simulate(point: SingularPointSpec, name: Callable[[int], str], branch_ids: Sequence[str]) -> _Resolution:
    """Minimal embedded resolution making the branches smooth and transverse to a single exceptional curve."""
    res = _Resolution()
    start = [
        (_Branch(bid, b.component, b.p, b.q), b.tangent) for bid, b in zip(branch_ids, point.branches)
    ]
    centers = 0
    queue: list[tuple[str, str | None, str | None, list[_Branch], list[str] | None]] = [
        (point.id, None, None, [br for br, _ in start], [t for _, t in start])
    ]
    while queue:
        center, X, Y, brs, labels = queue.pop(0)
        if labels is None and not _needs_blow_up(X, Y, brs):
            for br in brs:
                if X is None:
                    raise CurveError(f"branch {br.id!r} ends away from the exceptional locus")
                res.final[br.id] = X
            continue
        E = name(len(res.exceptional) + 1)
        res.exceptional.append(E)
        res.euler[E] = -1
        incident: list[tuple[str, int]] = []
        for axis in (X, Y):
            if axis is not None:
                res.euler[axis] -= 1
                res.adjacent.append((axis, E))
                incident.append((axis, 1))
        if X is not None and Y is not None:
            res.adjacent = [e for e in res.adjacent if set(e) != {X, Y}]
        comp_mult: dict[str, int] = {}
        for br in brs:
            comp_mult[br.component] = comp_mult.get(br.component, 0) + br.mult
        incident.extend(comp_mult.items())
        res.history.append(
            HistoryRecord(center, point.id, tuple(incident), tuple((br.id, br.mult) for br in brs), E)
        )
        children: dict[object, tuple[str | None, str | None, list[_Branch]]] = {}
        for i, br in enumerate(brs):
            if labels is not None:
                key: object = ("t", labels[i])
                axes = (E, None)
                nb = _Branch(br.id, br.component, br.a, br.b - br.a)
            elif br.b is None or br.a == br.b:
                key = ("g", br.id)
                axes = (E, None)
                nb = _Branch(br.id, br.component, 1, None)
            elif br.a < br.b:
                key = "Y"
                axes = (E, Y)
                nb = _Branch(br.id, br.component, br.a, br.b - br.a)
            else:
                key = "X"
                axes = (X, E)
                nb = _Branch(br.id, br.component, br.a - br.b, br.b)
            children.setdefault(key, (axes[0], axes[1], []))[2].append(nb)
        for cX, cY, cb in children.values():
            centers += 1
            queue.append((f"{point.id}.{centers}", cX, cY, cb, None))
    return res


def _local_dpg(res: _Resolution, arrows: Sequence[str]) -> DecoratedPlumbingGraph:
    b = GraphBuilder()
    for v in [*res.exceptional, *arrows]:
        b.add_vertex(v)
    pos = {v: i for i, v in enumerate(res.exceptional)}
    for u, v in sorted(res.adjacent, key=lambda e: sorted((pos[e[0]], pos[e[1]]))):
        if pos[u] > pos[v]:
            u, v = v, u
        b.add_edge(u, v)
    for a in arrows:
        b.add_edge(res.final[a], a)
    G = b.build()
    return validate_dpg(
        G, arrows, {E: 0 for E in res.exceptional}, dict(res.euler), {y: 1 for y in G.darts}
    )


def resolve_singularity(point: SingularPointSpec) -> tuple[DecoratedPlumbingGraph, list[HistoryRecord]]:
    """Local decorated graph: exceptional curves plus one arrow per branch."""
    ids = point.branch_ids()
    res = simulate(point, lambda n: f"E{n}", ids)
    g = _local_dpg(res, ids)
    _assert_negative_definite(g, point.id)
    return g, res.history


def _assert_negative_definite(g: DecoratedPlumbingGraph, pid: str) -> None:
    if definiteness(intersection_form(g)) != "negative_definite":
        raise CurveError(f"exceptional form at {pid!r} is not negative definite")


def branch_delta(b: BranchSpec) -> int:
    return (b.p - 1) * (b.q - 1) // 2


def history_intersections(history: Iterable[HistoryRecord]) -> dict[frozenset[str], int]:
    """Pairwise branch intersection numbers by summing multiplicity products over shared centers."""
    out: dict[frozenset[str], int] = {}
    for rec in history:
        for (b1, m1), (b2, m2) in combinations(rec.branches, 2):
            key = frozenset((b1, b2))
            out[key] = out.get(key, 0) + m1 * m2
    return out


def delta_invariant(point: SingularPointSpec) -> int:
    """Branch deltas plus pairwise intersection numbers, read off the blow-up history."""
    ids = point.branch_ids()
    res = simulate(point, lambda n: f"E{n}", ids)
    own = sum(m * (m - 1) // 2 for rec in res.history for _, m in rec.branches)
    return own + sum(history_intersections(res.history).values())


def is_plain_crossing(point: SingularPointSpec) -> bool:
    """Two smooth transverse branches of different components (kept as a direct edge)."""
    bs = point.branches
    return (
        len(bs) == 2
        and all(b.kind == "smooth" for b in bs)
        and bs[0].tangent != bs[1].tangent
        and bs[0].component != bs[1].component
    )


# marked combinatorics --------------------------------------------------------------------


@dataclass(frozen=True)
class MarkedCombinatorics:
    graph: DecoratedPlumbingGraph
    str_vertices: tuple[str, ...]
    degrees: Mapping[str, int]
    history: tuple[HistoryRecord, ...]
    points: Mapping[str, SingularPointSpec]
    over: Mapping[str, str]
    branch_ends: Mapping[str, str]
    node_edges: Mapping[str, str]

    def branches_at(self, pid: str) -> list[tuple[str, BranchSpec]]:
        sp = self.points[pid]
        return list(zip(sp.branch_ids(f"{pid}."), sp.branches))


def build_combinatorics(spec: CurveSpec) -> MarkedCombinatorics:
    comps = [c for c, _ in spec.components]
    if len(set(comps)) != len(comps):
        raise CurveError("duplicate component id")
    deg = dict(spec.components)
    pids = [p.id for p in spec.points]
    if len(set(pids)) != len(pids):
        raise CurveError("duplicate point id")
    b = GraphBuilder()
    for c in comps:
        b.add_vertex(c)
    euler = {c: d * d for c, d in deg.items()}
    genus = {c: (d - 1) * (d - 2) // 2 for c, d in deg.items()}
    history: list[HistoryRecord] = []
    over: dict[str, str] = {}
    branch_ends: dict[str, str] = {}
    node_edges: dict[str, str] = {}
    meets: dict[frozenset[str], int] = {}
    for pt in spec.points:
        for br in pt.branches:
            if br.component not in deg:
                raise CurveError(f"point {pt.id!r}: unknown component {br.component!r}")
        ids = pt.branch_ids(f"{pt.id}.")
        if is_plain_crossing(pt):
            y = b.add_edge(pt.branches[0].component, pt.branches[1].component)
            node_edges[pt.id] = y
            branch_ends[ids[0]] = y
            branch_ends[ids[1]] = b.bar[y]
            key = frozenset(br.component for br in pt.branches)
            meets[key] = meets.get(key, 0) + 1
            continue
        res = simulate(pt, lambda n, pid=pt.id: f"{pid}.E{n}", ids)
        for E in res.exceptional:
            b.add_vertex(E)
            euler[E], genus[E] = res.euler[E], 0
            over[E] = pt.id
        pos = {v: i for i, v in enumerate(res.exceptional)}
        for u, v in sorted(res.adjacent, key=lambda e: sorted((pos[e[0]], pos[e[1]]))):
            if pos[u] > pos[v]:
                u, v = v, u
            b.add_edge(u, v)
        for bid, br in zip(ids, pt.branches):
            branch_ends[bid] = b.add_edge(br.component, res.final[bid])
        for rec in res.history:
            cm = [(x, m) for x, m in rec.incident if x in deg]
            for c, m in cm:
                euler[c] -= m * m
                genus[c] -= m * (m - 1) // 2
            for (c1, m1), (c2, m2) in combinations(cm, 2):
                key = frozenset((c1, c2))
                meets[key] = meets.get(key, 0) + m1 * m2
        history.extend(res.history)
    for c in comps:
        if genus[c] < 0:
            raise CurveError(f"component {c!r}: negative genus {genus[c]} (inconsistent specification)")
    if spec.complete:
        for c1, c2 in combinations(comps, 2):
            got = meets.get(frozenset((c1, c2)), 0)
            if got != deg[c1] * deg[c2]:
                raise CurveError(f"components {c1!r}, {c2!r} meet with total multiplicity {got}, not {deg[c1] * deg[c2]}")
    G = b.build()
    for y in G.darts:
        if G.is_loop(y):
            raise CurveError("combinatorial graph must be loop-free")
    g = validate_dpg(G, (), genus, euler, {y: 1 for y in G.darts}, require_connected=False)
    m = MarkedCombinatorics(
        g, tuple(comps), dict(deg), tuple(history), {p.id: p for p in spec.points}, over, branch_ends, node_edges
    )
    for pid in pids:
        if pid not in node_edges:
            _assert_negative_definite(local_graph_at(m, pid), pid)
    return m


def local_graph_at(m: MarkedCombinatorics, pid: str) -> DecoratedPlumbingGraph:
    """Decorated graph at a singular point: its exceptional curves plus one arrow per branch."""
    if pid not in m.points:
        raise CurveError(f"unknown point {pid!r}")
    sp = m.points[pid]
    ids = sp.branch_ids(f"{pid}.")
    if pid in m.node_edges:
        res = simulate(sp, lambda n: f"{pid}.E{n}", ids)
        return _local_dpg(res, ids)
    G = m.graph.graph
    exc = [v for v in G.vertices if m.over.get(v) == pid]
    b = GraphBuilder()
    for v in [*exc, *ids]:
        b.add_vertex(v)
    for y in G.edge_pairs():
        if m.over.get(G.origin[y]) == pid and m.over.get(G.terminus[y]) == pid:
            b.add_edge(G.origin[y], G.terminus[y], (y, G.bar[y]))
    for bid in ids:
        y = m.branch_ends[bid]
        b.add_edge(G.terminus[y], bid, (G.bar[y], y))
    L = b.build()
    return validate_dpg(L, ids, {v: 0 for v in exc}, {v: m.graph.euler[v] for v in exc}, {y: 1 for y in L.darts})


def cmb_label(m: MarkedCombinatorics) -> Callable[[str], tuple]:
    s = set(m.str_vertices)
    return lambda v: (v in s, m.graph.genus[v], m.graph.euler[v])


def cmb_equivalent(m1: MarkedCombinatorics, m2: MarkedCombinatorics):
    """First isomorphism preserving the Str marking, genus and euler weights, or ``None``."""
    return next(isomorphisms(m1.graph.graph, m2.graph.graph, vlabel1=cmb_label(m1), vlabel2=cmb_label(m2)), None)


def relabel_cmb(m: MarkedCombinatorics, vmap: Mapping[str, str], dmap: Mapping[str, str] | None = None) -> MarkedCombinatorics:
    """Rename vertices (and darts); history, marking and point data follow along."""
    G = m.graph.graph
    dm = dict(dmap or {y: y for y in G.darts})
    H = relabel(G, vmap, dm)
    g = DecoratedPlumbingGraph(
        H,
        frozenset(),
        {vmap[v]: x for v, x in m.graph.genus.items()},
        {vmap[v]: x for v, x in m.graph.euler.items()},
        {dm[y]: s for y, s in m.graph.sign.items()},
    )
    ren = lambda x: vmap.get(x, x)  # noqa: E731
    points = {
        pid: SingularPointSpec(
            sp.id,
            tuple(
                BranchSpec(ren(br.component), br.kind, br.p, br.q, br.tangent, bid)
                for bid, br in zip(sp.branch_ids(f"{pid}."), sp.branches)
            ),
        )
        for pid, sp in m.points.items()
    }
    history = tuple(
        HistoryRecord(r.center, r.point, tuple((ren(x), k) for x, k in r.incident), r.branches, ren(r.new))
        for r in m.history
    )
    return MarkedCombinatorics(
        g,
        tuple(ren(c) for c in m.str_vertices),
        {ren(c): d for c, d in m.degrees.items()},
        history,
        points,
        {ren(e): p for e, p in m.over.items()},
        {b: dm[y] for b, y in m.branch_ends.items()},
        {p: dm[y] for p, y in m.node_edges.items()},
    )


# quasi-triangular curves --------------------------------------------------------------------


@dataclass(frozen=True)
class QTType:
    parts: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def __post_init__(self) -> None:
        if len(self.parts) != 3:
            raise CurveError("a quasi-triangular type has three partitions")
        sums = {sum(p) for p in self.parts}
        if len(sums) != 1:
            raise CurveError(f"partition sums differ: {[sum(p) for p in self.parts]}")
        if any(x < 1 for p in self.parts for x in p) or any(not p for p in self.parts):
            raise CurveError("parts must be positive")
        if self.d < 2:
            raise CurveError("d must exceed 1")

    @property
    def d(self) -> int:
        return sum(self.parts[0])

    @property
    def gcds(self) -> tuple[int, int, int]:
        return tuple(_gcd_all(p) for p in self.parts)  # type: ignore[return-value]

    @property
    def s(self) -> int:
        return _gcd_all(self.gcds)

    @property
    def tuple_size(self) -> int:
        return self.s // 2 + 1


def _gcd_all(xs: Iterable[int]) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g


def parse_qt_type(text: str) -> QTType:
    """Parse ``"(2),(2),(2)"`` or ``"((4,2),(2,2,2),(6))"``."""
    groups = re.findall(r"\(([^()]*)\)", text)
    if len(groups) != 3:
        raise CurveError(f"cannot parse quasi-triangular type {text!r}")
    try:
        parts = tuple(tuple(int(x) for x in g.split(",") if x.strip()) for g in groups)
    except ValueError as exc:
        raise CurveError(f"cannot parse quasi-triangular type {text!r}") from exc
    return QTType(parts)  # type: ignore[arg-type]


def qt_curve_spec(t: QTType) -> CurveSpec:
    d = t.d
    pts = []
    for i in range(3):
        brs = []
        for k, e in enumerate(t.parts[i]):
            tag = f"t{k + 1}"
            brs.append(smooth("C", tag) if e == 1 else cusp("C", e, e + 1, tag))
        for j in range(3):
            if j != i:
                brs.append(smooth(f"L{j + 1}", f"l{j + 1}"))
        pts.append(SingularPointSpec(f"P{i + 1}", tuple(brs)))
    return CurveSpec((("C", 2 * d), ("L1", 1), ("L2", 1), ("L3", 1)), tuple(pts))


def build_quasi_triangular(t: QTType) -> MarkedCombinatorics:
    m = build_combinatorics(qt_curve_spec(t))
    d = t.d
    if m.graph.genus["C"] != (d - 1) * (d - 2) // 2:
        raise CurveError("strict transform of C has the wrong genus")
    return m


def partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of n in non-increasing order."""
    largest = n if largest is None else largest
    if n == 0:
        return [()]
    out = []
    for k in range(min(n, largest), 0, -1):
        out.extend((k, *rest) for rest in partitions(n - k, k))
    return out
