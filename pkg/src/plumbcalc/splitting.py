"""Splitting invariants of a subcurve under a Galois cover, read off the lifted graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .curves import history_intersections
from .gcover import GCombinatorics
from .graph import DartGraph, GraphBuilder, connected_components, induced_subgraph


class SplittingError(ValueError):
    pass


def branch_locus(gc: GCombinatorics, meridian: Mapping[str, int]) -> list[str]:
    """Str vertices with nontrivial meridian."""
    return [c for c in gc.base.str_vertices if meridian[c] != 0]


@dataclass(frozen=True)
class SubCombinatorics:
    gc: GCombinatorics
    components: tuple[str, ...]
    branch: tuple[str, ...]
    base_vertices: tuple[str, ...]
    graph: DartGraph

    @property
    def lifted_str(self) -> list[str]:
        comps = set(self.components)
        return [w for w in self.graph.vertices if self.gc.pr[w] in comps]


def _singular_for(m, pid: str, comps: set[str]) -> bool:
    brs = [b for _, b in m.branches_at(pid) if b.component in comps]
    return len(brs) >= 2 or any(b.kind == "cusp" for b in brs)


def subcombinatorics(gc: GCombinatorics, components: Iterable[str], branch: Iterable[str]) -> SubCombinatorics:
    comps, bl = tuple(components), tuple(branch)
    if set(comps) & set(bl):
        raise SplittingError("the subcurve shares a component with the branch locus")
    m = gc.base
    for c in comps:
        if c not in m.str_vertices:
            raise SplittingError(f"{c!r} is not a component")
    cs, bs = set(comps), set(bl)
    keep_points = {
        pid
        for pid in m.points
        if _singular_for(m, pid, cs) and not any(b.component in bs for _, b in m.branches_at(pid))
    }
    base = [v for v in m.graph.graph.vertices if v in cs or m.over.get(v) in keep_points]
    keep = set(base)
    lifted = [w for w in gc.graph.vertices if gc.pr[w] in keep]
    return SubCombinatorics(gc, comps, bl, tuple(base), induced_subgraph(gc.graph, lifted))


def splitting_number(gc: GCombinatorics, component: str, branch: Iterable[str] = ()) -> int:
    if component in set(branch):
        raise SplittingError(f"{component!r} lies in the branch locus")
    fiber = gc.fiber(component)
    stab = gc.stabilizer(fiber[0])
    assert len(fiber) * len(stab) == gc.group.order, "fiber size must be the index of the stabilizer"
    return len(fiber)


def connected_number(sc: SubCombinatorics) -> int:
    return len(connected_components(sc.graph))


def _clusters(sc: SubCombinatorics) -> list[list[str]]:
    comps = set(sc.components)
    inner = [w for w in sc.graph.vertices if sc.gc.pr[w] not in comps]
    return connected_components(sc.graph, inner)


def splitting_type(gc: GCombinatorics, c1: str, c2: str, branch: Iterable[str]) -> tuple[int, int]:
    """Unordered pair (C1+ . C2+, C1+ . C2-) for a double cover, largest first."""
    if gc.group.order != 2:
        raise SplittingError("splitting type is defined for double covers only")
    bl = tuple(branch)
    for c in (c1, c2):
        if len(gc.fiber(c)) != 2:
            raise SplittingError(f"{c!r} does not split")
    m = gc.base
    for pid in m.points:
        comps_at = {b.component for _, b in m.branches_at(pid)}
        if {c1, c2} <= comps_at and comps_at & set(bl):
            raise SplittingError(f"{c1!r} and {c2!r} meet on the branch locus at {pid!r}")
    sc = subcombinatorics(gc, (c1, c2), bl)
    cluster_of = {w: i for i, K in enumerate(_clusters(sc)) for w in K}
    G = gc.graph
    pair: dict[tuple[str, str], int] = {}

    def add(a: str, b: str, k: int) -> None:
        if gc.pr[a] == c2:
            a, b = b, a
        pair[(a, b)] = pair.get((a, b), 0) + k

    for pid, y in m.node_edges.items():
        ends = {m.graph.graph.origin[y], m.graph.graph.terminus[y]}
        if ends == {c1, c2}:
            for z in gc.dart_fiber(y):
                add(G.origin[z], G.terminus[z], 1)
    inter = history_intersections(m.history)
    for pid in m.points:
        if pid in m.node_edges:
            continue
        brs = m.branches_at(pid)
        b1 = [bid for bid, b in brs if b.component == c1]
        b2 = [bid for bid, b in brs if b.component == c2]
        for x1 in b1:
            for x2 in b2:
                k = inter.get(frozenset((x1, x2)), 0)
                for z1 in gc.dart_fiber(m.branch_ends[x1]):
                    for z2 in gc.dart_fiber(m.branch_ends[x2]):
                        t1, t2 = G.terminus[z1], G.terminus[z2]
                        if t1 in cluster_of and cluster_of.get(t1) == cluster_of.get(t2):
                            add(G.origin[z1], G.origin[z2], k)
    plus1 = gc.fiber(c1)[0]
    l2 = gc.fiber(c2)
    m1, m2 = pair.get((plus1, l2[0]), 0), pair.get((plus1, l2[1]), 0)
    total = m.degrees[c1] * m.degrees[c2]
    assert m1 + m2 == total, f"splitting type {m1}+{m2} does not add up to {total}"
    return (max(m1, m2), min(m1, m2))


@dataclass(frozen=True)
class SplittingGraph:
    graph: DartGraph
    part1: tuple[str, ...]
    part2: tuple[str, ...]
    action: Mapping[int, Mapping[str, str]]
    pr: Mapping[str, str]


def splitting_graph(sc: SubCombinatorics) -> SplittingGraph:
    gc = sc.gc
    v1 = sc.lifted_str
    clusters = _clusters(sc)
    cl_name = {}
    for K in clusters:
        for w in K:
            cl_name[w] = f"[{K[0]}]"
    v1set = set(v1)
    stst = [z for z in sc.graph.edge_pairs() if sc.graph.origin[z] in v1set and sc.graph.terminus[z] in v1set]
    v2 = [f"[{K[0]}]" for K in clusters] + [f"[{z}]" for z in stst]
    pr: dict[str, str] = {w: gc.pr[w] for w in v1}
    for K in clusters:
        pr[f"[{K[0]}]"] = gc.pr[K[0]]
    for z in stst:
        pr[f"[{z}]"] = gc.pr[z]
    b = GraphBuilder()
    for v in [*v1, *v2]:
        b.add_vertex(v)
    edges: set[tuple[str, str]] = set()
    for z in stst:
        for end in (sc.graph.origin[z], sc.graph.terminus[z]):
            edges.add((end, f"[{z}]"))
    for z in sc.graph.darts:
        o, t = sc.graph.origin[z], sc.graph.terminus[z]
        if o in v1set and t in cl_name:
            edges.add((o, cl_name[t]))
    order = {v: i for i, v in enumerate([*v1, *v2])}
    for k, (u, w) in enumerate(sorted(edges, key=lambda e: (order[e[0]], order[e[1]]))):
        b.add_edge(u, w, (f"s{k + 1}.0", f"s{k + 1}.1"))
    S = b.build()
    action: dict[int, dict[str, str]] = {}
    for g in gc.group.elements:
        act = {w: gc.action[g][w] for w in v1}
        for K in clusters:
            act[f"[{K[0]}]"] = cl_name[gc.action[g][K[0]]]
        for z in stst:
            gz = gc.action[g][z]
            act[f"[{z}]"] = f"[{sc.graph.rep(gz)}]"
        action[g] = act
    return SplittingGraph(S, tuple(v1), tuple(v2), action, pr)
