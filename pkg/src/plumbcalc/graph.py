"""Dart graphs: vertices plus involutive pairs of oriented half-edges.

A dart ``y`` runs from ``origin(y)`` to ``terminus(y)``; ``bar(y)`` is the
same edge traversed backwards.  Loops and parallel edges are allowed.
Everything iterates in insertion order so downstream output is reproducible.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Hashable, Iterable, Iterator, Mapping


class GraphError(ValueError):
    """Raised when a graph violates a structural invariant."""


@dataclass(frozen=True)
class DartGraph:
    vertices: tuple[str, ...]
    darts: tuple[str, ...]
    origin: Mapping[str, str]
    terminus: Mapping[str, str]
    bar: Mapping[str, str]
    _out: Mapping[str, tuple[str, ...]] = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex id")
        if len(set(self.darts)) != len(self.darts):
            raise GraphError("duplicate dart id")
        vs = set(self.vertices)
        for y in self.darts:
            for m, name in ((self.origin, "origin"), (self.terminus, "terminus"), (self.bar, "bar")):
                if y not in m:
                    raise GraphError(f"dart {y}: missing {name}")
            if self.origin[y] not in vs or self.terminus[y] not in vs:
                raise GraphError(f"dart {y}: endpoint is not a vertex")
            yb = self.bar[y]
            if yb == y:
                raise GraphError(f"dart {y}: involution has a fixed point")
            if yb not in self.bar or self.bar[yb] != y:
                raise GraphError(f"dart {y}: involution is not self-inverse")
            if self.origin[yb] != self.terminus[y] or self.terminus[yb] != self.origin[y]:
                raise GraphError(f"dart {y}: o(bar y) != t(y)")
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for y in self.darts:
            out[self.origin[y]].append(y)
        object.__setattr__(self, "_out", {v: tuple(ds) for v, ds in out.items()})

    # basic queries -----------------------------------------------------

    def out_darts(self, v: str) -> tuple[str, ...]:
        """Darts with origin ``v``, in stored order."""
        return self._out[v]

    def in_darts(self, v: str) -> tuple[str, ...]:
        return tuple(self.bar[y] for y in self._out[v])

    def neighbors(self, v: str) -> list[str]:
        return [self.terminus[y] for y in self._out[v]]

    def is_loop(self, y: str) -> bool:
        return self.origin[y] == self.terminus[y]

    def rep(self, y: str) -> str:
        """Representative dart of the edge pair: the lexicographically smaller id."""
        return min(y, self.bar[y])

    def edge_pairs(self) -> list[str]:
        """One representative dart per edge, in stored dart order."""
        return [y for y in self.darts if y == self.rep(y)]

    def darts_between(self, u: str, v: str) -> list[str]:
        return [y for y in self._out[u] if self.terminus[y] == v]

    def __contains__(self, v: object) -> bool:
        return v in self._out


def degree(g: DartGraph, v: str) -> int:
    """Number of darts terminating at ``v``; a loop counts twice."""
    if v not in g:
        raise GraphError(f"unknown vertex {v!r}")
    return len(g.out_darts(v))


class GraphBuilder:
    """Mutable helper that assembles a :class:`DartGraph`.

    Edges are stored as dart pairs ``(name + ".0", name + ".1")`` unless
    explicit dart ids are given; the first dart points from ``u`` to ``v``.
    """

    def __init__(self) -> None:
        self.vertices: list[str] = []
        self.darts: list[str] = []
        self.origin: dict[str, str] = {}
        self.terminus: dict[str, str] = {}
        self.bar: dict[str, str] = {}
        self._count = 0

    def add_vertex(self, v: str) -> str:
        if v in self.origin or v in set(self.vertices):
            raise GraphError(f"duplicate vertex id {v!r}")
        self.vertices.append(v)
        return v

    def add_edge(self, u: str, v: str, darts: tuple[str, str] | None = None) -> str:
        if darts is None:
            self._count += 1
            name = f"y{self._count}"
            while name + ".0" in self.bar:
                self._count += 1
                name = f"y{self._count}"
            darts = (name + ".0", name + ".1")
        y, yb = darts
        if y in self.bar or yb in self.bar or y == yb:
            raise GraphError(f"duplicate dart id {y!r}/{yb!r}")
        self.darts.extend((y, yb))
        self.origin[y], self.terminus[y] = u, v
        self.origin[yb], self.terminus[yb] = v, u
        self.bar[y], self.bar[yb] = yb, y
        return y

    def build(self) -> DartGraph:
        return DartGraph(
            tuple(self.vertices), tuple(self.darts), dict(self.origin), dict(self.terminus), dict(self.bar)
        )


def connected_components(g: DartGraph, vertices: Iterable[str] | None = None) -> list[list[str]]:
    """Components of the subgraph induced on ``vertices`` (default: all).

    Components are listed by least vertex position; each lists its vertices
    in stored order.
    """
    allowed = list(g.vertices) if vertices is None else [v for v in g.vertices if v in set(vertices)]
    allowed_set = set(allowed)
    pos = {v: i for i, v in enumerate(g.vertices)}
    seen: set[str] = set()
    comps: list[list[str]] = []
    for v in allowed:
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for w in g.neighbors(x):
                if w in allowed_set and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp, key=pos.__getitem__))
    return comps


def induced_subgraph(g: DartGraph, vertices: Iterable[str]) -> DartGraph:
    keep = set(vertices)
    vs = tuple(v for v in g.vertices if v in keep)
    ds = tuple(y for y in g.darts if g.origin[y] in keep and g.terminus[y] in keep)
    return DartGraph(
        vs,
        ds,
        {y: g.origin[y] for y in ds},
        {y: g.terminus[y] for y in ds},
        {y: g.bar[y] for y in ds},
    )


def cycle_space_basis(g: DartGraph, relative_to: Iterable[str] = ()) -> list[tuple[str, ...]]:
    """Basis of H_1(g, relative_to) as dart sequences.

    All vertices of ``relative_to`` are identified to one virtual point; each
    edge closing a cycle of the resulting spanning forest yields one basis
    element.  Absolute cycles are closed dart walks; relative ones are walks
    between two (possibly equal) vertices of ``relative_to``.
    """
    rel = [v for v in g.vertices if v in set(relative_to)]
    unknown = set(relative_to) - set(g.vertices)
    if unknown:
        raise GraphError(f"unknown vertices {sorted(unknown)}")
    star = ("*",)  # virtual point; never equal to a string id
    parent: dict[object, object] = {v: v for v in g.vertices}
    parent[star] = star

    def find(x: object) -> object:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def node(v: str) -> object:
        return star if v in rel_set else v

    rel_set = set(rel)
    tree_adj: dict[object, list[tuple[object, str | None]]] = defaultdict(list)
    for v in rel:
        tree_adj[star].append((v, None))
        tree_adj[v].append((star, None))
    cotree: list[str] = []
    for y in g.edge_pairs():
        a, b = node(g.origin[y]), node(g.terminus[y])
        ra, rb = find(a), find(b)
        if ra == rb:
            cotree.append(y)
        else:
            parent[ra] = rb
            tree_adj[g.origin[y]].append((g.terminus[y], y))
            tree_adj[g.terminus[y]].append((g.origin[y], g.bar[y]))

    def tree_path(src: object, dst: object) -> list[str | None]:
        prev: dict[object, tuple[object, str | None]] = {src: (src, None)}
        stack = [src]
        while stack:
            x = stack.pop()
            if x == dst:
                break
            for w, d in tree_adj[x]:
                if w not in prev:
                    prev[w] = (x, d)
                    stack.append(w)
        steps: list[str | None] = []
        x = dst
        while x != src:
            x, d = prev[x]
            steps.append(d)
        steps.reverse()
        return steps

    basis: list[tuple[str, ...]] = []
    for y in cotree:
        # y, then back from t(y) to o(y) through the forest
        steps = [y] + tree_path(g.terminus[y], g.origin[y])
        if None in steps:
            # passes once through the virtual point: rotate so the walk
            # starts and ends at relative vertices
            k = steps.index(None)
            rest = steps[k + 1 :] + steps[:k]
            rest = [d for d in rest if d is not None]
            basis.append(tuple(rest))
        else:
            basis.append(tuple(d for d in steps if d is not None))
    return basis


def relative_betti(g: DartGraph, relative_to: Iterable[str] = ()) -> int:
    """Rank of H_1(g, relative_to) from the Euler count of the quotient graph."""
    rel = set(relative_to)
    n_edges = len(g.edge_pairs())
    n_vertices = len(g.vertices) - len(rel) + (1 if rel else 0)
    comps = connected_components(g)
    touching = sum(1 for c in comps if rel.intersection(c))
    n_comps = len(comps) - touching + (1 if rel else 0)
    return n_edges - n_vertices + n_comps


# isomorphism search ---------------------------------------------------------


@dataclass(frozen=True)
class Isomorphism:
    vertex_map: Mapping[str, str]
    dart_map: Mapping[str, str]


def isomorphisms(
    g1: DartGraph,
    g2: DartGraph,
    vlabel1: Callable[[str], Hashable] = lambda v: None,
    vlabel2: Callable[[str], Hashable] = lambda v: None,
    dlabel1: Callable[[str], Hashable] = lambda y: None,
    dlabel2: Callable[[str], Hashable] = lambda y: None,
) -> Iterator[Isomorphism]:
    """Yield every label-preserving isomorphism ``g1 -> g2``.

    Vertex labels and (directional) dart labels must match.  The search
    backtracks over vertices in a connectivity-first order, pruning by
    degree and label counts; parallel edges with equal labels are matched
    in all possible ways so that every dart-level isomorphism appears.
    """
    if len(g1.vertices) != len(g2.vertices) or len(g1.darts) != len(g2.darts):
        return

    def signature(g: DartGraph, vl: Callable, dl: Callable, v: str) -> Hashable:
        nbr = sorted(repr((vl(g.terminus[y]), dl(y), dl(g.bar[y]), g.is_loop(y))) for y in g.out_darts(v))
        return (repr(vl(v)), len(g.out_darts(v)), tuple(nbr))

    sig1 = {v: signature(g1, vlabel1, dlabel1, v) for v in g1.vertices}
    sig2 = {v: signature(g2, vlabel2, dlabel2, v) for v in g2.vertices}
    if sorted(map(repr, sig1.values())) != sorted(map(repr, sig2.values())):
        return

    order: list[str] = []
    seen: set[str] = set()
    for comp in connected_components(g1):
        queue = [comp[0]]
        seen.add(comp[0])
        while queue:
            x = queue.pop(0)
            order.append(x)
            for w in g1.neighbors(x):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)

    def pair_labels(g: DartGraph, dl: Callable, u: str, v: str) -> list[str]:
        return sorted(repr(dl(y)) for y in g.darts_between(u, v))

    vmap: dict[str, str] = {}
    used: set[str] = set()

    def compatible(u: str, u2: str) -> bool:
        if pair_labels(g1, dlabel1, u, u) != pair_labels(g2, dlabel2, u2, u2):
            return False
        for w, w2 in vmap.items():
            if pair_labels(g1, dlabel1, u, w) != pair_labels(g2, dlabel2, u2, w2):
                return False
        return True

    def dart_maps() -> Iterator[dict[str, str]]:
        # group the edge pairs of g1 by unordered endpoint pair, each
        # oriented away from the earlier endpoint
        groups: dict[tuple[str, str], list[str]] = defaultdict(list)
        pos = {v: i for i, v in enumerate(g1.vertices)}
        for y in g1.edge_pairs():
            a, b = g1.origin[y], g1.terminus[y]
            if pos[a] > pos[b]:
                y, a, b = g1.bar[y], b, a
            groups[(a, b)].append(y)
        choices: list[list[list[tuple[str, str]]]] = []
        for (a, b), ys in groups.items():
            a2, b2 = vmap[a], vmap[b]
            if a == b:
                targets = [y2 for y2 in g2.darts_between(a2, a2) if y2 == g2.rep(y2)]
            else:
                targets = g2.darts_between(a2, b2)
            options: list[list[tuple[str, str]]] = []
            for perm in permutations(targets):
                for flips in product((False, True), repeat=len(ys) if a == b else 0):
                    pairs: list[tuple[str, str]] = []
                    ok = True
                    for i, (y, y2) in enumerate(zip(ys, perm)):
                        if a == b and flips[i]:
                            y2 = g2.bar[y2]
                        if dlabel1(y) != dlabel2(y2) or dlabel1(g1.bar[y]) != dlabel2(g2.bar[y2]):
                            ok = False
                            break
                        pairs.append((y, y2))
                    if ok:
                        options.append(pairs)
            if not options:
                return
            choices.append(options)
        for combo in product(*choices):
            dmap: dict[str, str] = {}
            for pairs in combo:
                for y, y2 in pairs:
                    dmap[y] = y2
                    dmap[g1.bar[y]] = g2.bar[y2]
            yield dmap

    def search(i: int) -> Iterator[Isomorphism]:
        if i == len(order):
            for dmap in dart_maps():
                yield Isomorphism(dict(vmap), dmap)
            return
        u = order[i]
        for u2 in g2.vertices:
            if u2 in used or sig1[u] != sig2[u2] or not compatible(u, u2):
                continue
            vmap[u] = u2
            used.add(u2)
            yield from search(i + 1)
            del vmap[u]
            used.discard(u2)

    yield from search(0)


def find_isomorphism(g1: DartGraph, g2: DartGraph, **labels: Callable) -> Isomorphism | None:
    return next(isomorphisms(g1, g2, **labels), None)


def relabel(g: DartGraph, vmap: Mapping[str, str], dmap: Mapping[str, str] | None = None) -> DartGraph:
    """Rename vertices (and optionally darts); stored order is preserved."""
    dm = dmap or {y: y for y in g.darts}
    return DartGraph(
        tuple(vmap[v] for v in g.vertices),
        tuple(dm[y] for y in g.darts),
        {dm[y]: vmap[g.origin[y]] for y in g.darts},
        {dm[y]: vmap[g.terminus[y]] for y in g.darts},
        {dm[y]: dm[g.bar[y]] for y in g.darts},
    )


def graph_to_json(g: DartGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"dart": y, "bar": g.bar[y], "from": g.origin[y], "to": g.terminus[y]} for y in g.edge_pairs()],
    }


def graph_from_json(doc: Mapping) -> DartGraph:
    b = GraphBuilder()
    for v in doc["vertices"]:
        b.add_vertex(v)
    for e in doc["edges"]:
        b.add_edge(e["from"], e["to"], (e["dart"], e["bar"]))
    return b.build()
