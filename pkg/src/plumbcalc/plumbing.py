"""Decorated and modified plumbing graphs, chains, intersection forms, signs."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from .graph import (
    DartGraph,
    connected_components,
    cycle_space_basis,
    degree,
    induced_subgraph,
    isomorphisms,
)

Matrix = tuple[tuple[int, int], tuple[int, int]]
J: Matrix = ((0, 1), (1, 0))


class PlumbingError(ValueError):
    pass


@dataclass(frozen=True)
class DecoratedPlumbingGraph:
    """A plumbing graph with arrowhead (boundary) vertices.

    ``genus`` and ``euler`` are defined on interior vertices only; ``sign``
    is stored per dart and is constant on each edge pair.
    """

    graph: DartGraph
    boundary: frozenset[str]
    genus: Mapping[str, int]
    euler: Mapping[str, int]
    sign: Mapping[str, int]

    @property
    def interior(self) -> list[str]:
        return [v for v in self.graph.vertices if v not in self.boundary]

    def is_boundary(self, v: str) -> bool:
        return v in self.boundary


def validate_dpg(
    graph: DartGraph,
    boundary: Iterable[str],
    genus: Mapping[str, int],
    euler: Mapping[str, int],
    sign: Mapping[str, int],
    *,
    require_connected: bool = True,
) -> DecoratedPlumbingGraph:
    """Check every structural rule and return the validated graph."""
    bd = frozenset(boundary)
    for v in bd:
        if v not in graph:
            raise PlumbingError(f"boundary vertex {v!r} is not a vertex")
    for v in graph.vertices:
        if v in bd:
            if degree(graph, v) > 1:
                raise PlumbingError(f"boundary vertex {v!r} has degree {degree(graph, v)} > 1")
        else:
            if v not in genus or v not in euler:
                raise PlumbingError(f"interior vertex {v!r} lacks genus or euler weight")
            if not isinstance(genus[v], int) or not isinstance(euler[v], int):
                raise PlumbingError(f"interior vertex {v!r}: weights must be integers")
    for y in graph.darts:
        if y not in sign:
            raise PlumbingError(f"dart {y!r} has no sign")
        if sign[y] not in (1, -1):
            raise PlumbingError(f"dart {y!r}: sign must be +1 or -1")
        if sign[y] != sign[graph.bar[y]]:
            raise PlumbingError(f"dart {y!r}: sign differs from its reverse")
    if require_connected and len(connected_components(graph)) > 1:
        raise PlumbingError("graph is not connected")
    interior = [v for v in graph.vertices if v not in bd]
    return DecoratedPlumbingGraph(
        graph,
        bd,
        {v: genus[v] for v in interior},
        {v: euler[v] for v in interior},
        {y: sign[y] for y in graph.darts},
    )


# chains ----------------------------------------------------------------------


@dataclass(frozen=True)
class Chain:
    """A maximal chain.

    ``darts`` walks the chain: ``darts[0]`` enters ``vertices[0]`` from the
    start anchor and ``darts[-1]`` leaves the last vertex towards the end
    anchor.  An open end (a leaf of a dangling chain) has anchor ``None`` and
    contributes no dart.  A length-0 chain is a single edge.
    """

    vertices: tuple[str, ...]
    darts: tuple[str, ...]
    start: str | None
    end: str | None
    boundary_incident: bool
    cyclic: bool = False

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def open(self) -> bool:
        return self.start is None or self.end is None


def is_chain_vertex(g: DecoratedPlumbingGraph, v: str) -> bool:
    """Interior genus-0 vertex of degree 2 (no loop), or a genus-0 leaf.

    Leaves are the free ends of dangling chains; an isolated vertex is not a
    chain vertex.
    """
    if v in g.boundary or g.genus[v] != 0:
        return False
    out = g.graph.out_darts(v)
    if len(out) == 2:
        return not any(g.graph.is_loop(y) for y in out)
    return len(out) == 1


def find_maximal_chains(g: DecoratedPlumbingGraph) -> list[Chain]:
    G = g.graph
    cv = {v for v in G.vertices if is_chain_vertex(g, v)}
    pos = {v: i for i, v in enumerate(G.vertices)}
    chains: list[Chain] = []
    for comp in connected_components(G, cv):
        inner = [y for v in comp for y in G.out_darts(v) if G.terminus[y] in cv]
        closed = all(G.terminus[y] in cv for v in comp for y in G.out_darts(v))
        if closed and len(inner) == 2 * len(comp) and len(comp) >= 1:
            # a pure cycle (every vertex has degree 2 inside the component)
            start = comp[0]
            walk, darts = [start], []
            prev_dart = None
            cur = start
            while True:
                nxt = [y for y in G.out_darts(cur) if prev_dart is None or y != G.bar[prev_dart]]
                y = min(nxt, key=lambda d: (pos[G.terminus[d]], d))
                darts.append(y)
                cur, prev_dart = G.terminus[y], y
                if cur == start:
                    break
                walk.append(cur)
            chains.append(Chain(tuple(walk), tuple(darts), None, None, False, cyclic=True))
            continue
        ends = [v for v in comp if sum(1 for y in G.out_darts(v) if G.terminus[y] in cv) <= 1]
        first = min(ends, key=pos.__getitem__)
        chains.append(_walk_chain(g, first, cv))
    for y in G.edge_pairs():
        a, b = G.origin[y], G.terminus[y]
        if a not in cv and b not in cv:
            if pos[a] > pos[b]:
                y, a, b = G.bar[y], b, a
            chains.append(Chain((), (y,), a, b, a in g.boundary or b in g.boundary))
    chains.sort(key=lambda c: (pos[c.vertices[0]] if c.vertices else pos[c.start], 0 if c.vertices else 1, c.darts))
    return chains


def _walk_chain(g: DecoratedPlumbingGraph, first: str, cv: set[str]) -> Chain:
    G = g.graph
    pos = {v: i for i, v in enumerate(G.vertices)}
    outside = [y for y in G.out_darts(first) if G.terminus[y] not in cv]
    verts = [first]
    darts: list[str] = []
    start = None
    if outside:
        ext = min(outside, key=lambda d: (pos[G.terminus[d]], d))
        darts.append(G.bar[ext])
        start = G.terminus[ext]
    used = set(darts) | {G.bar[d] for d in darts}
    cur = first
    end = None
    while True:
        nxt = [y for y in G.out_darts(cur) if y not in used]
        if not nxt:
            break
        nxt.sort(key=lambda d: (G.terminus[d] not in cv, pos[G.terminus[d]], d))
        y = nxt[0]
        used.update((y, G.bar[y]))
        darts.append(y)
        w = G.terminus[y]
        if w in cv and w not in verts:
            verts.append(w)
            cur = w
        else:
            end = w
            break
    bi = (start is not None and start in g.boundary) or (end is not None and end in g.boundary)
    return Chain(tuple(verts), tuple(darts), start, end, bi)


def chain_string(g: DecoratedPlumbingGraph, c: Chain) -> list[int]:
    """Negated euler weights along the chain, i.e. the continued-fraction entries."""
    return [-g.euler[v] for v in c.vertices]


# intersection form -------------------------------------------------------------


@dataclass(frozen=True)
class IntersectionForm:
    vertices: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]


def intersection_form(g: DecoratedPlumbingGraph) -> IntersectionForm:
    G = g.graph
    verts = tuple(g.interior)
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    a = [[0] * n for _ in range(n)]
    for v in verts:
        a[idx[v]][idx[v]] += g.euler[v]
    for y in G.darts:
        o, t = G.origin[y], G.terminus[y]
        if o in idx and t in idx:
            a[idx[o]][idx[t]] += 1
    return IntersectionForm(verts, tuple(tuple(r) for r in a))


def leading_minors(m: Sequence[Sequence[int]]) -> list[int]:
    """Leading principal minors D_1..D_n by fraction-free elimination.

    Stops early (returning a shorter list ending in 0) when a minor vanishes.
    """
    n = len(m)
    a = [list(r) for r in m]
    minors: list[int] = []
    prev = 1
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            return minors
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) // prev
        prev = piv
    return minors


def determinant(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    a = [[Fraction(x) for x in r] for r in m]
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return int(det)


def definiteness(S: IntersectionForm | Sequence[Sequence[int]]) -> str:
    """Classify a symmetric integer matrix exactly.

    Leading principal minors are taken after a symmetric permutation that
    eliminates low-degree rows first (leaves of a tree cause no fill-in);
    their ratios are the pivots of the elimination.  A zero pivot falls back
    to the minors in stored order and, failing that, to the determinant.
    """
    m = S.matrix if isinstance(S, IntersectionForm) else S
    rows = {i: {j: x for j, x in enumerate(r) if x and j != i} for i, r in enumerate(m)}
    diag = {i: r[i] for i, r in enumerate(m)}
    kind = classify_sparse(diag, rows)
    if kind is not None:
        return kind
    n = len(m)
    minors = leading_minors(m)
    if len(minors) == n and all(d > 0 for d in minors):
        return "positive_definite"
    if len(minors) == n and all((-1) ** (k + 1) * d > 0 for k, d in enumerate(minors)):
        return "negative_definite"
    return "degenerate" if determinant(m) == 0 else "indefinite"


def classify_sparse(diag: Mapping[int, int], rows: Mapping[int, Mapping[int, int]]) -> str | None:
    """Pivot signs of symmetric elimination in minimum-degree order.

    ``rows[i]`` holds the nonzero off-diagonal entries of row ``i``.  Returns
    ``None`` when a zero pivot appears (the caller must decide then).
    Rationals are kept as reduced (numerator, positive denominator) pairs.
    """
    d = {i: (x, 1) for i, x in diag.items()}
    a = {i: {j: (x, 1) for j, x in r.items()} for i, r in rows.items()}
    signs = set()
    heap = [(len(r), i) for i, r in a.items()]
    heapq.heapify(heap)
    while heap:
        deg, k = heapq.heappop(heap)
        if k not in a or deg != len(a[k]):
            continue
        pn, pd = d[k]
        if pn == 0:
            return None
        signs.add(pn > 0)
        nb = a.pop(k)
        for i, (xn, xd) in nb.items():
            del a[i][k]
            for j, (zn, zd) in nb.items():
                # entry(i, j) -= x * z / p
                qn, qd = xn * zn * pd, xd * zd * pn
                if qd < 0:
                    qn, qd = -qn, -qd
                cur = d[i] if j == i else a[i].get(j, (0, 1))
                n_, d_ = cur[0] * qd - qn * cur[1], cur[1] * qd
                g = gcd(n_, d_)
                new = (n_ // g, d_ // g)
                if j == i:
                    d[i] = new
                elif new[0]:
                    a[i][j] = new
                else:
                    a[i].pop(j, None)
            heapq.heappush(heap, (len(a[i]), i))
    if signs == {True}:
        return "positive_definite"
    if signs == {False} or not signs:
        return "negative_definite"
    return "indefinite"


# epsilon class --------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonClass:
    """Values of the sign homomorphism on a basis of relative cycles."""

    basis: tuple[tuple[str, ...], ...]
    values: tuple[int, ...]

    def as_dict(self) -> dict[tuple[str, ...], int]:
        return dict(zip(self.basis, self.values))


def star_vertices(g: DecoratedPlumbingGraph) -> list[str]:
    return [v for v in g.graph.vertices if v in g.boundary or g.genus[v] >= 0]


def sign_parity(g: DecoratedPlumbingGraph, cycle: Iterable[str]) -> int:
    return sum(1 for y in cycle if g.sign[y] < 0) % 2


def epsilon_class(g: DecoratedPlumbingGraph) -> EpsilonClass:
    sub = induced_subgraph(g.graph, star_vertices(g))
    basis = cycle_space_basis(sub, [v for v in sub.vertices if v in g.boundary])
    return EpsilonClass(tuple(basis), tuple(sign_parity(g, c) for c in basis))


def edge_vector(g: DartGraph, walk: Iterable[str]) -> frozenset[str]:
    """Mod-2 edge support of a walk (edge pairs named by representative)."""
    acc: set[str] = set()
    for y in walk:
        acc ^= {g.rep(y)}
    return frozenset(acc)


def same_dpg(g1: DecoratedPlumbingGraph, g2: DecoratedPlumbingGraph) -> bool:
    """Equality up to relabeling, comparing signs only through the epsilon class."""
    return dpg_isomorphism(g1, g2) is not None


def dpg_isomorphism(g1: DecoratedPlumbingGraph, g2: DecoratedPlumbingGraph):
    def vl(g: DecoratedPlumbingGraph):
        return lambda v: ("b",) if v in g.boundary else ("i", g.genus[v], g.euler[v])

    eps1 = epsilon_class(g1)
    for iso in isomorphisms(g1.graph, g2.graph, vlabel1=vl(g1), vlabel2=vl(g2)):
        if all(sign_parity(g2, [iso.dart_map[y] for y in c]) == val for c, val in zip(eps1.basis, eps1.values)):
            return iso
    return None


# modified plumbing graphs -----------------------------------------------------


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def mat_det(a: Matrix) -> int:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def rational_inverse_product(a: Matrix, b: Matrix) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """a^{-1} b over the rationals."""
    d = Fraction(mat_det(a))
    inv = ((a[1][1] / d, -a[0][1] / d), (-a[1][0] / d, a[0][0] / d))
    return (
        (inv[0][0] * b[0][0] + inv[0][1] * b[1][0], inv[0][0] * b[0][1] + inv[0][1] * b[1][1]),
        (inv[1][0] * b[0][0] + inv[1][1] * b[1][0], inv[1][0] * b[0][1] + inv[1][1] * b[1][1]),
    )


@dataclass(frozen=True)
class ModifiedPlumbingGraph:
    base: DecoratedPlumbingGraph
    m: Mapping[str, Matrix]


def validate_mpg(base: DecoratedPlumbingGraph, m: Mapping[str, Matrix]) -> ModifiedPlumbingGraph:
    if base.boundary:
        raise PlumbingError("modified plumbing graphs carry no boundary vertices")
    for y in base.graph.darts:
        if base.sign[y] != 1:
            raise PlumbingError(f"dart {y!r}: modified plumbing graphs have only (+)-edges")
        if y not in m:
            raise PlumbingError(f"dart {y!r} has no matrix")
        (c, z), (b, a) = m[y]
        if z != 0 or not (0 <= b < a) or c <= 0:
            raise PlumbingError(f"dart {y!r}: matrix {m[y]} is not of the form [[c,0],[b,a]] with 0<=b<a, c>0")
    mpg = ModifiedPlumbingGraph(base, {y: m[y] for y in base.graph.darts})
    for y in base.graph.darts:
        gluing_matrix(mpg, y)
    return mpg


def gluing_matrix(g: ModifiedPlumbingGraph, y: str) -> Matrix:
    """R_y = m(y)^{-1} J m(bar y); integral with determinant -1."""
    yb = g.base.graph.bar[y]
    r = rational_inverse_product(g.m[y], mat_mul(J, g.m[yb]))
    if any(x.denominator != 1 for row in r for x in row):
        raise PlumbingError(f"dart {y!r}: lattices of m(y) and J m(bar y) differ")
    R: Matrix = ((int(r[0][0]), int(r[0][1])), (int(r[1][0]), int(r[1][1])))
    if mat_det(R) != -1:
        raise PlumbingError(f"dart {y!r}: lattices of m(y) and J m(bar y) differ")
    return R


# W-graphs -----------------------------------------------------------------------


@dataclass(frozen=True)
class WGraph:
    """Weighted graph of a reduced graph structure.

    ``weights[v]`` is ``(g, r, s)`` for a Seifert piece and ``None`` for an
    unweighted (solid torus) vertex.  ``alpha``/``beta`` are per dart and
    ``eps`` is the per-dart sign whose parity along cycles gives the
    epsilon class.
    """

    graph: DartGraph
    weights: Mapping[str, tuple[int, int, int] | None]
    alpha: Mapping[str, int]
    beta: Mapping[str, int]
    eps: Mapping[str, int] = field(default_factory=dict)


def validate_wgraph(w: WGraph) -> WGraph:
    G = w.graph
    for v in G.vertices:
        wt = w.weights[v]
        if wt is not None:
            g_, r, s = wt
            if r < 0:
                raise PlumbingError(f"vertex {v!r}: negative boundary count")
            if r > 0 and s != 0:
                raise PlumbingError(f"vertex {v!r}: s must vanish when r > 0")
    for y in G.darts:
        a, b = w.alpha[y], w.beta[y]
        yb = G.bar[y]
        if not (0 <= b < a) or gcd(a, b) != 1:
            raise PlumbingError(f"dart {y!r}: ({a},{b}) is not a coprime pair with 0<=beta<alpha")
        if w.alpha[yb] != a:
            raise PlumbingError(f"dart {y!r}: alpha differs from its reverse")
        if (b * w.beta[yb] - 1) % a != 0:
            raise PlumbingError(f"dart {y!r}: beta * beta_bar is not 1 mod alpha")
        if w.eps.get(y, 1) != w.eps.get(yb, 1):
            raise PlumbingError(f"dart {y!r}: sign differs from its reverse")
    return w


def wgraph_star_vertices(w: WGraph) -> list[str]:
    return [v for v in w.graph.vertices if w.weights[v] is None or w.weights[v][0] >= 0]
