"""Finite groups, cover data and the lifted combinatorics of a Galois cover.

Group elements are integers ``0..n-1`` indexing a Cayley table, with ``0``
the identity.  Lifted vertices over ``v`` are the left cosets of ``G_v``,
numbered by their smallest element, so the coset of the identity comes first.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .curves import MarkedCombinatorics, cmb_label
from .graph import DartGraph, GraphBuilder, isomorphisms as graph_isomorphisms

log = logging.getLogger(__name__)

Matrix = tuple[tuple[int, int], tuple[int, int]]


class GroupError(ValueError):
    pass


class CoverError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    table: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()
    _inv: tuple[int, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.table)
        if n == 0:
            raise GroupError("empty group")
        t = np.asarray(self.table, dtype=np.int64)
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise GroupError("table must be an n x n array of elements 0..n-1")
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise GroupError("element 0 must be the identity")
        for a in range(n):
            # (a b) c == a (b c) for all b, c
            if not np.array_equal(t[t[a]], t[a][t]):
                raise GroupError(f"table is not associative (first failure at a={a})")
        inv = []
        for a in range(n):
            hits = np.nonzero(t[a] == 0)[0]
            if len(hits) != 1 or t[hits[0], a] != 0:
                raise GroupError(f"element {a} has no two-sided inverse")
            inv.append(int(hits[0]))
        object.__setattr__(self, "_inv", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        r = 0
        for _ in range(k):
            r = self.table[r][a]
        return r

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = np.asarray(self.table)
        return bool(np.array_equal(t, t.T))

    def commute(self, a: int, b: int) -> bool:
        return self.table[a][b] == self.table[b][a]

    def name(self, a: int) -> str:
        return self.names[a] if self.names else str(a)


def cyclic(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)))


def abelian(factors: Sequence[int]) -> FiniteGroup:
    """Product of cyclic groups; elements are tuples in lexicographic order."""
    factors = list(factors)
    if any(f < 1 for f in factors):
        raise GroupError("invariant factors must be positive")
    elems = list(product(*(range(f) for f in factors))) if factors else [()]
    index = {e: i for i, e in enumerate(elems)}
    table = tuple(
        tuple(index[tuple((x + y) % f for x, y, f in zip(a, b, factors))] for b in elems) for a in elems
    )
    names = tuple("(" + ",".join(map(str, e)) + ")" for e in elems) if len(factors) > 1 else ()
    return FiniteGroup(table, names)


def abelian_element(factors: Sequence[int], coords: Sequence[int]) -> int:
    """Index of the element with the given coordinates in :func:`abelian`."""
    idx = 0
    for x, f in zip(coords, factors):
        idx = idx * f + (x % f)
    return idx


def symmetric(n: int) -> FiniteGroup:
    elems = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    # (a b)(i) = a(b(i)): apply b first
    table = tuple(tuple(index[tuple(a[b[i]] for i in range(n))] for b in elems) for a in elems)
    return FiniteGroup(table, tuple("".join(map(str, p)) for p in elems))


# subgroups ---------------------------------------------------------------------------


def subgroup_closure(G: FiniteGroup, gens: Iterable[int]) -> tuple[int, ...]:
    """Sorted elements of the subgroup generated by ``gens``."""
    gens = [g for g in gens if g != 0]
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return tuple(sorted(seen))


def left_cosets(G: FiniteGroup, H: Sequence[int]) -> list[tuple[int, ...]]:
    """Left cosets kH in order of their smallest element."""
    seen: set[int] = set()
    out = []
    for k in G.elements:
        if k in seen:
            continue
        coset = tuple(sorted(G.mul(k, h) for h in H))
        seen.update(coset)
        out.append(coset)
    return out


# cover data -------------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverDatum:
    group: FiniteGroup
    meridian: Mapping[str, int]
    source: MarkedCombinatorics
    extra: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        G = self.source.graph.graph
        for v in G.vertices:
            if v not in self.meridian:
                raise CoverError(f"vertex {v!r} has no meridian")
            if not 0 <= self.meridian[v] < self.group.order:
                raise CoverError(f"vertex {v!r}: meridian out of range")
        for y in G.darts:
            if not self.group.commute(self.meridian[G.origin[y]], self.meridian[G.terminus[y]]):
                raise CoverError(f"edge {y!r}: meridians of its ends do not commute")
        for v in G.vertices:
            if self.source.graph.genus[v] > 0 and not self.extra.get(v):
                log.warning("vertex %s has genus %d but no extra generators were supplied", v, self.source.graph.genus[v])


def propagate_meridians(m: MarkedCombinatorics, G: FiniteGroup, assignment: Mapping[str, int]) -> dict[str, int]:
    """Meridians of all vertices from those of the Str components (abelian groups only)."""
    if not G.is_abelian():
        raise CoverError("meridian propagation needs an abelian group; supply the full map instead")
    mer = {c: assignment[c] for c in m.str_vertices}
    for rec in m.history:
        acc = 0
        for obj, k in rec.incident:
            acc = G.mul(acc, G.power(mer[obj], k))
        mer[rec.new] = acc
    return mer


def vertex_groups(cd: CoverDatum, v: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    G = cd.source.graph.graph
    gens = [cd.meridian[v], *(cd.meridian[G.terminus[y]] for y in G.out_darts(v)), *cd.extra.get(v, ())]
    Gv = subgroup_closure(cd.group, gens)
    Hv = subgroup_closure(cd.group, [cd.meridian[v]])
    assert set(Hv) <= set(Gv)
    return Gv, Hv


def edge_matrix(cd: CoverDatum, y: str) -> Matrix:
    """Kernel basis [[c,0],[b,a]] of (u, w) -> g_s^u g_f^w with g_f, g_s the meridians at t(y), o(y)."""
    G = cd.source.graph.graph
    grp = cd.group
    gf, gs = cd.meridian[G.terminus[y]], cd.meridian[G.origin[y]]
    if not grp.commute(gf, gs):
        raise CoverError(f"edge {y!r}: meridians do not commute")
    a = grp.element_order(gf)
    fiber = set(subgroup_closure(grp, [gf]))
    c, x = 1, gs
    while x not in fiber:
        x = grp.mul(x, gs)
        c += 1
    b = next(b for b in range(a) if grp.mul(x, grp.power(gf, b)) == 0)
    assert a * c == len(subgroup_closure(grp, [gf, gs]))
    return ((c, 0), (b, a))


@dataclass(frozen=True)
class GCombinatorics:
    graph: DartGraph
    base: MarkedCombinatorics
    group: FiniteGroup
    g_theta: Mapping[str, int]
    e_theta: Mapping[str, Fraction]
    m_theta: Mapping[str, Matrix]
    action: Mapping[int, Mapping[str, str]]
    pr: Mapping[str, str]

    def fiber(self, v: str) -> list[str]:
        return [w for w in self.graph.vertices if self.pr[w] == v]

    def dart_fiber(self, y: str) -> list[str]:
        return [z for z in self.graph.darts if self.pr[z] == y]

    def stabilizer(self, x: str) -> frozenset[int]:
        return frozenset(g for g in self.group.elements if self.action[g][x] == x)

    @property
    def e_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.e_theta.values())


def build_gcombinatorics(cd: CoverDatum) -> GCombinatorics:
    m = cd.source
    base = m.graph
    B = base.graph
    grp = cd.group
    groups = {v: vertex_groups(cd, v) for v in B.vertices}
    cosets = {v: left_cosets(grp, groups[v][0]) for v in B.vertices}
    which = {v: {k: i for i, cs in enumerate(cosets[v]) for k in cs} for v in B.vertices}
    b = GraphBuilder()
    pr: dict[str, str] = {}
    for v in B.vertices:
        for i in range(len(cosets[v])):
            w = b.add_vertex(f"{v}@{i}")
            pr[w] = v
    edge_groups: dict[str, tuple[int, ...]] = {}
    for y in B.edge_pairs():
        u, v = B.origin[y], B.terminus[y]
        Gy = subgroup_closure(grp, [cd.meridian[u], cd.meridian[v]])
        if not (set(Gy) <= set(groups[u][0]) and set(Gy) <= set(groups[v][0])):
            raise CoverError(f"edge {y!r}: edge group not contained in the vertex groups")
        edge_groups[y] = edge_groups[B.bar[y]] = Gy
        for i, cs in enumerate(left_cosets(grp, Gy)):
            k = cs[0]
            z = b.add_edge(f"{u}@{which[u][k]}", f"{v}@{which[v][k]}", (f"{y}@{i}", f"{B.bar[y]}@{i}"))
            pr[z] = y
            pr[b.bar[z]] = B.bar[y]
    H = b.build()
    mats = {y: edge_matrix(cd, y) for y in B.darts}
    g_theta: dict[str, int] = {}
    e_theta: dict[str, Fraction] = {}
    for v in B.vertices:
        Gv, Hv = groups[v]
        ng, nh = len(Gv), len(Hv)
        ins = B.out_darts(v)  # bar of these terminate at v
        twice = 2 - Fraction(ng, nh) * (2 - 2 * base.genus[v] - len(ins)) - sum(
            Fraction(ng, len(edge_groups[y])) for y in ins
        )
        if twice.denominator != 1 or twice % 2 != 0 or twice < 0:
            raise CoverError(f"vertex {v!r}: lifted genus {twice / 2} is not a nonnegative integer")
        e = Fraction(ng, nh * nh) * base.euler[v]
        for y in ins:
            into = B.bar[y]
            (c, _), (bb, a) = mats[into]
            e -= Fraction(bb, a) * Fraction(ng, len(edge_groups[into]))
        for w in H.vertices:
            if pr[w] == v:
                g_theta[w] = int(twice) // 2
                e_theta[w] = e
    m_theta = {z: mats[pr[z]] for z in H.darts}
    action: dict[int, dict[str, str]] = {}
    for g in grp.elements:
        act: dict[str, str] = {}
        for v in B.vertices:
            for i, cs in enumerate(cosets[v]):
                act[f"{v}@{i}"] = f"{v}@{which[v][grp.mul(g, cs[0])]}"
        for y in B.edge_pairs():
            cs_y = left_cosets(grp, edge_groups[y])
            idx = {k: i for i, cs in enumerate(cs_y) for k in cs}
            for i, cs in enumerate(cs_y):
                j = idx[grp.mul(g, cs[0])]
                act[f"{y}@{i}"] = f"{y}@{j}"
                act[f"{B.bar[y]}@{i}"] = f"{B.bar[y]}@{j}"
        action[g] = act
    return GCombinatorics(H, m, grp, g_theta, e_theta, m_theta, action, pr)


# group isomorphisms ------------------------------------------------------------------------


def generating_set(G: FiniteGroup) -> list[int]:
    """Greedy generators: scan elements upward, keep those outside the current span."""
    gens: list[int] = []
    span = {0}
    for x in G.elements:
        if x not in span:
            gens.append(x)
            span = set(subgroup_closure(G, gens))
    return gens


def group_isomorphisms(G1: FiniteGroup, G2: FiniteGroup, limit: int = 512) -> Iterator[dict[int, int]]:
    """Every isomorphism ``G1 -> G2`` as an element map."""
    if G1.order != G2.order:
        return
    if G1.order > limit:
        raise GroupError(f"group order {G1.order} exceeds the search budget {limit}")
    gens = generating_set(G1)
    orders2: dict[int, list[int]] = {}
    for x in G2.elements:
        orders2.setdefault(G2.element_order(x), []).append(x)
    cands = [orders2.get(G1.element_order(g), []) for g in gens]
    for images in product(*cands):
        phi = {0: 0}
        frontier = [0]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, h in zip(gens, images):
                    y, y2 = G1.mul(x, g), G2.mul(phi[x], h)
                    if y in phi:
                        if phi[y] != y2:
                            ok = False
                            break
                    else:
                        phi[y] = y2
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if not ok or len(set(phi.values())) != G1.order:
            continue
        if all(phi[G1.mul(a, b)] == G2.mul(phi[a], phi[b]) for a in G1.elements for b in G1.elements):
            yield phi


def automorphisms(G: FiniteGroup, limit: int = 512) -> list[dict[int, int]]:
    return list(group_isomorphisms(G, G, limit))


# equivalence -----------------------------------------------------------------------------


@dataclass(frozen=True)
class GWitness:
    base_vertices: Mapping[str, str]
    base_darts: Mapping[str, str]
    vertices: Mapping[str, str]
    darts: Mapping[str, str]
    tau: Mapping[int, int]


def gequiv(gc1: GCombinatorics, gc2: GCombinatorics) -> GWitness | None:
    """Search for (base equivalence, lifted isomorphism, group isomorphism) compatible with all structure."""
    if gc1.group.order != gc2.group.order:
        return None
    if len(gc1.graph.vertices) != len(gc2.graph.vertices) or len(gc1.graph.darts) != len(gc2.graph.darts):
        return None
    taus = list(group_isomorphisms(gc1.group, gc2.group))
    B1, B2 = gc1.base.graph.graph, gc2.base.graph.graph
    lab1, lab2 = cmb_label(gc1.base), cmb_label(gc2.base)
    for phi in graph_isomorphisms(
        B1,
        B2,
        vlabel1=lambda v: (lab1(v), len(gc1.fiber(v))),
        vlabel2=lambda v: (lab2(v), len(gc2.fiber(v))),
        dlabel1=lambda y: gc1.m_theta[gc1.dart_fiber(y)[0]],
        dlabel2=lambda y: gc2.m_theta[gc2.dart_fiber(y)[0]],
    ):
        for tau in taus:
            w = _lift(gc1, gc2, phi.vertex_map, phi.dart_map, tau)
            if w is not None:
                vm, dm = w
                return GWitness(dict(phi.vertex_map), dict(phi.dart_map), vm, dm, tau)
    return None


def _lift(gc1: GCombinatorics, gc2: GCombinatorics, bv: Mapping[str, str], bd: Mapping[str, str], tau: Mapping[int, int]):
    G1, G2 = gc1.graph, gc2.graph
    B1 = gc1.base.graph.graph
    grp = gc1.group
    order: list[str] = []
    for v in B1.vertices:
        if v not in order:
            queue = [v]
            order.append(v)
            while queue:
                x = queue.pop(0)
                for u in B1.neighbors(x):
                    if u not in order:
                        order.append(u)
                        queue.append(u)
    fib1 = {v: gc1.fiber(v) for v in B1.vertices}
    fib2 = {v: gc2.fiber(bv[v]) for v in B1.vertices}
    vmap: dict[str, str] = {}
    dmap: dict[str, str] = {}

    def spread(x0: str, x1: str) -> dict[str, str] | None:
        """Extend x0 -> x1 equivariantly: g.x0 -> tau(g).x1."""
        out: dict[str, str] = {}
        for g in grp.elements:
            a, b = gc1.action[g][x0], gc2.action[tau[g]][x1]
            if out.get(a, b) != b:
                return None
            out[a] = b
        return out

    def labels_ok(w: str, w2: str) -> bool:
        return gc1.g_theta[w] == gc2.g_theta[w2] and gc1.e_theta[w] == gc2.e_theta[w2]

    def edges_ok(v: str, placed: set[str]) -> dict[str, str] | None:
        new: dict[str, str] = {}
        for y in B1.out_darts(v):
            u = B1.terminus[y]
            if u not in placed:
                continue
            zs = gc1.dart_fiber(y)
            z0 = zs[0]
            ok = None
            for z2 in gc2.dart_fiber(bd[y]):
                if G2.origin[z2] != vmap[G1.origin[z0]] or G2.terminus[z2] != vmap[G1.terminus[z0]]:
                    continue
                mp = spread(z0, z2)
                if mp is None:
                    continue
                if all(
                    G2.origin[mp[z]] == vmap[G1.origin[z]] and G2.terminus[mp[z]] == vmap[G1.terminus[z]] for z in zs
                ) and len(set(mp.values())) == len(mp):
                    ok = mp
                    break
            if ok is None:
                return None
            for z, z2 in ok.items():
                new[z] = z2
                new[G1.bar[z]] = G2.bar[z2]
        return new

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        w0 = fib1[v][0]
        stab = {tau[g] for g in gc1.stabilizer(w0)}
        for w2 in fib2[v]:
            if gc2.stabilizer(w2) != stab or not labels_ok(w0, w2):
                continue
            mp = spread(w0, w2)
            if mp is None or len(set(mp.values())) != len(fib1[v]):
                continue
            if any(not labels_ok(a, b) for a, b in mp.items()):
                continue
            vmap.update(mp)
            new = edges_ok(v, set(order[: i + 1]))
            if new is not None:
                dmap.update(new)
                if search(i + 1):
                    return True
                for z in new:
                    dmap.pop(z, None)
            for a in mp:
                vmap.pop(a, None)
        return False

    if search(0) and len(dmap) == len(G1.darts):
        return dict(vmap), dict(dmap)
    return None
