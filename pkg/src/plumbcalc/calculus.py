"""Rewrite calculus on decorated plumbing graphs.

Blow-downs, the RP^2 absorption, the two fork-collapsing operations used to
reach the normal form of a resolution graph, orientation reversal and the
passage to W-graphs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .graph import DartGraph, GraphBuilder, connected_components, cycle_space_basis, induced_subgraph, isomorphisms
from .plumbing import (
    Chain,
    DecoratedPlumbingGraph,
    PlumbingError,
    WGraph,
    chain_string,
    definiteness,
    find_maximal_chains,
    intersection_form,
    validate_dpg,
    validate_wgraph,
    wgraph_star_vertices,
)
from .seifert import cf_convergents

OPERATIONS = ("R1_0_plus", "R1_plus", "R1_minus", "R1_plus_plus", "R2", "FN1", "FN2")
BLOW_DOWNS = ("R1_0_plus", "R1_plus", "R1_plus_plus")


class RewriteError(PlumbingError):
    pass


class NotNormalForm(PlumbingError):
    pass


@dataclass(frozen=True)
class RewriteSite:
    """An operation tag plus the vertex it is centred on.

    For blow-downs and the absorption this is the (+-1) vertex that
    disappears; for FN1 the heavy vertex carrying the two leaves; for FN2
    the fork vertex.
    """

    op: str
    vertex: str

    def to_json(self) -> dict:
        return {"op": self.op, "site": self.vertex}


@dataclass(frozen=True)
class NormalForm:
    graph: DecoratedPlumbingGraph
    trace: tuple[RewriteSite, ...]


# editable copy -------------------------------------------------------------------


@dataclass
class _Edit:
    vertices: list[str]
    boundary: set[str]
    genus: dict[str, int]
    euler: dict[str, int]
    edges: list[tuple[str, str, str, str, int]] = field(default_factory=list)  # (dart, bar, from, to, sign)

    @classmethod
    def of(cls, g: DecoratedPlumbingGraph) -> _Edit:
        G = g.graph
        edges = [(y, G.bar[y], G.origin[y], G.terminus[y], g.sign[y]) for y in G.edge_pairs()]
        return cls(list(G.vertices), set(g.boundary), dict(g.genus), dict(g.euler), edges)

    def fresh_vertex(self, hint: str) -> str:
        taken = set(self.vertices)
        if hint not in taken:
            return hint
        k = 1
        while f"{hint}.{k}" in taken:
            k += 1
        return f"{hint}.{k}"

    def fresh_darts(self) -> tuple[str, str]:
        taken = {d for e in self.edges for d in e[:2]}
        k = 1
        while f"z{k}.0" in taken or f"z{k}.1" in taken:
            k += 1
        return f"z{k}.0", f"z{k}.1"

    def add_vertex(self, hint: str, genus: int, euler: int) -> str:
        v = self.fresh_vertex(hint)
        self.vertices.append(v)
        self.genus[v], self.euler[v] = genus, euler
        return v

    def remove_vertices(self, vs: Iterable[str]) -> None:
        drop = set(vs)
        self.vertices = [v for v in self.vertices if v not in drop]
        self.edges = [e for e in self.edges if e[2] not in drop and e[3] not in drop]
        for v in drop:
            self.genus.pop(v, None)
            self.euler.pop(v, None)
            self.boundary.discard(v)

    def add_edge(self, u: str, v: str, sign: int) -> None:
        y, yb = self.fresh_darts()
        self.edges.append((y, yb, u, v, sign))

    def build(self) -> DecoratedPlumbingGraph:
        b = GraphBuilder()
        for v in self.vertices:
            b.add_vertex(v)
        sign: dict[str, int] = {}
        for y, yb, u, v, s in self.edges:
            b.add_edge(u, v, (y, yb))
            sign[y] = sign[yb] = s
        return validate_dpg(b.build(), self.boundary, self.genus, self.euler, sign)


# pattern matching ------------------------------------------------------------------


def _interior_g0(g: DecoratedPlumbingGraph, v: str, euler: int | None = None) -> bool:
    if v in g.boundary or g.genus[v] != 0:
        return False
    return euler is None or g.euler[v] == euler


def _is_leaf_of(g: DecoratedPlumbingGraph, leaf: str, v: str, euler: int) -> bool:
    G = g.graph
    out = G.out_darts(leaf)
    return _interior_g0(g, leaf, euler) and len(out) == 1 and G.terminus[out[0]] == v and leaf != v


def genus_sharp(g: int) -> int:
    """Genus after connected sum with a projective plane (negative = non-orientable)."""
    return -2 * g - 1 if g >= 0 else g - 1


def match(g: DecoratedPlumbingGraph, site: RewriteSite) -> dict | None:
    """Return the matched pattern data, or ``None`` when the site does not apply."""
    G = g.graph
    v = site.vertex
    if v not in G or v in g.boundary:
        return None
    out = G.out_darts(v)
    if any(G.is_loop(y) for y in out):
        return None
    nbrs = [G.terminus[y] for y in out]
    op = site.op
    if op == "R1_0_plus":
        if _interior_g0(g, v, -1) and len(out) == 1 and nbrs[0] not in g.boundary and g.sign[out[0]] == 1:
            return {"anchor": nbrs[0]}
        return None
    if op in ("R1_plus", "R1_minus"):
        e, s = (-1, 1) if op == "R1_plus" else (1, -1)
        if (
            _interior_g0(g, v, e)
            and len(out) == 2
            and nbrs[0] != nbrs[1]
            and all(u not in g.boundary for u in nbrs)
            and all(g.sign[y] == s for y in out)
        ):
            return {"ends": nbrs}
        return None
    if op == "R1_plus_plus":
        if (
            _interior_g0(g, v, -1)
            and len(out) == 2
            and nbrs[0] == nbrs[1]
            and nbrs[0] not in g.boundary
            and all(g.sign[y] == 1 for y in out)
        ):
            return {"anchor": nbrs[0]}
        return None
    if op == "R2":
        if not _interior_g0(g, v, -1) or len(out) != 3 or any(g.sign[y] != 1 for y in out):
            return None
        leaves = [u for u in nbrs if _is_leaf_of(g, u, v, -2)]
        others = [u for u in nbrs if u not in leaves]
        if len(leaves) == 2 and len(others) == 1 and others[0] not in g.boundary:
            return {"leaves": leaves, "anchor": others[0]}
        return None
    if op in ("FN1", "FN2"):
        if not _interior_g0(g, v) or len(out) != 3:
            return None
        leaves = [u for u in nbrs if _is_leaf_of(g, u, v, -2)]
        others = [u for u in nbrs if u not in leaves]
        if len(leaves) != 2 or len(others) != 1:
            return None
        nxt = others[0]
        if op == "FN1":
            if g.euler[v] <= -3 and nxt not in g.boundary:
                return {"leaves": leaves, "anchor": nxt}
            return None
        if g.euler[v] != -2:
            return None
        chain = [v]
        prev = v
        while _interior_g0(g, nxt, -2) and len(G.out_darts(nxt)) == 2 and nxt not in chain:
            step = [G.terminus[y] for y in G.out_darts(nxt) if G.terminus[y] != prev]
            if len(step) != 1:
                break
            chain.append(nxt)
            prev, nxt = nxt, step[0]
        if nxt in g.boundary or nxt in chain or nxt in leaves:
            return None
        return {"leaves": leaves, "chain": chain, "anchor": nxt}
    raise RewriteError(f"unknown operation {op!r}")


def apply_rewrite(g: DecoratedPlumbingGraph, site: RewriteSite) -> DecoratedPlumbingGraph:
    m = match(g, site)
    if m is None:
        raise RewriteError(f"{site.op} does not match at vertex {site.vertex!r}")
    ed = _Edit.of(g)
    v = site.vertex
    op = site.op
    if op == "R1_0_plus":
        ed.remove_vertices([v])
        ed.euler[m["anchor"]] += 1
    elif op in ("R1_plus", "R1_minus"):
        a, b = m["ends"]
        delta, s = (1, 1) if op == "R1_plus" else (-1, -1)
        ed.remove_vertices([v])
        ed.euler[a] += delta
        ed.euler[b] += delta
        ed.add_edge(a, b, s)
    elif op == "R1_plus_plus":
        a = m["anchor"]
        ed.remove_vertices([v])
        ed.euler[a] += 2
        ed.add_edge(a, a, 1)
    elif op == "R2":
        a = m["anchor"]
        ed.remove_vertices([v, *m["leaves"]])
        ed.genus[a] = genus_sharp(ed.genus[a])
    elif op == "FN1":
        ed.remove_vertices(m["leaves"])
        ed.euler[v] += 1
        w = ed.add_vertex(f"{v}.w", -1, 0)
        ed.add_edge(v, w, 1)
    elif op == "FN2":
        a = m["anchor"]
        ed.remove_vertices([*m["chain"], *m["leaves"]])
        ed.euler[a] += 1
        w = ed.add_vertex(f"{v}.w", -1, len(m["chain"]))
        ed.add_edge(a, w, 1)
    return ed.build()


def find_sites(g: DecoratedPlumbingGraph, ops: Iterable[str]) -> list[RewriteSite]:
    """All matching sites, by vertex order and then by the order of ``ops``."""
    ops = list(ops)
    return [RewriteSite(op, v) for v in g.graph.vertices for op in ops if match(g, RewriteSite(op, v))]


# blow-ups (inverse operations) -------------------------------------------------------


def blow_up_leaf(g: DecoratedPlumbingGraph, v: str) -> DecoratedPlumbingGraph:
    """Inverse of R1_0_plus: attach a (-1) leaf to interior ``v``."""
    if v in g.boundary:
        raise RewriteError("cannot blow up at a boundary vertex")
    ed = _Edit.of(g)
    w = ed.add_vertex(f"{v}.x", 0, -1)
    ed.euler[v] -= 1
    ed.add_edge(v, w, 1)
    return ed.build()


def blow_up_edge(g: DecoratedPlumbingGraph, y: str) -> DecoratedPlumbingGraph:
    """Inverse of R1_plus: insert a (-1) vertex on a (+)-edge between interior vertices."""
    G = g.graph
    a, b = G.origin[y], G.terminus[y]
    if a in g.boundary or b in g.boundary or a == b or g.sign[y] != 1:
        raise RewriteError("edge blow-up needs a (+)-edge between distinct interior vertices")
    ed = _Edit.of(g)
    ed.edges = [e for e in ed.edges if y not in e[:2]]
    w = ed.add_vertex(f"{a}.x", 0, -1)
    ed.euler[a] -= 1
    ed.euler[b] -= 1
    ed.add_edge(a, w, 1)
    ed.add_edge(w, b, 1)
    return ed.build()


def random_blow_ups(g: DecoratedPlumbingGraph, rng: random.Random, count: int) -> DecoratedPlumbingGraph:
    for _ in range(count):
        G = g.graph
        edges = [
            y
            for y in G.edge_pairs()
            if G.origin[y] not in g.boundary and G.terminus[y] not in g.boundary and not G.is_loop(y)
        ]
        if edges and rng.random() < 0.5:
            g = blow_up_edge(g, rng.choice(edges))
        else:
            g = blow_up_leaf(g, rng.choice(g.interior))
    return g


def random_resolution_graph(rng: random.Random, max_vertices: int = 10) -> DecoratedPlumbingGraph:
    """A random negative definite tree with arrows, biased towards fork patterns."""
    while True:
        ed = _Edit([], set(), {}, {})
        n = rng.randint(1, 4)
        for i in range(n):
            v = ed.add_vertex(f"v{i}", 1 if rng.random() < 0.1 else 0, rng.randint(-4, -1))
            if i:
                ed.add_edge(ed.vertices[rng.randrange(i)], v, 1)
        for _ in range(rng.choice((0, 1, 1, 2))):
            hook = rng.choice([u for u in ed.vertices if u not in ed.boundary])
            prev = hook
            for _ in range(rng.randint(0, 2)):
                c = ed.add_vertex("c", 0, -2)
                ed.add_edge(prev, c, 1)
                prev = c
            f = ed.add_vertex("f", 0, rng.choice((-2, -2, -3, -4)))
            ed.add_edge(prev, f, 1)
            for _ in range(2):
                leaf = ed.add_vertex("l", 0, -2)
                ed.add_edge(f, leaf, 1)
        for _ in range(rng.randint(1, 2)):
            hook = rng.choice([u for u in ed.vertices if u not in ed.boundary])
            a = ed.fresh_vertex("a")
            ed.vertices.append(a)
            ed.boundary.add(a)
            ed.add_edge(hook, a, 1)
        if len(ed.vertices) > max_vertices:
            continue
        g = ed.build()
        if definiteness(intersection_form(g)) == "negative_definite":
            return g


# normal form ----------------------------------------------------------------------


def normalize_resolution(g: DecoratedPlumbingGraph) -> NormalForm:
    """Reduce a negative definite resolution graph to its normal form.

    Blow-downs of (-1) vertices with interior neighbours are applied first
    until none remains, then the fork collapses (FN2 before FN1 at equal
    vertex position); the two phases alternate until nothing matches.
    """
    if any(s != 1 for s in g.sign.values()):
        raise RewriteError("normalization expects (+)-edges only")
    if definiteness(intersection_form(g)) != "negative_definite":
        raise RewriteError("intersection form is not negative definite")
    if any(c.cyclic for c in find_maximal_chains(g)):
        raise RewriteError("graph contains a cyclic chain component")
    trace: list[RewriteSite] = []
    while True:
        sites = find_sites(g, BLOW_DOWNS) or find_sites(g, ("FN2", "FN1"))
        if not sites:
            return NormalForm(g, tuple(trace))
        g = apply_rewrite(g, sites[0])
        trace.append(sites[0])


def normal_form_violations(g: DecoratedPlumbingGraph) -> list[str]:
    """Check the shape conditions a normal form satisfies; empty list when all hold."""
    G = g.graph
    bad: list[str] = []
    if any(s != 1 for s in g.sign.values()):
        bad.append("a (-)-edge is present")
    chains = find_maximal_chains(g)
    for v in g.interior:
        if g.genus[v] < -1:
            bad.append(f"vertex {v}: genus {g.genus[v]} < -1")
        if g.genus[v] == -1:
            if len(G.out_darts(v)) != 1:
                bad.append(f"vertex {v}: genus -1 with degree {len(G.out_darts(v))}")
            if g.euler[v] < 0:
                bad.append(f"vertex {v}: genus -1 with euler {g.euler[v]} < 0")
            if g.euler[v] == 0:
                adj = [c for c in chains if v in (c.start, c.end)]
                if not any(c.length >= 1 for c in adj):
                    bad.append(f"vertex {v}: genus -1, euler 0, adjoining chain has length 0")
    return bad


# orientation reversal --------------------------------------------------------------


def chain_dual(b: Iterable[int]) -> list[int]:
    """Dual string: [b] = p/q  maps to the string of p/(p - q)."""
    b = list(b)
    if any(x < 2 for x in b):
        raise ValueError("chain entries must be >= 2")
    if not b:
        return []
    # split as n0 twos, (m1 + 3), n1 twos, ..., (ms + 3), ns twos
    twos = [0]
    big: list[int] = []
    for x in b:
        if x == 2:
            twos[-1] += 1
        else:
            big.append(x - 3)
            twos.append(0)
    if not big:
        return [twos[0] + 1]
    out = [twos[0] + 2]
    for i, m in enumerate(big):
        out.extend([2] * m)
        out.append(twos[i + 1] + (2 if i == len(big) - 1 else 3))
    return out


def _check_reversible(g: DecoratedPlumbingGraph, chains: list[Chain]) -> None:
    for c in chains:
        if c.cyclic:
            raise NotNormalForm("cyclic chain component")
        if c.length and any(x < 2 for x in chain_string(g, c)):
            raise NotNormalForm(f"chain through {c.vertices[0]!r} has an entry above -2")


def reverse_orientation(g: DecoratedPlumbingGraph) -> DecoratedPlumbingGraph:
    """Plumbing graph of the same manifold with the opposite orientation.

    The sign class of the result is realised by one (-)-edge per
    two-ended chain (times the old chain sign) and by flipping length-0
    chains; dangling chains carry (+)-edges only.
    """
    chains = find_maximal_chains(g)
    _check_reversible(g, chains)
    G = g.graph
    ed = _Edit(list(G.vertices), set(g.boundary), dict(g.genus), dict(g.euler))
    chain_vertices = {v for c in chains for v in c.vertices}
    count = {v: 0 for v in g.interior}
    for c in chains:
        if c.length:
            for a in (c.start, c.end):
                if a is not None and a not in g.boundary:
                    count[a] += 1
    for v in g.interior:
        if v not in chain_vertices:
            ed.euler[v] = -g.euler[v] - count[v]
    ed.remove_vertices(chain_vertices)
    # bare edges keep their dart ids, so place them before any fresh darts
    for c in chains:
        if c.length == 0:
            y = c.darts[0]
            ed.edges.append((y, G.bar[y], c.start, c.end, -g.sign[y]))
    for c in chains:
        if c.length == 0:
            continue
        parity = 1
        for y in c.darts:
            parity *= g.sign[y]
        dual = [-x for x in chain_dual(chain_string(g, c))]
        names: list[str] = []
        for j, e in enumerate(dual):
            hint = c.vertices[j] if j < c.length else f"{c.vertices[-1]}.{j}"
            names.append(ed.add_vertex(hint, 0, e))
        path: list[str | None] = [c.start, *names, c.end]
        first = True
        for a, b in zip(path, path[1:]):
            if a is None or b is None:
                continue
            s = 1
            if first and not c.open:
                s = -parity
            first = False
            ed.add_edge(a, b, s)
    return ed.build()


# W-graphs ---------------------------------------------------------------------------


def _cut_dart(c: Chain, graph: DartGraph) -> str:
    if c.start is None:
        return c.darts[-1]
    if c.end is None:
        return c.darts[0]
    n = len(c.darts)
    cands = {(n - 1) // 2, n // 2}
    return min((c.darts[i] for i in cands), key=lambda y: graph.rep(y))


def chain_edge_weights(b: list[int]) -> tuple[int, int]:
    """(alpha, beta) of a chain read in one direction; a bare edge gives (1, 0)."""
    cv = cf_convergents(b)
    return cv.c, cv.d % cv.c


def to_wgraph(g: DecoratedPlumbingGraph, cut_choice: dict[int, str] | None = None) -> WGraph:
    """Weighted graph obtained by cutting one edge of each inner chain.

    ``cut_choice`` maps a chain index (in ``find_maximal_chains`` order) to
    an alternative dart of that chain; it exists to check that the edge
    weights do not depend on the cut.
    """
    if not g.boundary:
        raise PlumbingError("W-graph conversion needs boundary vertices")
    G = g.graph
    chains = find_maximal_chains(g)
    if any(c.cyclic for c in chains):
        raise NotNormalForm("cyclic chain component")
    cuts: list[tuple[str, Chain]] = []
    for i, c in enumerate(chains):
        if c.boundary_incident:
            continue
        y = (cut_choice or {}).get(i) or _cut_dart(c, G)
        if y not in c.darts:
            y = G.bar[y]
            if y not in c.darts:
                raise PlumbingError(f"dart {y!r} is not on chain {i}")
        cuts.append((y, c))
    cut_edges = {G.rep(y) for y, _ in cuts}
    b = GraphBuilder()
    for v in G.vertices:
        b.add_vertex(v)
    for y in G.edge_pairs():
        if y not in cut_edges:
            b.add_edge(G.origin[y], G.terminus[y], (y, G.bar[y]))
    pieces = connected_components(b.build())
    chain_vertices = {v for c in chains for v in c.vertices}
    owner: dict[str, str] = {}
    weights: dict[str, tuple[int, int, int] | None] = {}
    for comp in pieces:
        nodes = [v for v in comp if v not in g.boundary and v not in chain_vertices]
        bd = [v for v in comp if v in g.boundary]
        name = nodes[0] if nodes else comp[0]
        for v in comp:
            owner[v] = name
        if nodes:
            v = nodes[0]
            weights[name] = (g.genus[v], len(bd), g.euler[v] if not bd else 0)
        elif bd:
            weights[name] = (0, len(bd), 0)
        else:
            weights[name] = None
    wb = GraphBuilder()
    for comp in pieces:
        wb.add_vertex(owner[comp[0]])
    alpha: dict[str, int] = {}
    beta: dict[str, int] = {}
    eps: dict[str, int] = {}
    for y, c in cuts:
        s = 1
        for d in c.darts:
            s *= g.sign[d]
        string = chain_string(g, c)
        if any(x < 2 for x in string):
            raise NotNormalForm(f"chain {string} has an entry below 2")
        wb.add_edge(owner[G.origin[y]], owner[G.terminus[y]], (y, G.bar[y]))
        alpha[y], beta[y] = chain_edge_weights(string)
        alpha[G.bar[y]], beta[G.bar[y]] = chain_edge_weights(string[::-1])
        eps[y] = eps[G.bar[y]] = s
    return validate_wgraph(WGraph(wb.build(), weights, alpha, beta, eps))


def _is_exceptional_big(w: WGraph) -> bool:
    G = w.graph
    if len(G.vertices) != 3 or len(G.darts) != 4:
        return False
    weighted = [v for v in G.vertices if w.weights[v] is not None]
    if len(weighted) != 1 or w.weights[weighted[0]] != (0, 1, 0):
        return False
    c = weighted[0]
    return all(G.origin[y] == c and G.terminus[y] != c and (w.alpha[y], w.beta[y]) == (2, 1) for y in G.out_darts(c)) and len(
        G.out_darts(c)
    ) == 2 and len(set(G.neighbors(c))) == 2


def _is_exceptional_small(w: WGraph) -> bool:
    G = w.graph
    return len(G.vertices) == 1 and not G.darts and w.weights[G.vertices[0]] == (-1, 1, 0)


def wgraph_equiv(w1: WGraph, w2: WGraph):
    """Return ``(True, witness)``, ``(True, None)`` for the exceptional pair, or ``(False, None)``."""
    if (_is_exceptional_big(w1) and _is_exceptional_small(w2)) or (_is_exceptional_small(w1) and _is_exceptional_big(w2)):
        return True, None
    star1 = wgraph_star_vertices(w1)
    sub1 = induced_subgraph(w1.graph, star1)
    basis = cycle_space_basis(sub1)

    def parity(w: WGraph, walk: Iterable[str]) -> int:
        return sum(1 for y in walk if w.eps.get(y, 1) < 0) % 2

    for iso in isomorphisms(
        w1.graph,
        w2.graph,
        vlabel1=lambda v: w1.weights[v],
        vlabel2=lambda v: w2.weights[v],
        dlabel1=lambda y: (w1.alpha[y], w1.beta[y]),
        dlabel2=lambda y: (w2.alpha[y], w2.beta[y]),
    ):
        if all(parity(w1, c) == parity(w2, [iso.dart_map[y] for y in c]) for c in basis):
            return True, iso
    return False, None
