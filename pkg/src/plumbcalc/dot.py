"""Graphviz DOT export for graph-like documents."""

from __future__ import annotations

import json

from .curves import MarkedCombinatorics
from .documents import Document, DocumentError
from .gcover import GCombinatorics
from .graph import DartGraph
from .plumbing import DecoratedPlumbingGraph, ModifiedPlumbingGraph, WGraph
from .splitting import SplittingGraph


def _q(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def vertex_label(euler: object, genus: object) -> str:
    """``e`` for genus 0, otherwise ``e [g]``."""
    return f"{euler}" if genus == 0 else f"{euler} [{genus}]"


def _attrs(d: dict[str, str]) -> str:
    return " [" + ", ".join(f"{k}={v}" for k, v in d.items()) + "]" if d else ""


def _render(
    name: str,
    G: DartGraph,
    vattrs: dict[str, dict[str, str]],
    eattrs: dict[str, dict[str, str]],
) -> str:
    lines = [f"graph {_q(name)} {{", '  node [shape=circle, fontsize=10];']
    for v in G.vertices:
        lines.append(f"  {_q(v)}{_attrs(vattrs.get(v, {}))};")
    for y in G.edge_pairs():
        lines.append(f"  {_q(G.origin[y])} -- {_q(G.terminus[y])}{_attrs(eattrs.get(y, {}))};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_ARROW = {"shape": "none", "label": '""', "width": "0", "height": "0"}


def dpg_dot(g: DecoratedPlumbingGraph, name: str = "dpg", marked: frozenset[str] = frozenset()) -> str:
    G = g.graph
    va: dict[str, dict[str, str]] = {}
    for v in G.vertices:
        if v in g.boundary:
            va[v] = dict(_ARROW)
        else:
            va[v] = {"label": _q(vertex_label(g.euler[v], g.genus[v]))}
            if v in marked:
                va[v].update({"shape": "box", "style": "bold"})
    ea: dict[str, dict[str, str]] = {}
    for y in G.edge_pairs():
        a: dict[str, str] = {}
        if g.sign[y] < 0:
            a["style"] = "dashed"
        o, t = G.origin[y], G.terminus[y]
        if t in g.boundary:
            a["dir"] = "forward"
        elif o in g.boundary:
            a["dir"] = "back"
        ea[y] = a
    return _render(name, G, va, ea)


def mpg_dot(g: ModifiedPlumbingGraph) -> str:
    G = g.base.graph
    ea = {}
    for y in G.edge_pairs():
        (c, _), (b, a) = g.m[y]
        (c2, _), (b2, a2) = g.m[G.bar[y]]
        ea[y] = {"taillabel": _q(f"{c},{b},{a}"), "headlabel": _q(f"{c2},{b2},{a2}")}
    va = {v: {"label": _q(vertex_label(g.base.euler[v], g.base.genus[v]))} for v in G.vertices}
    return _render("mpg", G, va, ea)


def wgraph_dot(w: WGraph) -> str:
    G = w.graph
    va = {}
    for v in G.vertices:
        wt = w.weights[v]
        if wt is None:
            va[v] = {"shape": "point", "width": "0.12"}
        else:
            va[v] = {"label": _q("({},{},{})".format(*wt))}
    ea = {}
    for y in G.edge_pairs():
        yb = G.bar[y]
        a = {"taillabel": _q(f"{w.alpha[y]}/{w.beta[y]}"), "headlabel": _q(f"{w.alpha[yb]}/{w.beta[yb]}")}
        if w.eps.get(y, 1) < 0:
            a["style"] = "dashed"
        ea[y] = a
    return _render("wgraph", G, va, ea)


def cmb_dot(m: MarkedCombinatorics) -> str:
    return dpg_dot(m.graph, "cmb", frozenset(m.str_vertices))


def gcomb_dot(gc: GCombinatorics) -> str:
    H = gc.graph
    strs = set(gc.base.str_vertices)
    va = {}
    for w in H.vertices:
        va[w] = {"label": _q(vertex_label(gc.e_theta[w], gc.g_theta[w]))}
        if gc.pr[w] in strs:
            va[w].update({"shape": "box", "style": "bold"})
    return _render("gcomb", H, va, {})


def splitting_dot(s: SplittingGraph) -> str:
    va = {v: {"shape": "box", "style": "bold", "label": _q(v)} for v in s.part1}
    va.update({v: {"shape": "point", "width": "0.12", "xlabel": _q(v)} for v in s.part2})
    return _render("splitting", s.graph, va, {})


def export_dot(doc: Document) -> str:
    if doc.kind == "dpg":
        return dpg_dot(doc.value)
    if doc.kind == "mpg":
        return mpg_dot(doc.value)
    if doc.kind == "wgraph":
        return wgraph_dot(doc.value)
    if doc.kind == "cmb":
        return cmb_dot(doc.value)
    if doc.kind == "gcomb":
        return gcomb_dot(doc.value)
    raise DocumentError(f"a {doc.kind!r} document has no graph to draw")
