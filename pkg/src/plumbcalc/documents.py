"""JSON documents: parsing with schema checks and canonical printing.

Every document is an object with a ``kind`` field.  Printing uses sorted
keys, two-space indentation and a trailing newline, and lists keep the
stored vertex/edge order, so printing a parsed canonical document gives
back the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .curves import (
    BranchSpec,
    CurveError,
    CurveSpec,
    HistoryRecord,
    MarkedCombinatorics,
    QTType,
    SingularPointSpec,
    build_combinatorics,
    build_quasi_triangular,
    parse_qt_type,
)
from .gcover import (
    CoverDatum,
    CoverError,
    FiniteGroup,
    GCombinatorics,
    GroupError,
    abelian,
    abelian_element,
    cyclic,
    propagate_meridians,
    symmetric,
)
from .graph import DartGraph, GraphBuilder, GraphError
from .plumbing import (
    DecoratedPlumbingGraph,
    ModifiedPlumbingGraph,
    PlumbingError,
    WGraph,
    validate_dpg,
    validate_mpg,
    validate_wgraph,
)

KINDS = ("dpg", "mpg", "cmb", "gcomb", "wgraph", "cover", "curvespec", "qttype")


class DocumentError(ValueError):
    """Malformed or inconsistent document; ``line``/``column`` are set for JSON syntax errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class InvariantError(DocumentError):
    """Well-formed document whose content violates a structural rule."""


@dataclass(frozen=True)
class Document:
    kind: str
    value: Any


# groups -----------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """How a group was described: invariant factors, a symmetric group, or a raw table."""

    factors: tuple[int, ...] | None = None
    symmetric: int | None = None
    table: tuple[tuple[int, ...], ...] | None = None

    def build(self) -> FiniteGroup:
        if self.factors is not None:
            return cyclic(self.factors[0]) if len(self.factors) == 1 else abelian(self.factors)
        if self.symmetric is not None:
            return symmetric(self.symmetric)
        assert self.table is not None
        return FiniteGroup(self.table)

    def element(self, x: Any, path: str) -> int:
        """An element index; abelian groups also accept a coordinate list."""
        if isinstance(x, list) and self.factors is not None:
            if len(x) != len(self.factors) or not all(_is_int(c) for c in x):
                raise DocumentError(f"{path}: coordinates must be {len(self.factors)} integers")
            return abelian_element(self.factors, x)
        if not _is_int(x):
            raise DocumentError(f"{path}: expected a group element index")
        return x

    def to_json(self) -> dict:
        if self.factors is not None:
            order = 1
            for f in self.factors:
                order *= f
            return {"order": order, "invariant_factors": list(self.factors)}
        if self.symmetric is not None:
            return {"order": len(self.build().table), "symmetric": self.symmetric}
        assert self.table is not None
        return {"order": len(self.table), "table": [list(r) for r in self.table]}


def parse_group(text: str) -> GroupSpec:
    """``Z/6``, ``Z6``, ``Z/2xZ/2``, ``S3`` or ``trivial``."""
    t = text.replace(" ", "")
    if t.lower() in ("1", "trivial"):
        return GroupSpec(factors=(1,))
    if t.upper().startswith("S") and t[1:].isdigit():
        n = int(t[1:])
        if not 1 <= n <= 6:
            raise DocumentError(f"symmetric group degree {n} out of range 1..6")
        return GroupSpec(symmetric=n)
    factors = []
    for part in t.replace("*", "x").split("x"):
        p = part.upper()
        if p.startswith("Z/"):
            p = p[2:]
        elif p.startswith("Z"):
            p = p[1:]
        else:
            raise DocumentError(f"cannot parse group {text!r}")
        if not p.isdigit() or int(p) < 1:
            raise DocumentError(f"cannot parse group {text!r}")
        factors.append(int(p))
    return GroupSpec(factors=tuple(factors))


def group_from_json(d: Any, path: str) -> GroupSpec:
    d = _obj(d, path)
    order = _int(d, "order", path)
    if "invariant_factors" in d:
        fs = _list(d, "invariant_factors", path)
        if not fs or not all(_is_int(f) and f >= 1 for f in fs):
            raise DocumentError(f"{path}.invariant_factors: expected positive integers")
        spec = GroupSpec(factors=tuple(fs))
    elif "symmetric" in d:
        spec = GroupSpec(symmetric=_int(d, "symmetric", path))
    elif "table" in d:
        rows = _list(d, "table", path)
        if not all(isinstance(r, list) and all(_is_int(x) for x in r) for r in rows):
            raise DocumentError(f"{path}.table: expected a list of integer rows")
        spec = GroupSpec(table=tuple(tuple(r) for r in rows))
    else:
        raise DocumentError(f"{path}: needs one of invariant_factors, symmetric, table")
    try:
        n = spec.build().order
    except GroupError as exc:
        raise InvariantError(f"{path}: {exc}") from exc
    if n != order:
        raise DocumentError(f"{path}.order: stated {order}, group has {n} elements")
    return spec


# schema helpers --------------------------------------------------------------------------

_MISSING = object()


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _obj(x: Any, path: str) -> dict:
    if not isinstance(x, dict):
        raise DocumentError(f"{path}: expected an object")
    return x


def _field(d: Mapping, key: str, path: str, default: Any = _MISSING) -> Any:
    if key not in d:
        if default is _MISSING:
            raise DocumentError(f"{path}: missing field {key!r}")
        return default
    return d[key]


def _int(d: Mapping, key: str, path: str, default: Any = _MISSING) -> int:
    x = _field(d, key, path, default)
    if not _is_int(x):
        raise DocumentError(f"{path}.{key}: expected an integer")
    return x


def _str(d: Mapping, key: str, path: str, default: Any = _MISSING) -> str:
    x = _field(d, key, path, default)
    if not isinstance(x, str):
        raise DocumentError(f"{path}.{key}: expected a string")
    return x


def _list(d: Mapping, key: str, path: str, default: Any = _MISSING) -> list:
    x = _field(d, key, path, default)
    if not isinstance(x, list):
        raise DocumentError(f"{path}.{key}: expected an array")
    return x


def _matrix(x: Any, path: str) -> tuple[tuple[int, int], tuple[int, int]]:
    if not (isinstance(x, list) and len(x) == 4 and all(_is_int(c) for c in x)):
        raise DocumentError(f"{path}: expected a row-major array of 4 integers")
    return ((x[0], x[1]), (x[2], x[3]))


def _flat(m: tuple[tuple[int, int], tuple[int, int]]) -> list[int]:
    return [m[0][0], m[0][1], m[1][0], m[1][1]]


def _graph(doc: Mapping, path: str, vkey: str = "vertices") -> tuple[DartGraph, list[dict], list[tuple[str, dict]]]:
    """Build the dart graph from ``vertices[].id`` and ``edges[] {id?, bar?, from, to}``.

    Edges come back paired with their forward dart (``id``, pointing ``from`` -> ``to``).
    """
    vs = [_obj(v, f"{path}.{vkey}[{i}]") for i, v in enumerate(_list(doc, vkey, path))]
    es = [_obj(e, f"{path}.edges[{i}]") for i, e in enumerate(_list(doc, "edges", path, []))]
    b = GraphBuilder()
    fwd = []
    try:
        for i, v in enumerate(vs):
            b.add_vertex(_str(v, "id", f"{path}.{vkey}[{i}]"))
        for i, e in enumerate(es):
            p = f"{path}.edges[{i}]"
            u, w = _str(e, "from", p), _str(e, "to", p)
            darts = None
            if "id" in e or "bar" in e:
                darts = (_str(e, "id", p), _str(e, "bar", p))
            fwd.append(b.add_edge(u, w, darts))
        return b.build(), vs, list(zip(fwd, es))
    except GraphError as exc:
        raise InvariantError(f"{path}: {exc}") from exc


def _edges_json(G: DartGraph, extra: Mapping[str, Mapping[str, Any]] | None = None) -> list[dict]:
    out = []
    for y in G.edge_pairs():
        e = {"id": y, "bar": G.bar[y], "from": G.origin[y], "to": G.terminus[y]}
        if extra:
            e.update(extra[y])
        out.append(e)
    return out


# dpg / mpg ---------------------------------------------------------------------------------


def dpg_to_json(g: DecoratedPlumbingGraph) -> dict:
    vs = []
    for v in g.graph.vertices:
        if v in g.boundary:
            vs.append({"id": v, "kind": "boundary"})
        else:
            vs.append({"id": v, "kind": "interior", "genus": g.genus[v], "euler": g.euler[v]})
    return {"kind": "dpg", "vertices": vs, "edges": _edges_json(g.graph, {y: {"sign": g.sign[y]} for y in g.graph.darts})}


def _dpg_parts(
    doc: Mapping, path: str, require_connected: bool = True
) -> tuple[DecoratedPlumbingGraph, list[tuple[str, dict]]]:
    G, vs, es = _graph(doc, path)
    boundary, genus, euler = [], {}, {}
    for i, v in enumerate(vs):
        p = f"{path}.vertices[{i}]"
        kind = _str(v, "kind", p, "interior")
        if kind == "boundary":
            boundary.append(v["id"])
        elif kind == "interior":
            genus[v["id"]] = _int(v, "genus", p, 0)
            euler[v["id"]] = _int(v, "euler", p)
        else:
            raise DocumentError(f"{p}.kind: expected 'interior' or 'boundary'")
    sign = {}
    for i, (y, e) in enumerate(es):
        s = _int(e, "sign", f"{path}.edges[{i}]", 1)
        sign[y] = sign[G.bar[y]] = s
    try:
        return validate_dpg(G, boundary, genus, euler, sign, require_connected=require_connected), es
    except PlumbingError as exc:
        raise InvariantError(f"{path}: {exc}") from exc


def dpg_from_json(doc: Mapping, path: str = "$") -> DecoratedPlumbingGraph:
    return _dpg_parts(doc, path)[0]


def mpg_to_json(g: ModifiedPlumbingGraph) -> dict:
    d = dpg_to_json(g.base)
    d["kind"] = "mpg"
    G = g.base.graph
    for e in d["edges"]:
        e["m_fwd"] = _flat(g.m[e["id"]])
        e["m_bwd"] = _flat(g.m[G.bar[e["id"]]])
    return d


def mpg_from_json(doc: Mapping, path: str = "$") -> ModifiedPlumbingGraph:
    base, es = _dpg_parts(doc, path)
    G = base.graph
    m = {}
    for i, (y, e) in enumerate(es):
        p = f"{path}.edges[{i}]"
        m[y] = _matrix(_field(e, "m_fwd", p), f"{p}.m_fwd")
        m[G.bar[y]] = _matrix(_field(e, "m_bwd", p), f"{p}.m_bwd")
    try:
        return validate_mpg(base, m)
    except PlumbingError as exc:
        raise InvariantError(f"{path}: {exc}") from exc


# W-graphs ------------------------------------------------------------------------------------


def wgraph_to_json(w: WGraph) -> dict:
    G = w.graph
    vs = [{"id": v, "weight": list(w.weights[v]) if w.weights[v] is not None else None} for v in G.vertices]
    extra = {
        y: {"alpha": w.alpha[y], "beta": w.beta[y], "beta_bar": w.beta[G.bar[y]], "eps": w.eps.get(y, 1)}
        for y in G.darts
    }
    return {"kind": "wgraph", "vertices": vs, "edges": _edges_json(G, extra)}


def wgraph_from_json(doc: Mapping, path: str = "$") -> WGraph:
    G, vs, es = _graph(doc, path)
    weights: dict[str, tuple[int, int, int] | None] = {}
    for i, v in enumerate(vs):
        p = f"{path}.vertices[{i}]"
        wt = _field(v, "weight", p)
        if wt is not None and not (isinstance(wt, list) and len(wt) == 3 and all(_is_int(x) for x in wt)):
            raise DocumentError(f"{p}.weight: expected [g, r, s] or null")
        weights[v["id"]] = tuple(wt) if wt is not None else None  # type: ignore[assignment]
    alpha, beta, eps = {}, {}, {}
    for i, (y, e) in enumerate(es):
        p = f"{path}.edges[{i}]"
        yb = G.bar[y]
        alpha[y] = alpha[yb] = _int(e, "alpha", p)
        beta[y], beta[yb] = _int(e, "beta", p), _int(e, "beta_bar", p)
        eps[y] = eps[yb] = _int(e, "eps", p, 1)
    try:
        return validate_wgraph(WGraph(G, weights, alpha, beta, eps))
    except PlumbingError as exc:
        raise InvariantError(f"{path}: {exc}") from exc


# curves --------------------------------------------------------------------------------------


def branch_to_json(b: BranchSpec) -> dict:
    d: dict[str, Any] = {"component": b.component, "kind": b.kind, "tangent": b.tangent}
    if b.kind == "cusp":
        d["p"], d["q"] = b.p, b.q
    if b.id:
        d["id"] = b.id
    return d


def point_to_json(sp: SingularPointSpec) -> dict:
    return {"id": sp.id, "branches": [branch_to_json(b) for b in sp.branches]}


def _point_from_json(d: Any, path: str) -> SingularPointSpec:
    d = _obj(d, path)
    brs = []
    for j, b in enumerate(_list(d, "branches", path)):
        p = f"{path}.branches[{j}]"
        b = _obj(b, p)
        kind = _str(b, "kind", p, "smooth")
        if kind not in ("smooth", "cusp"):
            raise DocumentError(f"{p}.kind: expected 'smooth' or 'cusp'")
        pq = (_int(b, "p", p), _int(b, "q", p)) if kind == "cusp" else (1, 2)
        brs.append(BranchSpec(_str(b, "component", p), kind, *pq, _str(b, "tangent", p, ""), _str(b, "id", p, "")))
    return SingularPointSpec(_str(d, "id", path), tuple(brs))


def curvespec_to_json(s: CurveSpec) -> dict:
    return {
        "kind": "curvespec",
        "components": [{"id": c, "degree": d} for c, d in s.components],
        "points": [point_to_json(p) for p in s.points],
        "complete": s.complete,
    }


def curvespec_from_json(doc: Mapping, path: str = "$") -> CurveSpec:
    comps = []
    for i, c in enumerate(_list(doc, "components", path)):
        p = f"{path}.components[{i}]"
        c = _obj(c, p)
        deg = _int(c, "degree", p)
        if deg < 1:
            raise DocumentError(f"{p}.degree: must be positive")
        comps.append((_str(c, "id", p), deg))
    complete = _field(doc, "complete", path, True)
    if not isinstance(complete, bool):
        raise DocumentError(f"{path}.complete: expected a boolean")
    try:
        pts = tuple(_point_from_json(x, f"{path}.points[{i}]") for i, x in enumerate(_list(doc, "points", path, [])))
        return CurveSpec(tuple(comps), pts, complete)
    except CurveError as exc:
        raise InvariantError(f"{path}: {exc}") from exc


def qttype_to_json(t: QTType) -> dict:
    return {"kind": "qttype", "type": qt_type_string(t)}


def qt_type_string(t: QTType) -> str:
    return ",".join("(" + ",".join(map(str, p)) + ")" for p in t.parts)


def qttype_from_json(doc: Mapping, path: str = "$") -> QTType:
    try:
        return parse_qt_type(_str(doc, "type", path))
    except CurveError as exc:
        raise InvariantError(f"{path}.type: {exc}") from exc


def cmb_to_json(m: MarkedCombinatorics) -> dict:
    g = m.graph
    strs = set(m.str_vertices)
    vs = []
    for v in g.graph.vertices:
        d: dict[str, Any] = {"id": v, "kind": "interior", "genus": g.genus[v], "euler": g.euler[v]}
        if v in strs:
            d["str"] = True
            d["degree"] = m.degrees[v]
        if v in m.over:
            d["over"] = m.over[v]
        vs.append(d)
    return {
        "kind": "cmb",
        "vertices": vs,
        "edges": _edges_json(g.graph, {y: {"sign": g.sign[y]} for y in g.graph.darts}),
        "history": [r.to_json() for r in m.history],
        "points": [point_to_json(p) for p in m.points.values()],
        "branch_ends": dict(m.branch_ends),
        "node_edges": dict(m.node_edges),
    }


def cmb_from_json(doc: Mapping, path: str = "$") -> MarkedCombinatorics:
    g, _ = _dpg_parts(doc, path, require_connected=False)
    if g.boundary:
        raise DocumentError(f"{path}: combinatorics carry no boundary vertices")
    vs = _list(doc, "vertices", path)
    strs, degrees, over = [], {}, {}
    for i, v in enumerate(vs):
        p = f"{path}.vertices[{i}]"
        if _field(v, "str", p, False) is True:
            strs.append(v["id"])
            degrees[v["id"]] = _int(v, "degree", p)
        if "over" in v:
            over[v["id"]] = _str(v, "over", p)
    points = {}
    for i, x in enumerate(_list(doc, "points", path, [])):
        try:
            sp = _point_from_json(x, f"{path}.points[{i}]")
        except CurveError as exc:
            raise InvariantError(f"{path}.points[{i}]: {exc}") from exc
        points[sp.id] = sp
    history = []
    for i, r in enumerate(_list(doc, "history", path, [])):
        try:
            history.append(HistoryRecord.from_json(r))
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"{path}.history[{i}]: malformed record") from exc
    ends = _obj(_field(doc, "branch_ends", path, {}), f"{path}.branch_ends")
    nodes = _obj(_field(doc, "node_edges", path, {}), f"{path}.node_edges")
    G = g.graph
    for key, table in (("branch_ends", ends), ("node_edges", nodes)):
        for k, y in table.items():
            if y not in G.bar:
                raise DocumentError(f"{path}.{key}.{k}: unknown dart {y!r}")
    for v, pid in over.items():
        if pid not in points:
            raise DocumentError(f"{path}: vertex {v!r} lies over unknown point {pid!r}")
    for pid in nodes:
        if pid not in points:
            raise DocumentError(f"{path}.node_edges: unknown point {pid!r}")
    for sp in points.values():
        for bid, br in zip(sp.branch_ids(f"{sp.id}."), sp.branches):
            if br.component not in degrees:
                raise DocumentError(f"{path}: point {sp.id!r} refers to unknown component {br.component!r}")
            if bid not in ends:
                raise DocumentError(f"{path}.branch_ends: branch {bid!r} has no dart")
    for i, r in enumerate(history):
        for x, _ in r.incident:
            if x not in G:
                raise DocumentError(f"{path}.history[{i}]: unknown vertex {x!r}")
        if r.new not in G:
            raise DocumentError(f"{path}.history[{i}]: unknown vertex {r.new!r}")
    return MarkedCombinatorics(g, tuple(strs), degrees, tuple(history), points, over, dict(ends), dict(nodes))


# covers ---------------------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverInput:
    """A curve document, a group and meridian images (Str-only or complete)."""

    curve: Document
    group: GroupSpec
    meridians: Mapping[str, int]
    extra: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def combinatorics(self) -> MarkedCombinatorics:
        return combinatorics_of(self.curve)

    def datum(self) -> CoverDatum:
        m = self.combinatorics()
        G = self.group.build()
        verts = set(m.graph.graph.vertices)
        unknown = sorted(set(self.meridians) - verts)
        if unknown:
            raise DocumentError(f"meridians given for unknown vertices {unknown}")
        for v in list(self.meridians) + list(self.extra):
            for x in [self.meridians.get(v, 0), *self.extra.get(v, ())]:
                if not 0 <= x < G.order:
                    raise DocumentError(f"vertex {v!r}: element {x} out of range 0..{G.order - 1}")
        if set(self.meridians) == verts:
            mer = dict(self.meridians)
        else:
            missing = [c for c in m.str_vertices if c not in self.meridians]
            if missing:
                raise DocumentError(f"meridians missing for components {missing}")
            try:
                mer = propagate_meridians(m, G, self.meridians)
            except CoverError as exc:
                raise InvariantError(str(exc)) from exc
        try:
            return CoverDatum(G, mer, m, dict(self.extra))
        except CoverError as exc:
            raise InvariantError(str(exc)) from exc

    def branch(self) -> list[str]:
        m = self.combinatorics()
        return [c for c in m.str_vertices if self.meridians.get(c, 0) != 0]


def combinatorics_of(doc: Document) -> MarkedCombinatorics:
    try:
        if doc.kind == "cmb":
            return doc.value
        if doc.kind == "curvespec":
            return build_combinatorics(doc.value)
        if doc.kind == "qttype":
            return build_quasi_triangular(doc.value)
    except CurveError as exc:
        raise InvariantError(str(exc)) from exc
    raise DocumentError(f"a {doc.kind!r} document does not describe a curve")


def cover_to_json(c: CoverInput) -> dict:
    return {
        "kind": "cover",
        "curve": to_json(c.curve),
        "group": c.group.to_json(),
        "meridians": dict(c.meridians),
        "extra": {v: list(x) for v, x in c.extra.items()},
    }


def cover_from_json(doc: Mapping, path: str = "$") -> CoverInput:
    curve = from_json(_obj(_field(doc, "curve", path), f"{path}.curve"), f"{path}.curve")
    if curve.kind not in ("cmb", "curvespec", "qttype"):
        raise DocumentError(f"{path}.curve: expected a cmb, curvespec or qttype document")
    group = group_from_json(_field(doc, "group", path), f"{path}.group")
    mer = {
        v: group.element(x, f"{path}.meridians.{v}")
        for v, x in _obj(_field(doc, "meridians", path), f"{path}.meridians").items()
    }
    extra = {}
    for v, xs in _obj(_field(doc, "extra", path, {}), f"{path}.extra").items():
        if not isinstance(xs, list):
            raise DocumentError(f"{path}.extra.{v}: expected an array")
        extra[v] = tuple(group.element(x, f"{path}.extra.{v}") for x in xs)
    return CoverInput(curve, group, mer, extra)


def gcomb_to_json(gc: GCombinatorics) -> dict:
    H = gc.graph
    elems = list(gc.group.elements)
    vs = [
        {
            "id": w,
            "g_theta": gc.g_theta[w],
            "e_theta": str(gc.e_theta[w]),
            "pr": gc.pr[w],
            "orbit": [gc.action[g][w] for g in elems],
        }
        for w in H.vertices
    ]
    extra = {
        z: {
            "m_fwd": _flat(gc.m_theta[z]),
            "m_bwd": _flat(gc.m_theta[H.bar[z]]),
            "pr": gc.pr[z],
            "orbit": [gc.action[g][z] for g in elems],
        }
        for z in H.darts
    }
    return {
        "kind": "gcomb",
        "base": cmb_to_json(gc.base),
        "group": {"order": gc.group.order, "table": [list(r) for r in gc.group.table]},
        "vertices": vs,
        "edges": _edges_json(H, extra),
    }


def gcomb_from_json(doc: Mapping, path: str = "$") -> GCombinatorics:
    base = cmb_from_json(_obj(_field(doc, "base", path), f"{path}.base"), f"{path}.base")
    grp = group_from_json(_field(doc, "group", path), f"{path}.group").build()
    H, vs, es = _graph(doc, path)
    B = base.graph.graph
    elems = list(grp.elements)
    pr: dict[str, str] = {}
    g_theta, e_theta, m_theta = {}, {}, {}
    action: dict[int, dict[str, str]] = {g: {} for g in elems}

    def orbit(d: Mapping, p: str, x: str, valid) -> None:
        ob = _list(d, "orbit", p)
        if len(ob) != len(elems) or not all(isinstance(t, str) and valid(t) for t in ob):
            raise DocumentError(f"{p}.orbit: expected {len(elems)} ids, one per group element")
        for g in elems:
            action[g][x] = ob[g]

    for i, v in enumerate(vs):
        p = f"{path}.vertices[{i}]"
        w = v["id"]
        g_theta[w] = _int(v, "g_theta", p)
        try:
            e_theta[w] = Fraction(_str(v, "e_theta", p))
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"{p}.e_theta: expected a 'p/q' string") from exc
        pr[w] = _str(v, "pr", p)
        if pr[w] not in B:
            raise DocumentError(f"{p}.pr: unknown base vertex {pr[w]!r}")
        orbit(v, p, w, lambda t: t in H)
    for i, (y, e) in enumerate(es):
        p = f"{path}.edges[{i}]"
        yb = H.bar[y]
        m_theta[y] = _matrix(_field(e, "m_fwd", p), f"{p}.m_fwd")
        m_theta[yb] = _matrix(_field(e, "m_bwd", p), f"{p}.m_bwd")
        py = _str(e, "pr", p)
        if py not in B.bar:
            raise DocumentError(f"{p}.pr: unknown base dart {py!r}")
        pr[y], pr[yb] = py, B.bar[py]
        orbit(e, p, y, lambda t: t in H.bar)
        for g in elems:
            action[g][yb] = H.bar[action[g][y]]
    for z in H.darts:
        if pr[H.origin[z]] != B.origin[pr[z]] or pr[H.terminus[z]] != B.terminus[pr[z]]:
            raise DocumentError(f"{path}: projection is not a graph map at dart {z!r}")
    for g in elems:
        for h in elems:
            gh = grp.mul(g, h)
            for x in action[0]:
                if action[g][action[h][x]] != action[gh][x]:
                    raise DocumentError(f"{path}: orbits do not define a group action")
        for x, gx in action[g].items():
            if pr[gx] != pr[x]:
                raise DocumentError(f"{path}: action does not commute with the projection at {x!r}")
    if any(x != y for x, y in action[0].items()):
        raise DocumentError(f"{path}: the identity must act trivially")
    return GCombinatorics(H, base, grp, g_theta, e_theta, m_theta, action, pr)


# dispatch -----------------------------------------------------------------------------------

_ENCODE = {
    "dpg": dpg_to_json,
    "mpg": mpg_to_json,
    "wgraph": wgraph_to_json,
    "curvespec": curvespec_to_json,
    "qttype": qttype_to_json,
    "cmb": cmb_to_json,
    "cover": cover_to_json,
    "gcomb": gcomb_to_json,
}

_DECODE = {
    "dpg": dpg_from_json,
    "mpg": mpg_from_json,
    "wgraph": wgraph_from_json,
    "curvespec": curvespec_from_json,
    "qttype": qttype_from_json,
    "cmb": cmb_from_json,
    "cover": cover_from_json,
    "gcomb": gcomb_from_json,
}


def to_json(doc: Document) -> dict:
    return _ENCODE[doc.kind](doc.value)


def from_json(d: Any, path: str = "$") -> Document:
    d = _obj(d, path)
    kind = _field(d, "kind", path)
    if kind not in KINDS:
        raise DocumentError(f"{path}.kind: unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    return Document(kind, _DECODE[kind](d, path))


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dumps(doc: Document) -> str:
    return canonical_json(to_json(doc))


def loads(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from exc
    return from_json(raw)


def load(path: str | Path) -> Document:
    return loads(Path(path).read_text(encoding="utf-8"))


def wrap(value: Any) -> Document:
    """Document around a library value, inferring the kind from its type."""
    for kind, typ in (
        ("dpg", DecoratedPlumbingGraph),
        ("mpg", ModifiedPlumbingGraph),
        ("wgraph", WGraph),
        ("curvespec", CurveSpec),
        ("qttype", QTType),
        ("cmb", MarkedCombinatorics),
        ("cover", CoverInput),
        ("gcomb", GCombinatorics),
    ):
        if isinstance(value, typ):
            return Document(kind, value)
    raise TypeError(f"no document kind for {type(value).__name__}")
