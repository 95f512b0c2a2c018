"""Command line interface: ``plumbcalc <command> ...``.

Exit codes: 0 success (or "true" for decision commands), 1 "false"/"none",
2 input error.  All output is canonical JSON unless ``--format dot``.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from itertools import combinations
from typing import Any, Callable, TextIO

from . import __version__
from .calculus import (
    RewriteError,
    chain_dual,
    normal_form_violations,
    normalize_resolution,
    random_blow_ups,
    random_resolution_graph,
    reverse_orientation,
    to_wgraph,
    wgraph_equiv,
)
from .curves import CurveError, build_quasi_triangular, cmb_equivalent, parse_qt_type, resolve_singularity
from .documents import (
    CoverInput,
    Document,
    DocumentError,
    InvariantError,
    canonical_json,
    combinatorics_of,
    dpg_to_json,
    dumps,
    load,
    parse_group,
)
from .dot import export_dot, splitting_dot
from .gcover import CoverError, GroupError, build_gcombinatorics, gequiv
from .graph import GraphError
from .plumbing import (
    PlumbingError,
    definiteness,
    determinant,
    dpg_isomorphism,
    intersection_form,
    same_dpg,
)
from .seifert import star_euler, star_to_seifert
from .splitting import (
    SplittingError,
    connected_number,
    splitting_graph,
    splitting_number,
    splitting_type,
    subcombinatorics,
)


class Fail(Exception):
    """Decision result "false": report on stdout, exit 1."""

    def __init__(self, payload: Any) -> None:
        self.payload = payload


INPUT_ERRORS = (DocumentError, PlumbingError, CurveError, CoverError, GroupError, GraphError, SplittingError, OSError)


def _expect(doc: Document, *kinds: str) -> Document:
    if doc.kind not in kinds:
        raise DocumentError(f"expected a {' or '.join(kinds)} document, got {doc.kind!r}")
    return doc


def _emit(args: argparse.Namespace, out: TextIO, payload: Any, dot: Callable[[], str] | None = None) -> None:
    if args.format == "dot":
        if dot is None:
            raise DocumentError("this command has no DOT output")
        text = dot()
    elif isinstance(payload, Document):
        text = dumps(payload)
    else:
        text = canonical_json(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def _witness(iso) -> dict:
    return {"vertices": dict(iso.vertex_map), "darts": dict(iso.dart_map)}


def _cover(args: argparse.Namespace, doc: Document) -> CoverInput:
    if doc.kind == "cover":
        c: CoverInput = doc.value
        group = parse_group(args.group) if getattr(args, "group", None) else c.group
        mer = _assignment(args.assign, group) if getattr(args, "assign", None) else dict(c.meridians)
        return CoverInput(c.curve, group, mer, dict(c.extra))
    _expect(doc, "cmb", "curvespec", "qttype")
    if not getattr(args, "group", None) or not getattr(args, "assign", None):
        raise DocumentError("a curve document needs --group and --assign")
    group = parse_group(args.group)
    return CoverInput(doc, group, _assignment(args.assign, group))


def _assignment(text: str, group) -> dict[str, int]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise DocumentError(f"--assign: expected vertex=element, got {part!r}")
        v, x = part.split("=", 1)
        try:
            out[v.strip()] = int(x)
        except ValueError as exc:
            raise DocumentError(f"--assign: {x!r} is not an element index") from exc
    return out


# commands ------------------------------------------------------------------------------------


def cmd_validate(args, out):
    try:
        doc = load(args.file)
    except InvariantError as exc:
        raise Fail({"valid": False, "error": str(exc)}) from exc
    if doc.kind == "cover":
        try:
            build_gcombinatorics(doc.value.datum())
        except (InvariantError, CoverError) as exc:
            raise Fail({"kind": doc.kind, "valid": False, "error": str(exc)}) from exc
    elif doc.kind in ("curvespec", "qttype"):
        try:
            combinatorics_of(doc)
        except InvariantError as exc:
            raise Fail({"kind": doc.kind, "valid": False, "error": str(exc)}) from exc
    _emit(args, out, {"kind": doc.kind, "valid": True})


def cmd_normalize(args, out):
    doc = _expect(load(args.file), "dpg")
    try:
        nf = normalize_resolution(doc.value)
    except RewriteError as exc:
        raise DocumentError(str(exc)) from exc
    res = Document("dpg", nf.graph)
    payload: Any = res
    if args.trace:
        payload = {"normal_form": dpg_to_json(nf.graph), "trace": [s.to_json() for s in nf.trace]}
    _emit(args, out, payload, lambda: export_dot(res))


def cmd_reverse(args, out):
    doc = _expect(load(args.file), "dpg")
    res = Document("dpg", reverse_orientation(doc.value))
    _emit(args, out, res, lambda: export_dot(res))


def cmd_iform(args, out):
    g = _expect(load(args.file), "dpg").value
    S = intersection_form(g)
    _emit(
        args,
        out,
        {
            "order": list(S.vertices),
            "matrix": [list(r) for r in S.matrix],
            "definiteness": definiteness(S),
            "determinant": determinant(S.matrix) if S.vertices else 1,
        },
    )


def cmd_wgraph(args, out):
    g = _expect(load(args.file), "dpg").value
    res = Document("wgraph", to_wgraph(g))
    _emit(args, out, res, lambda: export_dot(res))


def cmd_equiv(args, out):
    a, b = load(args.a), load(args.b)
    if a.kind == b.kind == "dpg":
        iso = dpg_isomorphism(a.value, b.value)
    elif a.kind == b.kind == "wgraph":
        ok, iso = wgraph_equiv(a.value, b.value)
        if ok and iso is None:
            _emit(args, out, {"equivalent": True, "exceptional_pair": True, "witness": None})
            return
    elif {a.kind, b.kind} <= {"cmb", "curvespec", "qttype"}:
        iso = cmb_equivalent(combinatorics_of(a), combinatorics_of(b))
    else:
        raise DocumentError(f"cannot compare a {a.kind!r} document with a {b.kind!r} document")
    if iso is None:
        raise Fail({"equivalent": False})
    _emit(args, out, {"equivalent": True, "witness": _witness(iso)})


def cmd_seifert(args, out):
    g = _expect(load(args.file), "dpg").value
    G = g.graph
    center = args.center
    if center is None:
        inner = g.interior
        if not inner:
            raise DocumentError("graph has no interior vertex")
        center = max(inner, key=lambda v: (len([w for w in G.neighbors(v) if w not in g.boundary]), -inner.index(v)))
    sd = star_to_seifert(g, center)
    e = star_euler(g, center)
    kind = definiteness(intersection_form(g))
    _emit(
        args,
        out,
        {
            "center": center,
            "seifert": sd.to_json(),
            "euler": str(e) if e is not None else None,
            "center_euler": g.euler[center],
            "definiteness": kind,
        },
    )


def cmd_resolve(args, out):
    spec = _expect(load(args.file), "curvespec").value
    pts = {p.id: p for p in spec.points}
    if args.point is None:
        if len(pts) != 1:
            raise DocumentError(f"--point is required: the curve has {len(pts)} singular points")
        pid = next(iter(pts))
    else:
        pid = args.point
        if pid not in pts:
            raise DocumentError(f"unknown point {pid!r}")
    g, _ = resolve_singularity(pts[pid])
    res = Document("dpg", g)
    _emit(args, out, res, lambda: export_dot(res))


def cmd_build(args, out):
    doc = _expect(load(args.file), "curvespec", "qttype", "cmb")
    res = Document("cmb", combinatorics_of(doc))
    _emit(args, out, res, lambda: export_dot(res))


def cmd_qt(args, out):
    t = parse_qt_type(args.type)
    res = Document("cmb", build_quasi_triangular(t))
    _emit(args, out, res, lambda: export_dot(res))


def cmd_gcover(args, out):
    cover = _cover(args, load(args.file))
    res = Document("gcomb", build_gcombinatorics(cover.datum()))
    _emit(args, out, res, lambda: export_dot(res))


def cmd_invariants(args, out):
    cover = _cover(args, _expect(load(args.file), "cover"))
    gc = build_gcombinatorics(cover.datum())
    branch = cover.branch()
    rest = [c for c in gc.base.str_vertices if c not in branch]
    comps = [c.strip() for c in args.components.split(",") if c.strip()] if args.components else rest
    sc = subcombinatorics(gc, comps, branch)
    full = subcombinatorics(gc, rest, branch)
    sg = splitting_graph(full)
    report: dict[str, Any] = {
        "branch_locus": branch,
        "components": comps,
        "splitting_numbers": {c: splitting_number(gc, c, branch) for c in comps},
        "connected_number": connected_number(sc),
        "splitting_graph": {
            "part1": list(sg.part1),
            "part2": list(sg.part2),
            "edges": [[sg.graph.origin[y], sg.graph.terminus[y]] for y in sg.graph.edge_pairs()],
        },
    }
    if gc.group.order == 2:
        types = {}
        for c1, c2 in combinations(comps, 2):
            try:
                types[f"{c1}|{c2}"] = list(splitting_type(gc, c1, c2, branch))
            except SplittingError:
                continue
        report["splitting_type"] = types
    _emit(args, out, report, lambda: splitting_dot(sg))


def _gcomb_of(args, path: str):
    doc = load(path)
    if doc.kind == "gcomb":
        return doc.value
    return build_gcombinatorics(_cover(args, _expect(doc, "cover")).datum())


def cmd_gequiv(args, out):
    w = gequiv(_gcomb_of(args, args.a), _gcomb_of(args, args.b))
    if w is None:
        raise Fail({"equivalent": False})
    _emit(
        args,
        out,
        {
            "equivalent": True,
            "witness": {
                "base_vertices": dict(w.base_vertices),
                "base_darts": dict(w.base_darts),
                "vertices": dict(w.vertices),
                "darts": dict(w.darts),
                "tau": {str(k): v for k, v in w.tau.items()},
            },
        },
    )


def cmd_dot(args, out):
    doc = load(args.file)
    text = export_dot(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def selftest(seed: int, count: int) -> dict:
    """Seeded random checks of the rewriting system and chain duality."""
    rng = random.Random(seed)
    checks = {name: {"passed": 0, "failed": 0} for name in ("normal_form_law", "normal_form_shape", "reverse_twice", "dual_involution")}

    def tally(name: str, ok: bool) -> None:
        checks[name]["passed" if ok else "failed"] += 1

    for _ in range(count):
        g = random_resolution_graph(rng)
        nf = normalize_resolution(g).graph
        blown = random_blow_ups(g, rng, rng.randint(1, 3))
        tally("normal_form_law", same_dpg(normalize_resolution(blown).graph, nf))
        tally("normal_form_shape", not normal_form_violations(nf))
        try:
            back = reverse_orientation(reverse_orientation(nf))
        except PlumbingError:
            pass
        else:
            tally("reverse_twice", same_dpg(back, nf))
        s = [rng.randint(2, 6) for _ in range(rng.randint(1, 6))]
        tally("dual_involution", chain_dual(chain_dual(s)) == s)
    return {"seed": seed, "count": count, "checks": checks}


def cmd_selftest(args, out):
    raw = os.environ.get("PLUMBCALC_SEED", "0")
    try:
        seed = int(raw)
    except ValueError as exc:
        raise DocumentError(f"PLUMBCALC_SEED must be an integer, got {raw!r}") from exc
    report = selftest(seed, args.count)
    if any(c["failed"] for c in report["checks"].values()):
        raise Fail(report)
    _emit(args, out, report)


# parser --------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plumbcalc", description="Plumbing graph and curve combinatorics toolkit.")
    p.add_argument("--version", action="version", version=f"plumbcalc {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result to this file instead of stdout")
    common.add_argument("--format", choices=("json", "dot"), default="json")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func, help: str, files: tuple[str, ...] = ("file",)):
        sp = sub.add_parser(name, parents=[common], help=help, description=help)
        for f in files:
            sp.add_argument(f)
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check a document against the schema and structural rules")
    add("normalize", cmd_normalize, "reduce a resolution graph to its normal form").add_argument(
        "--trace", action="store_true", help="also print the applied rewrites"
    )
    add("reverse", cmd_reverse, "orientation-reversed normal form")
    add("iform", cmd_iform, "intersection form, its definiteness and determinant")
    add("wgraph", cmd_wgraph, "convert a decorated graph with boundary to a W-graph")
    add("equiv", cmd_equiv, "decide equivalence of two documents of the same kind", ("a", "b"))
    add("seifert", cmd_seifert, "Seifert invariants of a star-shaped graph").add_argument("--center")
    add("resolve", cmd_resolve, "local resolution graph of one singular point").add_argument("--point")
    add("build", cmd_build, "combinatorics of a curve specification")
    sp = sub.add_parser("qt", parents=[common], help="combinatorics of a quasi-triangular curve")
    sp.add_argument("--type", required=True, help='type such as "(2),(2),(2)"')
    sp.set_defaults(func=cmd_qt)
    for name, func, files, help in (
        ("gcover", cmd_gcover, ("file",), "lifted combinatorics of a Galois cover"),
        ("invariants", cmd_invariants, ("file",), "splitting invariants of a cover"),
        ("gequiv", cmd_gequiv, ("a", "b"), "decide G-equivalence of two covers"),
    ):
        sp = add(name, func, help, files)
        sp.add_argument("--group", help="group such as Z/2, Z/2xZ/2 or S3 (overrides the document)")
        sp.add_argument("--assign", help="meridians as vertex=element,... (overrides the document)")
        if name == "invariants":
            sp.add_argument("--components", help="comma-separated subcurve (default: all unramified components)")
    add("dot", cmd_dot, "export a graph document as DOT")
    sp = sub.add_parser("selftest", parents=[common], help="seeded random checks (seed from PLUMBCALC_SEED)")
    sp.add_argument("--count", type=int, default=50)
    sp.set_defaults(func=cmd_selftest)
    return p


def run(argv: list[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        args.func(args, out)
    except Fail as f:
        out.write(canonical_json(f.payload))
        return 1
    except INPUT_ERRORS as exc:
        err.write(f"error: {exc}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
