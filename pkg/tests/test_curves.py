from __future__ import annotations

from itertools import combinations, permutations
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATA
from plumbcalc.curves import (
    CurveError,
    CurveSpec,
    QTType,
    SingularPointSpec,
    branch_delta,
    build_combinatorics,
    build_quasi_triangular,
    cmb_equivalent,
    cusp,
    delta_invariant,
    local_graph_at,
    multiplicity_sequence,
    parse_qt_type,
    partitions,
    relabel_cmb,
    resolve_singularity,
    smooth,
)
from plumbcalc.documents import combinatorics_of, dumps, load, wrap
from plumbcalc.plumbing import definiteness, intersection_form, same_dpg


def point(*branches, pid="P"):
    return SingularPointSpec(pid, tuple(branches))


NODE = point(smooth("A", "a"), smooth("B", "b"))


# multiplicities and delta ---------------------------------------------------------------------


@pytest.mark.parametrize("pq, seq", [((1, 2), [1]), ((2, 3), [2, 1, 1]), ((3, 4), [3, 1, 1, 1]), ((2, 5), [2, 2, 1, 1])])
def test_multiplicity_sequences(pq, seq):
    assert multiplicity_sequence(*pq) == seq


def test_multiplicity_delta_identity():
    for q in range(2, 40):
        for p in range(1, q):
            if gcd(p, q) == 1:
                seq = multiplicity_sequence(p, q)
                assert sum(m * (m - 1) // 2 for m in seq) == (p - 1) * (q - 1) // 2


def test_multiplicity_rejects_non_coprime():
    with pytest.raises(CurveError):
        multiplicity_sequence(2, 4)


def test_delta_examples():
    assert delta_invariant(NODE) == 1
    assert delta_invariant(point(cusp("C", 2, 3, "t"))) == 1
    assert delta_invariant(point(cusp("C", 2, 3, "t1"), cusp("C", 2, 3, "t2"))) == 6


_branch = st.one_of(
    st.just((1, 2)),
    st.sampled_from([(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)]),
)


@given(st.lists(_branch, min_size=1, max_size=4))
def test_delta_matches_branch_formula(kinds):
    # distinct tangents: branches meet with the product of their multiplicities
    brs = [smooth("C", f"t{i}") if p == 1 else cusp("C", p, q, f"t{i}") for i, (p, q) in enumerate(kinds)]
    expected = sum(branch_delta(b) for b in brs) + sum(a.p * b.p for a, b in combinations(brs, 2))
    assert delta_invariant(point(*brs)) == expected


def test_tangent_smooth_branches_meet_twice():
    assert delta_invariant(point(smooth("A", "t"), smooth("B", "t"))) == 2


# local resolutions ----------------------------------------------------------------------------


def test_node_graph_matches_fixture():
    g, _ = resolve_singularity(NODE)
    assert dumps(wrap(g)) == (DATA / "node.json").read_text()
    assert g.euler == {"E1": -1}


def test_cusp_graph():
    g, hist = resolve_singularity(point(cusp("C", 2, 3, "t")))
    assert g.euler == {"E1": -3, "E2": -2, "E3": -1}
    G = g.graph
    assert sorted(G.neighbors("E3")) == ["E1", "E2", "b1"]
    assert G.neighbors("E1") == ["E3"]
    assert [r.new for r in hist] == ["E1", "E2", "E3"]
    assert [dict(r.branches)["b1"] for r in hist] == [2, 1, 1]


def test_two_smooth_branches_of_one_curve_give_the_node_graph():
    g, _ = resolve_singularity(point(smooth("C", "a"), smooth("C", "b")))
    h, _ = resolve_singularity(NODE)
    assert same_dpg(g, h)


def test_local_forms_negative_definite():
    for brs in ([cusp("C", 3, 5, "t")], [cusp("C", 2, 3, "t"), smooth("L", "t")], [smooth("A", "t"), smooth("B", "t"), smooth("D", "u")]):
        g, _ = resolve_singularity(point(*brs))
        assert definiteness(intersection_form(g)) == "negative_definite"


def test_duplicate_tangent_on_one_component_rejected():
    with pytest.raises(CurveError):
        point(smooth("C", "t"), smooth("C", "t"))


# global combinatorics -------------------------------------------------------------------------


def test_conic():
    m = combinatorics_of(load(DATA / "conic.json"))
    assert m.graph.graph.vertices == ("C",)
    assert (m.graph.genus["C"], m.graph.euler["C"]) == (0, 4)


def test_two_lines_meet_along_an_edge():
    m = combinatorics_of(load(DATA / "two_lines.json"))
    g = m.graph
    assert (g.euler["L1"], g.euler["L2"]) == (1, 1)
    assert g.graph.neighbors("L1") == ["L2"]
    assert set(m.node_edges) == {"P"}
    # blowing up the crossing recovers the arrow-(-1)-arrow picture
    loc = local_graph_at(m, "P")
    assert loc.euler == {"P.E1": -1} and sorted(loc.boundary) == ["P.b1", "P.b2"]
    g, _ = resolve_singularity(m.points["P"])
    assert dumps(wrap(g)) == (DATA / "node.json").read_text()


def test_three_concurrent_lines():
    m = combinatorics_of(load(DATA / "three_lines.json"))
    g = m.graph
    (E,) = [v for v in g.graph.vertices if v not in m.str_vertices]
    assert g.euler[E] == -1
    assert sorted(g.graph.neighbors(E)) == sorted(m.str_vertices)
    assert all(g.euler[c] == 0 for c in m.str_vertices)


def test_cuspidal_and_nodal_cubics():
    m = combinatorics_of(load(DATA / "cuspidal_cubic.json"))
    assert (m.graph.genus["C"], m.graph.euler["C"]) == (0, 3)
    assert local_graph_at(m, "P").euler == {"P.E1": -3, "P.E2": -2, "P.E3": -1}
    m = combinatorics_of(load(DATA / "nodal_cubic.json"))
    assert (m.graph.genus["C"], m.graph.euler["C"]) == (0, 5)


def test_self_intersection_by_proximity_oracle():
    # d^2 minus the squares of the total multiplicities of C at each center
    spec = CurveSpec((("C", 7),), (point(cusp("C", 2, 3, "a"), cusp("C", 3, 4, "b"), pid="P"), point(cusp("C", 2, 5, "t"), pid="Q")))
    m = build_combinatorics(spec)
    drop = sum(x * x for x in [2 + 3, 1, 1, 1, 1, 1]) + sum(x * x for x in multiplicity_sequence(2, 5))
    assert m.graph.euler["C"] == 49 - drop
    delta = delta_invariant(spec.points[0]) + delta_invariant(spec.points[1])
    assert m.graph.genus["C"] == 15 - delta


def test_bezout_and_genus_errors():
    with pytest.raises(CurveError, match="total multiplicity"):
        build_combinatorics(CurveSpec((("A", 1), ("B", 2)), (NODE,)))
    assert build_combinatorics(CurveSpec((("A", 1), ("B", 2)), (NODE,), complete=False))
    with pytest.raises(CurveError, match="negative genus"):
        build_combinatorics(CurveSpec((("C", 2),), (point(cusp("C", 2, 3, "t")),)))


def test_local_graph_errors():
    m = combinatorics_of(load(DATA / "conic.json"))
    with pytest.raises(CurveError):
        local_graph_at(m, "P")


def test_graphs_are_loop_free_and_exceptional_genus_zero():
    for name in ("conic", "two_lines", "three_lines", "cuspidal_cubic", "nodal_cubic", "qt_222"):
        m = combinatorics_of(load(DATA / f"{name}.json"))
        G = m.graph.graph
        assert not any(G.is_loop(y) for y in G.darts)
        assert all(m.graph.genus[v] == 0 for v in G.vertices if v not in m.str_vertices)


# equivalence ---------------------------------------------------------------------------------


def test_cmb_equivalence():
    m = combinatorics_of(load(DATA / "cuspidal_cubic.json"))
    assert cmb_equivalent(m, m) is not None
    vmap = {v: f"x{i}" for i, v in enumerate(reversed(m.graph.graph.vertices))}
    assert cmb_equivalent(m, relabel_cmb(m, vmap)) is not None
    other = combinatorics_of(load(DATA / "nodal_cubic.json"))
    assert cmb_equivalent(m, other) is None


def test_changed_euler_breaks_equivalence():
    m = combinatorics_of(load(DATA / "three_lines.json"))
    from dataclasses import replace

    g2 = replace(m.graph, euler={**m.graph.euler, "L1": 5})
    assert cmb_equivalent(m, replace(m, graph=g2)) is None


# quasi-triangular curves -------------------------------------------------------------------------


def test_qt_smooth_type():
    m = build_quasi_triangular(QTType(((1, 1), (1, 1), (1, 1))))
    assert m.graph.genus["C"] == 0
    assert all(m.graph.euler[f"L{i}"] == -1 for i in (1, 2, 3))


def test_qt_three_cuspidal_quartic():
    m = build_quasi_triangular(parse_qt_type("(2),(2),(2)"))
    assert m.degrees["C"] == 4 and m.graph.genus["C"] == 0
    assert len(m.str_vertices) == 4


def test_qt_gcd_bookkeeping():
    t = parse_qt_type("((4,2),(2,2,2),(6))")
    assert t.gcds == (2, 2, 6) and t.s == 2 and t.tuple_size == 2


def test_qt_rejects_unequal_sums():
    with pytest.raises(CurveError):
        QTType(((2,), (1,), (2,)))
    with pytest.raises(CurveError):
        parse_qt_type("(2),(2)")


def test_partitions():
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert [len(partitions(n)) for n in range(1, 8)] == [1, 2, 3, 5, 7, 11, 15]


def test_qt_permuted_types_are_equivalent():
    for d in (2, 3):
        ps = partitions(d)
        for t in combinations(ps, 3):
            base = build_quasi_triangular(QTType(t))
            for perm in list(permutations(t))[1:]:
                assert cmb_equivalent(base, build_quasi_triangular(QTType(perm))) is not None
