from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plumbcalc.calculus import (
    NotNormalForm,
    RewriteError,
    RewriteSite,
    apply_rewrite,
    blow_up_edge,
    blow_up_leaf,
    chain_dual,
    chain_edge_weights,
    find_sites,
    genus_sharp,
    match,
    normal_form_violations,
    normalize_resolution,
    random_blow_ups,
    reverse_orientation,
    to_wgraph,
    wgraph_equiv,
)
from plumbcalc.graph import GraphBuilder
from plumbcalc.plumbing import (
    PlumbingError,
    WGraph,
    find_maximal_chains,
    same_dpg,
    validate_dpg,
)
from plumbcalc.seifert import cf_value

from test_plumbing import dpg, node


# single rewrites -------------------------------------------------------------------------------


def test_edge_blow_down():
    g = dpg({"v": (0, -2), "u": (0, -1), "w": (0, -3)}, [("v", "u"), ("u", "w"), ("w", "a")], boundary=("a",))
    h = apply_rewrite(g, RewriteSite("R1_plus", "u"))
    assert h.graph.vertices == ("v", "w", "a")
    assert (h.euler["v"], h.euler["w"]) == (-1, -2)
    assert len(h.graph.darts_between("v", "w")) == 1


def test_leaf_blow_down_and_its_inverse():
    g = dpg({"v": (0, -3)}, [("v", "a")], boundary=("a",))
    up = blow_up_leaf(g, "v")
    assert up.euler["v"] == -4 and up.euler["v.x"] == -1
    down = apply_rewrite(up, RewriteSite("R1_0_plus", "v.x"))
    assert same_dpg(down, g)


def test_edge_blow_up_is_undone():
    g = dpg({"v": (0, -2), "w": (0, -3)}, [("v", "w"), ("w", "a")], boundary=("a",))
    up = blow_up_edge(g, g.graph.darts[0])
    (site,) = find_sites(up, ["R1_plus"])
    assert same_dpg(apply_rewrite(up, site), g)


def test_minus_blow_down_merges_signs():
    g = dpg(
        {"v": (1, -2), "u": (0, 1), "w": (1, -3)},
        [("v", "u"), ("u", "w")],
        signs=[-1, -1],
    )
    h = apply_rewrite(g, RewriteSite("R1_minus", "u"))
    assert (h.euler["v"], h.euler["w"]) == (-3, -4)
    (y,) = h.graph.darts_between("v", "w")
    assert h.sign[y] == -1


def test_double_edge_blow_down_leaves_a_loop():
    g = dpg({"v": (1, -3), "u": (0, -1)}, [("v", "u"), ("v", "u")])
    h = apply_rewrite(g, RewriteSite("R1_plus_plus", "u"))
    assert h.euler["v"] == -1
    (y, _) = h.graph.out_darts("v")
    assert h.graph.is_loop(y) and h.sign[y] == 1


@pytest.mark.parametrize("g0, expected", [(0, -1), (1, -3), (2, -5), (-1, -2), (-3, -4)])
def test_projective_plane_sum(g0, expected):
    assert genus_sharp(g0) == expected


@pytest.mark.parametrize("g0, expected", [(0, -1), (1, -3)])
def test_absorption(g0, expected):
    g = dpg(
        {"a0": (g0, -2), "u": (0, -1), "l1": (0, -2), "l2": (0, -2)},
        [("a0", "u"), ("u", "l1"), ("u", "l2"), ("a0", "x")],
        boundary=("x",),
    )
    h = apply_rewrite(g, RewriteSite("R2", "u"))
    assert h.graph.vertices == ("a0", "x")
    assert h.genus["a0"] == expected


def test_mismatch_raises():
    with pytest.raises(RewriteError):
        apply_rewrite(node(), RewriteSite("R1_0_plus", "E"))
    with pytest.raises(RewriteError):
        match(node(), RewriteSite("R9", "E"))


# normal forms -------------------------------------------------------------------------------


def test_node_is_already_normal():
    nf = normalize_resolution(node())
    assert nf.trace == () and nf.graph == node()


def test_heavy_fork_collapse():
    g = dpg(
        {"v": (0, -2), "u": (0, -4), "l1": (0, -2), "l2": (0, -2)},
        [("v", "x"), ("v", "u"), ("u", "l1"), ("u", "l2")],
        boundary=("x",),
    )
    nf = normalize_resolution(g)
    assert [s.op for s in nf.trace] == ["FN1"]
    h = nf.graph
    assert h.euler["u"] == -3 and h.euler["v"] == -2
    assert (h.genus["u.w"], h.euler["u.w"]) == (-1, 0)
    assert h.graph.neighbors("u.w") == ["u"]


def test_dangling_fork_collapse_takes_maximal_chain():
    g = dpg(
        {"v": (0, -3), "c": (0, -2), "f": (0, -2), "l1": (0, -2), "l2": (0, -2)},
        [("v", "x"), ("v", "c"), ("c", "f"), ("f", "l1"), ("f", "l2")],
        boundary=("x",),
    )
    nf = normalize_resolution(g)
    assert [s.op for s in nf.trace] == ["FN2"]
    h = nf.graph
    assert set(h.graph.vertices) == {"v", "x", "f.w"}
    assert h.euler["v"] == -2
    assert (h.genus["f.w"], h.euler["f.w"]) == (-1, 2)


def test_normalize_rejects_bad_input():
    with pytest.raises(RewriteError, match="negative definite"):
        normalize_resolution(dpg({"v": (0, 1)}, [("v", "x")], boundary=("x",)))
    with pytest.raises(RewriteError, match="cyclic"):
        normalize_resolution(
            dpg({f"c{i}": (0, -3) for i in range(3)}, [(f"c{i}", f"c{(i + 1) % 3}") for i in range(3)])
        )


def test_normal_forms_on_corpus(graphs):
    for g in graphs:
        nf = normalize_resolution(g)
        assert normal_form_violations(nf.graph) == []
        assert all(s == 1 for s in nf.graph.sign.values())
        # nothing left to rewrite
        assert not find_sites(nf.graph, ("R1_0_plus", "R1_plus", "R1_plus_plus", "FN1", "FN2"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_blow_ups_do_not_change_the_normal_form(seed, count):
    from conftest import corpus

    rng = random.Random(seed)
    g = corpus(1, seed)[0]
    nf = normalize_resolution(g).graph
    assert same_dpg(normalize_resolution(random_blow_ups(g, rng, count)).graph, nf)


# chain duality -------------------------------------------------------------------------------


def strings(max_len=6, hi=6):
    for k in range(1, max_len + 1):
        yield from (list(s) for s in product(range(2, hi + 1), repeat=k))


@pytest.mark.parametrize("b, dual", [([2], [2]), ([3], [2, 2]), ([3, 2], [2, 3]), ([2, 2, 2], [4])])
def test_dual_examples(b, dual):
    assert chain_dual(b) == dual


def test_dual_matches_fraction_oracle():
    for b in strings(4, 5):
        v = cf_value(b)
        assert cf_value(chain_dual(b)) == v / (v - 1)


def test_dual_rejects_small_entries():
    with pytest.raises(ValueError):
        chain_dual([2, 1])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(2, 9), min_size=1, max_size=8))
def test_dual_is_an_involution(b):
    assert chain_dual(chain_dual(b)) == b


def test_reversed_chain_reciprocity():
    for b in strings(4, 5):
        a, beta = chain_edge_weights(b)
        a2, beta2 = chain_edge_weights(b[::-1])
        assert a == a2
        assert (beta * beta2 - 1) % a == 0


# orientation reversal --------------------------------------------------------------------------


def test_reverse_chain_between_genus_one_vertices():
    g = dpg({"v": (1, -1), "p": (0, -3), "w": (1, -1)}, [("v", "p"), ("p", "w")])
    h = reverse_orientation(g)
    assert (h.euler["v"], h.euler["w"]) == (0, 0)
    (c,) = find_maximal_chains(h)
    assert [h.euler[x] for x in c.vertices] == [-2, -2]
    assert (c.start, c.end) == ("v", "w")


def test_reverse_bare_edge_flips_its_sign():
    g = dpg({"v": (2, -1), "w": (2, -3)}, [("v", "w")])
    h = reverse_orientation(g)
    (y, _) = h.graph.darts
    assert h.sign[y] == -1
    assert (h.euler["v"], h.euler["w"]) == (1, 3)
    assert h.genus == g.genus


def test_reverse_keeps_boundary_and_counts_chain_ends_twice():
    # a chain whose two ends both adjoin v: c(v) = 2
    g = dpg({"v": (1, -1), "p": (0, -2), "q": (0, -2)}, [("v", "p"), ("p", "q"), ("q", "v"), ("v", "x")], boundary=("x",))
    h = reverse_orientation(g)
    assert h.euler["v"] == 1 - 2
    assert h.boundary == g.boundary


def test_reverse_rejects_non_normal_chains():
    g = dpg({"v": (1, -1), "p": (0, -1), "w": (1, -1)}, [("v", "p"), ("p", "w")])
    with pytest.raises(NotNormalForm):
        reverse_orientation(g)


def test_reverse_twice_on_corpus(graphs):
    done = 0
    for g in graphs:
        nf = normalize_resolution(g).graph
        try:
            once = reverse_orientation(nf)
        except NotNormalForm:
            continue
        assert same_dpg(reverse_orientation(once), nf)
        done += 1
    assert done >= 100


# W-graphs ------------------------------------------------------------------------------------


def test_node_wgraph():
    w = to_wgraph(node())
    assert list(w.weights.values()) == [(0, 2, 0)]
    assert not w.graph.darts


def test_star_wgraph():
    legs = {f"l{i}": (0, -2) for i in range(3)}
    g = dpg({"c": (0, -2), **legs}, [("c", f"l{i}") for i in range(3)] + [("c", "x")], boundary=("x",))
    w = to_wgraph(g)
    assert w.weights["c"] == (0, 1, 0)
    assert sorted(v for v, wt in w.weights.items() if wt is None) == ["l0", "l1", "l2"]
    assert all((w.alpha[y], w.beta[y]) == (2, 1) for y in w.graph.darts)


def test_leg_weights_from_convergents():
    assert chain_edge_weights([3]) == (3, 1)
    assert chain_edge_weights([2]) == (2, 1)
    assert chain_edge_weights([]) == (1, 0)


def test_wgraph_needs_boundary():
    with pytest.raises(PlumbingError):
        to_wgraph(dpg({"v": (1, -1)}, []))
    g = dpg({"v": (1, -1), "p": (0, -1), "w": (1, -1)}, [("v", "p"), ("p", "w"), ("w", "x")], boundary=("x",))
    with pytest.raises(NotNormalForm):
        to_wgraph(g)


def test_cut_choice_does_not_matter(graphs):
    checked = 0
    for g in graphs:
        nf = normalize_resolution(g).graph
        chains = find_maximal_chains(nf)
        w = to_wgraph(nf)
        for i, c in enumerate(chains):
            if c.boundary_incident or len(c.darts) < 2:
                continue
            for y in c.darts:
                alt = to_wgraph(nf, {i: y})
                ok, _ = wgraph_equiv(w, alt)
                assert ok
                checked += 1
    assert checked > 0


def _exceptional_pair():
    b = GraphBuilder()
    for v in ("c", "p", "q"):
        b.add_vertex(v)
    y1 = b.add_edge("c", "p")
    y2 = b.add_edge("c", "q")
    G = b.build()
    big = WGraph(
        G,
        {"c": (0, 1, 0), "p": None, "q": None},
        {y: 2 for y in G.darts},
        {y: 1 for y in G.darts},
    )
    b = GraphBuilder()
    b.add_vertex("s")
    small = WGraph(b.build(), {"s": (-1, 1, 0)}, {}, {})
    _ = (y1, y2)
    return big, small


def test_exceptional_pair_is_equivalent_without_witness():
    big, small = _exceptional_pair()
    assert wgraph_equiv(big, small) == (True, None)
    assert wgraph_equiv(small, big) == (True, None)


def test_wgraph_equiv_identity_and_mismatch():
    big, _ = _exceptional_pair()
    ok, iso = wgraph_equiv(big, big)
    assert ok and iso is not None
    changed = WGraph(big.graph, big.weights, {**big.alpha, **{y: 3 for y in big.graph.darts[:2]}}, big.beta)
    assert wgraph_equiv(big, changed) == (False, None)


def test_corpus_wgraphs_validate(graphs):
    for g in graphs:
        w = to_wgraph(normalize_resolution(g).graph)
        for y in w.graph.darts:
            yb = w.graph.bar[y]
            assert (w.beta[y] * w.beta[yb] - 1) % w.alpha[y] == 0


def test_validate_dpg_after_rewrite(graphs):
    for g in graphs[:50]:
        for site in find_sites(g, ("R1_0_plus", "R1_plus", "R1_plus_plus", "FN1", "FN2")):
            h = apply_rewrite(g, site)
            validate_dpg(h.graph, h.boundary, h.genus, h.euler, h.sign)
