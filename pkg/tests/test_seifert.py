from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plumbcalc.plumbing import PlumbingError, definiteness, intersection_form
from plumbcalc.seifert import (
    SeifertData,
    cf_convergents,
    cf_value,
    definiteness_sign_check,
    fiber_of_leg,
    make_star,
    negate,
    reverse_star,
    reverse_star_data,
    star_seifert_data,
    seifert_euler,
    star_euler,
    star_legs,
    star_sign_law,
    star_to_seifert,
)


def strings(max_len: int, hi: int):
    for k in range(1, max_len + 1):
        yield from product(range(2, hi + 1), repeat=k)


@pytest.mark.parametrize("b, cd", [([], (1, 0)), ([2], (2, 1)), ([2, 2], (3, 2)), ([3, 2], (5, 2))])
def test_convergent_examples(b, cd):
    cv = cf_convergents(b)
    assert (cv.c, cv.d) == cd


def test_convergents_match_direct_evaluation():
    for b in strings(4, 6):
        cv = cf_convergents(b)
        assert Fraction(cv.c, cv.d) == cf_value(b)


@given(st.lists(st.integers(-5, 5), max_size=8))
def test_determinant_for_any_integers(b):
    (p, q), (r, s) = cf_convergents(b).B
    assert p * s - q * r == -1


def test_cf_value_zero_denominator():
    assert cf_value([1, 1]) == 0
    assert cf_value([2, 1, 1]) is None
    assert cf_value([]) is None


@pytest.mark.parametrize("b, fiber", [([2], (2, 1)), ([3], (3, 2)), ([2, 2], (3, 1)), ([2, 3], (5, 2))])
def test_leg_fibers(b, fiber):
    a, beta = fiber_of_leg(b)
    assert (a, beta) == fiber
    assert Fraction(a, a - beta) == cf_value(b)


def test_euler_formula_examples():
    assert seifert_euler(SeifertData(0, 0, 0, ())) == 0
    assert seifert_euler(SeifertData(0, 0, -2, ((2, 1),) * 3)) == Fraction(-7, 2)


def test_bad_fibers_rejected():
    with pytest.raises(PlumbingError):
        SeifertData(0, 0, 0, ((4, 2),))
    with pytest.raises(PlumbingError):
        SeifertData(0, 0, 0, ((3, 3),))


def test_star_data():
    g = make_star(-2, [[-2]], arrows=1)
    sd = star_to_seifert(g, "c")
    assert sd.fibers == ((2, 1),) and sd.boundary == 1 and sd.s == -1
    assert star_to_seifert(make_star(-5, [], genus=2), "c") == SeifertData(2, 0, -5, ())
    assert seifert_euler(star_to_seifert(make_star(-5, []), "c")) == -5


def test_star_euler_two_routes_agree():
    # fiber route and direct continued-fraction route
    for e in range(-5, 0):
        for legs in ([[-2]], [[-3, -2], [-2]], [[-2], [-2], [-4, -4]]):
            g = make_star(e, legs)
            assert seifert_euler(star_to_seifert(g, "c")) == star_euler(g, "c")


def test_three_leg_star_value():
    g = make_star(-2, [[-2]] * 3)
    report = definiteness_sign_check(g, "c")
    assert report["definiteness"] == "negative_definite"
    assert report["euler"] == Fraction(-1, 2)
    assert report["verdict"] == "consistent"


def test_positive_star_after_negation():
    g = negate(make_star(-2, [[-2]] * 3))
    report = definiteness_sign_check(g, "c")
    assert report["definiteness"] == "positive_definite"
    assert report["euler"] > 0 and report["verdict"] == "consistent"


def test_indefinite_star_has_no_assertion():
    report = definiteness_sign_check(make_star(0, [[-2]]), "c")
    assert report["verdict"] == "no_assertion"


def test_non_star_rejected():
    g = make_star(-2, [[-2, -2]])
    with pytest.raises(PlumbingError):
        star_to_seifert(make_star(-2, [[-1]]), "c")
    with pytest.raises(PlumbingError):
        star_legs(make_star(-2, [[-2]], arrows=1), "a0")
    with pytest.raises(PlumbingError):
        star_legs(g, "nope")


def _small_stars():
    legs = [list(s) for k in range(1, 4) for s in product((-2, -3, -4), repeat=k)]
    for e in range(-5, 0):
        for m in range(4):
            for combo in product(legs, repeat=m):
                yield e, [list(x) for x in combo]


def test_sign_law_on_small_stars():
    checked = 0
    for e, legs in _small_stars():
        if len(legs) > 2:
            continue
        r = star_sign_law(e, legs)
        assert r["verdict"] != "violated"
        checked += 1
    assert checked > 100


def test_sign_law_matches_dense_route():
    for e, legs in list(_small_stars())[::401]:
        g = make_star(e, legs)
        assert star_sign_law(e, legs)["definiteness"] == definiteness(intersection_form(g))


def test_reversal_negates_euler():
    for e, legs in list(_small_stars())[::997]:
        g = make_star(e, legs)
        assert seifert_euler(star_to_seifert(reverse_star(g, "c"), "c")) == -seifert_euler(star_to_seifert(g, "c"))
    for e, legs in list(_small_stars())[::7]:
        e2, legs2 = reverse_star_data(e, legs)
        assert seifert_euler(star_seifert_data(e2, legs2)) == -seifert_euler(star_seifert_data(e, legs))


def test_reverse_star_twice():
    g = make_star(-3, [[-2, -3], [-4]], genus=1, arrows=2)
    twice = reverse_star(reverse_star(g, "c"), "c")
    assert twice.euler == g.euler and twice.boundary == g.boundary
