"""Continued fractions, Seifert invariants of star-shaped graphs and euler numbers.

Convention for a star with center weight ``e`` and ``m`` legs: the integer
invariant is ``s = e + m`` and each leg with string ``[b]`` gives the fiber
``(alpha, beta)`` with ``alpha / (alpha - beta) = [b]``.  Then

    e(M) = s - sum(beta / alpha) = e + sum(1 / [b]),

which is negative exactly when the star is negative definite, is unchanged
by blow-ups, and satisfies ``|H_1| = |e(M)| * prod(alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .graph import GraphBuilder
from .plumbing import (
    DecoratedPlumbingGraph,
    PlumbingError,
    classify_sparse,
    definiteness,
    intersection_form,
    validate_dpg,
)


@dataclass(frozen=True)
class Convergents:
    c: int
    d: int
    c_prev: int
    d_prev: int

    @property
    def B(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.d, self.c), (-self.d_prev, -self.c_prev))


def cf_convergents(b: Iterable[int]) -> Convergents:
    """Numerator and denominator of ``b1 - 1/(b2 - 1/(...))`` by the three-term recurrence."""
    c_prev, c = 0, 1
    d_prev, d = -1, 0
    for x in b:
        c_prev, c = c, x * c - c_prev
        d_prev, d = d, x * d - d_prev
    cv = Convergents(c, d, c_prev, d_prev)
    (p, q), (r, s) = cv.B
    assert p * s - q * r == -1, "det B_k must be -1"
    return cv


def cf_value(b: Sequence[int]) -> Fraction | None:
    """Evaluate the descending continued fraction directly; ``None`` on a zero denominator."""
    if not b:
        return None
    acc = Fraction(b[-1])
    for x in reversed(b[:-1]):
        if acc == 0:
            return None
        acc = x - 1 / acc
    return acc


@dataclass(frozen=True)
class SeifertData:
    genus: int
    boundary: int
    s: int
    fibers: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for a, b in self.fibers:
            if not (0 <= b < a) or gcd(a, b) != 1:
                raise PlumbingError(f"fiber ({a},{b}) is not a coprime pair with 0 <= beta < alpha")

    def to_json(self) -> dict:
        return {"genus": self.genus, "boundary": self.boundary, "s": self.s, "fibers": [list(f) for f in self.fibers]}


def seifert_euler(sd: SeifertData) -> Fraction:
    """s - sum(beta_i / alpha_i), exactly."""
    num, den = sd.s, 1
    for a, b in sd.fibers:
        num, den = num * a - b * den, den * a
    return Fraction(num, den)


def fiber_of_leg(b: Sequence[int]) -> tuple[int, int]:
    """(alpha, beta) with alpha/(alpha - beta) = [b] for entries >= 2."""
    return _fiber(tuple(b))


@lru_cache(maxsize=4096)
def _fiber(b: tuple[int, ...]) -> tuple[int, int]:
    cv = cf_convergents(b)
    return cv.c, cv.c - cv.d


# star-shaped graphs ------------------------------------------------------------------


def star_legs(g: DecoratedPlumbingGraph, center: str) -> list[list[str]]:
    """Legs of a star as vertex paths leaving the center; boundary vertices only on the center."""
    G = g.graph
    if center not in G or center in g.boundary:
        raise PlumbingError(f"{center!r} is not an interior vertex")
    legs: list[list[str]] = []
    seen = {center}
    for y in G.out_darts(center):
        w = G.terminus[y]
        if w in g.boundary:
            continue
        if G.is_loop(y) or w in seen:
            raise PlumbingError("not star-shaped: cycle through the center")
        leg, prev = [], center
        while True:
            if w in g.boundary:
                raise PlumbingError("not star-shaped: boundary vertex on a leg")
            if g.genus[w] != 0:
                raise PlumbingError(f"not star-shaped: leg vertex {w!r} has genus {g.genus[w]}")
            leg.append(w)
            seen.add(w)
            nxt = [G.terminus[z] for z in G.out_darts(w) if G.terminus[z] != prev]
            if len(G.out_darts(w)) > 2 or any(G.is_loop(z) for z in G.out_darts(w)):
                raise PlumbingError(f"not star-shaped: leg vertex {w!r} branches")
            if not nxt:
                break
            prev, w = w, nxt[0]
            if w in seen:
                raise PlumbingError("not star-shaped: cycle")
        legs.append(leg)
    if len(seen) + sum(1 for v in G.vertices if v in g.boundary) != len(G.vertices):
        raise PlumbingError("not star-shaped: disconnected vertices")
    return legs


def star_to_seifert(g: DecoratedPlumbingGraph, center: str) -> SeifertData:
    legs = star_legs(g, center)
    fibers = []
    for leg in legs:
        string = [-g.euler[v] for v in leg]
        if any(x < 2 for x in string):
            raise PlumbingError("leg entries must be <= -2")
        fibers.append(fiber_of_leg(string))
    arrows = sum(1 for v in g.graph.neighbors(center) if v in g.boundary)
    return SeifertData(g.genus[center], arrows, g.euler[center] + len(legs), tuple(fibers))


def star_euler(g: DecoratedPlumbingGraph, center: str) -> Fraction | None:
    """e + sum 1/[b] for arbitrary integer legs; ``None`` if a leg evaluates to zero."""
    total = Fraction(g.euler[center])
    for leg in star_legs(g, center):
        val = cf_value([-g.euler[v] for v in leg])
        if val is None or val == 0:
            return None
        total += 1 / val
    return total


def make_star(center_euler: int, legs: Sequence[Sequence[int]], genus: int = 0, arrows: int = 0) -> DecoratedPlumbingGraph:
    """Star with the given center and euler strings per leg (listed outward)."""
    b = GraphBuilder()
    b.add_vertex("c")
    euler = {"c": center_euler}
    gen = {"c": genus}
    for i, leg in enumerate(legs):
        prev = "c"
        for j, e in enumerate(leg):
            v = b.add_vertex(f"l{i}.{j}")
            euler[v], gen[v] = e, 0
            b.add_edge(prev, v)
            prev = v
    bd = []
    for k in range(arrows):
        bd.append(b.add_vertex(f"a{k}"))
        b.add_edge("c", bd[-1])
    G = b.build()
    return validate_dpg(G, bd, gen, euler, {y: 1 for y in G.darts})


def reverse_star(g: DecoratedPlumbingGraph, center: str) -> DecoratedPlumbingGraph:
    """Orientation reversal of a star keeping the center as the node."""
    legs = [[g.euler[v] for v in leg] for leg in star_legs(g, center)]
    arrows = sum(1 for v in g.graph.neighbors(center) if v in g.boundary)
    e, new_legs = reverse_star_data(g.euler[center], legs)
    return make_star(e, new_legs, g.genus[center], arrows)


def reverse_star_data(center_euler: int, legs: Sequence[Sequence[int]]) -> tuple[int, list[list[int]]]:
    """Center weight and euler strings of the reversed star, without building a graph."""
    from .calculus import chain_dual

    return -center_euler - len(legs), [[-x for x in chain_dual([-e for e in leg])] for leg in legs]


def negate(g: DecoratedPlumbingGraph) -> DecoratedPlumbingGraph:
    """Flip every euler weight (the intersection form becomes its negative off loops)."""
    return DecoratedPlumbingGraph(g.graph, g.boundary, dict(g.genus), {v: -e for v, e in g.euler.items()}, dict(g.sign))


def definiteness_sign_check(g: DecoratedPlumbingGraph, center: str) -> dict:
    """Compare the definiteness of the form with the sign of the euler number."""
    kind = definiteness(intersection_form(g))
    e = star_euler(g, center)
    if kind == "negative_definite":
        verdict = "consistent" if e is not None and e < 0 else "violated"
    elif kind == "positive_definite":
        verdict = "consistent" if e is not None and e > 0 else "violated"
    else:
        verdict = "no_assertion"
    return {"definiteness": kind, "euler": e, "verdict": verdict}


# star data without building graphs ----------------------------------------------------


def star_seifert_data(center_euler: int, legs: Sequence[Sequence[int]], genus: int = 0, arrows: int = 0) -> SeifertData:
    """Seifert data of the star with the given euler strings (legs listed outward)."""
    return SeifertData(genus, arrows, center_euler + len(legs), tuple(fiber_of_leg([-e for e in leg]) for leg in legs))


def star_matrix(center_euler: int, legs: Sequence[Sequence[int]]) -> list[list[int]]:
    """Intersection matrix of a star, center first, then each leg outward."""
    n = 1 + sum(len(leg) for leg in legs)
    m = [[0] * n for _ in range(n)]
    m[0][0] = center_euler
    k = 1
    for leg in legs:
        prev = 0
        for e in leg:
            m[k][k] = e
            m[k][prev] = m[prev][k] = 1
            prev, k = k, k + 1
    return m


def star_sign_law(center_euler: int, legs: Sequence[Sequence[int]]) -> dict:
    """Definiteness of the star's form against the sign of the euler number of its Seifert data."""
    diag = {0: center_euler}
    rows: dict[int, dict[int, int]] = {0: {}}
    k = 1
    for leg in legs:
        prev = 0
        for e in leg:
            diag[k] = e
            rows[k] = {prev: 1}
            rows[prev][k] = 1
            prev, k = k, k + 1
    kind = classify_sparse(diag, rows) or definiteness(star_matrix(center_euler, legs))
    e = seifert_euler(star_seifert_data(center_euler, legs))
    if kind == "negative_definite":
        verdict = "consistent" if e < 0 else "violated"
    elif kind == "positive_definite":
        verdict = "consistent" if e > 0 else "violated"
    else:
        verdict = "no_assertion"
    return {"definiteness": kind, "euler": e, "verdict": verdict}
