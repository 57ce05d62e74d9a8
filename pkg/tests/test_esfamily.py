from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from richlines.esfamily import (
    BRUTE_FORCE_CAP,
    PlanarConfig,
    build_line_family,
    dd_lower_bound,
    directional_vanishing_check,
    distinct_distances,
    es_line,
    is_distance_quadruple,
    lemma_equivalence_counts,
    line_through_point,
    parallel_count,
    quadinter_check,
    quadruple_census_bruteforce,
    quadruple_census_via_rich_points,
    tangency_holds,
    vector_field_Vp,
)
from richlines.exact import PairKind, canonicalize, classify_pair, point2, point3
from richlines.poly import X1, X2, X3, plane
from conftest import points2, rationals

UNIT_SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def configs(max_n=8, bound=3):
    return st.lists(points2(bound, 1), min_size=1, max_size=max_n, unique=True).map(lambda ps: PlanarConfig(tuple(ps)))


def test_family_examples():
    (one,) = build_line_family([(0, 0)])
    assert one.line == canonicalize((0, 0, 0), (0, 0, 1))
    l = es_line((0, 0), (1, 0))
    assert l.base == point3(Fraction(1, 2), 0, 0) and l.dir == point3(0, 1, 2)


@given(configs(max_n=20, bound=6))
def test_family_is_injective(P):
    fam = build_line_family(P)
    assert len(fam) == P.N**2 == len({e.line for e in fam})


def test_distance_quadruple_examples():
    assert is_distance_quadruple((0, 0), (1, 0), (0, 1), (1, 1))
    assert not is_distance_quadruple((0, 0), (0, 0), (0, 1), (1, 1))
    assert not is_distance_quadruple((0, 0), (2, 0), (1, 1), (0, 0))


def test_quadinter_examples():
    p1, p2, p3, p4 = (0, 0), (1, 0), (1, 0), (0, 0)
    assert quadinter_check(p1, p2, p3, p4)
    c = classify_pair(es_line(p1, p3), es_line(p2, p4))
    assert c.kind is PairKind.INTERSECTING and c.at == point3(Fraction(1, 2), 0, 0)

    p1, p2, p3, p4 = (0, 0), (1, 0), (0, 1), (1, 1)
    assert quadinter_check(p1, p2, p3, p4)
    a, b = es_line(p1, p3), es_line(p2, p4)
    assert classify_pair(a, b).kind is PairKind.PARALLEL
    assert a.dir == b.dir == canonicalize((0, 0, 0), (-1, 0, 2)).dir

    p1, p2, p3, p4 = (0, 0), (3, 0), (0, 0), (1, 0)
    assert not quadinter_check(p1, p2, p3, p4)
    assert classify_pair(es_line(p1, p3), es_line(p2, p4)).kind is PairKind.SKEW


def test_census_examples():
    c = quadruple_census_bruteforce(UNIT_SQUARE)
    assert (c.total, c.parallel, c.intersecting) == (80, 20, 60)
    assert quadruple_census_via_rich_points(UNIT_SQUARE) == c
    assert quadruple_census_bruteforce([(0, 0), (1, 0), (2, 0)]).total == 20
    assert quadruple_census_bruteforce([(0, 0)]).total == 0
    assert quadruple_census_bruteforce([(0, 0), (1, 0)]).total == 4
    with pytest.raises(ValueError):
        quadruple_census_bruteforce([(i, 0) for i in range(BRUTE_FORCE_CAP + 1)])


@given(configs(max_n=10, bound=4))
def test_census_identity(P):
    brute = quadruple_census_bruteforce(P)
    assert quadruple_census_via_rich_points(P) == brute
    assert brute.parallel == parallel_count(P) <= P.N**3


def test_distinct_distance_examples():
    rep = dd_lower_bound(UNIT_SQUARE)
    assert rep.distinct == 2 and rep.bound == Fraction(8, 5)
    assert distinct_distances([(x, y) for x in range(3) for y in range(3)]) == 5
    assert distinct_distances([(i, 0) for i in range(7)]) == 6


@given(configs(max_n=9, bound=4).filter(lambda P: P.N >= 3))
def test_cauchy_schwarz_bound(P):
    rep = dd_lower_bound(P)
    assert rep.distinct >= rep.bound


def test_vector_field_examples():
    assert tuple(vector_field_Vp((0, 0), (Fraction(1, 2), 0, 0))) == (0, 1, 2)
    assert tuple(vector_field_Vp((0, 0), (Fraction(1, 2), 1, 2))) == (0, 5, 10)
    q, l = line_through_point((0, 0), (Fraction(1, 2), 0, 0))
    assert q == point2(1, 0) and l == es_line((0, 0), (1, 0))
    q, _ = line_through_point((0, 0), (Fraction(1, 2), 1, 2))
    assert q == point2(1, 0)


@given(points2(5, 4), points2(5, 4), rationals())
def test_tangency_and_round_trip(p, q, t):
    assert tangency_holds(p, q, t)
    x = es_line(p, q).point_at(t)
    assert vector_field_Vp(p, x).v3 == 2 * x[2] ** 2 + 2
    assert line_through_point(p, x)[0] == point2(*q)


def test_directional_vanishing():
    p, q = (0, 0), (1, 0)
    # l_{p,q} has x1 = 1/2 throughout, so it lies in the plane x1 - 1/2 = 0
    rep = directional_vanishing_check(p, plane((1, 0, 0), Fraction(-1, 2)), [q])
    assert rep.lines_in_surface == [0] and rep.holds
    assert directional_vanishing_check(p, X3 - 100, [q]).lines_in_surface == []


def test_directional_vanishing_on_a_ruling():
    # l_{(0,0),(2,0)} = {(1, t, 2t)} is a ruling of x1 x2 - x3
    R = X1 * X2 - X3
    rep = directional_vanishing_check((0, 0), R, [(2, 0), (3, 1)])
    assert rep.lines_in_surface == [0] and rep.vanishing[0]


@given(configs(max_n=6, bound=3))
def test_three_coplanarity_tests_agree(P):
    tally = lemma_equivalence_counts(P)
    assert tally["checked"] == P.N**4 and tally["disagree"] == 0


@given(configs(max_n=8, bound=3))
def test_parallel_criterion(P):
    pts = P.points
    for p1, p2, p3, p4 in product(pts, repeat=4):
        kind = classify_pair(es_line(p1, p3), es_line(p2, p4)).kind
        same = (p1.x - p2.x, p1.y - p2.y) == (p3.x - p4.x, p3.y - p4.y)
        assert (kind in (PairKind.PARALLEL, PairKind.EQUAL)) == same


@given(points2(5, 2), st.lists(points2(5, 2), min_size=2, max_size=6, unique=True))
def test_pencil_lines_pairwise_skew(p, qs):
    lines = [es_line(p, q) for q in qs]
    for a, b in combinations(lines, 2):
        assert classify_pair(a, b).kind is PairKind.SKEW


def test_config_validation_and_json():
    with pytest.raises(ValueError):
        PlanarConfig(((0, 0), (0, 0)))
    P = PlanarConfig(((Fraction(1, 2), 0), (3, -1)))
    assert PlanarConfig.from_json(P.to_json()) == P
