import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from richlines.exact import canonicalize
from richlines.linalg import nullspace, rank, solve
from richlines.poly import (
    X1,
    X2,
    X3,
    TriPoly,
    UniPoly,
    bezout_lines_check,
    classify_irreducibility,
    gradient,
    isolate_real_roots,
    line_in_zero_set,
    line_in_zero_set_sampled,
    monomials,
    restrict_to_line,
    sign_vector_at,
    sturm_count,
)
from conftest import lines3, points3, rationals
from families import plane_meet, random_plane

X_AXIS = canonicalize((0, 0, 0), (1, 0, 0))
REGULUS = X1 * X2 - X3


def small_polys(max_deg=3):
    mons = monomials(max_deg)
    coeff = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 3))
    return st.lists(coeff, min_size=len(mons), max_size=len(mons)).map(lambda cs: TriPoly(dict(zip(mons, cs))))


def test_restriction_examples():
    assert restrict_to_line(X3, X_AXIS).is_zero()
    assert restrict_to_line(X1 * X1 + X2 * X2 - 1, X_AXIS) == UniPoly([-1, 0, 1])
    assert restrict_to_line(REGULUS, X_AXIS).is_zero()


def test_line_membership_examples():
    assert line_in_zero_set(REGULUS, X_AXIS)
    sphere_free = X1 * X1 + X2 * X2 + 1
    assert not line_in_zero_set(sphere_free, X_AXIS)
    P = TriPoly.from_product([X3, X1 - 1])
    assert line_in_zero_set(P, X_AXIS)
    with pytest.raises(ValueError):
        line_in_zero_set(TriPoly(), X_AXIS)


def test_gradient_examples():
    assert gradient(X1 * X1) == (2 * X1, TriPoly(), TriPoly())
    assert gradient(X1 * X2 * X3) == (X2 * X3, X1 * X3, X1 * X2)


@given(st.lists(points3(5, 3), min_size=10, max_size=10), st.builds(Fraction, st.integers(1, 9), st.integers(1, 4)))
def test_gradient_matches_symmetric_difference_on_quadratics(xs, h):
    Q = 3 * X1 * X1 - X1 * X2 + Fraction(1, 2) * X3 * X3 + X2 - 7
    G = gradient(Q)
    for x in xs:
        for i in range(3):
            e = [0, 0, 0]
            e[i] = h
            up = [x[k] + e[k] for k in range(3)]
            dn = [x[k] - e[k] for k in range(3)]
            assert (Q(up) - Q(dn)) / (2 * h) == G[i](x)


def test_root_isolation_examples():
    iv = isolate_real_roots(UniPoly([-2, 0, 1]))
    assert len(iv) == 2
    (a, b), (c, d) = iv
    assert b < 0 and b * b <= 2 <= a * a
    assert c > 0 and c * c <= 2 <= d * d
    assert isolate_real_roots(UniPoly([1, 0, 1])) == []
    # (t - 1)^2 (t + 3)
    f = UniPoly([-1, 1]) * UniPoly([-1, 1]) * UniPoly([3, 1])
    iv = isolate_real_roots(f)
    assert len(iv) == 2
    assert iv[0][0] <= -3 <= iv[0][1] and iv[1][0] <= 1 <= iv[1][1]
    with pytest.raises(ValueError):
        isolate_real_roots(UniPoly())


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5), st.integers(-3, 3).filter(bool))
def test_isolated_roots_are_exact_and_complete(roots, lead):
    f = UniPoly([lead])
    for r in roots:
        f = f * UniPoly([Fraction(-r, 2), 1])
    iv = isolate_real_roots(f)
    assert len(iv) == len(set(roots)) == sturm_count(f.squarefree())
    for (a, b), (c, _) in zip(iv, iv[1:]):
        assert b < c
    for r in set(roots):
        assert sum(1 for lo, hi in iv if lo <= Fraction(r, 2) <= hi) == 1


def test_sign_vectors():
    assert sign_vector_at([X1, X2], (1, -1, 0)) == (1, -1)
    assert sign_vector_at([X1, X2], (0, 5, 0)) == (0, 1)


@given(st.lists(small_polys(1), min_size=1, max_size=4), points3())
def test_sign_vector_product_matches_expanded_sign(factors, x):
    P = TriPoly.from_product(factors)
    s = 1
    for v in sign_vector_at(factors, x):
        s *= v
    val = P(x)
    assert s == (val > 0) - (val < 0)


@given(small_polys(3), lines3(), st.lists(rationals(), min_size=20, max_size=20))
def test_restriction_agrees_with_evaluation(Q, l, ts):
    u = restrict_to_line(Q, l)
    assert u.degree() <= Q.degree()
    for t in ts:
        assert u(t) == Q(l.point_at(t))


@given(small_polys(2), lines3(bound=3, den=1))
def test_membership_two_ways(Q, l):
    if Q.is_zero():
        return
    assert line_in_zero_set(Q, l) == line_in_zero_set_sampled(Q, l)


@given(st.lists(small_polys(1), min_size=1, max_size=3))
def test_product_form_expands_exactly(factors):
    P = TriPoly.from_product(factors)
    expanded = TriPoly.const(1)
    for f in factors:
        expanded = expanded * f
    assert P.terms == expanded.terms
    assert TriPoly.from_json(P.to_json()) == P


def test_divmod_and_divides():
    A = (X1 + 2 * X2 - 1) * (X3 * X3 + X1)
    assert (X1 + 2 * X2 - 1).divides(A)
    assert not (X1 + 1).divides(A)


def test_bezout_examples():
    rng = random.Random(5)
    A = [random_plane(rng) for _ in range(2)]
    B = [random_plane(rng) for _ in range(3)]
    lines = [plane_meet(a, b) for a in A for b in B]
    rep = bezout_lines_check(TriPoly.from_product(A), TriPoly.from_product(B), lines)
    assert rep.count == 6 == rep.bound
    assert bezout_lines_check(X3, X1 * X1 + X2 * X2 + 1, lines).count == 0
    z_axis = canonicalize((0, 0, 0), (0, 0, 1))
    assert bezout_lines_check(X1, X2, [z_axis, X_AXIS]).count == 1
    with pytest.raises(ValueError):
        bezout_lines_check(TriPoly.from_product([X1, X2]), TriPoly.from_product([X1, X3]), [z_axis])


def test_irreducibility_labels():
    assert classify_irreducibility(X1 + 2)[0] == "verified-irreducible"
    assert classify_irreducibility(REGULUS)[0] == "verified-irreducible"
    assert classify_irreducibility(X1 * X1 + X2 * X2 + X3 * X3 - 1)[0] == "verified-irreducible"
    label, factors = classify_irreducibility(X1 * X1 - X2 * X2)
    assert label == "reducible"
    assert {f.normalized() for f in factors} == {(X1 - X2).normalized(), (X1 + X2).normalized()}
    assert classify_irreducibility(X1 * X2 * X3 - 1)[0] == "unverified"


def test_linalg_solve():
    A = [[2, 1], [1, 3]]
    assert solve(A, [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert nullspace([[1, 1, 1]], 3) and rank([[1, 2], [2, 4]]) == 1
