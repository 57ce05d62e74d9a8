from fractions import Fraction

import pytest

from richlines.exact import canonicalize, line_through
from richlines.poly import X1, X2, X3, line_in_zero_set
from richlines.surfaces import (
    LineFamilyIndex,
    coplanar_groups,
    greedy_surface_clusters,
    lines_in_surface,
    search_surfaces,
    vanishing_space,
    verify_surfcount,
)
from families import planes_family, regulus, skew_family

X_AXIS = canonicalize((0, 0, 0), (1, 0, 0))
Y_AXIS = canonicalize((0, 0, 0), (0, 1, 0))
SKEW = canonicalize((0, 0, 1), (0, 1, 0))


def test_vanishing_space_examples():
    assert vanishing_space([X_AXIS, SKEW], 1) == []
    (p,) = vanishing_space([X_AXIS, Y_AXIS], 1)
    assert p.normalized() == X3.normalized()
    basis = vanishing_space(skew_family(3), 2)
    assert len(basis) == 1 and basis[0].normalized() == (X1 * X2 - X3).normalized()


def test_vanishing_space_members_vanish():
    lines = regulus(2)
    for p in vanishing_space(lines, 2):
        assert all(line_in_zero_set(p, l) for l in lines)


def test_index_agrees_with_restriction():
    lines = regulus(5) + [X_AXIS, SKEW, line_through((1, 2, 3), (4, 5, 7))]
    index = LineFamilyIndex(lines)
    for poly in (X1 * X2 - X3, X3, X1 - 1, X1 * X1 + X2 - 4):
        expected = frozenset(i for i, l in enumerate(lines) if line_in_zero_set(poly, l))
        assert lines_in_surface(poly, index) == expected == lines_in_surface(poly, lines)


def test_greedy_finds_the_plane():
    plane_lines = planes_family(planes=((0, 0, 1, 0),), per_plane=10, spare=5, seed=1)
    found = greedy_surface_clusters(plane_lines, 1, 5)
    assert len(found) == 1
    assert found[0].poly.normalized() == X3.normalized()
    assert found[0].lines_contained == frozenset(range(10))


def test_greedy_skew_family_is_empty():
    assert greedy_surface_clusters(skew_family(8), 1, 2) == []


def test_greedy_finds_the_regulus():
    lines = regulus(10)
    found = greedy_surface_clusters(lines, 2, 8, seed=0)
    assert len(found) == 1
    assert found[0].poly.normalized() == (X1 * X2 - X3).normalized()
    assert len(found[0].lines_contained) == 20
    assert found[0].irreducibility == "verified-irreducible"


def test_coplanar_groups_keys_are_planes():
    lines = planes_family(planes=((0, 0, 1, 0), (1, 0, 0, 3)), per_plane=6, spare=0)
    groups = coplanar_groups(lines)
    sizes = sorted(len(m) for m in groups.values())
    assert sizes[-2:] == [6, 6]


def test_surfcount_three_planes():
    lines = planes_family()
    assert len(lines) == 100
    search = search_surfaces(lines, 1, 30)
    assert sorted(len(c.lines_contained) for c in search.surfaces) == [30, 30, 30]
    rep = verify_surfcount(search.surfaces, 100, 30, 1)
    assert rep.applicable and rep.holds
    assert rep.bound == Fraction(20, 3) and rep.count == 3


def test_surfcount_inapplicable_gate():
    lines = planes_family()
    search = search_surfaces(lines, 1, 20)
    rep = verify_surfcount(search.surfaces, 100, 20, 1)
    assert not rep.applicable and rep.holds


def test_two_planes_share_one_pencil_line():
    shared = X_AXIS
    a = [shared] + [line_through((0, 0, 0), (1, k, 0)) for k in range(1, 6)]
    b = [line_through((0, 0, 0), (1, 0, k)) for k in range(1, 6)]
    lines = a + b
    search = search_surfaces(lines, 1, 5)
    assert len(search.surfaces) == 2
    rep = verify_surfcount(search.surfaces, len(lines), 5, 1)
    assert rep.max_shared <= 1


def test_surfcount_rejects_small_candidates():
    search = search_surfaces(planes_family(), 1, 30)
    with pytest.raises(ValueError):
        verify_surfcount(search.surfaces, 100, 31, 1)


def test_threshold_validation():
    with pytest.raises(ValueError):
        search_surfaces(skew_family(3), 1, 1)
