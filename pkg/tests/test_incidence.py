from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from richlines.esfamily import build_line_family
from richlines.exact import PairKind, canonicalize, classify_pair, point3
from richlines.generators import InstanceSpec, generate
from richlines.incidence import (
    DuplicateLinesError,
    compute_rich_points,
    p_r,
    verify_bigr,
    verify_szemeredi_trotter,
)
from conftest import lines3

AXES = [canonicalize((0, 0, 0), d) for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
GRID_2X2 = [canonicalize((0, c, 0), (1, 0, 0)) for c in (0, 1)] + [canonicalize((c, 0, 0), (0, 1, 0)) for c in (0, 1)]
UNIT_SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def _pencil(n):
    return generate(InstanceSpec("pencil", {"n": n}))


def test_axes():
    rich = compute_rich_points(AXES)
    assert rich.entries == {point3(0, 0, 0): 3}
    assert p_r(rich, 2) == p_r(rich, 3) == {point3(0, 0, 0)}
    assert p_r(rich, 4) == set()
    with pytest.raises(ValueError):
        p_r(rich, 1)


def test_pencil_grid():
    rich = compute_rich_points(GRID_2X2)
    assert len(p_r(rich, 2)) == 4 and not p_r(rich, 3)


def test_unit_square_intersecting_pairs():
    lines = [e.line for e in build_line_family(UNIT_SQUARE)]
    assert compute_rich_points(lines).intersecting_ordered_pairs() == 60


def test_duplicates_rejected():
    with pytest.raises(DuplicateLinesError):
        compute_rich_points(AXES + AXES[:1])


@pytest.mark.parametrize("method", ["numpy", "exact"])
def test_parallel_family_has_no_rich_points(method):
    lines = [canonicalize((0, c, 0), (1, 0, 0)) for c in range(6)]
    assert len(compute_rich_points(lines, method=method)) == 0


@given(st.lists(lines3(bound=2, den=1), min_size=2, max_size=14, unique=True))
def test_double_counting(lines):
    rich = compute_rich_points(lines)
    pairs = sum(1 for a, b in combinations(lines, 2) if classify_pair(a, b).kind is PairKind.INTERSECTING)
    assert sum(m * (m - 1) // 2 for m in rich.entries.values()) == pairs
    cum = rich.cumulative()
    assert all(cum[r] >= cum.get(r + 1, 0) for r in cum)


@given(st.lists(lines3(bound=2, den=2), min_size=2, max_size=20, unique=True), st.randoms(use_true_random=False))
def test_engines_agree_and_order_does_not_matter(lines, rnd):
    a = compute_rich_points(lines, method="numpy")
    b = compute_rich_points(lines, method="exact")
    shuffled = list(lines)
    rnd.shuffle(shuffled)
    c = compute_rich_points(shuffled)
    assert a.entries == b.entries == c.entries
    assert a.to_json() == c.to_json()


def test_worker_pool_matches_serial():
    lines = [e.line for e in build_line_family([(x, y) for x in range(4) for y in range(3)])]
    serial = compute_rich_points(lines, method="numpy", workers=1)
    pooled = compute_rich_points(lines, method="numpy", workers=2)
    assert serial.entries == pooled.entries


def test_big_r_examples():
    four = _pencil(4)
    rep = verify_bigr(compute_rich_points(four), 5)
    assert rep.count == 0 and rep.bound == Fraction(8, 5)
    nine = _pencil(9)
    rep = verify_bigr(compute_rich_points(nine), 7)
    assert rep.count == 1 and rep.bound == Fraction(18, 7)
    with pytest.raises(ValueError, match="r > 2 L"):
        verify_bigr(compute_rich_points(nine), 6)


@given(st.lists(lines3(bound=2, den=1), min_size=1, max_size=12, unique=True))
def test_big_r_holds_on_random_families(lines):
    rich = compute_rich_points(lines)
    L = len(lines)
    for r in range(2, L + 2):
        if r * r > 4 * L:
            assert verify_bigr(rich, r).holds


def test_szemeredi_trotter_measurements():
    L = 16
    rep = verify_szemeredi_trotter(compute_rich_points(_pencil(L)))
    assert rep.ratios[2] <= Fraction(8, L)
    # the worst ratio sits at r = L, where |P_L| = 1 against L r^-1 = 1
    assert rep.argmax == L and rep.constant < 1
    side = 5
    grid = [canonicalize((0, c, 0), (1, 0, 0)) for c in range(side)] + [canonicalize((c, 0, 0), (0, 1, 0)) for c in range(side)]
    rich = compute_rich_points(grid)
    assert len(p_r(rich, 2)) == len(grid) ** 2 // 4
    assert verify_szemeredi_trotter(rich).constant <= 2
    para = [canonicalize((0, c, 0), (1, 0, 0)) for c in range(5)]
    assert verify_szemeredi_trotter(compute_rich_points(para)).constant == 0


def test_report_formats():
    rich = compute_rich_points(AXES)
    j = rich.to_json()
    assert j["histogram"] == {"3": 1} and j["cumulative"] == {"2": 1, "3": 1}
    assert rich.to_csv().splitlines()[0] == "r,exactly_r,at_least_r"
