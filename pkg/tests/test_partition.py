import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from richlines.exact import canonicalize
from richlines.experiments import random_points
from richlines.generators import InstanceSpec, generate
from richlines.partition import (
    PartitionResult,
    line_cell_incidence,
    partition_lifted,
    partition_planes,
    verify_polyham,
)
from richlines.poly import X1, sign_vector_at
from conftest import points3

CUBE = [tuple(v) for v in product((-1, 1), repeat=3)]


def _check_assignment(part: PartitionResult):
    for i, p in enumerate(part.points):
        sv = sign_vector_at(part.factors, p)
        if 0 in sv:
            assert part.labels[i] == -1
        else:
            assert part.cells[part.labels[i]] == sv


def test_cube_corners_split_by_three_planes():
    part = partition_planes(CUBE, 3)
    assert len(part.factors) == 3
    assert sorted(part.counts) == [1] * 8 and not part.on_boundary
    assert {f.degree() for f in part.factors} == {1}
    _check_assignment(part)


def test_planes_random_hundred():
    S = random_points(100, seed=3)
    part = partition_planes(S, 10)
    assert part.max_cell <= 20
    rep = verify_polyham(part, S)
    assert rep.guaranteed


def test_single_point():
    part = partition_planes([(1, 2, 3)], 1)
    assert sum(part.counts) + len(part.on_boundary) == 1


def test_planes_rejects_zero_degree():
    with pytest.raises(ValueError):
        partition_planes(CUBE, 0)


def test_verify_rejects_other_point_set():
    part = partition_planes(CUBE, 2)
    with pytest.raises(ValueError):
        verify_polyham(part, CUBE[:-1])


def test_polyham_thousand_degree_ten():
    S = random_points(1000, seed=1)
    part = partition_planes(S, 10)
    rep = verify_polyham(part, S)
    assert rep.max_cell <= 200 and rep.cells == len(part.cells)


def test_lifted_two_clusters():
    rng = random.Random(0)
    S = [(rng.randint(0, 50), rng.randint(0, 50), rng.randint(0, 50)) for _ in range(50)]
    S += [(1000 + rng.randint(0, 50), rng.randint(0, 50), rng.randint(0, 50)) for _ in range(50)]
    S = list(dict.fromkeys(S))
    part = partition_lifted(S, 2, seed=0)
    assert part.rounds[0]["bisected"]
    signs = np.array([sign_vector_at([part.factors[0]], p)[0] for p in part.points])
    half = -(-len(S) // 2)
    assert (signs > 0).sum() <= half and (signs < 0).sum() <= half
    verify_polyham(part, S)


def test_lifted_collinear_points_are_consistent():
    S = [(i, 2 * i, -i) for i in range(40)]
    part = partition_lifted(S, 4, seed=2)
    assert sum(part.counts) + len(part.on_boundary) == 40
    _check_assignment(part)


def test_lifted_rejects_small_inputs():
    with pytest.raises(ValueError):
        partition_lifted([(0, 0, 0)], 4)
    with pytest.raises(ValueError):
        partition_lifted(CUBE, 1)


def test_lifted_deterministic():
    S = random_points(300, seed=4)
    a = partition_lifted(S, 4, seed=7)
    b = partition_lifted(S, 4, seed=7)
    assert a.to_json() == b.to_json()


@given(st.lists(points3(10, 2), min_size=1, max_size=40, unique=True), st.integers(1, 6), st.integers(0, 5))
def test_planes_conservation_and_bound(S, D, seed):
    part = partition_planes(S, D, seed=seed)
    assert sum(part.counts) + len(part.on_boundary) == len(S)
    assert len(set(part.cells)) == len(part.cells)
    assert part.poly.degree() <= D
    assert part.max_cell * D <= 2 * len(S)
    _check_assignment(part)


@given(st.lists(points3(10, 2), min_size=2, max_size=40, unique=True), st.integers(2, 5), st.integers(0, 3))
def test_lifted_rounds_bisect_exactly(S, D, seed):
    part = partition_lifted(S, D, seed=seed, restarts=2, iters=60)
    assert all(r["bisected"] for r in part.rounds)
    assert part.poly.degree() <= D
    _check_assignment(part)


def test_line_crossing_one_plane_meets_two_cells():
    part = partition_planes([(-1, 0, 0), (1, 0, 0)], 1)
    assert part.factors[0].degree() == 1
    inc = line_cell_incidence([canonicalize((0, 0, 0), (1, 0, 0))], part)
    assert len(inc.cells_met[0]) == 2 and not inc.in_zero_set[0]


def test_line_inside_the_wall():
    S = [(-1, 0, 0), (1, 0, 0)]
    part = partition_planes(S, 1)
    f = part.factors[0]
    assert f.normalized() == X1.normalized()
    inc = line_cell_incidence([canonicalize((0, 0, 0), (0, 1, 0))], part)
    assert inc.in_zero_set[0] and len(inc.cells_met[0]) == 0


def test_random_lines_against_degree_five():
    lines = generate(InstanceSpec("random-lines3d", {"L": 100}, seed=5, bound=1000))
    S = random_points(500, seed=5)
    part = partition_planes(S, 5)
    inc = line_cell_incidence(lines, part)
    assert max(len(c) for c, z in zip(inc.cells_met, inc.in_zero_set) if not z) <= 6
    assert inc.total <= 6 * len(lines)
