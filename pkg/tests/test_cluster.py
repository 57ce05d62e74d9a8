import json
from fractions import Fraction

import pytest

from richlines.cluster import check_parameters, cluster_decompose, residual_from_scratch, verify_mainincid
from richlines.esfamily import build_line_family
from richlines.generators import InstanceSpec, generate
from richlines.incidence import compute_rich_points, p_r
from richlines.poly import X3
from families import planes_family, skew_family

EPS = Fraction(1, 10)
K1 = 10 * 2**20  # smallest K the gate accepts for D = 1, eps = 1/10


def _floats_outside_approx(obj, key=""):
    if isinstance(obj, float):
        return [] if key.endswith("_approx") else [key]
    if isinstance(obj, dict):
        return [k for kk, v in obj.items() for k in _floats_outside_approx(v, kk)]
    if isinstance(obj, list):
        return [k for v in obj for k in _floats_outside_approx(v, key)]
    return []


@pytest.mark.parametrize(
    "L,r,eps,D,K,needle",
    [
        (100, 1, EPS, 1, K1, "2 <= r"),
        (100, 21, EPS, 1, K1, "r <= 2 L^(1/2)"),
        (100, 3, Fraction(0), 1, K1, "0 < eps"),
        (100, 3, Fraction(3, 4), 1, K1, "eps <= 1/2"),
        (100, 3, EPS, 0, K1, "D >= 1"),
        (100, 3, EPS, 1, K1 - 1, "K >= 10 (2D)^(2/eps)"),
    ],
)
def test_parameter_gates(L, r, eps, D, K, needle):
    with pytest.raises(ValueError, match=needle.replace("(", r"\(").replace(")", r"\)").replace("^", r"\^")):
        check_parameters(L, r, eps, D, K)


def test_derived_parameters():
    p = check_parameters(625, 10, EPS, 1, K1)
    assert p.r_prime == 9 and p.A == 48
    assert check_parameters(100, 3, EPS, 1, K1).r_prime == 3


def test_coplanar_family_is_one_plane():
    lines = planes_family(planes=((0, 0, 1, 0),), per_plane=100, spare=0)
    res = cluster_decompose(lines, 2, EPS, 1, K1)
    assert [s.poly.normalized() for s in res.surfaces] == [X3.normalized()]
    assert res.residual == set()
    assert res.ok and res.verification["residual_matches_oracle"]


def test_skew_family_is_empty():
    res = cluster_decompose(skew_family(30), 2, EPS, 1, K1)
    assert res.surfaces == [] and res.residual == set() and res.ok
    assert res.trace["root"]["case"] == "empty"


def test_inductive_case_on_small_grid():
    lines = [e.line for e in build_line_family([(x, y) for x in range(3) for y in range(3)])]
    res = cluster_decompose(lines, 2, Fraction(1, 2), 2, 10 * 4**4, seed_budget=30)
    root = res.trace["root"]
    assert root["case"] == "inductive"
    assert res.ok and res.verification["residual_matches_oracle"]
    sizes = [it["size"] for it in root["iterations"]] + [root["iterations"][-1]["next_size"]]
    assert sizes == sorted(sizes, reverse=True)
    for it in root["iterations"]:
        for ineq in it["inequalities"]:
            if ineq["name"].startswith("|S_j+1| <= |S_j|"):
                assert ineq["holds"]
    assert _floats_outside_approx(res.to_json()) == []
    json.dumps(res.to_json())


def test_residual_is_definition():
    lines = planes_family(planes=((0, 0, 1, 0), (1, 0, 0, 3)), per_plane=12, spare=6, seed=2)
    res = cluster_decompose(lines, 2, Fraction(1, 4), 1, 10 * 2**8)
    expected = set(p_r(compute_rich_points(lines), 2))
    for s in res.surfaces:
        sub = [lines[i] for i in sorted(s.lines_contained)]
        expected -= {p for p, m in compute_rich_points(sub).entries.items() if m >= res.params.r_prime}
    assert res.residual == expected == residual_from_scratch(lines, res.surfaces, 2, res.params.r_prime)


def test_surfaces_share_few_lines():
    lines = planes_family(per_plane=30, spare=10)
    res = cluster_decompose(lines, 2, Fraction(1, 10), 1, K1)
    assert len(res.surfaces) >= 2
    for i, a in enumerate(res.surfaces):
        for b in res.surfaces[i + 1 :]:
            assert len(a.lines_contained & b.lines_contained) <= a.poly.degree() * b.poly.degree()


def test_mainincid_reports_surfaces_when_hypothesis_fails():
    lines = planes_family(per_plane=30, spare=10)
    rep = verify_mainincid(lines, 2, EPS, 1, K1)
    assert rep.surfaces == 3 and rep.bound is None


@pytest.mark.parametrize("seed", [0, 1])
def test_mainincid_sweep_on_random_families(seed):
    lines = generate(InstanceSpec("random-lines3d", {"L": 40}, seed=seed, bound=2, denominator=1))
    for r in range(2, 13):
        rep = verify_mainincid(lines, r, EPS, 1, K1)
        if rep.surfaces == 0:
            assert rep.bound["holds"]


def test_duplicates_rejected():
    lines = skew_family(4)
    with pytest.raises(ValueError):
        cluster_decompose(lines + lines[:1], 2, EPS, 1, K1)
