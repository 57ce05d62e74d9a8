"""Distance quadruples of a planar point set, encoded as lines in 3-space.

An ordered pair of planar points ``(p, q)`` becomes the line

    2 x = (x_p + x_q) + (y_p - y_q) z
    2 y = (y_p + y_q) + (x_q - x_p) z

and two such lines ``l(p1, p3)``, ``l(p2, p4)`` are coplanar exactly when
``|p1 - p2| = |p3 - p4|``.  Counting distance quadruples therefore reduces
to counting intersecting line pairs, which the rich-point engine does.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import Line3, PairKind, Point2, Q, canonicalize, classify_pair, cross, dist_sq, point2, q_str
from .incidence import RichPointMap, compute_rich_points
from .poly import TriPoly, X1, X2, X3, gradient, line_in_zero_set, restrict_to_line

__all__ = [
    "PlanarConfig",
    "ESLine",
    "QuadrupleCensus",
    "VectorFieldValue",
    "es_line",
    "build_line_family",
    "is_distance_quadruple",
    "quadinter_check",
    "quadruple_census_bruteforce",
    "quadruple_census_via_rich_points",
    "parallel_count",
    "distinct_distances",
    "dd_lower_bound",
    "vector_field_Vp",
    "vector_field_poly",
    "line_through_point",
    "directional_vanishing_check",
    "tangency_holds",
    "lemma_equivalence_counts",
    "DDBound",
    "DirectionalReport",
    "BRUTE_FORCE_CAP",
]

BRUTE_FORCE_CAP = 40


@dataclass(frozen=True)
class PlanarConfig:
    points: Tuple[Point2, ...]

    def __post_init__(self):
        pts = tuple(point2(*p) for p in self.points)
        if not pts:
            raise ValueError("a configuration needs at least one point")
        if len(set(pts)) != len(pts):
            raise ValueError("configuration points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def to_json(self) -> dict:
        return {"points": [[q_str(p.x), q_str(p.y)] for p in self.points]}

    @classmethod
    def from_json(cls, obj) -> "PlanarConfig":
        return cls(tuple(point2(*p) for p in obj["points"]))


@dataclass(frozen=True)
class ESLine:
    line: Line3
    source: Tuple[Point2, Point2]


def es_line(p: Sequence, q: Sequence) -> Line3:
    """The line attached to the ordered pair (p, q)."""
    x1, y1 = Q(p[0]), Q(p[1])
    x2, y2 = Q(q[0]), Q(q[1])
    base = ((x1 + x2) / 2, (y1 + y2) / 2, 0)
    direction = ((y1 - y2) / 2, (x2 - x1) / 2, 1)
    return canonicalize(base, direction)


def build_line_family(P: PlanarConfig | Sequence) -> List[ESLine]:
    """All N^2 lines, one per ordered pair (diagonal pairs included)."""
    pts = _points(P)
    return [ESLine(es_line(p, q), (p, q)) for p in pts for q in pts]


def _points(P) -> Tuple[Point2, ...]:
    if isinstance(P, PlanarConfig):
        return P.points
    return PlanarConfig(tuple(P)).points


def is_distance_quadruple(p1, p2, p3, p4) -> bool:
    d = dist_sq(p1, p2)
    return d != 0 and d == dist_sq(p3, p4)


def quadinter_check(p1, p2, p3, p4) -> bool:
    """Coordinate test for ``l(p1, p3)`` and ``l(p2, p4)`` meeting or being parallel.

    With ``a = p1 + p3`` and ``b = (y1 - y3, x3 - x1)`` for the first line
    (barred quantities from p2, p4), the two lines share a point or a
    direction iff the 2x2 system ``(a - a') + (b - b') z = 0`` is consistent
    with a unique line of solutions, i.e. the determinant
    ``(a_x - a'_x)(b_y - b'_y) - (a_y - a'_y)(b_x - b'_x)`` vanishes while the
    two lines are not identical.
    """
    x1, y1 = Q(p1[0]), Q(p1[1])
    x2, y2 = Q(p2[0]), Q(p2[1])
    x3, y3 = Q(p3[0]), Q(p3[1])
    x4, y4 = Q(p4[0]), Q(p4[1])
    ax, ay, bx, by = x1 + x3, y1 + y3, y1 - y3, x3 - x1
    cx, cy, dx, dy = x2 + x4, y2 + y4, y2 - y4, x4 - x2
    det = (ax - cx) * (by - dy) - (ay - cy) * (bx - dx)
    same = ax == cx and ay == cy and bx == dx and by == dy
    return det == 0 and not same


@dataclass
class QuadrupleCensus:
    N: int
    total: int
    parallel: int
    intersecting: int

    def __post_init__(self):
        if self.total != self.parallel + self.intersecting:
            raise AssertionError("census does not add up")

    def to_json(self) -> dict:
        return {"N": self.N, "total": self.total, "parallel": self.parallel, "intersecting": self.intersecting}


def quadruple_census_bruteforce(P: PlanarConfig | Sequence, cap: int = BRUTE_FORCE_CAP) -> QuadrupleCensus:
    """Enumerate all N^4 ordered quadruples directly."""
    pts = _points(P)
    N = len(pts)
    if N > cap:
        raise ValueError(f"N = {N} exceeds the brute-force cap {cap}; use quadruple_census_via_rich_points")
    pairs = [(p, q) for p in pts for q in pts]
    dist = [dist_sq(p, q) for p, q in pairs]
    diff = [(p.x - q.x, p.y - q.y) for p, q in pairs]
    total = par = 0
    for i, (d12, v12) in enumerate(zip(dist, diff)):
        if not d12:
            continue
        for d34, v34 in zip(dist, diff):
            if d12 == d34:
                total += 1
                par += v12 == v34
    return QuadrupleCensus(N, total, par, total - par)


def parallel_count(P: PlanarConfig | Sequence) -> int:
    """Sum over nonzero difference vectors v of (#ordered pairs with p - q = v)^2."""
    pts = _points(P)
    mult = Counter((p.x - q.x, p.y - q.y) for p in pts for q in pts if p != q)
    return sum(m * m for m in mult.values())


def quadruple_census_via_rich_points(
    P: PlanarConfig | Sequence, rich: Optional[RichPointMap] = None, workers: Optional[int] = None
) -> QuadrupleCensus:
    """Census through the rich points of the line family.

    Ordered intersecting line pairs number ``sum_{r>=2} (2r - 2) |P_r|``;
    parallel ones come from the difference multiset.
    """
    pts = _points(P)
    if rich is None:
        rich = compute_rich_points([e.line for e in build_line_family(pts)], workers=workers)
    inter = rich.intersecting_ordered_pairs()
    par = parallel_count(pts)
    return QuadrupleCensus(len(pts), inter + par, par, inter)


def distinct_distances(P: PlanarConfig | Sequence) -> int:
    pts = _points(P)
    return len({dist_sq(p, q) for i, p in enumerate(pts) for q in pts[i + 1 :]})


@dataclass
class DDBound:
    N: int
    distinct: int
    quadruples: int
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.distinct >= self.bound

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "distinct": self.distinct,
            "quadruples": self.quadruples,
            "bound": q_str(self.bound),
            "bound_approx": float(self.bound),
            "holds": self.holds,
        }


def dd_lower_bound(P: PlanarConfig | Sequence, census: Optional[QuadrupleCensus] = None) -> DDBound:
    """Distinct distances against the Cauchy-Schwarz bound (N^4 - 2N^3) / |Q(P)|."""
    pts = _points(P)
    N = len(pts)
    if N < 3:
        raise ValueError("the bound is positive only for N >= 3")
    if census is None:
        census = quadruple_census_via_rich_points(pts)
    rep = DDBound(N, distinct_distances(pts), census.total, Fraction(N**4 - 2 * N**3, census.total))
    if not rep.holds:
        raise AssertionError(f"{rep.distinct} distinct distances below the bound {rep.bound}")
    return rep


# ---------------------------------------------------------------------------
# the vector field along the lines through a fixed point


@dataclass(frozen=True)
class VectorFieldValue:
    v1: Fraction
    v2: Fraction
    v3: Fraction

    def __iter__(self):
        return iter((self.v1, self.v2, self.v3))


def _bvec(p, x):
    p1, p2 = Q(p[0]), Q(p[1])
    x1, x2, x3 = x
    a1 = 2 * x1 - p1 - p2 * x3
    a2 = 2 * x2 - p2 + p1 * x3
    return a1 + x3 * a2, -x3 * a1 + a2


def vector_field_Vp(p: Sequence, x: Sequence) -> VectorFieldValue:
    """Direction field of the lines l(p, q), scaled to be polynomial in x."""
    x = tuple(Q(c) for c in x)
    p1, p2 = Q(p[0]), Q(p[1])
    b1, b2 = _bvec(p, x)
    s = x[2] * x[2] + 1
    return VectorFieldValue(p2 * s - b2, b1 - p1 * s, 2 * s)


def vector_field_poly(p: Sequence) -> Tuple[TriPoly, TriPoly, TriPoly]:
    """The same field with x symbolic: three TriPolys of degree <= 3."""
    p1, p2 = Q(p[0]), Q(p[1])
    b1, b2 = _bvec(p, (X1, X2, X3))
    s = X3 * X3 + 1
    return s * p2 - b2, b1 - s * p1, s * 2


def line_through_point(p: Sequence, x: Sequence) -> Tuple[Point2, Line3]:
    """The unique q with x on l(p, q)."""
    x = tuple(Q(c) for c in x)
    b1, b2 = _bvec(p, x)
    s = x[2] * x[2] + 1
    q = Point2(b1 / s, b2 / s)
    line = es_line(p, q)
    assert line.contains(x)
    return q, line


@dataclass
class DirectionalReport:
    degree: int
    lines_in_surface: List[int]
    vanishing: Dict[int, bool]
    divisible: Optional[bool] = None

    @property
    def holds(self) -> bool:
        return all(self.vanishing.values())

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "lines_in_surface": self.lines_in_surface,
            "vanishing": {str(k): v for k, v in self.vanishing.items()},
            "divisible": self.divisible,
            "holds": self.holds,
        }


def directional_vanishing_check(
    p: Sequence, Q_: TriPoly, qs: Iterable[Sequence] = (), test_divisibility: bool = False
) -> DirectionalReport:
    """Check that V_p . grad Q vanishes on every line l(p, q) lying in Z(Q).

    ``qs`` lists the partner points q whose lines are examined.
    """
    if Q_.is_zero():
        raise ValueError("Q must be nonzero")
    V = vector_field_poly(p)
    G = gradient(Q_)
    W = V[0] * G[0] + V[1] * G[1] + V[2] * G[2]
    inside, vanish = [], {}
    for k, q in enumerate(qs):
        l = es_line(p, q)
        if line_in_zero_set(Q_, l):
            inside.append(k)
            vanish[k] = W.is_zero() or restrict_to_line(W, l).is_zero()
    div = None
    if test_divisibility:
        div = Q_.divides(W)
    rep = DirectionalReport(W.degree(), inside, vanish, div)
    if not rep.holds:
        raise AssertionError("V_p . grad Q fails to vanish on a line of the surface")
    return rep


def tangency_holds(p: Sequence, q: Sequence, t) -> bool:
    """V_p at the point of l(p, q) with parameter t is parallel to the line."""
    l = es_line(p, q)
    x = l.point_at(t)
    v = tuple(vector_field_Vp(p, x))
    d = (Q(p[1]) - Q(q[1]), Q(q[0]) - Q(p[0]), 2)
    return not any(cross(v, d)) and v[2] > 0


def lemma_equivalence_counts(P: PlanarConfig | Sequence) -> Counter:
    """Disagreement tally over all N^4 quadruples for the three coplanarity tests."""
    pts = _points(P)
    lines = {(p, q): es_line(p, q) for p in pts for q in pts}
    tally: Counter = Counter()
    for p1, p2, p3, p4 in product(pts, repeat=4):
        a = is_distance_quadruple(p1, p2, p3, p4)
        b = quadinter_check(p1, p2, p3, p4)
        kind = classify_pair(lines[p1, p3], lines[p2, p4]).kind
        c = kind in (PairKind.INTERSECTING, PairKind.PARALLEL)
        tally["checked"] += 1
        if not (a == b == c):
            tally["disagree"] += 1
    return tally
