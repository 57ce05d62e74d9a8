"""Exact rational points and lines in 2- and 3-space.

Everything here is built on :class:`fractions.Fraction`; no floating point
value ever enters a coordinate.  Lines carry a canonical form so that two
``Line3`` values compare (and hash) equal exactly when they describe the
same point set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import NamedTuple, Optional, Sequence, Tuple

__all__ = [
    "Q",
    "q_str",
    "Point2",
    "Point3",
    "point2",
    "point3",
    "Line3",
    "PairKind",
    "PairClass",
    "canonicalize",
    "line_through",
    "classify_pair",
    "plucker_side",
    "dist_sq",
    "cross",
    "dot",
]


def Q(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions and strings such as ``"3/4"`` or ``"-2"``.
    Floats are refused on purpose: an accidental float would silently
    turn into a 53-bit dyadic rational.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


def q_str(value) -> str:
    """Serialize a rational as ``"num/den"`` (``"num"`` when den == 1)."""
    f = Q(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


class Point2(NamedTuple):
    x: Fraction
    y: Fraction


class Point3(NamedTuple):
    x1: Fraction
    x2: Fraction
    x3: Fraction


def point2(x, y) -> Point2:
    return Point2(Q(x), Q(y))


def point3(x1, x2, x3) -> Point3:
    return Point3(Q(x1), Q(x2), Q(x3))


def dot(a: Sequence, b: Sequence):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Sequence, b: Sequence) -> Tuple:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dist_sq(p: Point2, q: Point2) -> Fraction:
    """Squared Euclidean distance; stays in Q where the distance would not."""
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return Fraction(dx * dx + dy * dy)


@dataclass(frozen=True)
class Line3:
    """A line ``{base + t * dir}`` stored in canonical form.

    Construct through :func:`canonicalize`; the dataclass constructor
    assumes its arguments are already canonical.  The canonical form has
    the first nonzero coordinate of ``dir`` equal to 1 and ``base`` zero in
    that same coordinate, which makes it unique.
    """

    base: Point3
    dir: Point3
    plucker: Tuple[Fraction, ...] = field(compare=False, hash=False, repr=False, default=())

    @property
    def pivot(self) -> int:
        for i, c in enumerate(self.dir):
            if c:
                return i
        raise ValueError("zero direction")

    def point_at(self, t) -> Point3:
        t = Q(t)
        b, d = self.base, self.dir
        return Point3(b[0] + t * d[0], b[1] + t * d[1], b[2] + t * d[2])

    def contains(self, x: Sequence) -> bool:
        k = self.pivot
        t = (x[k] - self.base[k]) / self.dir[k]
        return all(x[i] == self.base[i] + t * self.dir[i] for i in range(3))

    def integer_form(self) -> Tuple[Tuple[int, int, int], Tuple[int, int, int], int]:
        """Return ``(B, D, q)`` with base = B / q and D a primitive integer direction."""
        dl = lcm(*(c.denominator for c in self.dir))
        D = [int(c * dl) for c in self.dir]
        g = 0
        for c in D:
            g = _gcd(g, c)
        D = tuple(c // g for c in D)
        q = lcm(*(c.denominator for c in self.base))
        B = tuple(int(c * q) for c in self.base)
        return B, D, q

    def to_json(self) -> dict:
        return {"base": [q_str(c) for c in self.base], "dir": [q_str(c) for c in self.dir]}

    @classmethod
    def from_json(cls, obj: dict) -> "Line3":
        return canonicalize(point3(*obj["base"]), point3(*obj["dir"]))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def canonicalize(base: Sequence, direction: Sequence) -> Line3:
    """Canonical representative of the line through ``base`` along ``direction``.

    Scales ``direction`` so its first nonzero entry is 1 and slides ``base``
    along the line until it is zero in that coordinate.
    """
    b = tuple(Q(c) for c in base)
    d = tuple(Q(c) for c in direction)
    if len(b) != 3 or len(d) != 3:
        raise ValueError("lines live in 3-space")
    k = next((i for i, c in enumerate(d) if c), None)
    if k is None:
        raise ValueError("direction must be nonzero")
    lead = d[k]
    d = Point3(*(c / lead for c in d))
    t = b[k]
    b = Point3(*(b[i] - t * d[i] for i in range(3)))
    m = cross(b, d)
    return Line3(b, d, (d[0], d[1], d[2], m[0], m[1], m[2]))


def line_through(p: Sequence, q: Sequence) -> Line3:
    """Line through two distinct points."""
    return canonicalize(p, tuple(Q(q[i]) - Q(p[i]) for i in range(3)))


class PairKind(str, Enum):
    EQUAL = "Equal"
    PARALLEL = "Parallel"
    INTERSECTING = "Intersecting"
    SKEW = "Skew"


@dataclass(frozen=True)
class PairClass:
    kind: PairKind
    at: Optional[Point3] = None

    def __str__(self) -> str:
        if self.kind is PairKind.INTERSECTING:
            return f"Intersecting(at={tuple(q_str(c) for c in self.at)})"
        return self.kind.value


def plucker_side(a: Line3, b: Line3) -> Fraction:
    """Reciprocal product of Plücker coordinates; zero iff the lines are coplanar."""
    pa, pb = a.plucker, b.plucker
    return pa[0] * pb[3] + pa[1] * pb[4] + pa[2] * pb[5] + pb[0] * pa[3] + pb[1] * pa[4] + pb[2] * pa[5]


def classify_pair(a: Line3, b: Line3) -> PairClass:
    """Exact relative position of two canonical lines."""
    if a == b:
        return PairClass(PairKind.EQUAL)
    n = cross(a.dir, b.dir)
    if not any(n):
        return PairClass(PairKind.PARALLEL)
    w = (b.base[0] - a.base[0], b.base[1] - a.base[1], b.base[2] - a.base[2])
    if dot(w, n):
        return PairClass(PairKind.SKEW)
    s = dot(cross(w, b.dir), n) / dot(n, n)
    d = a.dir
    x = Point3(a.base[0] + s * d[0], a.base[1] + s * d[1], a.base[2] + s * d[2])
    return PairClass(PairKind.INTERSECTING, x)
