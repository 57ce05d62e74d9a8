"""Line families shared by several test modules."""

from fractions import Fraction

from richlines.exact import canonicalize
from richlines.linalg import nullspace, rank, rref
from richlines.poly import plane
from richlines.generators import InstanceSpec, generate


def planes_family(planes=((0, 0, 1, 0), (1, 0, 0, 3), (1, 1, 1, -2)), per_plane=30, spare=10, seed=0):
    """per_plane lines in each plane a x1 + b x2 + c x3 = e, plus random spare lines."""
    out = {}
    for k, (a, b, c, e) in enumerate(planes):
        spec = InstanceSpec("coplanar-lines", {"L": per_plane, "normal": [a, b, c], "offset": e}, seed=seed + k)
        for l in generate(spec):
            out.setdefault(l, None)
    if spare:
        for l in generate(InstanceSpec("random-lines3d", {"L": spare}, seed=seed + 99, bound=50)):
            out.setdefault(l, None)
    return list(out)


def regulus(n):
    return generate(InstanceSpec("regulus-rulings", {"n": n}))


def skew_family(n):
    """Lines of one ruling of x1 x2 = x3, pairwise skew."""
    return [canonicalize((a, 0, 0), (0, 1, a)) for a in range(n)]


def random_plane(rng):
    return plane([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)], Fraction(rng.randint(-9, 9)))


def plane_meet(p, q):
    """Line of intersection of two planes, or None when parallel."""
    n1 = [p.terms.get(e, 0) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    n2 = [q.terms.get(e, 0) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    rows = [n1 + [-p.terms.get((0, 0, 0), 0)], n2 + [-q.terms.get((0, 0, 0), 0)]]
    if rank([r[:3] for r in rows]) < 2:
        return None
    d = nullspace([r[:3] for r in rows], 3)[0]
    R, piv = rref(rows)
    base = [Fraction(0)] * 3
    for i, c in enumerate(piv):
        base[c] = R[i][3]
    return canonicalize(base, d)
