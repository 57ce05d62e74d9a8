"""Surfaces of low degree that contain many lines of a family.

Containment is decided exactly: a polynomial of degree <= D vanishes on a
line iff it vanishes at D + 1 distinct points of it.  Evaluating all
monomials of degree <= D at those points once per family turns every
containment query into one integer matrix-vector product.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .exact import Line3, q_str
from .incidence import coplanar_pairs
from .linalg import nullspace
from .poly import TriPoly, classify_irreducibility, monomials

__all__ = [
    "LineFamilyIndex",
    "SurfaceCandidate",
    "SurfaceSearch",
    "SurfCountReport",
    "vanishing_space",
    "lines_in_surface",
    "coplanar_groups",
    "search_surfaces",
    "greedy_surface_clusters",
    "verify_surfcount",
]


class LineFamilyIndex:
    """Integer monomial features of D + 1 sample points on every line."""

    def __init__(self, lines: Sequence[Line3]):
        self.lines = list(lines)
        self._feats: Dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.lines)

    def features(self, D: int) -> np.ndarray:
        """Object array of shape (L, D + 1, #monomials) of exact integers.

        Row (i, t) is the monomial vector of the t-th sample point of line i,
        multiplied by den^D where den clears that point's denominators.
        """
        if D not in self._feats:
            mons = monomials(D)
            out = np.empty((len(self.lines), D + 1, len(mons)), dtype=object)
            for i, l in enumerate(self.lines):
                for t in range(D + 1):
                    x = l.point_at(t)
                    den = lcm(*(c.denominator for c in x))
                    X = [int(c * den) for c in x]
                    out[i, t] = [X[0] ** e[0] * X[1] ** e[1] * X[2] ** e[2] * den ** (D - sum(e)) for e in mons]
            self._feats[D] = out
        return self._feats[D]

    def contained(self, poly: TriPoly, rows: Optional[Sequence[int]] = None) -> np.ndarray:
        """Boolean mask of lines lying in Z(poly)."""
        D = max(poly.degree(), 0)
        if poly.is_zero():
            raise ValueError("every line lies in the zero set of the zero polynomial")
        F = self.features(D)
        if rows is not None:
            F = F[list(rows)]
        c = _int_coeffs(poly, D)
        vals = F.dot(c)
        return ~np.any(vals != 0, axis=1)


def _int_coeffs(poly: TriPoly, D: int) -> np.ndarray:
    scale = lcm(*(v.denominator for v in poly.terms.values()))
    return np.array([int(poly.terms.get(e, 0) * scale) for e in monomials(D)], dtype=object)


def lines_in_surface(poly: TriPoly, lines: Sequence[Line3] | LineFamilyIndex) -> FrozenSet[int]:
    index = lines if isinstance(lines, LineFamilyIndex) else LineFamilyIndex(lines)
    if poly.factors:
        mask = np.zeros(len(index), dtype=bool)
        for f in poly.factors:
            if f.degree() > 0:
                mask |= index.contained(f)
    else:
        mask = index.contained(poly)
    return frozenset(int(i) for i in np.flatnonzero(mask))


def vanishing_space(lines: Sequence[Line3], D: int) -> List[TriPoly]:
    """Basis of the polynomials of degree <= D vanishing on every given line."""
    if D < 1:
        raise ValueError("degree D must be at least 1")
    mons = monomials(D)
    if not lines:
        return [TriPoly({e: 1}) for e in mons]
    F = LineFamilyIndex(lines).features(D)
    rows = F.reshape(-1, len(mons)).tolist()
    return [TriPoly(dict(zip(mons, v))) for v in nullspace(rows, len(mons))]


def _primitive_row(v) -> List[int]:
    den = lcm(*(Fraction(c).denominator for c in v))
    ints = [int(Fraction(c) * den) for c in v]
    g = gcd(*ints)
    return [c // g for c in ints] if g else ints


def _restricted_null(basis: List[List[int]], rows: np.ndarray) -> List[List[int]]:
    """Sub-basis (combinations of ``basis``) also vanishing on ``rows``.

    Basis vectors are kept as primitive integer rows.
    """
    if not basis:
        return []
    B = np.array(basis, dtype=object)
    cond = rows.dot(B.T).tolist()
    if not any(any(c) for c in cond):
        return basis
    null = nullspace(cond, len(basis))
    return [_primitive_row(np.array(_primitive_row(v), dtype=object).dot(B).tolist()) for v in null]


@dataclass
class SurfaceCandidate:
    poly: TriPoly
    lines_contained: FrozenSet[int]
    irreducibility: str
    factors: Tuple[TriPoly, ...] = ()

    def to_json(self) -> dict:
        return {
            "poly": self.poly.to_json(),
            "degree": self.poly.degree(),
            "lines": sorted(self.lines_contained),
            "irreducibility": self.irreducibility,
            "factors": [f.terms_json() for f in self.factors],
        }


@dataclass
class SurfaceSearch:
    surfaces: List[SurfaceCandidate]
    D: int
    threshold: Fraction
    seeds_tried: int
    seed_budget: int
    exhaustive: bool
    candidates_seen: int = 0

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "threshold": q_str(self.threshold),
            "surfaces": [s.to_json() for s in self.surfaces],
            "seeds_tried": self.seeds_tried,
            "seed_budget": self.seed_budget,
            "exhaustive": self.exhaustive,
            "candidates_seen": self.candidates_seen,
        }


def _primitive(v: Sequence[int]) -> Tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    out = [int(x) // g for x in v]
    lead = next(x for x in out if x)
    return tuple(-x for x in out) if lead < 0 else tuple(out)


def coplanar_groups(lines: Sequence[Line3], workers: Optional[int] = None) -> Dict[Tuple[int, ...], FrozenSet[int]]:
    """Every plane holding at least two lines, keyed by its primitive equation.

    The key ``(a, b, c, e)`` stands for ``a x1 + b x2 + c x3 = e``.
    """
    ii, jj, _, pi, pj = coplanar_pairs(lines, workers)
    forms = [l.integer_form() for l in lines]
    groups: Dict[Tuple[int, ...], set] = {}

    def add(i, j, n):
        B, _, q = forms[i]
        key = _primitive([q * n[0], q * n[1], q * n[2], n[0] * B[0] + n[1] * B[1] + n[2] * B[2]])
        s = groups.setdefault(key, set())
        s.add(i)
        s.add(j)

    for i, j in zip(ii.tolist(), jj.tolist()):
        Di, Dj = forms[i][1], forms[j][1]
        add(i, j, _cross(Di, Dj))
    for i, j in zip(pi.tolist(), pj.tolist()):
        Bi, Di, qi = forms[i]
        Bj, _, qj = forms[j]
        w = [Bj[k] * qi - Bi[k] * qj for k in range(3)]
        add(i, j, _cross(Di, w))
    return {k: frozenset(v) for k, v in groups.items()}


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _plane_poly(key: Tuple[int, ...]) -> TriPoly:
    a, b, c, e = key
    return TriPoly({(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c, (0, 0, 0): -e})


def _candidate(poly: TriPoly, index: LineFamilyIndex) -> List[SurfaceCandidate]:
    """Classify ``poly``; reducible ones are replaced by their rational factors."""
    label, factors = classify_irreducibility(poly)
    if label == "reducible":
        out = []
        for f in factors:
            if f.degree() >= 1:
                out += _candidate(f.normalized(), index)
        return out
    return [SurfaceCandidate(poly.normalized(), lines_in_surface(poly, index), label)]


def _seed_polys(index: LineFamilyIndex, D: int, rng: random.Random, budget: int, meets) -> Tuple[List[TriPoly], int]:
    """Surfaces of degree D through random seed sets of lines.

    A seed is a line together with a few lines meeting it (when any do), or a
    random triple.  The vanishing space is then cut down by more lines until
    it is one-dimensional; lines that would empty it are skipped.
    """
    L = len(index)
    mons = monomials(D)
    F = index.features(D)
    out: List[TriPoly] = []
    tried = 0
    order = list(range(L))
    for _ in range(budget):
        if L < 2:
            break
        tried += 1
        anchor = rng.randrange(L)
        nbrs = sorted(meets.get(anchor, ()))
        if len(nbrs) >= 3 and rng.random() < 0.7:
            seed = rng.sample(nbrs, 3)
        else:
            seed = rng.sample(range(L), min(3, L))
        basis = [[int(i == j) for i in range(len(mons))] for j in range(len(mons))]
        for i in seed:
            nb = _restricted_null(basis, F[i])
            if nb:
                basis = nb
        # lines meeting the seed first, then a bounded number of random ones
        near = sorted({j for i in seed for j in meets.get(i, ())} - set(seed))
        rng.shuffle(near)
        rng.shuffle(order)
        for i in (near + order)[: 4 * len(mons)]:
            if len(basis) <= 1:
                break
            nb = _restricted_null(basis, F[i])
            if nb:
                basis = nb
        if len(basis) == 1 and any(basis[0]):
            out.append(TriPoly(dict(zip(mons, basis[0]))))
    return out, tried


def search_surfaces(
    lines: Sequence[Line3] | LineFamilyIndex,
    D: int,
    A,
    seed: int = 0,
    seed_budget: int = 200,
    workers: Optional[int] = None,
) -> SurfaceSearch:
    """Greedy search for surfaces of degree <= D holding at least A lines.

    Planes come from all coplanar line pairs, so degree 1 is exhaustive.  For
    D >= 2 further candidates come from ``seed_budget`` random seeds.  The
    candidate covering the most not-yet-covered lines is accepted while it
    covers at least A; its lines are then removed from play.
    """
    if A < 2:
        raise ValueError("threshold A must be at least 2")
    index = lines if isinstance(lines, LineFamilyIndex) else LineFamilyIndex(lines)
    A = Fraction(A)
    groups = coplanar_groups(index.lines, workers)
    pool: Dict[TriPoly, SurfaceCandidate] = {}
    for key, members in groups.items():
        poly = _plane_poly(key).normalized()
        pool[poly] = SurfaceCandidate(poly, members, "verified-irreducible")
    tried = 0
    if D >= 2:
        meets: Dict[int, set] = {}
        ii, jj, _, _, _ = coplanar_pairs(index.lines, workers)
        for i, j in zip(ii.tolist(), jj.tolist()):
            meets.setdefault(i, set()).add(j)
            meets.setdefault(j, set()).add(i)
        rng = random.Random(seed)
        for deg in range(2, D + 1):
            polys, n = _seed_polys(index, deg, rng, seed_budget, meets)
            tried += n
            seen = set()
            for p in polys:
                p = p.normalized()
                if p in seen:
                    continue
                seen.add(p)
                for cand in _candidate(p, index):
                    if cand.poly not in pool:
                        pool[cand.poly] = cand
    remaining = set(range(len(index)))
    accepted: List[SurfaceCandidate] = []
    cands = sorted(pool.values(), key=lambda c: (c.poly.degree(), str(c.poly)))
    while cands:
        best = max(cands, key=lambda c: len(c.lines_contained & remaining))
        if len(best.lines_contained & remaining) < A:
            break
        accepted.append(best)
        remaining -= best.lines_contained
        cands.remove(best)
    return SurfaceSearch(accepted, D, A, tried, seed_budget if D >= 2 else 0, D == 1, len(pool))


def greedy_surface_clusters(lines, D: int, A, seed: int = 0, seed_budget: int = 200) -> List[SurfaceCandidate]:
    return search_surfaces(lines, D, A, seed=seed, seed_budget=seed_budget).surfaces


@dataclass
class SurfCountReport:
    L: int
    A: Fraction
    D: int
    count: int
    applicable: bool
    bound: Fraction
    max_shared: int

    @property
    def holds(self) -> bool:
        return not self.applicable or self.count <= self.bound

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "A": q_str(self.A),
            "D": self.D,
            "count": self.count,
            "applicable": self.applicable,
            "bound": q_str(self.bound),
            "max_shared_lines": self.max_shared,
            "holds": self.holds,
        }


def verify_surfcount(candidates: Sequence[SurfaceCandidate], L: int, A, D: int) -> SurfCountReport:
    """Check |candidates| <= 2L/A when A > 2 D sqrt(L).

    Also checks that two distinct candidates share at most deg * deg lines.
    """
    A = Fraction(A)
    for c in candidates:
        if len(c.lines_contained) < A:
            raise ValueError("every candidate must contain at least A lines")
        if c.poly.degree() > D:
            raise ValueError("candidate exceeds degree D")
    polys = [c.poly.normalized() for c in candidates]
    if len(set(polys)) != len(polys):
        raise ValueError("candidates must be pairwise distinct surfaces")
    shared = 0
    for i, a in enumerate(candidates):
        for b in candidates[i + 1 :]:
            k = len(a.lines_contained & b.lines_contained)
            shared = max(shared, k)
            if a.irreducibility == b.irreducibility == "verified-irreducible":
                if k > a.poly.degree() * b.poly.degree():
                    raise AssertionError(f"two surfaces share {k} lines, above deg * deg")
    applicable = A * A > 4 * D * D * L
    rep = SurfCountReport(L, A, D, len(candidates), applicable, Fraction(2 * L) / A, shared)
    if not rep.holds:
        raise AssertionError(f"{rep.count} surfaces exceed 2L/A = {rep.bound}")
    return rep
