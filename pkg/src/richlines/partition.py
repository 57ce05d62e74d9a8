"""Constructive polynomial partitioning of a finite point set in 3-space.

Two backends build a product polynomial whose factors cut space into cells
(realizable all-nonzero sign vectors of the factors):

``partition_planes``
    Greedy product of affine planes.  Each cut bisects the heaviest cell
    through a median of its projections, which guarantees that no cell keeps
    more than ``2|S|/D`` points.
``partition_lifted``
    Rounds of simultaneous bisection.  In round t every current part is
    halved by one polynomial of small degree, found as a hyperplane in the
    space of monomials (a Veronese lift).  The search is heuristic; every
    accepted round is verified with exact sign counts and a failed search
    falls back to a plane cut.

All sign computations are exact: points are put over a common denominator
and polynomials are evaluated in integer arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exact import Line3, Point3, Q, q_str
from .linalg import rref
from .poly import TriPoly, X1, X2, X3, isolate_real_roots, monomials, plane, restrict_to_line

__all__ = [
    "PartitionResult",
    "LineCellIncidence",
    "PolyhamReport",
    "partition_planes",
    "partition_lifted",
    "line_cell_incidence",
    "verify_polyham",
    "poly_signs",
]

SignVector = Tuple[int, ...]


# ---------------------------------------------------------------------------
# exact evaluation on point batches


class PointBatch:
    """Points stored as integer rows over one common denominator."""

    def __init__(self, S: Sequence[Sequence]):
        pts = [tuple(Q(c) for c in p) for p in S]
        self.points = [Point3(*p) for p in pts]
        self.den = lcm(*(c.denominator for p in pts for c in p)) if pts else 1
        Z = np.empty((len(pts), 3), dtype=object)
        for i, p in enumerate(pts):
            Z[i] = [int(c * self.den) for c in p]
        self.Z = Z

    def __len__(self) -> int:
        return len(self.points)


def poly_signs(f: TriPoly, batch: PointBatch, rows: Optional[np.ndarray] = None) -> np.ndarray:
    """Exact sign of ``f`` at each point of ``batch`` (optionally a subset)."""
    Z = batch.Z if rows is None else batch.Z[rows]
    n = Z.shape[0]
    d = max(f.degree(), 0)
    scale = lcm(*(c.denominator for c in f.terms.values())) if f.terms else 1
    den = batch.den
    pw = [[np.ones(n, dtype=object)] for _ in range(3)]
    for i in range(3):
        for _ in range(d):
            pw[i].append(pw[i][-1] * Z[:, i])
    acc = np.zeros(n, dtype=object)
    for e, c in f.terms.items():
        coef = int(c * scale) * den ** (d - sum(e))
        acc = acc + coef * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]]
    return np.sign(acc.astype(object)).astype(np.int64) if n else np.zeros(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# results


@dataclass
class PartitionResult:
    """Cells of the complement of Z(poly) that contain points of S.

    ``labels[i]`` is the cell index of point i, or -1 when the point lies
    on the zero set.
    """

    poly: TriPoly
    factors: List[TriPoly]
    cells: List[SignVector]
    counts: List[int]
    labels: np.ndarray
    points: List[Point3]
    backend: str
    degree_budget: int
    rounds: List[dict] = field(default_factory=list)
    fallbacks: List[str] = field(default_factory=list)

    @property
    def on_boundary(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.labels < 0)]

    @property
    def assignments(self) -> Dict[int, Optional[SignVector]]:
        return {i: (self.cells[c] if c >= 0 else None) for i, c in enumerate(self.labels.tolist())}

    def cell_members(self, k: int) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.labels == k)]

    @property
    def max_cell(self) -> int:
        return max(self.counts, default=0)

    def to_json(self) -> dict:
        return {
            "backend": self.backend,
            "degree": self.poly.degree(),
            "degree_budget": self.degree_budget,
            "factors": [f.terms_json() for f in self.factors],
            "cells": [{"signs": list(s), "count": c} for s, c in zip(self.cells, self.counts)],
            "boundary": len(self.on_boundary),
            "rounds": self.rounds,
            "fallbacks": self.fallbacks,
        }


def _assemble(factors, sign_rows, batch: PointBatch, backend, D, rounds=(), fallbacks=()) -> PartitionResult:
    n = len(batch)
    if factors:
        M = np.stack(sign_rows, axis=1)
    else:
        M = np.ones((n, 0), dtype=np.int64)
    zero = (M == 0).any(axis=1)
    keys = [tuple(r) for r in M.tolist()]
    cells = sorted({k for k, z in zip(keys, zero) if not z})
    index = {s: i for i, s in enumerate(cells)}
    labels = np.array([-1 if z else index[k] for k, z in zip(keys, zero)], dtype=np.int64)
    counts = np.bincount(labels[labels >= 0], minlength=len(cells)).tolist() if cells else []
    poly = TriPoly.from_product(factors) if factors else TriPoly.const(1)
    return PartitionResult(poly, list(factors), cells, counts, labels, batch.points, backend, D, list(rounds), list(fallbacks))


def _current_cells(sign_rows, n) -> Dict[SignVector, List[int]]:
    if not sign_rows:
        return {(): list(range(n))}
    M = np.stack(sign_rows, axis=1)
    out: Dict[SignVector, List[int]] = {}
    for i, row in enumerate(M.tolist()):
        if 0 in row:
            continue
        out.setdefault(tuple(row), []).append(i)
    return out


# ---------------------------------------------------------------------------
# planes backend


def _median_plane(batch: PointBatch, members: Sequence[int], u: Sequence[int]) -> TriPoly:
    """Plane ``u . x = m`` with m the median projection of ``members``.

    For an even count m is the midpoint of the two middle projections, so
    each open side keeps at most half of the members.
    """
    Z = batch.Z[list(members)]
    proj = sorted(int(u[0]) * Z[:, 0] + int(u[1]) * Z[:, 1] + int(u[2]) * Z[:, 2])
    k = len(proj)
    if k % 2:
        med = Fraction(proj[k // 2])
    else:
        med = Fraction(proj[k // 2 - 1] + proj[k // 2], 2)
    return plane(u, -med / batch.den)


def _generic_direction(rng: random.Random) -> Tuple[int, int, int]:
    while True:
        u = tuple(rng.randint(-9, 9) for _ in range(3))
        if all(u):
            return u


def _slab_factors(batch: PointBatch, D: int, rng: random.Random) -> List[TriPoly]:
    """D parallel planes through quantile points of a generic projection.

    Points on a plane go to the boundary, so each open slab holds at most
    about |S|/(D+1) + 1 points even when projections repeat.
    """
    u = _generic_direction(rng)
    n = len(batch)
    Z = batch.Z
    values = sorted((int(u[0]) * Z[:, 0] + int(u[1]) * Z[:, 1] + int(u[2]) * Z[:, 2]).tolist())
    levels = sorted({values[min(n - 1, (j * n) // (D + 1))] for j in range(1, D + 1)})
    return [plane(u, -Fraction(v, batch.den)) for v in levels]


def partition_planes(S: Sequence[Sequence], D: int, seed: int = 0) -> PartitionResult:
    """Product of at most D planes; max cell <= 2|S|/D.

    The first three cuts use the coordinate directions, later ones seeded
    generic integer directions.  Each cut halves the heaviest current cell.
    """
    if D < 1:
        raise ValueError("degree D must be at least 1")
    batch = PointBatch(S)
    if not len(batch):
        raise ValueError("S must be nonempty")
    rng = random.Random(seed)
    n = len(batch)
    factors: List[TriPoly] = []
    rows: List[np.ndarray] = []
    rounds = []
    for k in range(D):
        cells = _current_cells(rows, n)
        if not cells:
            break
        heavy = max(sorted(cells), key=lambda s: len(cells[s]))
        members = cells[heavy]
        if len(members) <= 1 and k > 0:
            break
        u = tuple(int(i == k) for i in range(3)) if k < 3 else _generic_direction(rng)
        f = _median_plane(batch, members, u)
        factors.append(f)
        rows.append(poly_signs(f, batch))
        rounds.append({"cut": k, "direction": list(u), "cell_size": len(members)})
    part = _assemble(factors, rows, batch, "planes", D, rounds)
    if part.max_cell * D > 2 * n:
        slabs = _slab_factors(batch, D, rng)
        part = _assemble(slabs, [poly_signs(f, batch) for f in slabs], batch, "planes", D, rounds, ["quantile-slabs"])
    return part


# ---------------------------------------------------------------------------
# lifted backend


def _capacity(d: int) -> int:
    """How many sets one polynomial of degree d can bisect at once."""
    return comb(d + 3, 3) - 1


def _round_degree(parts: int) -> int:
    d = 1
    while _capacity(d) < parts:
        d += 1
    return d


class _Lift:
    """Float and exact monomial features in normalized coordinates."""

    def __init__(self, batch: PointBatch):
        pts = np.array([[float(c) for c in p] for p in batch.points])
        mu = pts.mean(axis=0) if len(pts) else np.zeros(3)
        spread = float(np.abs(pts - mu).max()) if len(pts) else 1.0
        # dyadic center and scale keep the exact coordinates cheap
        self.mu = [Fraction(round(m * 64), 64) for m in mu]
        self.s = Fraction(2) ** max(0, int(np.ceil(np.log2(spread))) if spread > 0 else 0)
        self.batch = batch
        self.Y = np.array([[float((p[i] - self.mu[i]) / self.s) for i in range(3)] for p in batch.points])

    def features(self, d: int, rows) -> np.ndarray:
        Y = self.Y[rows]
        return np.stack([Y[:, 0] ** e[0] * Y[:, 1] ** e[1] * Y[:, 2] ** e[2] for e in monomials(d)], axis=1)

    def exact_features(self, d: int, i: int) -> List[Fraction]:
        p = self.batch.points[i]
        y = [(p[k] - self.mu[k]) / self.s for k in range(3)]
        return [y[0] ** e[0] * y[1] ** e[1] * y[2] ** e[2] for e in monomials(d)]

    def to_poly(self, d: int, coeffs: Sequence[Fraction]) -> TriPoly:
        ys = [(X - self.mu[k]) * (1 / self.s) for k, X in enumerate((X1, X2, X3))]
        pw = [[TriPoly.const(1)] for _ in range(3)]
        for k in range(3):
            for _ in range(d):
                pw[k].append(pw[k][-1] * ys[k])
        out = TriPoly()
        for e, c in zip(monomials(d), coeffs):
            if c:
                out = out + pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]] * c
        return out


def _median_pick(members: Sequence[int], v: np.ndarray) -> int:
    """Of the two middle-rank points, the one whose value is closer to zero.

    A zero at either middle rank leaves at most ceil(n/2) points per side.
    """
    n = len(v)
    order = np.argsort(v, kind="stable")
    j = min((order[(n - 1) // 2], order[n // 2]), key=lambda k: abs(v[k]))
    return members[int(j)]


def _bisects(signs: np.ndarray) -> bool:
    half = (len(signs) + 1) // 2
    return int((signs > 0).sum()) <= half and int((signs < 0).sum()) <= half


def _float_balanced(v: np.ndarray, tol: float) -> bool:
    half = (len(v) + 1) // 2
    return int((v > tol).sum()) <= half and int((v < -tol).sum()) <= half


def _search_bisector(lift: _Lift, parts: List[List[int]], d: int, rng: np.random.Generator, restarts: int, iters: int):
    """Find coefficients bisecting every part at once.

    Annealed Gauss-Newton on the smoothed imbalances ``mean(tanh(f/s))``
    brings each part close to balance; a few median projections then make
    f vanish exactly at a middle-rank point of every part.  The projection
    is weighted by the Gram matrix of all features so that it disturbs the
    values as little as possible.  Returns exact coefficients or None; the
    caller verifies.
    """
    feats = [lift.features(d, p) for p in parts]
    M = feats[0].shape[1]
    G = sum(F.T @ F for F in feats)
    Gi = np.linalg.pinv(G)
    for _ in range(restarts):
        c = rng.standard_normal(M)
        for it in range(iters):
            q = max(0.005, 0.5 * 0.93**it)
            vals = [F @ c for F in feats]
            sig = [np.quantile(np.abs(v), q) + 1e-12 for v in vals]
            th = [np.tanh(v / s) for v, s in zip(vals, sig)]
            h = np.array([t.mean() for t in th])
            J = np.stack([((1 - t * t)[:, None] * F).mean(axis=0) / s for t, s, F in zip(th, sig, feats)])
            c = c - 0.7 * np.linalg.lstsq(J, h, rcond=1e-10)[0]
            c /= np.linalg.norm(c) or 1.0
            worst = max(abs(int((v > 0).sum()) - int((v < 0).sum())) for v in (F @ c for F in feats))
            if worst > max(8, min(len(p) for p in parts) // 64):
                continue
            c2 = c.copy()
            for _ in range(6):
                meds = tuple(_median_pick(p, F @ c2) for p, F in zip(parts, feats))
                B = lift.features(d, list(meds))
                try:
                    c2 = c2 - Gi @ B.T @ np.linalg.solve(B @ Gi @ B.T, B @ c2)
                except np.linalg.LinAlgError:
                    break
                if all(_float_balanced(F @ c2, 1e-9) for F in feats):
                    cand = _exact_candidate(lift, d, meds, c2 / (np.linalg.norm(c2) or 1.0))
                    if cand is not None:
                        return cand
                    break
    return None


def _floatc(c):
    return np.array([float(v) for v in c])


def _exact_candidate(lift: _Lift, d: int, meds, c) -> Optional[List[Fraction]]:
    """Exact coefficients vanishing at ``meds`` and close to the float ``c``."""
    rows = [lift.exact_features(d, i) for i in meds]
    R, pivots = rref(rows)
    M = len(rows[0])
    free = [j for j in range(M) if j not in pivots]
    if not free:
        return None
    out = [Fraction(round(v * 2**24), 2**24) for v in c]
    for j in pivots:
        out[j] = Fraction(0)
    for row, j in zip(R, pivots):
        out[j] = -sum(row[f] * out[f] for f in free)
    if not any(out):
        return None
    return out


def _bisect_round(lift, batch, parts, d, budget, rng, restarts, iters):
    """Search at degree d, then d + 1 if the budget allows, then on halves.

    A single part is cut by an exact median plane, which always bisects.
    """
    if len(parts) == 1:
        u = tuple(int(v) for v in rng.integers(-9, 10, size=3))
        if not any(u):
            u = (1, 0, 0)
        f = _median_plane(batch, parts[0], u)
        signs = poly_signs(f, batch)
        if _bisects(signs[parts[0]]):
            return f, signs, parts
    tries = [(d, parts)]
    if d + 1 <= budget:
        tries.append((d + 1, parts))
    k = len(parts) // 2
    while k >= 2:
        tries.append((d, parts[:k]))
        k //= 2
    for deg, sub in tries:
        cand = _search_bisector(lift, sub, deg, rng, restarts, iters)
        if cand is None:
            continue
        f = lift.to_poly(deg, cand)
        signs = poly_signs(f, batch)
        if f.degree() >= 1 and all(_bisects(signs[p]) for p in sub):
            return f, signs, sub
    return None, None, parts


def partition_lifted(
    S: Sequence[Sequence], D: int, seed: int = 0, restarts: int = 6, iters: int = 150
) -> PartitionResult:
    """Simultaneous-bisection partition with total degree at most D.

    Round t uses the least degree d whose monomial space can bisect every
    current part at once; if the remaining budget is smaller, only the
    heaviest parts that fit are bisected.  Each round is checked exactly:
    every targeted part keeps at most ceil(n/2) points on each open side.
    """
    batch = PointBatch(S)
    n = len(batch)
    if n < 2 or D < 2:
        raise ValueError("the lifted backend needs |S| >= 2 and D >= 2")
    rng = np.random.default_rng(seed)
    lift = _Lift(batch)
    factors: List[TriPoly] = []
    rows: List[np.ndarray] = []
    rounds: List[dict] = []
    fallbacks: List[str] = []
    used = 0
    while used < D:
        cells = _current_cells(rows, n)
        parts = sorted((m for m in cells.values() if len(m) >= 2), key=lambda m: (-len(m), m[0]))
        if not parts:
            break
        parts_all = parts
        d = _round_degree(len(parts))
        if d > D - used:
            d = D - used
            parts = parts[: _capacity(d)]
        f, signs, parts = _bisect_round(lift, batch, parts, d, D - used, rng, restarts, iters)
        if f is None:
            fallbacks.append(f"round {len(rounds)}: degree {d} search failed, plane cut used")
            u = _generic_direction(random.Random(seed + len(rounds)))
            parts = parts[:1]
            f = _median_plane(batch, parts[0], u)
            signs = poly_signs(f, batch)
        elif f.degree() > d or len(parts) < min(len(parts_all), _capacity(d)):
            target = min(len(parts_all), _capacity(d))
            fallbacks.append(f"round {len(rounds)}: degree {f.degree()} bisected {len(parts)} of {target} parts (degree {d} search failed)")
        checks = [_bisects(signs[p]) for p in parts]
        factors.append(f)
        rows.append(signs)
        used += f.degree()
        rounds.append(
            {
                "round": len(rounds),
                "degree": f.degree(),
                "parts": len(parts),
                "bisected": all(checks),
                "largest_part": len(parts[0]),
            }
        )
    return _assemble(factors, rows, batch, "lifted", D, rounds, fallbacks)


# ---------------------------------------------------------------------------
# lines against cells


@dataclass
class LineCellIncidence:
    cells_met: List[frozenset]
    in_zero_set: List[bool]
    degree: int

    def lines_in_cell(self, sign: SignVector) -> List[int]:
        return [i for i, s in enumerate(self.cells_met) if sign in s]

    @property
    def total(self) -> int:
        return sum(len(s) for s, z in zip(self.cells_met, self.in_zero_set) if not z)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "lines": len(self.cells_met),
            "in_zero_set": sum(self.in_zero_set),
            "max_cells_per_line": max((len(s) for s in self.cells_met), default=0),
            "total": self.total,
        }


def _line_cells(factors: Sequence[TriPoly], l: Line3) -> Tuple[bool, frozenset]:
    restr = [restrict_to_line(f, l) for f in factors]
    if any(r.is_zero() for r in restr):
        return True, frozenset()
    prod = restr[0]
    for r in restr[1:]:
        prod = prod * r
    roots = isolate_real_roots(prod) if prod.degree() > 0 else []
    if roots:
        samples = [roots[0][0] - 1]
        samples += [(roots[i][1] + roots[i + 1][0]) / 2 for i in range(len(roots) - 1)]
        samples.append(roots[-1][1] + 1)
    else:
        samples = [Fraction(0)]
    met = set()
    for t in samples:
        sv = tuple((v > 0) - (v < 0) for v in (r(t) for r in restr))
        assert 0 not in sv
        met.add(sv)
    return False, frozenset(met)


def line_cell_incidence(lines: Sequence[Line3], part: PartitionResult) -> LineCellIncidence:
    """Cells (sign vectors) met by each line; lines inside Z(poly) are flagged."""
    factors = part.factors
    D = part.poly.degree()
    cells, inz = [], []
    for l in lines:
        if not factors:
            z, met = False, frozenset({()})
        else:
            z, met = _line_cells(factors, l)
        cells.append(met)
        inz.append(z)
        if not z and len(met) > D + 1:
            raise AssertionError(f"a line meets {len(met)} cells, more than D + 1 = {D + 1}")
    inc = LineCellIncidence(cells, inz, D)
    L = sum(1 for z in inz if not z)
    if inc.total > (D + 1) * L:
        raise AssertionError("line-cell incidences exceed (D + 1) L")
    return inc


# ---------------------------------------------------------------------------
# verification


@dataclass
class PolyhamReport:
    backend: str
    D: int
    size: int
    cells: int
    max_cell: int
    boundary: int
    cell_ratio: Fraction
    mass_ratio: Fraction
    guaranteed: Optional[bool]

    def to_json(self) -> dict:
        return {
            "backend": self.backend,
            "D": self.D,
            "size": self.size,
            "cells": self.cells,
            "max_cell": self.max_cell,
            "boundary": self.boundary,
            "cell_ratio": q_str(self.cell_ratio),
            "mass_ratio": q_str(self.mass_ratio),
            "mass_ratio_approx": float(self.mass_ratio),
            "guaranteed_bound_holds": self.guaranteed,
        }


def verify_polyham(part: PartitionResult, S: Sequence[Sequence]) -> PolyhamReport:
    """Measure cell count and mass against D^3 and assert the backend's guarantee.

    ``cell_ratio`` is #cells / D^3 and ``mass_ratio`` is maxcell * D^3 / |S|.
    """
    pts = [Point3(*(Q(c) for c in p)) for p in S]
    if pts != list(part.points):
        raise ValueError("partition was built from a different point set")
    n = len(pts)
    D = part.degree_budget
    if sum(part.counts) + len(part.on_boundary) != n:
        raise AssertionError("cell counts and boundary do not add up to |S|")
    if len(set(part.cells)) != len(part.cells):
        raise AssertionError("two cells share a sign vector")
    if part.poly.degree() > D:
        raise AssertionError("partition polynomial exceeds the degree budget")
    guaranteed = None
    if part.backend == "planes":
        guaranteed = part.max_cell * D <= 2 * n
        if not guaranteed:
            raise AssertionError(f"max cell {part.max_cell} exceeds 2|S|/D = {Fraction(2 * n, D)}")
    if part.backend == "lifted" and not all(r["bisected"] for r in part.rounds):
        raise AssertionError("a lifted round failed its exact bisection check")
    return PolyhamReport(
        part.backend,
        D,
        n,
        len(part.cells),
        part.max_cell,
        len(part.on_boundary),
        Fraction(len(part.cells), D**3),
        Fraction(part.max_cell * D**3, n),
        guaranteed,
    )
