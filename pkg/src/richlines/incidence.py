"""Rich points of a line family, computed exactly.

Two engines produce the same :class:`RichPointMap`:

* ``method="exact"`` classifies every pair with :func:`classify_pair`
  on Fractions and groups the intersection points in a dict.  Slow, and
  kept as the reference oracle.
* ``method="numpy"`` encodes every line as integers (primitive direction,
  base numerator, base denominator) and runs the same pair test in
  vectorized integer arithmetic, block by block.  Intersection points are
  reduced to a canonical ``(X1, X2, X3, den)`` row and grouped with
  ``np.unique``.  When the worst-case magnitude of an intermediate could
  leave int64, blocks are evaluated on object arrays of Python ints
  instead, which stays exact at lower speed.

The point grouping never infers a multiplicity from a pair count: the
lines through each point are collected and counted directly.
"""

from __future__ import annotations

import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .exact import Line3, PairKind, Point3, classify_pair, q_str

__all__ = [
    "RichPointMap",
    "compute_rich_points",
    "coplanar_pairs",
    "p_r",
    "verify_bigr",
    "verify_szemeredi_trotter",
    "BigRReport",
    "SzTReport",
    "DuplicateLinesError",
    "default_workers",
]

WORKERS_ENV = "RICHLINES_WORKERS"
_INT64_SAFE = 2**62


class DuplicateLinesError(ValueError):
    pass


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class RichPointMap:
    """Points lying on two or more lines of a family, with multiplicities.

    ``keys`` holds one row ``(X1, X2, X3, den)`` per point, the reduced
    common-denominator form of the exact coordinates.  ``entries`` (a dict
    ``Point3 -> multiplicity``) is built lazily from it.
    """

    total_lines: int
    keys: np.ndarray
    mult: np.ndarray
    _entries: Optional[Dict[Point3, int]] = field(default=None, repr=False)
    _lines_at: Optional[List[Tuple[int, ...]]] = field(default=None, repr=False)

    @classmethod
    def from_entries(cls, total_lines: int, entries: Dict[Point3, int], lines_at=None) -> "RichPointMap":
        items = sorted(entries.items())
        keys = np.array([_point_key(p) for p, _ in items], dtype=object).reshape(-1, 4)
        mult = np.array([m for _, m in items], dtype=np.int64)
        out = cls(total_lines, keys, mult)
        out._entries = dict(items)
        if lines_at is not None:
            out._lines_at = [tuple(sorted(lines_at[p])) for p, _ in items]
        return out

    @property
    def entries(self) -> Dict[Point3, int]:
        if self._entries is None:
            self._entries = {
                Point3(Fraction(int(k[0]), int(k[3])), Fraction(int(k[1]), int(k[3])), Fraction(int(k[2]), int(k[3]))): int(m)
                for k, m in zip(self.keys, self.mult)
            }
        return self._entries

    @property
    def lines_at(self) -> Optional[List[Tuple[int, ...]]]:
        """Line indices through each point, aligned with ``keys`` (when recorded)."""
        return self._lines_at

    def __len__(self) -> int:
        return int(self.mult.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RichPointMap):
            return NotImplemented
        return self.total_lines == other.total_lines and self.entries == other.entries

    def histogram(self) -> Dict[int, int]:
        """``r -> |P_{=r}|`` for every multiplicity that occurs."""
        if not len(self):
            return {}
        vals, counts = np.unique(self.mult, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def cumulative(self) -> Dict[int, int]:
        """``r -> |P_r|`` for r = 2 .. max multiplicity."""
        hist = self.histogram()
        if not hist:
            return {}
        top = max(hist)
        out = {}
        running = 0
        for r in range(top, 1, -1):
            running += hist.get(r, 0)
            out[r] = running
        return dict(sorted(out.items()))

    def count_at_least(self, r: int) -> int:
        return int(np.count_nonzero(self.mult >= r))

    def intersecting_ordered_pairs(self) -> int:
        """``sum_{r>=2} (2r - 2) |P_r|``, the ordered intersecting line pairs."""
        return sum((2 * r - 2) * c for r, c in self.cumulative().items())

    def to_json(self) -> dict:
        return {
            "total_lines": self.total_lines,
            "points": len(self),
            "histogram": {str(r): c for r, c in self.histogram().items()},
            "cumulative": {str(r): c for r, c in self.cumulative().items()},
        }

    def to_csv(self) -> str:
        hist = self.histogram()
        cum = self.cumulative()
        rows = ["r,exactly_r,at_least_r"]
        for r in sorted(cum):
            rows.append(f"{r},{hist.get(r, 0)},{cum[r]}")
        return "\n".join(rows) + "\n"


def _point_key(p: Sequence[Fraction]) -> Tuple[int, int, int, int]:
    from math import lcm

    den = lcm(*(c.denominator for c in p))
    return tuple(int(c * den) for c in p) + (den,)


def p_r(rich: RichPointMap, r: int) -> Set[Point3]:
    """The set of r-rich points, r >= 2."""
    if r < 2:
        raise ValueError("r-rich points are defined here for r >= 2")
    return {p for p, m in rich.entries.items() if m >= r}


# ---------------------------------------------------------------------------
# engines


def _check_distinct(lines: Sequence[Line3]) -> None:
    if len(set(lines)) != len(lines):
        raise DuplicateLinesError("line family contains duplicate lines")


def _rich_exact(lines: Sequence[Line3]) -> RichPointMap:
    through: Dict[Point3, Set[int]] = defaultdict(set)
    n = len(lines)
    for i in range(n):
        a = lines[i]
        for j in range(i + 1, n):
            pc = classify_pair(a, lines[j])
            if pc.kind is PairKind.INTERSECTING:
                s = through[pc.at]
                s.add(i)
                s.add(j)
    entries = {p: len(s) for p, s in through.items()}
    return RichPointMap.from_entries(n, entries, through)


def _encode(lines: Sequence[Line3]):
    B = np.empty((len(lines), 3), dtype=object)
    D = np.empty((len(lines), 3), dtype=object)
    q = np.empty(len(lines), dtype=object)
    for i, l in enumerate(lines):
        b, d, den = l.integer_form()
        B[i] = b
        D[i] = d
        q[i] = den
    return B, D, q


def _magnitude_ok(B, D, q) -> bool:
    if not len(q):
        return True
    mb = max(abs(int(v)) for v in B.ravel()) or 1
    md = max(abs(int(v)) for v in D.ravel()) or 1
    mq = max(int(v) for v in q)
    worst = max(36 * mb * mq * md**4, 12 * mq * mq * md**4)
    return worst < _INT64_SAFE


def _pair_block(args):
    """Classify pairs (i, j), i in [lo, hi), j > i.  Returns coplanar data."""
    lo, hi, B, D, q = args
    L = len(q)
    out_i, out_j, out_pts = [], [], []
    par_i, par_j = [], []
    for i in range(lo, hi):
        if i + 1 >= L:
            break
        js = np.arange(i + 1, L)
        Di, Bi, qi = D[i], B[i], q[i]
        Dj, Bj, qj = D[i + 1 :], B[i + 1 :], q[i + 1 :]
        n0 = Di[1] * Dj[:, 2] - Di[2] * Dj[:, 1]
        n1 = Di[2] * Dj[:, 0] - Di[0] * Dj[:, 2]
        n2 = Di[0] * Dj[:, 1] - Di[1] * Dj[:, 0]
        par = (n0 == 0) & (n1 == 0) & (n2 == 0)
        if par.any():
            par_i.append(np.full(int(par.sum()), i, dtype=np.int64))
            par_j.append(js[par])
        w0 = Bj[:, 0] * qi - Bi[0] * qj
        w1 = Bj[:, 1] * qi - Bi[1] * qj
        w2 = Bj[:, 2] * qi - Bi[2] * qj
        cop = (w0 * n0 + w1 * n1 + w2 * n2 == 0) & ~par
        if not cop.any():
            continue
        n0, n1, n2 = n0[cop], n1[cop], n2[cop]
        w0, w1, w2 = w0[cop], w1[cop], w2[cop]
        d0, d1, d2 = Dj[cop, 0], Dj[cop, 1], Dj[cop, 2]
        # s * (qi qj |n|^2) = ((w x Dj) . n)
        c0 = w1 * d2 - w2 * d1
        c1 = w2 * d0 - w0 * d2
        c2 = w0 * d1 - w1 * d0
        snum = c0 * n0 + c1 * n1 + c2 * n2
        nn = n0 * n0 + n1 * n1 + n2 * n2
        qj_c = qj[cop]
        den = qi * qj_c * nn
        X0 = Bi[0] * qj_c * nn + snum * Di[0]
        X1 = Bi[1] * qj_c * nn + snum * Di[1]
        X2 = Bi[2] * qj_c * nn + snum * Di[2]
        g = np.gcd(np.gcd(X0, X1), np.gcd(X2, den))
        out_pts.append(np.stack([X0 // g, X1 // g, X2 // g, den // g], axis=1))
        out_i.append(np.full(int(cop.sum()), i, dtype=np.int64))
        out_j.append(js[cop])
    return out_i, out_j, out_pts, par_i, par_j


def _run_blocks(B, D, q, workers: int, block: int):
    L = len(q)
    tasks = [(lo, min(lo + block, L), B, D, q) for lo in range(0, L, block)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_pair_block, tasks))
    else:
        results = [_pair_block(t) for t in tasks]
    ii, jj, pts, pi, pj = [], [], [], [], []
    for a, b, c, d, e in results:
        ii += a
        jj += b
        pts += c
        pi += d
        pj += e
    return ii, jj, pts, pi, pj


def _encode_arrays(lines: Sequence[Line3]):
    B, D, q = _encode(lines)
    if _magnitude_ok(B, D, q):
        return B.astype(np.int64), D.astype(np.int64), q.astype(np.int64), True
    return B, D, q, False


def coplanar_pairs(lines: Sequence[Line3], workers: int | None = None):
    """All intersecting and parallel pairs ``i < j``.

    Returns ``(inter_i, inter_j, points, par_i, par_j)`` where ``points`` has
    one reduced ``(X1, X2, X3, den)`` row per intersecting pair.
    """
    workers = default_workers() if workers is None else workers
    B, D, q, native = _encode_arrays(lines)
    ii, jj, pts, pi, pj = _run_blocks(B, D, q, workers, block=64 if native else 16)
    dt = np.int64 if native else object
    cat = lambda xs, shape=(0,): np.concatenate(xs) if xs else np.zeros(shape, dtype=np.int64)  # noqa: E731
    points = np.concatenate(pts) if pts else np.zeros((0, 4), dtype=dt)
    return cat(ii), cat(jj), points, cat(pi), cat(pj)


def _rich_numpy(lines: Sequence[Line3], workers: int) -> RichPointMap:
    L = len(lines)
    ii, jj, points, _, _ = coplanar_pairs(lines, workers)
    if not len(ii):
        return RichPointMap(L, np.zeros((0, 4), dtype=np.int64), np.zeros(0, dtype=np.int64))
    if points.dtype == object:
        through: Dict[tuple, Set[int]] = defaultdict(set)
        for k, a, b in zip(map(tuple, points.tolist()), ii.tolist(), jj.tolist()):
            s = through[k]
            s.add(a)
            s.add(b)
        keys = sorted(through)
        arr = np.empty((len(keys), 4), dtype=object)
        for r, k in enumerate(keys):
            arr[r] = k
        mult = np.array([len(through[k]) for k in keys], dtype=np.int64)
        out = RichPointMap(L, arr, mult)
        out._lines_at = [tuple(sorted(through[k])) for k in keys]
        return out
    uniq, inv = np.unique(points, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    pid = np.concatenate([inv, inv])
    lid = np.concatenate([ii, jj])
    pairs = np.unique(pid * np.int64(L) + lid)
    mult = np.bincount(pairs // L, minlength=len(uniq)).astype(np.int64)
    out = RichPointMap(L, uniq, mult)
    lid_sorted = pairs % L
    bounds = np.concatenate([[0], np.cumsum(mult)])
    out._lines_at = [tuple(lid_sorted[bounds[k] : bounds[k + 1]].tolist()) for k in range(len(uniq))]
    return out


def compute_rich_points(lines: Sequence[Line3], method: str = "auto", workers: int | None = None) -> RichPointMap:
    """Exact map from every point on >= 2 lines to its multiplicity.

    ``lines`` must be canonical and pairwise distinct.
    """
    lines = list(lines)
    _check_distinct(lines)
    if method == "exact":
        return _rich_exact(lines)
    if method not in ("auto", "numpy"):
        raise ValueError(f"unknown method {method!r}")
    workers = default_workers() if workers is None else workers
    return _rich_numpy(lines, workers)


# ---------------------------------------------------------------------------
# bounds


@dataclass
class BigRReport:
    L: int
    r: int
    count: int
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.count <= self.bound

    @property
    def margin(self) -> Fraction:
        return self.bound - self.count

    def to_json(self) -> dict:
        return {"L": self.L, "r": self.r, "count": self.count, "bound": q_str(self.bound), "margin": q_str(self.margin), "holds": self.holds}


def verify_bigr(rich: RichPointMap, r: int) -> BigRReport:
    """Check |P_r| <= 2L/r, valid when r > 2 sqrt(L)."""
    L = rich.total_lines
    if r * r <= 4 * L:
        raise ValueError("the big-r bound applies only for r > 2 L^(1/2)")
    rep = BigRReport(L, r, rich.count_at_least(r), Fraction(2 * L, r))
    if not rep.holds:
        raise AssertionError(f"|P_{r}| = {rep.count} exceeds 2L/r = {rep.bound}")
    return rep


@dataclass
class SzTReport:
    L: int
    ratios: Dict[int, Fraction]

    @property
    def constant(self) -> Fraction:
        """The largest ratio |P_r| / (L^2 r^-3 + L r^-1): the measured constant."""
        return max(self.ratios.values(), default=Fraction(0))

    @property
    def argmax(self) -> Optional[int]:
        if not self.ratios:
            return None
        return max(self.ratios, key=lambda r: (self.ratios[r], -r))

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "constant": q_str(self.constant),
            "constant_approx": float(self.constant),
            "argmax_r": self.argmax,
        }


def szt_budget(L: int, r: int) -> Fraction:
    return Fraction(L * L, r**3) + Fraction(L, r)


def verify_szemeredi_trotter(rich: RichPointMap) -> SzTReport:
    """Measure the constant in |P_r| <= C (L^2 r^-3 + L r^-1) over r = 2..L."""
    L = rich.total_lines
    cum = rich.cumulative()
    ratios = {}
    for r in range(2, L + 1):
        ratios[r] = Fraction(cum.get(r, 0)) / szt_budget(L, r)
    return SzTReport(L, ratios)
