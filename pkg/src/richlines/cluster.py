"""Recursive decomposition of the r-rich points of a line family.

``cluster_decompose`` returns a set of low-degree surfaces, each holding at
least ``L^(1/2+eps)`` lines, together with the rich points they fail to
explain: the points of ``P_r`` lying in no ``P_r'(L_Z)``, r' = ceil(9r/10).
The target guarantee is

* every surface has degree <= D and no rational factorization,
* every surface holds >= L^(1/2+eps) lines,
* there are at most 2 L^(1/2-eps) surfaces,
* the leftover set has at most K L^(3/2+eps) r^-2 points.

Small families (L^eps <= 2D) are handled directly by a surface search.
Larger ones iterate: partition the unexplained points, recurse into cells
crossed by few lines, promote the components of the partition polynomial
to candidate surfaces, and drop every point they explain.  Candidates with
too few lines are pruned at the end.  Every counting step is written to a
trace, and the four guarantees are re-checked from scratch afterwards with
the pure-Python rich-point oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Set

from .bounds import Inequality, PowerTerm, ceil_power, log2_ceil
from .exact import Line3, Point3, q_str
from .incidence import compute_rich_points, p_r, verify_bigr
from .partition import line_cell_incidence, partition_lifted, partition_planes
from .surfaces import LineFamilyIndex, SurfaceCandidate, _candidate, lines_in_surface, search_surfaces

__all__ = [
    "ClusterParams",
    "ClusterResult",
    "cluster_decompose",
    "verify_mainincid",
    "MainIncidenceReport",
    "check_parameters",
    "residual_from_scratch",
]

SUB_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class ClusterParams:
    L: int
    r: int
    r_prime: int
    eps: Fraction
    D: int
    K: Fraction
    A: int

    @property
    def surface_threshold(self) -> PowerTerm:
        return PowerTerm(1, self.L, Fraction(1, 2) + self.eps)

    @property
    def count_bound(self) -> PowerTerm:
        return PowerTerm(2, self.L, Fraction(1, 2) - self.eps)

    @property
    def residual_bound(self) -> PowerTerm:
        return PowerTerm(self.K / self.r**2, self.L, Fraction(3, 2) + self.eps)

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "r": self.r,
            "r_prime": self.r_prime,
            "eps": q_str(self.eps),
            "D": self.D,
            "K": q_str(self.K),
            "A": self.A,
        }


def check_parameters(L: int, r: int, eps, D: int, K) -> ClusterParams:
    """Validate the parameter gates; the error names the violated inequality."""
    eps = Fraction(eps)
    K = Fraction(K)
    if L < 1:
        raise ValueError("the family must contain at least one line")
    if r < 2:
        raise ValueError(f"need 2 <= r, got r = {r}")
    if r * r > 4 * L:
        raise ValueError(f"need r <= 2 L^(1/2): r^2 = {r * r} > 4L = {4 * L}")
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError(f"need 0 < eps <= 1/2, got eps = {eps}")
    if D < 1:
        raise ValueError(f"need D >= 1, got D = {D}")
    # K >= 10 (2D)^(2/eps)  <=>  (K/10)^a >= (2D)^(2b) for eps = a/b
    a, b = eps.numerator, eps.denominator
    if (K / 10) ** a < (2 * D) ** (2 * b):
        raise ValueError(f"need K >= 10 (2D)^(2/eps) = 10 * {2 * D}^{q_str(2 / eps)}, got K = {q_str(K)}")
    r_prime = -((-9 * r) // 10)
    A = ceil_power(L, Fraction(1, 2) + eps)
    return ClusterParams(L, r, r_prime, eps, D, K, A)


@dataclass
class ClusterResult:
    surfaces: List[SurfaceCandidate]
    residual: Set[Point3]
    params: ClusterParams
    trace: dict
    verification: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.verification) and all(v["holds"] for v in self.verification["bullets"])

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "surfaces": [s.to_json() for s in self.surfaces],
            "residual": [[q_str(c) for c in p] for p in sorted(self.residual)],
            "residual_size": len(self.residual),
            "verification": self.verification,
            "trace": self.trace,
        }


class _Context:
    """Shared state for one top-level run: the full family and caches."""

    def __init__(self, lines: Sequence[Line3], eps, D, K, seed, backend, seed_budget):
        self.lines = list(lines)
        self.index = LineFamilyIndex(self.lines)
        self.eps = Fraction(eps)
        self.D = D
        self.K = Fraction(K)
        self.seed = seed
        self.backend = backend
        self.seed_budget = seed_budget
        self._covered: Dict[object, FrozenSet[Point3]] = {}

    def full_candidates(self, poly) -> List[SurfaceCandidate]:
        """Components of ``poly`` with their lines taken from the full family."""
        return _candidate(poly, self.index)

    def covered(self, cand: SurfaceCandidate, r_prime: int, within: Optional[FrozenSet[int]] = None) -> FrozenSet[Point3]:
        """P_r'(L_Z), with L_Z restricted to ``within`` when given."""
        ids = cand.lines_contained if within is None else cand.lines_contained & within
        key = (cand.poly, r_prime, None if within is None else ids)
        if key not in self._covered:
            if len(ids) < max(r_prime, 2):
                self._covered[key] = frozenset()
            else:
                rich = compute_rich_points([self.lines[i] for i in sorted(ids)])
                self._covered[key] = frozenset(p_r(rich, r_prime))
        return self._covered[key]

    def partition(self, pts: List[Point3], seed: int):
        if self.backend == "lifted" and self.D >= 2 and len(pts) >= 2:
            return partition_lifted(pts, self.D, seed=seed)
        return partition_planes(pts, self.D, seed=seed)


def _base_case(ctx: _Context, ids: List[int], params: ClusterParams, seed: int, node: dict) -> List[SurfaceCandidate]:
    sub = [ctx.lines[i] for i in ids]
    search = search_surfaces(sub, ctx.D, params.A, seed=seed, seed_budget=ctx.seed_budget)
    node["surface_search"] = {k: v for k, v in search.to_json().items() if k != "surfaces"}
    out = [_lift_to_full(ctx, c, ids) for c in search.surfaces]
    out = [c for c in out if c is not None]
    limit = params.count_bound
    if not limit.ge(len(out)):
        keep = len(out)
        while keep and not limit.ge(keep):
            keep -= 1
        node["truncated"] = {"found": len(out), "kept": keep}
        out = sorted(out, key=lambda c: -len(c.lines_contained & frozenset(ids)))[:keep]
    return out


def _lift_to_full(ctx: _Context, cand: SurfaceCandidate, ids: List[int]) -> Optional[SurfaceCandidate]:
    full = ctx.full_candidates(cand.poly)
    return full[0] if full else None


def _run(ctx: _Context, ids: List[int], r: int, seed: int, depth: int, rich=None) -> tuple:
    """Decompose the sub-family ``ids``; returns (surfaces, residual, node)."""
    L = len(ids)
    sub_lines = [ctx.lines[i] for i in ids]
    params = check_parameters(L, r, ctx.eps, ctx.D, ctx.K)
    node: dict = {"depth": depth, "L": L, "params": params.to_json()}
    if rich is None:
        rich = compute_rich_points(sub_lines)
    S: Set[Point3] = set(p_r(rich, r)) if rich.count_at_least(r) else set()
    node["rich_points"] = len(S)
    idset = frozenset(ids)
    eps, D = ctx.eps, ctx.D
    a, b = eps.numerator, eps.denominator
    base = L**a <= (2 * D) ** b
    node["case"] = "base" if base else "inductive"
    if not S:
        node["case"] = "empty"
        return [], set(), node
    if base:
        surfaces = _base_case(ctx, ids, params, seed, node)
        return surfaces, _residual(ctx, S, surfaces, params.r_prime, idset), node
    return _inductive(ctx, ids, params, S, seed, depth, node)


def _residual(ctx, S, surfaces, r_prime, within) -> Set[Point3]:
    out = set(S)
    for c in surfaces:
        out -= ctx.covered(c, r_prime, within)
    return out


def _inductive(ctx: _Context, ids, params: ClusterParams, S: Set[Point3], seed, depth, node) -> tuple:
    D, L, r, rp = ctx.D, params.L, params.r, params.r_prime
    idset = frozenset(ids)
    sub_lines = [ctx.lines[i] for i in ids]
    pool: Dict[object, SurfaceCandidate] = {}

    def add(cands, origin):
        added = 0
        for c in cands:
            if c.poly not in pool and c.poly.degree() <= D and c.irreducibility != "reducible":
                pool[c.poly] = c
                origin_of[c.poly] = origin
                added += 1
        return added

    origin_of: Dict[object, str] = {}
    search = search_surfaces(sub_lines, D, params.A, seed=seed, seed_budget=ctx.seed_budget)
    node["surface_search"] = {k: v for k, v in search.to_json().items() if k != "surfaces"}
    add([c for c in (_lift_to_full(ctx, s, ids) for s in search.surfaces) if c], "search")
    S = _residual(ctx, S, pool.values(), rp, idset)
    J = log2_ceil(L**4)
    node["J"] = J
    iterations = []
    for j in range(J):
        if not S:
            break
        it: dict = {"j": j, "size": len(S)}
        inequalities: List[Inequality] = []
        pts = sorted(S)
        part = ctx.partition(pts, seed + j)
        n = len(pts)
        C = Fraction(max(part.max_cell, 1) * D**3, n)
        beta = 200 * C
        cap = beta * L / D**2
        it.update({"backend": part.backend, "cells": len(part.cells), "max_cell": part.max_cell, "C_approx": float(C), "C": q_str(C), "beta": q_str(beta)})
        inc = line_cell_incidence(sub_lines, part)
        inequalities.append(Inequality.at_most("line-cell incidences <= (D+1) L", inc.total, (D + 1) * L))
        bad = stuck = bigr = missed = recursed = 0
        guard = []
        for k, sign in enumerate(part.cells):
            members = [pts[i] for i in part.cell_members(k)]
            cell_ids = [ids[i] for i in inc.lines_in_cell(sign)]
            Li = len(cell_ids)
            if Li > cap:
                bad += len(members)
                continue
            if 2 * Li > L:
                stuck += len(members)
                guard.append({"cell": k, "lines": Li, "points": len(members)})
                continue
            sub_rich = compute_rich_points([ctx.lines[i] for i in cell_ids])
            if r * r > 4 * Li:
                rep = verify_bigr(sub_rich, r)
                inequalities.append(Inequality.at_most(f"cell {k}: |P_r(L_i)| <= 2 L_i / r", rep.count, rep.bound))
                bigr += len(members)
                continue
            sub_surfaces, sub_res, sub_node = _run(ctx, cell_ids, r, seed * SUB_SEED_STRIDE + k + 1, depth + 1, sub_rich)
            add(sub_surfaces, f"cell {k} at depth {depth + 1}")
            recursed += 1
            missed += len(set(members) & sub_res)
            it.setdefault("subcalls", []).append(
                {"cell": k, "L": Li, "surfaces": len(sub_surfaces), "residual": len(sub_res), "case": sub_node["case"]}
            )
        on_walls = [pts[i] for i in part.on_boundary]
        wall_cands = []
        for f in part.factors:
            wall_cands += ctx.full_candidates(f)
        add(wall_cands, f"wall of iteration {j}")
        covered: Set[Point3] = set()
        for c in pool.values():
            covered |= ctx.covered(c, rp, idset)
        wall_missed = sum(1 for x in on_walls if x not in covered)
        S_next = S - covered
        inequalities.append(Inequality.at_most("bad-cell points <= |S_j| / 100", bad, Fraction(n, 100)))
        inequalities.append(
            Inequality.at_most(
                "uncovered wall points <= D L / (r - r' + 1)", wall_missed, Fraction(D * L, r - rp + 1)
            )
        )
        inequalities.append(Inequality.at_most("missed points in good cells <= K L^(3/2+eps) r^-2 / 100", missed, params.residual_bound.scaled(Fraction(1, 100))))
        inequalities.append(Inequality.at_most("|S_j+1| <= |S_j|", len(S_next), n))
        inequalities.append(
            Inequality.at_most("|S_j+1| <= bad + stuck + big-r + missed + walls", len(S_next), bad + stuck + bigr + missed + wall_missed)
        )
        it.update(
            {
                "bad_points": bad,
                "stuck_points": stuck,
                "bigr_points": bigr,
                "missed_points": missed,
                "wall_points": len(on_walls),
                "uncovered_wall_points": wall_missed,
                "recursed_cells": recursed,
                "next_size": len(S_next),
                "inequalities": [q.to_json() for q in inequalities],
            }
        )
        if guard:
            it["depth_guard"] = guard
        iterations.append(it)
        if S_next == S:
            it["stalled"] = True
            break
        S = S_next
    node["iterations"] = iterations
    node["pool"] = len(pool)
    kept, pruned = [], []
    for c in sorted(pool.values(), key=lambda c: (-len(c.lines_contained & idset), str(c.poly))):
        (kept if len(c.lines_contained & idset) >= params.A else pruned).append(c)
    node["pruned"] = len(pruned)
    node["dyadic"] = _dyadic(ctx, pruned, params, idset)
    residual = _residual(ctx, set(p_r(compute_rich_points([ctx.lines[i] for i in ids]), r)), kept, rp, idset)
    node["residual"] = len(residual)
    return kept, residual, node


def _dyadic(ctx: _Context, pruned: List[SurfaceCandidate], params: ClusterParams, idset) -> List[dict]:
    """Group pruned surfaces by s = floor(log2 |L_Z|) and account for their points."""
    groups: Dict[int, List[SurfaceCandidate]] = {}
    for c in pruned:
        m = len(c.lines_contained & idset)
        if m >= 1:
            groups.setdefault(m.bit_length() - 1, []).append(c)
    rp, L, D = params.r_prime, params.L, params.D
    out = []
    for s in sorted(groups):
        members = groups[s]
        total = 0
        const = Fraction(0)
        for c in members:
            m = len(c.lines_contained & idset)
            pts = len(ctx.covered(c, rp, idset))
            total += pts
            const = max(const, Fraction(pts) / (Fraction(m * m, rp**3) + Fraction(m, rp)))
        budget = len(members) * const * (Fraction(4**(s + 1), rp**3) + Fraction(2 ** (s + 1), rp))
        entry = {
            "s": s,
            "surfaces": len(members),
            "points": total,
            "szt_constant": q_str(const),
            "szt_constant_approx": float(const),
            "budget": Inequality.at_most("points <= #Z C (4^(s+1) r'^-3 + 2^(s+1) r'^-1)", total, budget).to_json(),
        }
        if 4**s > 4 * D * D * L:
            entry["surface_count"] = Inequality.at_most("#Z <= 2L / 2^s", len(members), Fraction(2 * L, 2**s)).to_json()
        out.append(entry)
    return out


def residual_from_scratch(lines: Sequence[Line3], surfaces: Sequence[SurfaceCandidate], r: int, r_prime: int) -> Set[Point3]:
    """P_r(L) minus the union of P_r'(L_Z), recomputed with the exact oracle."""
    lines = list(lines)
    rich = compute_rich_points(lines, method="exact")
    out = set(p_r(rich, r)) if rich.count_at_least(r) else set()
    for c in surfaces:
        ids = sorted(lines_in_surface(c.poly, lines))
        if len(ids) >= 2:
            sub = compute_rich_points([lines[i] for i in ids], method="exact")
            out -= {p for p, m in sub.entries.items() if m >= r_prime}
    return out


def _verify(lines, surfaces: List[SurfaceCandidate], residual: Set[Point3], params: ClusterParams) -> dict:
    bullets = []
    degree_ok = all(s.poly.degree() <= params.D and s.irreducibility != "reducible" for s in surfaces)
    labels = sorted({s.irreducibility for s in surfaces})
    bullets.append({"name": "degree <= D and no rational factorization", "holds": degree_ok, "labels": labels})
    counts = [len(lines_in_surface(s.poly, lines)) for s in surfaces]
    thr = params.surface_threshold
    bullets.append(
        {
            "name": "each surface holds >= L^(1/2+eps) lines",
            "holds": all(thr.le(c) for c in counts),
            "counts": counts,
            "threshold_approx": thr.approx(),
        }
    )
    bullets.append(Inequality.at_most("#surfaces <= 2 L^(1/2-eps)", len(surfaces), params.count_bound).to_json())
    oracle = residual_from_scratch(lines, surfaces, params.r, params.r_prime)
    bullets.append(Inequality.at_most("|residual| <= K L^(3/2+eps) r^-2", len(oracle), params.residual_bound).to_json())
    return {"bullets": bullets, "residual_matches_oracle": oracle == residual, "oracle_residual_size": len(oracle)}


def cluster_decompose(
    lines: Sequence[Line3],
    r: int,
    eps,
    D: int,
    K,
    seed: int = 0,
    backend: str = "planes",
    seed_budget: int = 100,
    verify: bool = True,
) -> ClusterResult:
    """Surfaces explaining the r-rich points of ``lines``, plus what they miss.

    Parameters are validated first (see :func:`check_parameters`).  With
    ``verify`` the four guarantees are re-checked from raw definitions and
    the residual is recomputed by the exact oracle.
    """
    lines = list(lines)
    if len(set(lines)) != len(lines):
        raise ValueError("line family contains duplicate lines")
    params = check_parameters(len(lines), r, eps, D, K)
    ctx = _Context(lines, eps, D, K, seed, backend, seed_budget)
    surfaces, residual, node = _run(ctx, list(range(len(lines))), r, seed, 0)
    trace = {
        "params": params.to_json(),
        "backend": backend,
        "seed": seed,
        "seed_budget": seed_budget,
        "root": node,
    }
    result = ClusterResult(surfaces, residual, params, trace)
    if verify:
        result.verification = _verify(lines, surfaces, residual, params)
        for s in surfaces:
            if len(lines_in_surface(s.poly, lines)) != len(s.lines_contained):
                raise AssertionError("surface line count disagrees with a fresh containment test")
    return result


@dataclass
class MainIncidenceReport:
    L: int
    r: int
    rich: int
    surfaces: int
    bound: Optional[dict]
    holds: bool

    def to_json(self) -> dict:
        return {"L": self.L, "r": self.r, "rich": self.rich, "surfaces": self.surfaces, "bound": self.bound, "holds": self.holds}


def verify_mainincid(lines: Sequence[Line3], r: int, eps, D: int, K, seed: int = 0, **kw) -> MainIncidenceReport:
    """With no surface found, assert |P_r| <= K L^(3/2+eps) r^-2; otherwise report the surfaces."""
    lines = list(lines)
    res = cluster_decompose(lines, r, eps, D, K, seed=seed, verify=False, **kw)
    rich = compute_rich_points(lines).count_at_least(r)
    if res.surfaces:
        return MainIncidenceReport(len(lines), r, rich, len(res.surfaces), None, True)
    ineq = Inequality.at_most("|P_r| <= K L^(3/2+eps) r^-2", rich, res.params.residual_bound)
    if not ineq.holds:
        raise AssertionError(f"|P_r| = {rich} exceeds K L^(3/2+eps) r^-2 ~ {res.params.residual_bound.approx():.4g}")
    return MainIncidenceReport(len(lines), r, rich, 0, ineq.to_json(), True)
