"""Experiment orchestration: quadruple scaling, census fixtures, partition sweeps."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence

import numpy as np

from .bounds import Inequality
from .esfamily import PlanarConfig, build_line_family, dd_lower_bound, distinct_distances, quadruple_census_via_rich_points
from .exact import q_str
from .incidence import compute_rich_points
from .partition import partition_lifted, partition_planes, verify_polyham

__all__ = [
    "ExperimentReport",
    "fit_loglog",
    "census_report",
    "run_census",
    "run_quadruple_scaling",
    "run_partition_sweep",
    "random_points",
]


@dataclass
class ExperimentReport:
    kind: str
    instances: List[dict] = field(default_factory=list)
    fits: Dict[str, dict] = field(default_factory=dict)
    checks: List[dict] = field(default_factory=list)
    partial: bool = False

    @property
    def ok(self) -> bool:
        return not self.partial and all(c["holds"] for c in self.checks)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "instances": self.instances,
            "fits": self.fits,
            "checks": self.checks,
            "partial": self.partial,
            "ok": self.ok,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentReport":
        return cls(obj["kind"], list(obj.get("instances", [])), dict(obj.get("fits", {})), list(obj.get("checks", [])), bool(obj.get("partial", False)))


def fit_loglog(xs: Sequence, ys: Sequence) -> dict:
    """Least-squares line through (log x, log y); floats are labeled approximate."""
    if len(xs) < 2:
        raise ValueError("need at least two points to fit a slope")
    lx = np.log(np.asarray([float(x) for x in xs]))
    ly = np.log(np.asarray([float(y) for y in ys]))
    slope, intercept = np.polyfit(lx, ly, 1)
    return {"slope_approx": float(slope), "intercept_approx": float(intercept), "points": len(xs)}


def _grid(N: int) -> PlanarConfig:
    n = isqrt(N)
    if n * n != N:
        raise ValueError(f"grid sizes must be perfect squares, got {N}")
    return PlanarConfig(tuple((i, j) for i in range(n) for j in range(n)))


def census_report(P: PlanarConfig, workers: Optional[int] = None, label: str = "") -> dict:
    """Census, rich-point table and the distinct-distance inequality for one configuration."""
    lines = [e.line for e in build_line_family(P)]
    rich = compute_rich_points(lines, workers=workers)
    census = quadruple_census_via_rich_points(P, rich=rich)
    dd = distinct_distances(P)
    bound = dd_lower_bound(P, census)
    ineq = Inequality.at_least("|d(P)| >= (N^4 - 2N^3) / |Q(P)|", dd, bound.bound)
    return {
        "label": label,
        "N": P.N,
        "L": len(lines),
        "Q": census.total,
        "parallel": census.parallel,
        "intersecting": census.intersecting,
        "distinct_distances": dd,
        "dvsq": ineq.to_json(),
        "rich_cumulative": {str(r): c for r, c in rich.cumulative().items()},
    }


def run_census(P: PlanarConfig, workers: Optional[int] = None, label: str = "") -> ExperimentReport:
    rep = ExperimentReport("census")
    inst = census_report(P, workers=workers, label=label)
    rep.instances.append(inst)
    rep.checks.append({"name": "dvsQ", "holds": inst["dvsq"]["holds"]})
    return rep


def run_quadruple_scaling(
    gridsizes: Sequence[int],
    eps=Fraction(1, 4),
    fit_tolerance=Fraction(1, 20),
    workers: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> ExperimentReport:
    """|Q(P)| for square grids of the given sizes, with a log-log slope fit.

    The fitted slope is checked against 3 + eps + fit_tolerance.  If the
    time budget runs out the remaining sizes are skipped and the report is
    flagged partial.
    """
    eps = Fraction(eps)
    rep = ExperimentReport("quadruple-scaling")
    t0 = time.perf_counter()
    for N in gridsizes:
        if time_budget is not None and time.perf_counter() - t0 > time_budget:
            rep.partial = True
            break
        t = time.perf_counter()
        inst = census_report(_grid(N), workers=workers, label=f"grid {isqrt(N)}x{isqrt(N)}")
        inst["seconds_approx"] = time.perf_counter() - t
        rep.instances.append(inst)
        rep.checks.append({"name": f"dvsQ at N={N}", "holds": inst["dvsq"]["holds"]})
    if len(rep.instances) >= 2:
        fit = fit_loglog([i["N"] for i in rep.instances], [i["Q"] for i in rep.instances])
        limit = float(3 + eps + fit_tolerance)
        fit["limit_approx"] = limit
        rep.fits["Q_vs_N"] = fit
        rep.checks.append({"name": f"slope <= 3 + {q_str(eps)} + {q_str(fit_tolerance)}", "holds": fit["slope_approx"] <= limit})
    return rep


def random_points(n: int, seed: int = 0, q: int = 64, bound: int = 1000) -> List[tuple]:
    """n distinct random points with coordinates k/q, |k| <= bound * q."""
    rng = random.Random(seed)
    m = bound * q
    seen: Dict[tuple, None] = {}
    while len(seen) < n:
        p = tuple(Fraction(rng.randint(-m, m), q) for _ in range(3))
        seen.setdefault(p, None)
    return list(seen)


def run_partition_sweep(
    sizes: Sequence[int],
    degrees: Sequence[int],
    backend: str = "planes",
    seed: int = 0,
) -> ExperimentReport:
    """Partition uniform random point sets and record the measured ratios."""
    rep = ExperimentReport(f"partition-{backend}")
    for n in sizes:
        S = random_points(n, seed=seed)
        for D in degrees:
            t = time.perf_counter()
            part = partition_lifted(S, D, seed=seed) if backend == "lifted" else partition_planes(S, D, seed=seed)
            pr = verify_polyham(part, S)
            rep.instances.append(
                {
                    "n": n,
                    "D": D,
                    "backend": backend,
                    "cells": len(part.cells),
                    "max_cell": part.max_cell,
                    "boundary": len(part.on_boundary),
                    "cell_ratio": q_str(pr.cell_ratio),
                    "cell_ratio_approx": float(pr.cell_ratio),
                    "mass_ratio": q_str(pr.mass_ratio),
                    "mass_ratio_approx": float(pr.mass_ratio),
                    "fallbacks": list(part.fallbacks),
                    "seconds_approx": time.perf_counter() - t,
                }
            )
            rep.checks.append({"name": f"partition guarantees n={n} D={D}", "holds": pr.guaranteed is not False})
    return rep
