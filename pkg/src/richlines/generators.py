"""Deterministic instance generators.

Every instance is a function of ``(kind, params, seed)``.  Random
coordinates are rationals ``k/q`` with a bounded denominator (default 64),
which keeps the bit size of pairwise intersection points small.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

from .esfamily import PlanarConfig, build_line_family
from .exact import Line3, canonicalize, line_through, q_str

__all__ = ["KINDS", "InstanceSpec", "generate", "instance_to_json", "instance_from_json", "dumps"]

PLANAR_KINDS = ("grid2d", "random2d", "collinear2d")
LINE_KINDS = ("es-from-config", "random-lines3d", "coplanar-lines", "pencil", "regulus-rulings", "from-file")
KINDS = PLANAR_KINDS + LINE_KINDS

Instance = Union[PlanarConfig, List[Line3]]


@dataclass
class InstanceSpec:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    bound: Fraction = Fraction(10)
    denominator: int = 64

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        self.bound = Fraction(self.bound)
        if self.bound <= 0:
            raise ValueError("coordinate bound must be positive")
        if self.denominator < 1:
            raise ValueError("denominator must be >= 1")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(sorted(self.params.items())),
            "seed": self.seed,
            "bound": q_str(self.bound),
            "denominator": self.denominator,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InstanceSpec":
        return cls(obj["kind"], dict(obj.get("params", {})), int(obj.get("seed", 0)), Fraction(obj.get("bound", 10)), int(obj.get("denominator", 64)))


def _int(params, key, default=None, lo=1) -> int:
    v = params.get(key, default)
    if v is None:
        raise ValueError(f"missing parameter {key!r}")
    v = int(v)
    if v < lo:
        raise ValueError(f"parameter {key!r} must be >= {lo}, got {v}")
    return v


def _coord(rng: random.Random, spec: InstanceSpec) -> Fraction:
    q = spec.denominator
    m = int(spec.bound * q)
    return Fraction(rng.randint(-m, m), q)


def _grid2d(spec):
    n = _int(spec.params, "n")
    m = _int(spec.params, "m", n)
    return PlanarConfig(tuple((i, j) for i in range(n) for j in range(m)))


def _random2d(spec, rng):
    N = _int(spec.params, "N")
    room = (2 * int(spec.bound * spec.denominator) + 1) ** 2
    if N > room:
        raise ValueError(f"cannot draw {N} distinct points from a lattice of {room}")
    pts = {}
    while len(pts) < N:
        p = (_coord(rng, spec), _coord(rng, spec))
        pts.setdefault(p, None)
    return PlanarConfig(tuple(pts))


def _collinear2d(spec):
    N = _int(spec.params, "N")
    a = Fraction(spec.params.get("slope", 1))
    b = Fraction(spec.params.get("intercept", 0))
    return PlanarConfig(tuple((i, a * i + b) for i in range(N)))


def _distinct_lines(make, L: int, tries: int) -> List[Line3]:
    out: Dict[Line3, None] = {}
    for _ in range(tries):
        if len(out) == L:
            break
        l = make()
        if l is not None:
            out.setdefault(l, None)
    if len(out) < L:
        raise ValueError(f"could only draw {len(out)} distinct lines out of {L}")
    return list(out)


def _random_lines3d(spec, rng):
    L = _int(spec.params, "L")

    def make():
        d = [_coord(rng, spec) for _ in range(3)]
        if not any(d):
            return None
        return canonicalize([_coord(rng, spec) for _ in range(3)], d)

    return _distinct_lines(make, L, 100 * L + 100)


def _coplanar_lines(spec, rng):
    """Lines in the plane a x1 + b x2 + c x3 = e, default x3 = 0."""
    L = _int(spec.params, "L")
    a, b, c = (Fraction(v) for v in spec.params.get("normal", (0, 0, 1)))
    e = Fraction(spec.params.get("offset", 0))
    if not (a or b or c):
        raise ValueError("plane normal must be nonzero")

    # parametrize the plane by two free coordinates
    k = 2 if c else (1 if b else 0)
    free = [i for i in range(3) if i != k]
    coef = (a, b, c)

    def lift(u, v):
        x = [Fraction(0)] * 3
        x[free[0]], x[free[1]] = u, v
        x[k] = (e - coef[free[0]] * u - coef[free[1]] * v) / coef[k]
        return x

    def make():
        p = lift(_coord(rng, spec), _coord(rng, spec))
        q = lift(_coord(rng, spec), _coord(rng, spec))
        return None if p == q else line_through(p, q)

    return _distinct_lines(make, L, 100 * L + 100)


def _pencil(spec):
    n = _int(spec.params, "n")
    center = [Fraction(v) for v in spec.params.get("center", (0, 0, 0))]
    # moment-curve directions are pairwise independent
    return [canonicalize(center, (1, i, i * i)) for i in range(n)]


def _regulus_rulings(spec):
    """n lines from each ruling of x1 x2 - x3 = 0 at parameters 0..n-1."""
    n = _int(spec.params, "n")
    first = [canonicalize((a, 0, 0), (0, 1, a)) for a in range(n)]
    second = [canonicalize((0, b, 0), (1, 0, b)) for b in range(n)]
    return first + second


def _from_file(spec):
    path = spec.params.get("path")
    if not path:
        raise ValueError("from-file needs a 'path' parameter")
    return instance_from_json(json.loads(Path(path).read_text()))


def generate(spec: InstanceSpec) -> Instance:
    """Build the instance described by ``spec``: a PlanarConfig or a list of lines."""
    rng = random.Random(spec.seed)
    k = spec.kind
    if k == "grid2d":
        return _grid2d(spec)
    if k == "random2d":
        return _random2d(spec, rng)
    if k == "collinear2d":
        return _collinear2d(spec)
    if k == "es-from-config":
        inner = spec.params.get("config")
        if inner is None:
            raise ValueError("es-from-config needs a 'config' parameter (an instance spec or a points list)")
        if isinstance(inner, dict) and "kind" in inner:
            P = generate(InstanceSpec.from_json(inner))
        else:
            P = PlanarConfig.from_json({"points": inner} if isinstance(inner, list) else inner)
        if not isinstance(P, PlanarConfig):
            raise ValueError("es-from-config needs a planar configuration")
        return [e.line for e in build_line_family(P)]
    if k == "random-lines3d":
        return _random_lines3d(spec, rng)
    if k == "coplanar-lines":
        return _coplanar_lines(spec, rng)
    if k == "pencil":
        return _pencil(spec)
    if k == "regulus-rulings":
        return _regulus_rulings(spec)
    return _from_file(spec)


def instance_to_json(inst: Instance, spec: InstanceSpec | None = None) -> dict:
    out: dict = {}
    if spec is not None:
        out["spec"] = spec.to_json()
    if isinstance(inst, PlanarConfig):
        out.update(inst.to_json())
    else:
        out["lines"] = [l.to_json() for l in inst]
    return out


def instance_from_json(obj) -> Instance:
    """Inverse of :func:`instance_to_json`; a bare list is read as lines."""
    if isinstance(obj, list):
        return [Line3.from_json(l) for l in obj]
    if "lines" in obj:
        return [Line3.from_json(l) for l in obj["lines"]]
    if "points" in obj:
        return PlanarConfig.from_json(obj)
    raise ValueError("expected a JSON object with 'lines' or 'points'")


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"
