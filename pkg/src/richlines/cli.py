"""Command-line entry point.

Every subcommand reads JSON, writes JSON (to ``--out`` or stdout) and exits
with 0 when all of its checks pass, 1 when a check fails and 2 on bad input.
Options may also come from a JSON file given with ``--config``; flags given
on the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from .bounds import ceil_power
from .cluster import cluster_decompose, verify_mainincid
from .esfamily import PlanarConfig, dd_lower_bound, quadruple_census_bruteforce, quadruple_census_via_rich_points, BRUTE_FORCE_CAP
from .experiments import ExperimentReport, run_quadruple_scaling
from .generators import KINDS, InstanceSpec, dumps, generate, instance_from_json, instance_to_json
from .incidence import compute_rich_points, verify_bigr, verify_szemeredi_trotter
from .partition import partition_lifted, partition_planes, verify_polyham
from .plots import emit_plots
from .surfaces import search_surfaces, verify_surfcount

# defaults per subcommand; argparse defaults are None so that we can tell
# which options were given on the command line
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "common": {"seed": 0, "workers": None, "out": None},
    "gen": {"kind": None, "param": [], "bound": "10", "denominator": 64},
    "rich": {"lines": None, "method": "auto", "csv": None},
    "quads": {"points": None, "brute": False},
    "ddbound": {"points": None},
    "partition": {"input": None, "degree": None, "backend": "planes"},
    "cluster": {"lines": None, "r": None, "eps": "1/10", "degree": 1, "K": None, "trace": None, "backend": "planes", "seed_budget": 100},
    "verify": {"lines": None, "check": "szt", "r": None, "eps": "1/10", "degree": 1, "K": None, "A": None, "seed_budget": 100},
    "scale": {"sizes": "16,25,36,49,64", "eps": "1/4", "tolerance": "1/20", "time_budget": None},
    "plot": {"report": None, "outdir": None},
}


class InputError(Exception):
    pass


def _load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}")


def _lines(path):
    inst = instance_from_json(_load_json(path))
    if isinstance(inst, PlanarConfig):
        raise InputError(f"{path} holds points, not lines")
    return inst


def _points(path) -> PlanarConfig:
    inst = instance_from_json(_load_json(path))
    if not isinstance(inst, PlanarConfig):
        raise InputError(f"{path} holds lines, not planar points")
    return inst


def _points3(path) -> List[List[Fraction]]:
    obj = _load_json(path)
    pts = obj["points"] if isinstance(obj, dict) else obj
    out = [[Fraction(c) for c in p] for p in pts]
    if any(len(p) != 3 for p in out):
        raise InputError("partition input must be a list of 3D points")
    return out


def _require(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise InputError(f"--{n.replace('_', '-')} is required")


def _param(items: List[str]) -> Dict[str, Any]:
    out = {}
    for it in items:
        if "=" not in it:
            raise InputError(f"--param expects key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def cmd_gen(a):
    _require(a, "kind")
    params = _param(a.param) if isinstance(a.param, list) else dict(a.param)
    spec = InstanceSpec(a.kind, params, a.seed, Fraction(a.bound), int(a.denominator))
    return instance_to_json(generate(spec), spec), True


def cmd_rich(a):
    _require(a, "lines")
    rich = compute_rich_points(_lines(a.lines), method=a.method, workers=a.workers)
    out = rich.to_json()
    out["szemeredi_trotter"] = verify_szemeredi_trotter(rich).to_json()
    if a.csv:
        Path(a.csv).write_text(rich.to_csv())
    return out, True


def cmd_quads(a):
    _require(a, "points")
    P = _points(a.points)
    census = quadruple_census_via_rich_points(P, workers=a.workers)
    out = {"census": census.to_json()}
    ok = True
    if a.brute or P.N <= BRUTE_FORCE_CAP:
        brute = quadruple_census_bruteforce(P)
        out["bruteforce"] = brute.to_json()
        ok = brute == census
        out["agree"] = ok
    return out, ok


def cmd_ddbound(a):
    _require(a, "points")
    rep = dd_lower_bound(_points(a.points))
    return rep.to_json(), rep.holds


def cmd_partition(a):
    _require(a, "input", "degree")
    S = _points3(a.input)
    D = int(a.degree)
    if a.backend not in ("planes", "lifted"):
        raise InputError("--backend must be planes or lifted")
    part = partition_lifted(S, D, seed=a.seed) if a.backend == "lifted" else partition_planes(S, D, seed=a.seed)
    rep = verify_polyham(part, S)
    out = part.to_json()
    out["report"] = rep.to_json()
    return out, rep.guaranteed is not False


def _k(a) -> Fraction:
    """--K, or the smallest multiple of 10 that passes the base-case gate."""
    if a.K is not None:
        return Fraction(a.K)
    eps = Fraction(a.eps)
    return Fraction(10 * ceil_power(2 * int(a.degree), 2 / eps))


def cmd_cluster(a):
    _require(a, "lines", "r")
    res = cluster_decompose(
        _lines(a.lines), int(a.r), Fraction(a.eps), int(a.degree), _k(a), seed=a.seed, backend=a.backend, seed_budget=int(a.seed_budget)
    )
    out = res.to_json()
    if a.trace:
        Path(a.trace).write_text(dumps(res.trace))
    return out, res.ok and res.verification["residual_matches_oracle"]


def cmd_verify(a):
    _require(a, "lines")
    lines = _lines(a.lines)
    if a.check == "szt":
        return verify_szemeredi_trotter(compute_rich_points(lines, workers=a.workers)).to_json(), True
    if a.check == "bigr":
        _require(a, "r")
        rep = verify_bigr(compute_rich_points(lines, workers=a.workers), int(a.r))
        return rep.to_json(), rep.holds
    if a.check == "mainincid":
        _require(a, "r")
        rep = verify_mainincid(lines, int(a.r), Fraction(a.eps), int(a.degree), _k(a), seed=a.seed, seed_budget=int(a.seed_budget))
        return rep.to_json(), rep.holds
    if a.check == "surfcount":
        _require(a, "A")
        D = int(a.degree)
        found = search_surfaces(lines, D, Fraction(a.A), seed=a.seed, seed_budget=int(a.seed_budget))
        rep = verify_surfcount(found.surfaces, len(lines), Fraction(a.A), D)
        return {"search": found.to_json(), "report": rep.to_json()}, rep.holds
    raise InputError(f"unknown check {a.check!r}")


def cmd_scale(a):
    sizes = [int(s) for s in str(a.sizes).split(",") if s.strip()]
    tb = None if a.time_budget is None else float(a.time_budget)
    rep = run_quadruple_scaling(sizes, Fraction(a.eps), Fraction(a.tolerance), workers=a.workers, time_budget=tb)
    return rep.to_json(), rep.ok


def cmd_plot(a):
    _require(a, "report", "outdir")
    rep = ExperimentReport.from_json(_load_json(a.report))
    files = emit_plots(rep, a.outdir)
    return {"files": [str(f) for f in files]}, True


COMMANDS = {
    "gen": cmd_gen,
    "rich": cmd_rich,
    "quads": cmd_quads,
    "ddbound": cmd_ddbound,
    "partition": cmd_partition,
    "cluster": cmd_cluster,
    "verify": cmd_verify,
    "scale": cmd_scale,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="richlines", description="Rich points, partitions and surface clusters of line families.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, argument_default=None)
        sp.add_argument("--config", help="JSON file with option values; flags win")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, help="worker processes (also RICHLINES_WORKERS)")
        sp.add_argument("--out", help="output JSON path (default stdout)")
        return sp

    sp = add("gen", "generate an instance")
    sp.add_argument("--kind", choices=KINDS)
    sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="generator parameter, value parsed as JSON")
    sp.add_argument("--bound")
    sp.add_argument("--denominator", type=int)

    sp = add("rich", "rich-point table of a line family")
    sp.add_argument("--lines")
    sp.add_argument("--method", choices=["auto", "numpy", "exact"])
    sp.add_argument("--csv", help="also write the histogram as CSV")

    sp = add("quads", "distance-quadruple census of a planar configuration")
    sp.add_argument("--points")
    sp.add_argument("--brute", action="store_true", default=None, help="force the brute-force cross-check")

    sp = add("ddbound", "distinct distances against the census bound")
    sp.add_argument("--points")

    sp = add("partition", "polynomial partition of a 3D point set")
    sp.add_argument("--input")
    sp.add_argument("--degree", type=int)
    sp.add_argument("--backend", choices=["planes", "lifted"])

    sp = add("cluster", "surface-cluster decomposition of the r-rich points")
    sp.add_argument("--lines")
    sp.add_argument("--r", type=int)
    sp.add_argument("--eps")
    sp.add_argument("--degree", type=int)
    sp.add_argument("--K")
    sp.add_argument("--trace", help="write the trace JSON here")
    sp.add_argument("--backend", choices=["planes", "lifted"])
    sp.add_argument("--seed-budget", type=int)

    sp = add("verify", "run one invariant check on a line family")
    sp.add_argument("--lines")
    sp.add_argument("--check", choices=["szt", "bigr", "mainincid", "surfcount"])
    sp.add_argument("--r", type=int)
    sp.add_argument("--eps")
    sp.add_argument("--degree", type=int)
    sp.add_argument("--K")
    sp.add_argument("--A")
    sp.add_argument("--seed-budget", type=int)

    sp = add("scale", "quadruple scaling over square grids")
    sp.add_argument("--sizes", help="comma-separated grid sizes N (perfect squares)")
    sp.add_argument("--eps")
    sp.add_argument("--tolerance")
    sp.add_argument("--time-budget", type=float)

    sp = add("plot", "SVG plots and CSV tables for an experiment report")
    sp.add_argument("--report")
    sp.add_argument("--outdir")
    return p


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from --config, then from the built-in defaults."""
    config = _load_json(args.config) if args.config else {}
    if not isinstance(config, dict):
        raise InputError("--config must hold a JSON object")
    defaults = dict(DEFAULTS["common"])
    defaults.update(DEFAULTS[args.command])
    for key, default in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, config.get(key, config.get(key.replace("_", "-"), default)))
    return args


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        out, ok = COMMANDS[args.command](args)
    except (InputError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except AssertionError as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1
    text = dumps(out)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
