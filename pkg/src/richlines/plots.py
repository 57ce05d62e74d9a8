"""SVG plots and CSV tables for experiment reports.

Output is byte-deterministic for a given report: the SVG id salt is fixed,
the date metadata is dropped and text is rendered as paths.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import ExperimentReport  # noqa: E402

__all__ = ["emit_plots"]

_RC = {
    "svg.hashsalt": "richlines",
    "svg.fonttype": "path",
    "font.family": "DejaVu Sans",
    "figure.figsize": (5.0, 3.75),
    "figure.dpi": 72,
}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return path


def _empty(outdir: Path) -> Path:
    fig, ax = plt.subplots()
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("empty report")
    return _save(fig, outdir / "empty.svg")


def _census(rep: ExperimentReport, outdir: Path) -> Path:
    fig, ax = plt.subplots()
    names = ["total", "parallel", "intersecting"]
    width = 0.8 / len(rep.instances)
    for k, inst in enumerate(rep.instances):
        vals = [inst["Q"], inst["parallel"], inst["intersecting"]]
        xs = np.arange(3) + k * width
        ax.bar(xs, vals, width, label=inst.get("label") or f"N={inst['N']}")
    ax.set_xticks(np.arange(3) + width * (len(rep.instances) - 1) / 2)
    ax.set_xticklabels(names)
    ax.set_ylabel("distance quadruples")
    ax.legend()
    fig.tight_layout()
    return _save(fig, outdir / "census.svg")


def _rich(rep: ExperimentReport, outdir: Path) -> Path:
    fig, ax = plt.subplots()
    for inst in rep.instances:
        cum = {int(r): c for r, c in inst.get("rich_cumulative", {}).items() if c > 0}
        if cum:
            rs = sorted(cum)
            ax.loglog(rs, [cum[r] for r in rs], marker="o", ms=3, label=inst.get("label") or f"N={inst['N']}")
    ax.set_xlabel("r")
    ax.set_ylabel("|P_r|")
    if ax.lines:
        ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, outdir / "rich.svg")


def _scaling(rep: ExperimentReport, outdir: Path) -> Path:
    fig, ax = plt.subplots()
    Ns = np.array([i["N"] for i in rep.instances], dtype=float)
    Qs = np.array([i["Q"] for i in rep.instances], dtype=float)
    ax.loglog(Ns, Qs, "o", label="|Q(P)|")
    fit = rep.fits.get("Q_vs_N")
    if fit:
        xs = np.linspace(Ns.min(), Ns.max(), 50)
        ax.loglog(xs, np.exp(fit["intercept_approx"]) * xs ** fit["slope_approx"], "-", label="fit")
        ax.annotate(f"slope ~ {fit['slope_approx']:.3f}", xy=(0.05, 0.9), xycoords="axes fraction")
    ax.set_xlabel("N")
    ax.set_ylabel("|Q(P)|")
    ax.legend(loc="lower right")
    fig.tight_layout()
    return _save(fig, outdir / "scaling.svg")


def _partition(rep: ExperimentReport, outdir: Path) -> Path:
    fig, ax = plt.subplots()
    for n in sorted({i["n"] for i in rep.instances}):
        rows = sorted((i["D"], i["cell_ratio_approx"]) for i in rep.instances if i["n"] == n)
        ax.plot([d for d, _ in rows], [c for _, c in rows], marker="o", label=f"|S|={n}")
    ax.set_xlabel("D")
    ax.set_ylabel("#cells / D^3")
    ax.legend()
    fig.tight_layout()
    return _save(fig, outdir / "cell_ratio.svg")


def _csv(rep: ExperimentReport, outdir: Path) -> Path:
    cols: List[str] = []
    for inst in rep.instances:
        for k, v in inst.items():
            if k not in cols and not isinstance(v, (dict, list)) and k != "seconds_approx":
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for inst in rep.instances:
        w.writerow([inst.get(c, "") for c in cols])
    path = outdir / "instances.csv"
    path.write_text(buf.getvalue())
    return path


def emit_plots(report: ExperimentReport, outdir) -> List[Path]:
    """Write the plots and CSV table that fit ``report`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_RC):
        if not report.instances:
            return [_empty(outdir)]
        out = [_csv(report, outdir)]
        if report.kind == "census":
            out.append(_census(report, outdir))
        elif report.kind == "quadruple-scaling":
            out.append(_scaling(report, outdir))
            out.append(_rich(report, outdir))
        elif report.kind.startswith("partition"):
            out.append(_partition(report, outdir))
        else:
            out.append(_rich(report, outdir))
    return out
