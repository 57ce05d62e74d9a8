"""Quadruple census and distinct distances for a few small grids.

Run: python3 demos/census_demo.py [outdir]
"""

import sys
from pathlib import Path

from richlines.experiments import run_quadruple_scaling
from richlines.plots import emit_plots


def main(outdir="demo_out/census"):
    rep = run_quadruple_scaling([4, 9, 16, 25, 36])
    for inst in rep.instances:
        print(f"{inst['label']:>9}: N={inst['N']:3d} L={inst['L']:5d} |Q|={inst['Q']:7d} distinct={inst['distinct_distances']}")
    fit = rep.fits["Q_vs_N"]
    print(f"log-log slope {fit['slope_approx']:.3f} (limit {fit['limit_approx']:.2f})")
    for f in emit_plots(rep, Path(outdir)):
        print("wrote", f)


if __name__ == "__main__":
    main(*sys.argv[1:])
