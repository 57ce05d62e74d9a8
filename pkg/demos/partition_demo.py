"""Compare the two partition backends on random point sets.

Run: python3 demos/partition_demo.py [outdir]
"""

import sys
from pathlib import Path

from richlines.experiments import run_partition_sweep
from richlines.plots import emit_plots


def main(outdir="demo_out/partition"):
    for backend in ("planes", "lifted"):
        rep = run_partition_sweep([1000, 4096], [4, 8], backend=backend)
        for i in rep.instances:
            print(f"{backend:>6} n={i['n']:5d} D={i['D']:2d} cells={i['cells']:4d} max={i['max_cell']:5d} mass ratio={i['mass_ratio_approx']:.2f}")
        for f in emit_plots(rep, Path(outdir) / backend):
            print("wrote", f)


if __name__ == "__main__":
    main(*sys.argv[1:])
