"""Surface-cluster decomposition of two planted plane families and a grid family.

Run: python3 demos/cluster_demo.py
"""

from fractions import Fraction

from richlines.cluster import cluster_decompose
from richlines.esfamily import build_line_family
from richlines.generators import InstanceSpec, generate

K = 10 * 2**20


def show(name, lines, r):
    res = cluster_decompose(lines, r, Fraction(1, 10), 1, K)
    polys = [str(s.poly) for s in res.surfaces]
    print(f"{name}: L={len(lines)} r={r} surfaces={polys} residual={len(res.residual)} ok={res.ok}")


def main():
    a = generate(InstanceSpec("coplanar-lines", {"L": 40}, seed=1))
    b = generate(InstanceSpec("coplanar-lines", {"L": 40, "normal": [1, 0, 0], "offset": -3}, seed=2))
    show("two planes", list(dict.fromkeys(a + b)), 2)
    grid = [e.line for e in build_line_family([(x, y) for x in range(4) for y in range(4)])]
    show("4x4 grid family", grid, 4)


if __name__ == "__main__":
    main()
