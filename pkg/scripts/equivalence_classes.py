"""Pairwise equivalence of measures over all DPs and over strong DPs only.

Prints a matrix per query class: '=' equivalent, '.' a disagreement was found.
"""

import argparse

import numpy as np

from qsmkit.core import random_distribution
from qsmkit.enumeration import all_dps
from qsmkit.qsm import Kind, MeasureSpec as M
from qsmkit.relations import check_equivalence

MEASURES = [M(Kind.ENT), M(Kind.ENT_z, z=0), M(Kind.ENT_z, z=2), M(Kind.H), M(Kind.LC), M(Kind.M),
            M(Kind.GI), M(Kind.EMCa), M(Kind.EMCa_z, z=0), M(Kind.EMCa_z, z=2), M(Kind.SPL),
            M(Kind.SPL_z, z=0), M(Kind.SPL_z, z=2), M(Kind.VE), M(Kind.RIOp, n=1),
            M(Kind.RIOp_z, z=2, n=1), M(Kind.KL), M(Kind.EMCb), M(Kind.MPS), M(Kind.MPSp), M(Kind.BME)]


def matrix(parts, dists):
    names = [str(m) for m in MEASURES]
    width = max(map(len, names))
    for i, a in enumerate(MEASURES):
        cells = "".join("=" if check_equivalence(a, b, parts, dists) else "."
                        for b in MEASURES[:i + 1])
        print(f"{names[i]:>{width}} {cells}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=4)
    ap.add_argument("--dists", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    dists = [random_distribution(args.size, rng) for _ in range(args.dists)]
    parts = list(all_dps(range(args.size)))
    print(f"# all discriminating partitions, |V|={args.size}")
    matrix(parts, dists)
    print(f"\n# strong partitions only, |V|={args.size}")
    matrix([p for p in parts if p.is_strong], dists)


if __name__ == "__main__":
    main()
