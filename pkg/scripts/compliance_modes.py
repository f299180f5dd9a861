"""DPO compliance of every measure over exhaustive DP sets with seeded random priors.

Writes one CSV row per (measure, |V|) with the verdict and violation counts.
"""

import argparse
import csv
import sys

import numpy as np

from qsmkit.core import random_distribution
from qsmkit.enumeration import all_dps
from qsmkit.qsm import Kind, MeasureSpec as M, ent_z_threshold, min_answer_probability
from qsmkit.relations import check_compliance_many, dpo_pairs

MEASURES = [M(Kind.LC), M(Kind.M), M(Kind.H), M(Kind.GI), M(Kind.ENT), M(Kind.SPL), M(Kind.VE),
            M(Kind.KL), M(Kind.EMCa), M(Kind.EMCb), M(Kind.MPS), M(Kind.MPS, literal=True),
            M(Kind.MPSp), M(Kind.BME), M(Kind.RIOp, n=1), M(Kind.RIOp, n=2), M(Kind.BAL),
            M(Kind.SPL_z, z=1.1), M(Kind.SPL_z, z=2), M(Kind.EMCa_z, z=2), M(Kind.EMCa_z, z=3)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--dists", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["size", "measure", "mode", "pairs_checked", "unsatisfied", "inverted"])
    for n in args.sizes:
        rng = np.random.default_rng([args.seed, n])
        dists = [random_distribution(n, rng) for _ in range(args.dists)]
        parts = list(all_dps(range(n)))
        pairs = dpo_pairs(parts)
        t = min(min_answer_probability(parts, d) for d in dists)
        extra = [M(Kind.ENT_z, z=ent_z_threshold(t * (1 - 1e-9)))]
        for m in MEASURES + extra:
            r = check_compliance_many(m, parts, dists, pairs, jobs=args.jobs)
            w.writerow([n, str(m), r.mode.value, r.pairs_checked, r.unsatisfied, r.inverted])


if __name__ == "__main__":
    main()
