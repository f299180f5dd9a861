"""Session lengths of several measures on random pool scenarios.

Each scenario draws a seeded prior over |V| hypotheses and a pool of random
discriminating partitions (weak ones included); every measure faces the same
targets and coin flips.
"""

import argparse
import sys

import numpy as np

from qsmkit.core import Partition, Scenario, random_distribution
from qsmkit.qsm import parse_measure
from qsmkit.sim import MassThreshold, SingletonSupport, benchmark, rows_to_csv

DEFAULT = ["ENT", "H", "SPL", "SPL_z=2", "EMCa_z=2", "KL", "EMCb", "MPS'", "BME", "RIO_n=2"]


def random_pool(n, size, rng):
    pool = []
    while len(pool) < size:
        digits = rng.integers(0, 3, size=n)
        sides = [frozenset(np.flatnonzero(digits == k).tolist()) for k in range(3)]
        part = Partition(*sides)
        if part.is_dq and part not in pool:
            pool.append(part)
    return pool


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--measure", action="append")
    ap.add_argument("--hypotheses", type=int, default=10)
    ap.add_argument("--pool", type=int, default=60)
    ap.add_argument("--scenarios", type=int, default=5)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--theta", type=float)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    names = tuple(f"h{i + 1}" for i in range(args.hypotheses))
    scens = []
    for s in range(args.scenarios):
        d = random_distribution(args.hypotheses, rng)
        pool = random_pool(args.hypotheses, args.pool, rng)
        scens.append(Scenario(names, d, tuple((f"Q{i + 1}", p) for i, p in enumerate(pool))))
    stop = MassThreshold(args.theta) if args.theta else SingletonSupport()
    ms = [parse_measure(t) for t in args.measure or DEFAULT]
    rows, _ = benchmark(ms, scens, args.reps, args.seed, stop,
                        [f"S{i + 1}" for i in range(len(scens))], args.jobs)
    sys.stdout.write(rows_to_csv(rows))


if __name__ == "__main__":
    main()
