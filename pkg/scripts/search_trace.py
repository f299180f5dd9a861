"""Replay the four-box search example: trace, realized point and arrangement cells."""

import argparse

from qsmkit.boxes import arrangement_cells, four_boxes_scenario, realize_query, synthesize_query
from qsmkit.core import Partition
from qsmkit.qsm import parse_measure
from qsmkit.synthesis import SearchConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--measure", default="RIO_n=2")
    ap.add_argument("--epsilon", type=float, default=0.05)
    args = ap.parse_args()

    scen = four_boxes_scenario()
    names = [scen.name(h) for h in scen.ids]
    res = synthesize_query(SearchConfig(parse_measure(args.measure), args.epsilon), scen)
    print(res.trace.render(names) if res.trace else "direct construction")
    print(f"goal {res.partition.format(names)} realized at ({res.point.x:g}, {res.point.y:g})")
    blocked = Partition.of([0, 2], [1, 3])
    status = "unrealizable" if realize_query(blocked, scen) is None else "realizable"
    print(f"{blocked.format(names)} {status}")
    print("\nx,y,partition")
    for pt, part in arrangement_cells(scen):
        print(f"{pt.x:g},{pt.y:g},\"{part.format(names)}\"")


if __name__ == "__main__":
    main()
