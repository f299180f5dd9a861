"""Command-line entry point: ``qsmkit VERB [options]``.

Exit status: 0 ok, 2 usage error, 3 validation error, 4 infeasible request.
Every report starts with the scenario digest and the full parameterization.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import boxes as bx
from .core import (
    Distribution,
    InfeasibleError,
    Partition,
    Scenario,
    ValidationError,
    bundled_path,
    file_digest,
    random_distribution,
)
from .enumeration import DEFAULT_CAP, EnumOptions, all_dps
from .qsm import Direction, MeasureSpec, direction, evaluate, is_tie, parse_measure
from .relations import (
    check_compliance_many,
    check_equivalence,
    check_superiority,
    dpo_pairs,
    dpo_preferred_constructive,
    dpo_preferred_direct,
)
from .sim import (
    MassThreshold,
    OracleSpec,
    PoolMode,
    SingletonSupport,
    SynthesisMode,
    benchmark,
    run_session,
)
from .synthesis import DIRECT_ECS, SearchConfig, direct_optimum, synthesize_partition

EXIT_USAGE, EXIT_VALIDATION, EXIT_INFEASIBLE = 2, 3, 4


def fmt_num(x):
    if isinstance(x, float):
        return float(f"{x:.6g}")
    return x


def _num_text(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


# ---------------------------------------------------------------- loading

class Loaded:
    """A scenario (pool or boxes) with its names, path and digest."""

    def __init__(self, obj, path: str):
        self.obj = obj
        self.path = path

    @property
    def is_boxes(self) -> bool:
        return isinstance(self.obj, bx.BoxScenario)

    @property
    def names(self) -> list[str]:
        if self.is_boxes:
            return [self.obj.name(h) for h in self.obj.ids]
        return list(self.obj.names)

    @property
    def dist(self) -> Distribution:
        return self.obj.dist

    @property
    def universe(self) -> tuple[int, ...]:
        return tuple(self.obj.universe)

    @property
    def digest(self) -> str:
        return self.obj.digest


def load_any(path: str | None, default: str) -> Loaded:
    p = Path(path) if path else bundled_path(default)
    try:
        doc = json.loads(p.read_text())
    except FileNotFoundError:
        raise ValidationError(f"scenario: file {str(p)!r} not found") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"scenario: {p} is not valid JSON ({e})") from None
    digest = file_digest(p)
    obj = bx.BoxScenario.from_dict(doc, digest) if bx.is_box_doc(doc) else Scenario.from_dict(doc, digest)
    return Loaded(obj, str(path) if path else f"<bundled:{default}>")


def parse_partition(text: str, scen: Loaded) -> Partition:
    """A pool partition name, or ``plus|minus|zero`` with comma-separated names."""
    if not scen.is_boxes and "|" not in text:
        return scen.obj.partition(text)
    sides = text.split("|")
    if len(sides) not in (2, 3):
        raise ValidationError(f"partition {text!r}: expected 'plus|minus' or 'plus|minus|zero'")
    index = {n: i for i, n in enumerate(scen.names)}
    out = []
    for s in sides:
        ids = []
        for n in filter(None, (t.strip() for t in s.split(","))):
            if n not in index:
                raise ValidationError(f"partition {text!r}: unknown hypothesis {n!r}")
            ids.append(index[n])
        out.append(frozenset(ids))
    return Partition.of(*out, universe=scen.universe)


def measures_from(args, default: list[str] | None = None) -> list[MeasureSpec]:
    texts = args.measure or default
    if not texts:
        raise ValidationError("measure: at least one --measure is required")
    return [parse_measure(t, args.mps_literal) for t in texts]


def dists_from(args, scen: Loaded) -> list[Distribution]:
    """The scenario prior followed by ``--dists`` seeded random distributions."""
    out = [scen.dist]
    rng = np.random.default_rng(args.seed)
    out += [random_distribution(scen.universe, rng) for _ in range(args.dists)]
    return out


def partitions_from(args, scen: Loaded) -> tuple[list[Partition], list[str]]:
    if args.all_dps or scen.is_boxes:
        parts = list(all_dps(scen.universe, EnumOptions(cap=DEFAULT_CAP)))
        return parts, [p.format(scen.names) for p in parts]
    return scen.obj.pool, [n for n, _ in scen.obj.partitions]


# ---------------------------------------------------------------- reports

class Report:
    def __init__(self, verb: str, scen: Loaded | None, params: dict):
        self.meta = {"verb": verb}
        if scen is not None:
            self.meta["scenario"] = scen.path
            self.meta["digest"] = scen.digest
        self.meta.update({k: v for k, v in params.items()})
        self.rows: list[dict] = []
        self.text: str | None = None
        self.extra: dict = {}
        self.jsonl: list[dict] | None = None

    def render(self, fmt: str) -> str:
        if fmt == "json" and self.jsonl is not None:
            lines = [json.dumps({"meta": self.meta})] + [json.dumps(r) for r in self.jsonl]
            return "\n".join(lines) + "\n"
        if fmt == "json":
            doc = {"meta": self.meta, "rows": [{k: fmt_num(v) for k, v in r.items()} for r in self.rows]}
            if self.extra:
                doc.update(self.extra)
            return json.dumps(doc, indent=2) + "\n"
        head = "".join(f"# {k}={_num_text(v)}\n" for k, v in self.meta.items())
        if fmt == "csv":
            buf = io.StringIO()
            if self.rows:
                w = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
                w.writeheader()
                for r in self.rows:
                    w.writerow({k: _num_text(v) for k, v in r.items()})
            return head + buf.getvalue()
        if self.text is not None:
            return head + self.text + "\n"
        lines = []
        for r in self.rows:
            lines.append("  ".join(f"{k}={_num_text(v)}" for k, v in r.items()))
        return head + "\n".join(lines) + ("\n" if lines else "")


def _params(args, **extra) -> dict:
    out = {}
    if getattr(args, "measure", None):
        out["measures"] = ";".join(str(parse_measure(t, args.mps_literal)) for t in args.measure)
    for key in ("seed", "epsilon", "dists"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    out.update(extra)
    return out


# ---------------------------------------------------------------- verbs

def cmd_eval(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    ms = measures_from(args)
    parts, labels = partitions_from(args, scen)
    rep = Report("eval", scen, _params(args))
    for m in ms:
        for label, part in zip(labels, parts):
            rep.rows.append({"measure": str(m), "partition": label,
                             "value": evaluate(m, part, scen.dist)})
    return rep


def cmd_rank(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    ms = measures_from(args)
    parts, labels = partitions_from(args, scen)
    rep = Report("rank", scen, _params(args))
    for m in ms:
        vals = [evaluate(m, p, scen.dist) for p in parts]
        sign = 1.0 if direction(m) is Direction.MINIMIZE else -1.0
        order = sorted(range(len(parts)), key=lambda i: (sign * vals[i], i))
        rank, prev = 0, None
        for pos, i in enumerate(order):
            if prev is None or not is_tie(vals[i], prev):
                rank, prev = pos + 1, vals[i]
            rep.rows.append({"measure": str(m), "rank": rank, "partition": labels[i],
                             "value": vals[i]})
    return rep


def cmd_dpo(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    rep = Report("dpo", scen, {})
    if args.pair:
        q, q2 = (parse_partition(t, scen) for t in args.pair)
        items = [(args.pair[0], q, args.pair[1], q2)]
    else:
        parts, labels = partitions_from(args, scen)
        items = [(labels[i], parts[i], labels[j], parts[j])
                 for i in range(len(parts)) for j in range(len(parts)) if i != j]
    for l1, q, l2, q2 in items:
        d = dpo_preferred_direct(q, q2)
        c = dpo_preferred_constructive(q, q2)
        rep.rows.append({"q": l1, "q2": l2, "verdict": d.describe(scen.names),
                         "direct": d.preferred, "constructive": c.preferred})
    if args.pair:
        rep.text = rep.rows[0]["verdict"]
    return rep


def cmd_compliance(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    ms = measures_from(args)
    parts, labels = partitions_from(args, scen)
    dists = dists_from(args, scen)
    pairs = dpo_pairs(parts)
    rep = Report("compliance", scen, _params(args, partitions=len(parts), dpo_pairs=len(pairs)))
    witnesses = {}
    for m in ms:
        r = check_compliance_many(m, parts, dists, pairs=pairs, jobs=args.jobs)
        rep.rows.append({"measure": str(m), "mode": r.mode.value, "pairs_checked": r.pairs_checked,
                         "unsatisfied": r.unsatisfied, "inverted": r.inverted})
        label = {part: lab for part, lab in zip(parts, labels)}
        witnesses[str(m)] = [{"q": label[v.q], "q2": label[v.q2], "inverted": v.inverted,
                              "value_q": fmt_num(v.value_q), "value_q2": fmt_num(v.value_q2),
                              "dist_index": v.dist_index} for v in r.violations[:args.witnesses]]
    rep.extra["witnesses"] = witnesses
    return rep


def _two_measures(args) -> tuple[MeasureSpec, MeasureSpec]:
    ms = measures_from(args)
    if len(ms) != 2:
        raise ValidationError("measure: exactly two --measure options are required")
    return ms[0], ms[1]


def cmd_equiv(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    m1, m2 = _two_measures(args)
    parts, labels = partitions_from(args, scen)
    if args.strong_only:
        keep = [i for i, p in enumerate(parts) if p.is_strong]
        parts, labels = [parts[i] for i in keep], [labels[i] for i in keep]
    res = check_equivalence(m1, m2, parts, dists_from(args, scen))
    rep = Report("equiv", scen, _params(args, strong_only=args.strong_only))
    row = {"m1": str(m1), "m2": str(m2), "equivalent": res.equivalent,
           "pairs_checked": res.pairs_checked, "witness_q": "", "witness_q2": "", "dist_index": ""}
    if res.witness is not None:
        q, q2, k = res.witness
        label = {part: lab for part, lab in zip(parts, labels)}
        row.update(witness_q=label[q], witness_q2=label[q2], dist_index=k)
    rep.rows.append(row)
    return rep


def cmd_superior(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    m1, m2 = _two_measures(args)
    parts, _ = partitions_from(args, scen)
    v = check_superiority(m1, m2, parts, dists_from(args, scen), dpo_pairs(parts))
    rep = Report("superior", scen, _params(args))
    rep.rows.append({"m1": str(m1), "m2": str(m2), "verdict": v.value.value,
                     "pairs_checked": v.pairs_checked, "first_only": v.first_only_count,
                     "second_only": v.second_only_count})
    return rep


def cmd_enumerate(args) -> Report:
    if args.n is not None:
        names = [f"h{i + 1}" for i in range(args.n)]
        universe, scen = list(range(args.n)), None
    else:
        scen = load_any(args.scenario, "running_example.json")
        names, universe = scen.names, scen.universe
    opts = EnumOptions(strong_only=args.strong_only, canonical_dedup=args.canonical)
    rep = Report("enumerate", scen, {"n": len(universe), "strong_only": args.strong_only,
                                     "canonical": args.canonical})
    for part in all_dps(universe, opts):
        rep.rows.append({"plus": ",".join(names[h] for h in sorted(part.plus)),
                         "minus": ",".join(names[h] for h in sorted(part.minus)),
                         "zero": ",".join(names[h] for h in sorted(part.zero))})
    # line-delimited records for external tooling
    rep.jsonl = [{k: v.split(",") if v else [] for k, v in r.items()} for r in rep.rows]
    return rep


def cmd_synthesize(args) -> Report:
    scen = load_any(args.scenario, "four_boxes.json")
    (m,) = measures_from(args, ["RIO_n=2"])[:1]
    cfg = SearchConfig(m, epsilon=args.epsilon, max_expansions=args.max_expansions,
                       refine=args.refine)
    rep = Report("synthesize", scen, _params(args, measures=str(m), ec=m.ec))
    names = scen.names
    if scen.is_boxes and not args.no_realize:
        res = bx.synthesize_query(cfg, scen.obj)
        trace, part = res.trace, res.partition
        rep.extra["point"] = [res.point.x, res.point.y]
        rep.extra["unrealizable_goals"] = [p.format(names) for p in res.tried]
    elif m.ec in DIRECT_ECS:
        trace, part = None, direct_optimum(m.ec, scen.universe, scen.dist, m).part
    else:
        trace = synthesize_partition(cfg, scen.universe, scen.dist)
        if trace.result is None:
            raise InfeasibleError("search found no discriminating partition within budget")
        part = trace.result
    value = evaluate(m, part, scen.dist)
    rep.extra["result"] = {"partition": part.format(names), "value": fmt_num(value)}
    if trace is not None:
        rep.rows = [{"depth": e["depth"], "action": e["action"], "partition": e["part"].format(names),
                     "g": e["g"], "moved": names[e["moved"]] if e["moved"] is not None else ""}
                    for e in trace.events]
        rep.extra["expanded"] = len(trace.expanded)
        rep.extra["backtracks"] = trace.backtracks
        body = trace.render(names)
    else:
        body = "direct construction (no search)"
    tail = f"result {part.format(names)} value={value:.6g}"
    if "point" in rep.extra:
        tail += f" at point ({rep.extra['point'][0]:.6g}, {rep.extra['point'][1]:.6g})"
    if trace is not None:
        tail += f"\nexpanded={len(trace.expanded)} backtracks={trace.backtracks}"
    rep.text = body + "\n" + tail
    return rep


def cmd_realize(args) -> Report:
    scen = load_any(args.scenario, "four_boxes.json")
    if not scen.is_boxes:
        raise ValidationError("scenario: realize needs a box scenario (field 'boxes')")
    names = scen.names
    rep = Report("realize", scen, {"goal": args.goal or "", "cells": args.goal is None})
    if args.goal is None:
        for pt, part in bx.arrangement_cells(scen.obj):
            rep.rows.append({"x": pt.x, "y": pt.y, "partition": part.format(names),
                             "discriminating": part.is_dq})
        return rep
    goal = parse_partition(args.goal, scen)
    pt = bx.realize_query(goal, scen.obj)
    rep.rows.append({"goal": goal.format(names), "realizable": pt is not None,
                     "x": pt.x if pt else "", "y": pt.y if pt else ""})
    rep.text = (f"{goal.format(names)} realized at ({pt.x:.6g}, {pt.y:.6g})" if pt
                else f"{goal.format(names)} unrealizable")
    return rep


def _stop(args):
    return MassThreshold(args.theta) if args.theta is not None else SingletonSupport()


def cmd_simulate(args) -> Report:
    scen = load_any(args.scenario, "running_example.json")
    (m,) = measures_from(args)[:1]
    names = scen.names
    if args.target not in names:
        raise ValidationError(f"target: unknown hypothesis {args.target!r}")
    oracle = OracleSpec(names.index(args.target), args.seed)
    mode = SynthesisMode(scen.obj, args.epsilon) if scen.is_boxes else PoolMode(tuple(scen.obj.pool))
    r = run_session(scen.dist, m, mode, oracle, _stop(args))
    rep = Report("simulate", scen, _params(args, measures=str(m), target=args.target,
                                           stop=str(_stop(args))))
    for step, (q, a) in enumerate(r.history, 1):
        row = {"step": step, "partition": q.format(names), "answer": int(a)}
        if r.points:
            row.update(x=r.points[step - 1].x, y=r.points[step - 1].y)
        rep.rows.append(row)
    rep.extra["result"] = {"queries_asked": r.queries_asked, "identified": r.identified,
                           "final_dist": {names[h]: fmt_num(p)
                                          for h, p in sorted(r.final_dist.weights.items())}}
    return rep


def cmd_benchmark(args) -> Report:
    paths = args.scenario_list or [None]
    scens = [load_any(p, "running_example.json") for p in paths]
    ms = measures_from(args)
    labels = [s.path for s in scens]
    rows, records = benchmark(ms, [s.obj for s in scens], args.reps, args.seed, _stop(args),
                              labels, args.jobs)
    rep = Report("benchmark", None, _params(args, scenarios=";".join(labels),
                                            digests=";".join(s.digest for s in scens),
                                            reps=args.reps, stop=str(_stop(args))))
    rep.rows = [{"measure": r.measure, "scenario": r.scenario, "runs": r.runs, "mean": r.mean,
                 "median": r.median, "max": r.max, "identification_rate": r.identification_rate}
                for r in rows]
    if args.detail:
        with open(args.detail, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["measure", "scenario", "repetition", "target", "queries_asked", "identified"])
            for r in records:
                w.writerow([r.measure, r.scenario, r.repetition, r.target, r.queries_asked,
                            int(r.identified)])
    return rep


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "text"), default="text")
    common.add_argument("--measure", action="append", metavar="SPEC",
                        help="measure spec, e.g. ENT, ENT_z=1.5, RIO_n=2 (repeatable)")
    common.add_argument("--mps-literal", action="store_true",
                        help="use the ||V+|-|V-|| == 2 gate for MPS/MPS'")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epsilon", type=float, default=0.05)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--output", "-o", metavar="PATH", help="write the report here")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", metavar="PATH", help="scenario JSON (default: bundled)")

    pool = argparse.ArgumentParser(add_help=False)
    pool.add_argument("--all-dps", action="store_true",
                      help="use every discriminating partition instead of the scenario pool")
    pool.add_argument("--dists", type=int, default=0,
                      help="add this many seeded random distributions to the prior")

    p = argparse.ArgumentParser(prog="qsmkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, *parents, help=None):
        sp = sub.add_parser(name, parents=[common, *parents], help=help)
        sp.set_defaults(fn=fn)
        return sp

    add("eval", cmd_eval, scen, pool, help="measure values per partition")
    add("rank", cmd_rank, scen, pool, help="partitions ordered by measure")
    sp = add("dpo", cmd_dpo, scen, pool, help="discrimination preference checks")
    sp.add_argument("pair", nargs="*", metavar="Q",
                    help="two partitions: pool names or plus|minus|zero name lists")
    sp = add("compliance", cmd_compliance, scen, pool, help="DPO compliance of measures")
    sp.add_argument("--witnesses", type=int, default=5)
    sp = add("equiv", cmd_equiv, scen, pool, help="empirical equivalence of two measures")
    sp.add_argument("--strong-only", action="store_true")
    add("superior", cmd_superior, scen, pool, help="empirical superiority of two measures")
    sp = add("enumerate", cmd_enumerate, scen, help="list discriminating partitions")
    sp.add_argument("--n", type=int, help="enumerate over h1..hN instead of a scenario")
    sp.add_argument("--strong-only", action="store_true")
    sp.add_argument("--canonical", action="store_true", help="drop mirror duplicates")
    sp = add("synthesize", cmd_synthesize, scen, help="search for an optimal partition")
    sp.add_argument("--max-expansions", type=int)
    sp.add_argument("--refine", action="store_true", help="continue past the first goal")
    sp.add_argument("--no-realize", action="store_true", help="skip point realization")
    sp = add("realize", cmd_realize, scen, help="realize a goal partition as a point")
    sp.add_argument("--goal", metavar="PLUS|MINUS", help="omit to list arrangement cells")
    sp = add("simulate", cmd_simulate, scen, help="one learning session")
    sp.add_argument("--target", required=True)
    sp.add_argument("--theta", type=float, help="stop at this posterior mass (default: singleton)")
    sp = add("benchmark", cmd_benchmark, help="sessions over measures x scenarios")
    sp.add_argument("--scenario", dest="scenario_list", action="append", metavar="PATH")
    sp.add_argument("--reps", type=int, default=10)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--detail", metavar="PATH", help="per-run CSV")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.jobs < 1:
            raise ValidationError("jobs: must be >= 1")
        if hasattr(args, "dists") and args.dists < 0:
            raise ValidationError("dists: must be >= 0")
        rep = args.fn(args)
    except ValidationError as e:
        print(f"qsmkit {args.verb}: validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleError as e:
        print(f"qsmkit {args.verb}: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = rep.render(args.format)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
