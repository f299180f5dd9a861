"""Sequential learning sessions against a simulated oracle, and a benchmark harness.

A session repeatedly picks the best discriminating query (from a fixed pool
or by synthesis over box hypotheses), asks an oracle that answers
consistently with a hidden target hypothesis, and applies the Bayes update.
"""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .boxes import BoxScenario, Point, synthesize_query
from .core import (
    Answer,
    Distribution,
    InfeasibleError,
    Partition,
    Scenario,
    ValidationError,
    bayes_update,
)
from .qsm import MeasureSpec, select_best
from .synthesis import SearchConfig

DEFAULT_THETA = 0.95


@dataclass(frozen=True)
class OracleSpec:
    target: int
    completion_seed: int = 0


@dataclass(frozen=True)
class SingletonSupport:
    def reached(self, dist: Distribution) -> bool:
        return len(dist) == 1

    def __str__(self):
        return "singleton"


@dataclass(frozen=True)
class MassThreshold:
    theta: float = DEFAULT_THETA

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValidationError(f"theta must lie in (0, 1], got {self.theta!r}")

    def reached(self, dist: Distribution) -> bool:
        return max(dist.weights.values()) >= self.theta

    def __str__(self):
        return f"mass>={self.theta:g}"


StopRule = Union[SingletonSupport, MassThreshold]


@dataclass(frozen=True)
class PoolMode:
    partitions: tuple[Partition, ...]


@dataclass(frozen=True)
class SynthesisMode:
    scenario: BoxScenario
    epsilon: float = 0.05
    instances: tuple[Point, ...] | None = None     # None: any point of the plane


Mode = Union[PoolMode, SynthesisMode]


@dataclass
class RunResult:
    queries_asked: int
    history: list[tuple[Partition, Answer]]
    final_dist: Distribution
    identified: bool
    points: list[Point] = field(default_factory=list)   # synthesis mode only

    def to_json(self, names=None) -> dict:
        out = {
            "queries_asked": self.queries_asked,
            "identified": self.identified,
            "history": [{"partition": q.format(names), "answer": int(a)}
                        for q, a in self.history],
            "final_dist": {(names[h] if names else f"h{h + 1}"): p
                           for h, p in sorted(self.final_dist.weights.items())},
        }
        if self.points:
            out["points"] = [[pt.x, pt.y] for pt in self.points]
        return out


def oracle_answer(part: Partition, oracle: OracleSpec, rng: np.random.Generator) -> Answer:
    if oracle.target in part.plus:
        return Answer.YES
    if oracle.target in part.minus:
        return Answer.NO
    return Answer(int(rng.integers(2)))


def _identified(dist: Distribution, target: int, stop: StopRule) -> bool:
    if isinstance(stop, SingletonSupport):
        return dist.support == frozenset({target})
    best = max(dist.weights.values())
    return best >= stop.theta and dist[target] == best


def run_session(dist: Distribution, measure: MeasureSpec, mode: Mode, oracle: OracleSpec,
                stop: StopRule = SingletonSupport()) -> RunResult:
    """Query until ``stop`` holds or no discriminating query is left."""
    if oracle.target not in dist.support:
        raise ValidationError(f"target {oracle.target} is not in the hypothesis set")
    rng = np.random.default_rng(oracle.completion_seed)
    history: list[tuple[Partition, Answer]] = []
    points: list[Point] = []
    boxes = mode.scenario if isinstance(mode, SynthesisMode) else None
    if boxes is not None and boxes.dist.support != dist.support:
        raise ValidationError("box scenario and distribution disagree on the hypotheses")
    pool = []
    if isinstance(mode, PoolMode):
        for part in mode.partitions:
            part.check_universe(dist.support)
        pool = [p for p in mode.partitions if p.is_dq]

    while not stop.reached(dist):
        if boxes is not None:
            if len(dist) < 2:
                break
            cfg = SearchConfig(measure, epsilon=mode.epsilon)
            try:
                res = synthesize_query(cfg, boxes, mode.instances)
            except InfeasibleError:
                break
            query, pt = res.partition, res.point
        else:
            if not pool:
                break
            i, _ = select_best(measure, pool, dist)
            query, pt = pool[i], None
        ans = oracle_answer(query, oracle, rng)
        dist = bayes_update(dist, query, ans)
        assert oracle.target in dist.support, "target hypothesis eliminated"
        history.append((query, ans))
        survivors = dist.support
        if boxes is not None:
            points.append(pt)
            # the queried point is now a labeled instance of every survivor
            kept = boxes.restrict(survivors, dist)
            pos = kept.positives + (pt,) if ans == Answer.YES else kept.positives
            neg = kept.negatives + (pt,) if ans == Answer.NO else kept.negatives
            boxes = BoxScenario(kept.boxes, dist, pos, neg, kept.ids, kept.names, kept.digest)
        else:
            pool = [r for r in (p.restrict(survivors) for p in pool) if r.is_dq]
    return RunResult(len(history), history, dist, _identified(dist, oracle.target, stop), points)


def _session_inputs(scenario) -> tuple[Distribution, Mode]:
    if isinstance(scenario, BoxScenario):
        return scenario.dist, SynthesisMode(scenario)
    if isinstance(scenario, Scenario):
        return scenario.dist, PoolMode(tuple(scenario.pool))
    raise ValidationError(f"unsupported scenario type {type(scenario).__name__}")


def cell_rng(seed: int, scenario_index: int, repetition: int) -> np.random.Generator:
    """Independent stream per (scenario, repetition), shared by all measures."""
    return np.random.default_rng(np.random.SeedSequence([seed, scenario_index, repetition]))


def draw_oracle(dist: Distribution, rng: np.random.Generator) -> OracleSpec:
    ids = sorted(dist.support)
    probs = np.array([dist[h] for h in ids])
    target = ids[int(rng.choice(len(ids), p=probs / probs.sum()))]
    return OracleSpec(target, int(rng.integers(2 ** 63 - 1)))


@dataclass(frozen=True)
class BenchmarkRow:
    measure: str
    scenario: str
    runs: int
    mean: float
    median: float
    max: int
    identification_rate: float


@dataclass(frozen=True)
class RunRecord:
    measure: str
    scenario: str
    repetition: int
    target: int
    queries_asked: int
    identified: bool


def _cell(args) -> list[RunRecord]:
    measures, label, scenario, s_idx, rep, seed, stop = args
    dist, mode = _session_inputs(scenario)
    oracle = draw_oracle(dist, cell_rng(seed, s_idx, rep))
    out = []
    for m in measures:
        r = run_session(dist, m, mode, oracle, stop)
        out.append(RunRecord(str(m), label, rep, oracle.target, r.queries_asked, r.identified))
    return out


def benchmark(measures: Sequence[MeasureSpec], scenarios: Sequence, repetitions: int,
              seed: int, stop: StopRule = SingletonSupport(), labels: Sequence[str] | None = None,
              jobs: int = 1) -> tuple[list[BenchmarkRow], list[RunRecord]]:
    """Aggregate session lengths over measures x scenarios x repetitions.

    Each (scenario, repetition) cell draws its target and coin seed from
    ``SeedSequence([seed, scenario_index, repetition])``, so every measure
    faces the same oracle and results do not depend on ``jobs``.
    """
    if not measures or not scenarios or repetitions < 1:
        raise ValidationError("benchmark needs measures, scenarios and repetitions >= 1")
    labels = list(labels) if labels is not None else [f"S{i + 1}" for i in range(len(scenarios))]
    tasks = [(tuple(measures), labels[s], scen, s, rep, seed, stop)
             for s, scen in enumerate(scenarios) for rep in range(repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_cell, tasks))
    else:
        chunks = [_cell(t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    rows = []
    for m in measures:
        for label in labels:
            sel = [r for r in records if r.measure == str(m) and r.scenario == label]
            counts = [r.queries_asked for r in sel]
            rows.append(BenchmarkRow(str(m), label, len(sel), statistics.fmean(counts),
                                     float(statistics.median(counts)), max(counts),
                                     sum(r.identified for r in sel) / len(sel)))
    return rows, records


def rows_to_csv(rows: Sequence[BenchmarkRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["measure", "scenario", "runs", "mean", "median", "max", "identification_rate"])
    for r in rows:
        w.writerow([r.measure, r.scenario, r.runs, f"{r.mean:.6g}", f"{r.median:.6g}",
                    r.max, f"{r.identification_rate:.6g}"])
    return buf.getvalue()
