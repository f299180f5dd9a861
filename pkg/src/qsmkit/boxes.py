"""Query realization for axis-parallel box hypotheses.

Each hypothesis is a closed rectangle and a query is a point; the point's
partition puts the boxes containing it on the positive side and the rest on
the negative side. Because membership only changes at box edges, scanning
one representative per cell of the edge-coordinate grid finds every
realizable partition.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .core import (
    Distribution,
    InfeasibleError,
    Partition,
    ValidationError,
    bundled_path,
    file_digest,
)
from .synthesis import (
    DIRECT_ECS,
    SearchConfig,
    SearchTrace,
    direct_optimum,
    synthesize_partition,
)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"point ({self.x}, {self.y}) is not finite")


@dataclass(frozen=True)
class Box:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValidationError(f"degenerate box {self.as_list()}")

    def contains(self, pt: Point) -> bool:
        return self.x_min <= pt.x <= self.x_max and self.y_min <= pt.y <= self.y_max

    def as_list(self) -> list[float]:
        return [self.x_min, self.x_max, self.y_min, self.y_max]


@dataclass(frozen=True)
class BoxScenario:
    """Boxes keyed by hypothesis id, a prior, and the labeled instances so far."""

    boxes: tuple[Box, ...]
    dist: Distribution
    positives: tuple[Point, ...] = ()
    negatives: tuple[Point, ...] = ()
    ids: tuple[int, ...] | None = None
    names: tuple[str, ...] | None = None
    digest: str = field(default="", compare=False)

    def __post_init__(self):
        ids = tuple(range(len(self.boxes))) if self.ids is None else tuple(self.ids)
        object.__setattr__(self, "ids", ids)
        if len(ids) != len(self.boxes):
            raise ValidationError("one id per box required")
        if self.dist.support != frozenset(ids):
            raise ValidationError("distribution does not cover the boxes")
        for h, box in zip(ids, self.boxes):
            for pt in self.positives:
                if not box.contains(pt):
                    raise ValidationError(
                        f"box {self.name(h)} misses positive instance ({pt.x}, {pt.y})")
            for pt in self.negatives:
                if box.contains(pt):
                    raise ValidationError(
                        f"box {self.name(h)} covers negative instance ({pt.x}, {pt.y})")

    @property
    def universe(self) -> tuple[int, ...]:
        return self.ids

    def name(self, h: int) -> str:
        if self.names is not None:
            return self.names[h]
        return f"h{h + 1}"

    def box(self, h: int) -> Box:
        return self.boxes[self.ids.index(h)]

    def restrict(self, survivors: Iterable[int], dist: Distribution) -> "BoxScenario":
        keep = [h for h in self.ids if h in set(survivors)]
        return BoxScenario(tuple(self.box(h) for h in keep), dist, self.positives,
                           self.negatives, tuple(keep), self.names, self.digest)

    @classmethod
    def from_dict(cls, doc: dict, digest: str = "") -> "BoxScenario":
        try:
            boxes = tuple(Box(*map(float, b)) for b in doc["boxes"])
            probs = [float(x) for x in doc["p"]]
        except KeyError as e:
            raise ValidationError(f"box scenario is missing field {e.args[0]!r}") from None
        except TypeError:
            raise ValidationError("boxes must be [x_min, x_max, y_min, y_max] quadruples") from None
        if len(probs) != len(boxes):
            raise ValidationError("field 'p' must have one entry per box")
        names = tuple(doc["hypotheses"]) if "hypotheses" in doc else None
        pos = tuple(Point(*map(float, p)) for p in doc.get("positives", []))
        neg = tuple(Point(*map(float, p)) for p in doc.get("negatives", []))
        return cls(boxes, Distribution.from_list(probs), pos, neg, None, names, digest)


def load_box_scenario(path: str | Path) -> BoxScenario:
    path = Path(path)
    return BoxScenario.from_dict(json.loads(path.read_text()), digest=file_digest(path))


def four_boxes_scenario() -> BoxScenario:
    """Four overlapping rectangles with prior (0.41, 0.15, 0.07, 0.37)."""
    return load_box_scenario(bundled_path("four_boxes.json"))


def is_box_doc(doc: dict) -> bool:
    return "boxes" in doc


def partition_of_point(pt: Point, scenario: BoxScenario) -> Partition:
    inside = frozenset(h for h, b in zip(scenario.ids, scenario.boxes) if b.contains(pt))
    return Partition(inside, frozenset(scenario.ids) - inside)


def _axis_candidates(coords: Iterable[float]) -> tuple[list[float], list[float]]:
    """(cell interiors, edge coordinates) along one axis."""
    edges = sorted(set(coords))
    interior = [edges[0] - 1.0]
    interior += [(a + b) / 2.0 for a, b in zip(edges, edges[1:])]
    interior.append(edges[-1] + 1.0)
    return interior, edges


def candidate_points(scenario: BoxScenario) -> list[Point]:
    """One point per cell of the edge grid, open cells before edge lines."""
    xi, xe = _axis_candidates(c for b in scenario.boxes for c in (b.x_min, b.x_max))
    yi, ye = _axis_candidates(c for b in scenario.boxes for c in (b.y_min, b.y_max))
    pts = [Point(x, y) for x in xi for y in yi]
    pts += [Point(x, y) for x in xe for y in yi]
    pts += [Point(x, y) for x in xi + xe for y in ye]
    return pts


def arrangement_cells(scenario: BoxScenario) -> list[tuple[Point, Partition]]:
    """A representative point for each distinct partition a point can induce."""
    seen: dict[Partition, Point] = {}
    for pt in candidate_points(scenario):
        seen.setdefault(partition_of_point(pt, scenario), pt)
    return [(pt, part) for part, pt in seen.items()]


def realizable_dps(scenario: BoxScenario) -> list[Partition]:
    return [part for _, part in arrangement_cells(scenario) if part.is_dq]


def realize_query(goal: Partition, scenario: BoxScenario,
                  pool: Sequence[Point] | None = None) -> Point | None:
    """A point whose partition is ``goal``, or None if no such point exists.

    With ``pool`` only those instances are considered; otherwise the whole
    plane is searched through the edge grid.
    """
    if goal.universe != frozenset(scenario.ids):
        raise ValidationError("goal partition is over a different set of hypotheses")
    if not goal.is_strong:
        raise ValidationError(f"goal {goal.format()} is not a strong discriminating partition")
    inside = [scenario.box(h) for h in goal.plus]
    # the positive boxes must overlap; shrink the scan to their intersection
    x_lo = max(b.x_min for b in inside)
    x_hi = min(b.x_max for b in inside)
    y_lo = max(b.y_min for b in inside)
    y_hi = min(b.y_max for b in inside)
    if pool is None:
        if x_lo > x_hi or y_lo > y_hi:
            return None
        pool = candidate_points(scenario)
    for pt in pool:
        if x_lo <= pt.x <= x_hi and y_lo <= pt.y <= y_hi \
                and partition_of_point(pt, scenario) == goal:
            return pt
    return None


@dataclass
class SynthesisResult:
    point: Point
    partition: Partition
    trace: SearchTrace | None
    tried: list[Partition]


def synthesize_query(config: SearchConfig, scenario: BoxScenario,
                     pool: Sequence[Point] | None = None) -> SynthesisResult:
    """Search for a goal partition, realize it, and retry on realization failure."""
    tried: list[Partition] = []
    while True:
        cfg = config.excluding(*tried)
        if config.ec in DIRECT_ECS:
            trace = None
            try:
                goal = direct_optimum(config.ec, scenario.universe, scenario.dist,
                                      config.measure, cfg.excluded_goals).part
            except ValidationError:
                goal = None
        else:
            trace = synthesize_partition(cfg, scenario.universe, scenario.dist)
            goal = trace.goal
            if goal is None and trace.best is not None and not trace.exhausted_budget:
                # search space exhausted without an epsilon-goal; fall back to the best DQ seen
                goal = trace.best
        if goal is None:
            listing = ", ".join(p.format(scenario.names) for p in tried) or "none"
            raise InfeasibleError(f"no realizable goal partition found; tried {listing}")
        pt = realize_query(goal, scenario, pool)
        if pt is not None:
            return SynthesisResult(pt, goal, trace, tried)
        tried.append(goal)
