"""Heuristic search for (nearly) optimal strong discriminating partitions.

The search starts from <{}, V, {}> and moves one hypothesis at a time from
the negative to the positive side, visiting successors best-heuristic first
and backtracking out of pruned or exhausted branches. Which heuristic, goal
test and pruning rule apply depends on the equivalence class (EC1..EC7) of
the measure over strong queries. EC4..EC7 need no search: their optimality
requirements let the optimum be assembled directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import Distribution, Partition, ValidationError
from .enumeration import EnumOptions, brute_force_optimum
from .qsm import Direction, Kind, MeasureSpec, better, evaluate, rio_shortfall

SEARCH_ECS = ("EC1", "EC2", "EC3")
DIRECT_ECS = ("EC4", "EC5", "EC6", "EC7")
_DIRECT_MEASURE = {"EC4": MeasureSpec(Kind.KL), "EC5": MeasureSpec(Kind.EMCb),
                   "EC6": MeasureSpec(Kind.MPS), "EC7": MeasureSpec(Kind.BME)}


@dataclass(frozen=True)
class SearchConfig:
    measure: MeasureSpec
    epsilon: float = 0.05
    max_expansions: int | None = None       # None: 10 * |V|**2
    excluded_goals: frozenset = frozenset()
    refine: bool = False                    # keep searching for strictly better goals

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        object.__setattr__(self, "excluded_goals", frozenset(self.excluded_goals))

    @property
    def ec(self) -> str:
        return self.measure.ec

    @property
    def n(self) -> int | None:
        return self.measure.n

    def budget(self, size: int) -> int:
        return self.max_expansions if self.max_expansions is not None else 10 * size * size

    def excluding(self, *goals: Partition) -> "SearchConfig":
        return SearchConfig(self.measure, self.epsilon, self.max_expansions,
                            self.excluded_goals | frozenset(goals), self.refine)


@dataclass(eq=False)
class SearchNode:
    part: Partition
    g: float
    parent: "SearchNode | None" = None
    moved: int | None = None
    depth: int = 0

    def path(self) -> list["SearchNode"]:
        out, node = [], self
        while node is not None:
            out.append(node)
            node = node.parent
        return out[::-1]


@dataclass
class SearchTrace:
    expanded: list[SearchNode] = field(default_factory=list)
    backtracks: int = 0
    goal: Partition | None = None
    goal_value: float | None = None
    best: Partition | None = None           # best DQ seen, goal or not
    best_value: float | None = None
    exhausted_budget: bool = False
    events: list[dict] = field(default_factory=list)

    @property
    def result(self) -> Partition | None:
        return self.goal if self.goal is not None else self.best

    @property
    def result_value(self) -> float | None:
        return self.goal_value if self.goal is not None else self.best_value

    def to_json(self, names=None) -> dict:
        return {
            "goal": self.goal.format(names) if self.goal else None,
            "goal_value": self.goal_value,
            "best": self.best.format(names) if self.best else None,
            "best_value": self.best_value,
            "expanded": len(self.expanded),
            "backtracks": self.backtracks,
            "exhausted_budget": self.exhausted_budget,
            "events": [dict(e, part=e["part"].format(names)) for e in self.events],
        }

    def render(self, names=None) -> str:
        lines = []
        for e in self.events:
            label = e["part"].format(names)
            via = ""
            if e["moved"] is not None:
                who = names[e["moved"]] if names else f"h{e['moved'] + 1}"
                via = f" via {who} (+{e['mass']:.6g})"
            lines.append(f"{'  ' * e['depth']}{e['action']:<9} {label} g={e['g']:.6g}{via}")
        return "\n".join(lines)


def heuristic(ec: str, node: SearchNode | Partition, dist: Distribution,
              config: SearchConfig | None = None) -> float:
    """Lower is better. EC3 needs ``config.n``."""
    part = node.part if isinstance(node, SearchNode) else node
    p_plus = dist.mass(part.plus)
    if ec == "EC1":
        return abs(p_plus - 0.5)
    if ec == "EC2":
        size = len(part.universe)
        return float(abs(len(part.plus) - size // 2))
    if ec == "EC3":
        if not part.minus:
            return math.inf
        n = config.n
        p_minus = dist.mass(part.minus)
        return abs(p_plus + (n - len(part.plus)) * p_minus / len(part.minus) - 0.5)
    raise ValidationError(f"no search heuristic for {ec}; use direct_optimum")


def _balance(part: Partition, dist: Distribution) -> float:
    return abs(dist.mass(part.plus) - dist.mass(part.minus))


def _is_goal(ec: str, part: Partition, dist: Distribution, config: SearchConfig) -> bool:
    if not part.is_dq:
        return False
    if ec == "EC1":
        return _balance(part, dist) <= config.epsilon
    if ec == "EC2":
        return abs(len(part.plus) - len(part.minus)) <= len(part.universe) % 2
    # EC3
    return rio_shortfall(part, config.n) == 0 and _balance(part, dist) <= config.epsilon


def _pruned(ec: str, part: Partition, dist: Distribution, config: SearchConfig) -> bool:
    if ec == "EC1":
        return dist.mass(part.plus) - dist.mass(part.minus) > config.epsilon
    if ec == "EC2":
        return len(part.plus) > math.ceil(len(part.universe) / 2)
    return len(part.plus) > config.n


def synthesize_partition(config: SearchConfig, universe: Sequence[int],
                         dist: Distribution) -> SearchTrace:
    """Depth-first backtracking search guided by the EC heuristic."""
    universe = list(universe)
    if len(universe) < 2:
        raise ValidationError("search needs at least two hypotheses")
    if dist.support != frozenset(universe):
        raise ValidationError("distribution does not match the universe")
    ec = config.ec
    if ec not in SEARCH_ECS:
        raise ValidationError(f"{config.measure} is in {ec}; use direct_optimum instead")
    m = config.measure
    budget = config.budget(len(universe))
    trace = SearchTrace()
    visited: set[frozenset] = set()

    def note(node: SearchNode, action: str):
        mass = dist[node.moved] if node.moved is not None else 0.0
        trace.events.append({"part": node.part, "g": node.g, "depth": node.depth,
                             "moved": node.moved, "mass": mass, "action": action})

    def consider_best(part: Partition):
        if part.is_dq and part not in config.excluded_goals:
            v = evaluate(m, part, dist)
            if trace.best is None or better(m, v, trace.best_value):
                trace.best, trace.best_value = part, v

    def visit(node: SearchNode) -> bool:
        """True stops the whole search."""
        if len(trace.expanded) >= budget:
            trace.exhausted_budget = True
            return True
        visited.add(node.part.plus)
        trace.expanded.append(node)
        consider_best(node.part)
        if _is_goal(ec, node.part, dist, config):
            if node.part in config.excluded_goals:
                note(node, "excluded")
            else:
                note(node, "goal")
                v = evaluate(m, node.part, dist)
                if trace.goal is None or better(m, v, trace.goal_value):
                    trace.goal, trace.goal_value = node.part, v
                if not config.refine:
                    return True
        else:
            note(node, "expand")
        children = []
        for h in sorted(node.part.minus):
            plus = node.part.plus | {h}
            if plus in visited:
                continue
            part = Partition(plus, node.part.minus - {h})
            child = SearchNode(part, 0.0, node, h, node.depth + 1)
            child.g = heuristic(ec, part, dist, config)
            if _pruned(ec, part, dist, config):
                consider_best(part)
                note(child, "pruned")
                continue
            children.append(child)
        children.sort(key=lambda c: (c.g, c.moved))
        for child in children:
            if child.part.plus in visited:
                continue
            if visit(child):
                return True
            trace.backtracks += 1
        return False

    start = Partition(frozenset(), frozenset(universe))
    root = SearchNode(start, heuristic(ec, start, dist, config))
    visit(root)
    return trace


@dataclass(frozen=True)
class Candidate:
    part: Partition
    value: float
    flagged: bool = False       # EC7 only: no side with mass below 0.5 exists


def _both(plus: Sequence[int], universe: Sequence[int]) -> list[Partition]:
    a = frozenset(plus)
    p = Partition(a, frozenset(universe) - a)
    return [p, p.mirror()]


def ranked_candidates(ec: str, universe: Sequence[int], dist: Distribution,
                      measure: MeasureSpec | None = None) -> list[Candidate]:
    """Strong DPs meeting the EC's optimality requirements, best first."""
    universe = list(universe)
    if len(universe) < 2:
        raise ValidationError("need at least two hypotheses")
    if ec not in DIRECT_ECS:
        raise ValidationError(f"{ec} has no direct construction; use synthesize_partition")
    m = measure or _DIRECT_MEASURE[ec]
    by_prob = sorted(universe, key=lambda h: (-dist[h], h))
    parts: list[Partition] = []
    flagged = False
    if ec in ("EC4", "EC5"):
        for k in range(1, len(universe)):
            parts += _both(by_prob[:k], universe)
    elif ec == "EC6":
        for h in by_prob:
            parts += _both([h], universe)
    else:
        parts, flagged = _ec7_sides(universe, dist)
    scored = [Candidate(p, evaluate(m, p, dist), flagged) for p in parts]
    sign = 1.0 if m.direction is Direction.MINIMIZE else -1.0
    # stable sort keeps construction order among ties
    return sorted(scored, key=lambda c: sign * c.value)


def _ec7_sides(universe, dist) -> tuple[list[Partition], bool]:
    ascending = sorted(universe, key=lambda h: (dist[h], h))
    greedy, mass = [], 0.0
    for h in ascending:
        if mass + dist[h] >= 0.5:
            break
        greedy.append(h)
        mass += dist[h]
    if not greedy:
        # every hypothesis carries at least half the mass
        return _both([ascending[0]], universe), True
    # exhaustive scan over light subsets, largest first
    light = []
    for r in range(len(universe) - 1, 0, -1):
        for xs in itertools.combinations(universe, r):
            if dist.mass(xs) < 0.5:
                light.append(xs)
    largest = len(light[0])
    if largest > len(greedy):
        greedy = list(light[0])
    ordered = [tuple(sorted(greedy))] + [xs for xs in light if xs != tuple(sorted(greedy))]
    parts = []
    for xs in ordered:
        parts += _both(xs, universe)
    return parts, False


def direct_optimum(ec: str, universe: Sequence[int], dist: Distribution,
                   measure: MeasureSpec | None = None,
                   excluded: frozenset = frozenset()) -> Candidate:
    for cand in ranked_candidates(ec, universe, dist, measure):
        if cand.part not in excluded:
            return cand
    raise ValidationError("every candidate is excluded")


@dataclass(frozen=True)
class GapReport:
    gap: float                  # >= 0 means the synthesized partition is worse
    value: float
    optimum_value: float
    partition: Partition
    optimum: Partition
    goal_found: bool


def verify_against_bruteforce(config: SearchConfig, universe: Sequence[int],
                              dist: Distribution) -> GapReport:
    m = config.measure
    if config.ec in SEARCH_ECS:
        trace = synthesize_partition(config, universe, dist)
        part, value, found = trace.result, trace.result_value, trace.goal is not None
    else:
        cand = direct_optimum(config.ec, universe, dist, m)
        part, value, found = cand.part, cand.value, True
    opt, opt_value = brute_force_optimum(m, universe, dist, EnumOptions(strong_only=True))
    gap = value - opt_value if m.direction is Direction.MINIMIZE else opt_value - value
    return GapReport(gap, value, opt_value, part, opt, found)
