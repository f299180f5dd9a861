"""The discrimination preference order (DPO) and empirical measure-relation checkers.

Everything here is verification at desk scale: compliance, equivalence and
superiority are evaluated over an explicit finite set of partitions and
distributions, and every report carries the number of pairs it inspected.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Distribution, Partition, ValidationError
from .qsm import MeasureSpec, better, evaluate

#: Ordered-pair / chain budget above which checks switch to sampling.
TRIPLE_BUDGET = 10 ** 6
#: Witness lists are truncated to this length; counts stay exact.
MAX_WITNESSES = 50


@dataclass(frozen=True)
class DpoVerdict:
    preferred: bool
    transfer: frozenset[int] | None = None
    swapped: bool = False

    def __bool__(self):
        return self.preferred

    def describe(self, names=None) -> str:
        if not self.preferred:
            return "not preferred"
        xs = ",".join(names[h] if names else f"h{h + 1}" for h in sorted(self.transfer))
        return f"preferred, witness X={{{xs}}}, " + ("swapped" if self.swapped else "not swapped")


def _same_universe(q: Partition, q2: Partition) -> None:
    if q.universe != q2.universe:
        diff = q.universe ^ q2.universe
        raise ValidationError(f"partitions disagree on hypothesis {min(diff)}")


def dpo_preferred_direct(q: Partition, q2: Partition) -> DpoVerdict:
    """Check q <_DPO q2 by trying both answer bijections.

    Answer 1 eliminates ``minus`` and answer 0 eliminates ``plus``. For a
    bijection to work, each of q's eliminated sets must contain the matched
    one of q2, and not both containments may be equalities.
    """
    _same_universe(q, q2)
    for swapped in (False, True):
        # answer of q2 -> answer of q; swapped maps 1->0 and 0->1
        e1 = q.minus if not swapped else q.plus    # q's set matched to q2's answer 1
        e0 = q.plus if not swapped else q.minus
        if e1 >= q2.minus and e0 >= q2.plus and (e1 != q2.minus or e0 != q2.plus):
            return DpoVerdict(True, q2.zero - q.zero, swapped)
    return DpoVerdict(False)


def dpo_preferred_constructive(q: Partition, q2: Partition) -> DpoVerdict:
    """Check q <_DPO q2 by reconstructing q2 from q via a transfer set X.

    X must be a nonempty proper subset of the predicting hypotheses of q that
    moves into the zero side, possibly swapping the remaining sides.
    """
    _same_universe(q, q2)
    if not q.zero <= q2.zero:
        return DpoVerdict(False)
    x = q2.zero - q.zero
    predicting = q.plus | q.minus
    if not x or not x < predicting:
        return DpoVerdict(False)
    plus, minus = q.plus - x, q.minus - x
    if q2.plus == plus and q2.minus == minus:
        return DpoVerdict(True, x, False)
    if q2.plus == minus and q2.minus == plus:
        return DpoVerdict(True, x, True)
    return DpoVerdict(False)


def dpo_dispreferred_all(q: Partition) -> list[Partition]:
    """Every partition obtainable from q by a transfer, both orientations."""
    if not q.is_dq:
        raise ValidationError(f"{q.format()} is not discriminating")
    predicting = sorted(q.plus | q.minus)
    out = {}
    for r in range(1, len(predicting)):
        for xs in itertools.combinations(predicting, r):
            x = frozenset(xs)
            base = Partition(q.plus - x, q.minus - x, q.zero | x)
            for cand in (base, base.mirror()):
                out.setdefault(cand, None)
    return list(out)


def dpo_pairs(parts: Sequence[Partition]) -> list[tuple[int, int]]:
    """All index pairs (i, j) with parts[i] <_DPO parts[j]."""
    zero = [len(p.zero) for p in parts]
    pairs = []
    for i, q in enumerate(parts):
        for j, q2 in enumerate(parts):
            # a dispreferred partition always has a strictly larger zero side
            if zero[j] > zero[i] and dpo_preferred_direct(q, q2):
                pairs.append((i, j))
    return pairs


class Mode(enum.Enum):
    SATISFIES = "Satisfies"
    CONSISTENT_ONLY = "ConsistentOnly"
    INCONSISTENT = "Inconsistent"


@dataclass(frozen=True)
class Violation:
    q: Partition
    q2: Partition
    value_q: float
    value_q2: float
    inverted: bool          # m strictly prefers q2 although q <_DPO q2
    dist_index: int = 0

    def to_json(self, names=None) -> dict:
        return {"q": self.q.format(names), "q2": self.q2.format(names),
                "value_q": self.value_q, "value_q2": self.value_q2,
                "inverted": self.inverted, "dist_index": self.dist_index}


@dataclass
class ComplianceReport:
    measure: MeasureSpec
    pairs_checked: int = 0
    unsatisfied: int = 0
    inverted: int = 0
    violations: list[Violation] = field(default_factory=list)
    _kept: dict = field(default_factory=lambda: {True: 0, False: 0}, repr=False)

    @property
    def mode(self) -> Mode:
        if self.inverted:
            return Mode.INCONSISTENT
        if self.unsatisfied:
            return Mode.CONSISTENT_ONLY
        return Mode.SATISFIES

    def merge(self, other: "ComplianceReport") -> None:
        self.pairs_checked += other.pairs_checked
        self.unsatisfied += other.unsatisfied
        self.inverted += other.inverted
        for v in other.violations:
            self._keep(v)

    def _keep(self, v: Violation) -> None:
        # cap each kind separately so inversions are never crowded out
        if self._kept[v.inverted] < MAX_WITNESSES:
            self._kept[v.inverted] += 1
            self.violations.append(v)

    def to_json(self, names=None) -> dict:
        return {"measure": str(self.measure), "mode": self.mode.value,
                "pairs_checked": self.pairs_checked, "unsatisfied": self.unsatisfied,
                "inverted": self.inverted,
                "violations": [v.to_json(names) for v in self.violations]}


def check_compliance(m: MeasureSpec, parts: Sequence[Partition], dist: Distribution,
                     pairs: Sequence[tuple[int, int]] | None = None,
                     dist_index: int = 0) -> ComplianceReport:
    """Test every DPO-related pair of ``parts`` against m's strict preference."""
    pairs = dpo_pairs(parts) if pairs is None else pairs
    values = [evaluate(m, p, dist) for p in parts]
    rep = ComplianceReport(m)
    for i, j in pairs:
        rep.pairs_checked += 1
        vi, vj = values[i], values[j]
        if better(m, vi, vj):
            continue
        inverted = better(m, vj, vi)
        rep.unsatisfied += 1
        rep.inverted += inverted
        rep._keep(Violation(parts[i], parts[j], vi, vj, inverted, dist_index))
    # a satisfying measure is consistent by construction
    assert rep.inverted <= rep.unsatisfied
    return rep


def _compliance_job(args):
    m, parts, dist, pairs, k = args
    return check_compliance(m, parts, dist, pairs, k)


def check_compliance_many(m: MeasureSpec, parts: Sequence[Partition],
                          dists: Sequence[Distribution],
                          pairs: Sequence[tuple[int, int]] | None = None,
                          jobs: int = 1) -> ComplianceReport:
    pairs = dpo_pairs(parts) if pairs is None else pairs
    tasks = [(m, list(parts), d, pairs, k) for k, d in enumerate(dists)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            reports = list(ex.map(_compliance_job, tasks))
    else:
        reports = [_compliance_job(t) for t in tasks]
    total = ComplianceReport(m)
    for r in reports:   # ordered aggregation keeps witnesses deterministic
        total.merge(r)
    return total


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    pairs_checked: int
    witness: tuple[Partition, Partition, int] | None = None   # (q, q2, dist_index)

    def __bool__(self):
        return self.equivalent


def _preference_matrix(m: MeasureSpec, parts, dist) -> np.ndarray:
    v = [evaluate(m, p, dist) for p in parts]
    n = len(v)
    out = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i, j] = better(m, v[i], v[j])
    return out


def check_equivalence(m1: MeasureSpec, m2: MeasureSpec, parts: Sequence[Partition],
                      dists: Distribution | Sequence[Distribution]) -> EquivalenceResult:
    """Do m1 and m2 induce the same strict preference on every ordered pair?"""
    if isinstance(dists, Distribution):
        dists = [dists]
    n = len(parts)
    checked = 0
    for k, dist in enumerate(dists):
        a = _preference_matrix(m1, parts, dist)
        b = _preference_matrix(m2, parts, dist)
        diff = np.argwhere(a != b)
        if len(diff):
            i, j = diff[0]
            return EquivalenceResult(False, checked + int(i) * n + int(j), (parts[i], parts[j], k))
        checked += n * (n - 1)
    return EquivalenceResult(True, checked)


class Superiority(enum.Enum):
    FIRST = "FirstSuperior"
    SECOND = "SecondSuperior"
    NEITHER = "Neither"


@dataclass
class SuperiorityVerdict:
    value: Superiority
    pairs_checked: int
    # pairs where the first measure honors the DPO and the second does not, and vice versa
    first_only: list[tuple[Partition, Partition, int]]
    second_only: list[tuple[Partition, Partition, int]]
    first_only_count: int = 0
    second_only_count: int = 0


def check_superiority(m1: MeasureSpec, m2: MeasureSpec, parts: Sequence[Partition],
                      dists: Sequence[Distribution],
                      pairs: Sequence[tuple[int, int]] | None = None) -> SuperiorityVerdict:
    """Empirical superiority over ``parts`` x ``dists``.

    ``FIRST`` means m1 is superior to m2: some DPO pair is honored by m1 but
    not by m2, and no DPO pair is honored by m2 but not by m1.
    """
    pairs = dpo_pairs(parts) if pairs is None else pairs
    first_only, second_only = [], []
    n1 = n2 = checked = 0
    for k, dist in enumerate(dists):
        v1 = [evaluate(m1, p, dist) for p in parts]
        v2 = [evaluate(m2, p, dist) for p in parts]
        for i, j in pairs:
            checked += 1
            s1 = better(m1, v1[i], v1[j])
            s2 = better(m2, v2[i], v2[j])
            if s1 and not s2:
                n1 += 1
                if len(first_only) < MAX_WITNESSES:
                    first_only.append((parts[i], parts[j], k))
            elif s2 and not s1:
                n2 += 1
                if len(second_only) < MAX_WITNESSES:
                    second_only.append((parts[i], parts[j], k))
    if n1 and not n2:
        value = Superiority.FIRST
    elif n2 and not n1:
        value = Superiority.SECOND
    else:
        value = Superiority.NEITHER
    return SuperiorityVerdict(value, checked, first_only, second_only, n1, n2)


@dataclass
class OrderReport:
    reflexive: list = field(default_factory=list)
    symmetric: list = field(default_factory=list)
    intransitive: list = field(default_factory=list)
    pairs_checked: int = 0
    chains_checked: int = 0
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return not (self.reflexive or self.symmetric or self.intransitive)


def check_strict_order(rel: Callable[[object, object], bool], items: Sequence,
                       budget: int = TRIPLE_BUDGET, rng=None) -> OrderReport:
    """Irreflexivity, asymmetry and transitivity of ``rel`` over ``items``.

    Transitivity is checked on chains a<b<c, which are the only triples that
    can violate it; above ``budget`` chains, ``budget`` of them are sampled.
    """
    n = len(items)
    rep = OrderReport()
    succ = [[] for _ in range(n)]
    for i in range(n):
        if rel(items[i], items[i]):
            rep.reflexive.append(i)
        for j in range(n):
            if i != j and rel(items[i], items[j]):
                succ[i].append(j)
    rep.pairs_checked = n * n
    related = [set(s) for s in succ]
    for i in range(n):
        for j in succ[i]:
            if i in related[j]:
                rep.symmetric.append((i, j))
    chains = sum(len(succ[j]) for i in range(n) for j in succ[i])
    if chains <= budget:
        for i in range(n):
            for j in succ[i]:
                for k in succ[j]:
                    rep.chains_checked += 1
                    if k not in related[i]:
                        rep.intransitive.append((i, j, k))
    else:
        rep.sampled = True
        rng = np.random.default_rng(0) if rng is None else rng
        firsts = [(i, j) for i in range(n) for j in succ[i] if succ[j]]
        for _ in range(budget):
            i, j = firsts[rng.integers(len(firsts))]
            k = succ[j][rng.integers(len(succ[j]))]
            rep.chains_checked += 1
            if k not in related[i]:
                rep.intransitive.append((i, j, k))
    return rep
