"""Hypotheses, partitions, answer probabilities and Bayesian updates.

A query is represented only by the partition it induces on the current
hypothesis set ``V``: the hypotheses predicting answer 1 (``plus``),
predicting answer 0 (``minus``) and predicting neither (``zero``).
Hypotheses are small non-negative integers; names live in :class:`Scenario`.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

#: Input distributions must sum to one within this tolerance.
NORM_TOL = 1e-9


class ValidationError(ValueError):
    """Malformed partition, distribution, scenario or parameter."""


class InfeasibleError(RuntimeError):
    """A well-formed request with no admissible answer (e.g. no realizable goal)."""


class Answer(enum.IntEnum):
    NO = 0
    YES = 1


class QueryClass(enum.Enum):
    NON_DISCRIMINATING = "NonDiscriminating"
    STRONG = "StrongDQ"
    WEAK = "WeakDQ"


def _ids(xs: Iterable[int]) -> frozenset[int]:
    out = frozenset(int(x) for x in xs)
    for h in out:
        if h < 0:
            raise ValidationError(f"negative hypothesis id {h}")
    return out


@dataclass(frozen=True)
class Partition:
    """The triple <V+, V-, V0> a query induces on the hypothesis set."""

    plus: frozenset[int]
    minus: frozenset[int]
    zero: frozenset[int] = frozenset()

    def __post_init__(self):
        plus, minus, zero = _ids(self.plus), _ids(self.minus), _ids(self.zero)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        object.__setattr__(self, "zero", zero)
        for a, b, what in ((plus, minus, "plus/minus"), (plus, zero, "plus/zero"),
                           (minus, zero, "minus/zero")):
            both = a & b
            if both:
                raise ValidationError(
                    f"hypothesis {min(both)} appears in both {what} sides")

    @classmethod
    def of(cls, plus=(), minus=(), zero=(), universe: Iterable[int] | None = None):
        part = cls(frozenset(plus), frozenset(minus), frozenset(zero))
        if universe is not None:
            part.check_universe(universe)
        return part

    @property
    def universe(self) -> frozenset[int]:
        return self.plus | self.minus | self.zero

    def check_universe(self, universe: Iterable[int]) -> None:
        universe = frozenset(universe)
        missing = universe - self.universe
        if missing:
            raise ValidationError(f"hypothesis {min(missing)} is not covered by the partition")
        extra = self.universe - universe
        if extra:
            raise ValidationError(f"hypothesis {min(extra)} is not in the universe")

    @property
    def is_dq(self) -> bool:
        return bool(self.plus) and bool(self.minus)

    @property
    def is_strong(self) -> bool:
        return self.is_dq and not self.zero

    def mirror(self) -> "Partition":
        return Partition(self.minus, self.plus, self.zero)

    def restrict(self, survivors: Iterable[int]) -> "Partition":
        keep = frozenset(survivors)
        return Partition(self.plus & keep, self.minus & keep, self.zero & keep)

    def format(self, names: Sequence[str] | None = None) -> str:
        def side(s):
            if not s:
                return "{}"
            return "{" + ",".join(_name(h, names) for h in sorted(s)) + "}"
        return f"<{side(self.plus)},{side(self.minus)},{side(self.zero)}>"

    def to_json(self, names: Sequence[str] | None = None) -> dict:
        return {k: [_name(h, names) for h in sorted(getattr(self, k))]
                for k in ("plus", "minus", "zero")}

    def sort_key(self) -> tuple:
        return (sorted(self.plus), sorted(self.minus), sorted(self.zero))


def _name(h: int, names: Sequence[str] | None) -> str:
    if names is not None and 0 <= h < len(names):
        return names[h]
    return f"h{h + 1}"


@dataclass(frozen=True)
class Distribution:
    """Strictly positive probabilities over a hypothesis set, summing to one."""

    weights: Mapping[int, float]

    def __post_init__(self):
        w = {int(k): float(v) for k, v in dict(self.weights).items()}
        if not w:
            raise ValidationError("distribution over an empty hypothesis set")
        for h, p in w.items():
            if not (p > 0.0) or not math.isfinite(p):
                raise ValidationError(f"hypothesis {h} has non-positive probability {p!r}")
        total = math.fsum(w.values())
        if abs(total - 1.0) > NORM_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "weights", MappingProxyType(w))

    def __reduce__(self):
        return (Distribution, (dict(self.weights),))

    @classmethod
    def from_list(cls, probs: Sequence[float], ids: Sequence[int] | None = None):
        ids = range(len(probs)) if ids is None else ids
        return cls(dict(zip(ids, probs)))

    @classmethod
    def normalized(cls, weights: Mapping[int, float]) -> "Distribution":
        total = math.fsum(weights.values())
        if not total > 0:
            raise ValidationError("cannot normalize zero mass")
        return cls({h: w / total for h, w in weights.items()})

    @classmethod
    def uniform(cls, ids: Iterable[int]) -> "Distribution":
        ids = list(ids)
        return cls({h: 1.0 / len(ids) for h in ids})

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.weights)

    def __getitem__(self, h: int) -> float:
        return self.weights[h]

    def __len__(self):
        return len(self.weights)

    def mass(self, hs: Iterable[int]) -> float:
        w = self.weights
        return math.fsum(w[h] for h in hs)

    def as_list(self) -> list[float]:
        return [self.weights[h] for h in sorted(self.weights)]


def random_distribution(ids: Sequence[int] | int, rng, eps: float = 0.01) -> Distribution:
    """Normalize independent uniform(eps, 1) weights; ``rng`` is a numpy Generator."""
    if isinstance(ids, int):
        ids = range(ids)
    ids = list(ids)
    raw = rng.uniform(eps, 1.0, size=len(ids))
    return Distribution.normalized(dict(zip(ids, raw.tolist())))


def classify_partition(part: Partition) -> QueryClass:
    if not part.plus or not part.minus:
        return QueryClass.NON_DISCRIMINATING
    return QueryClass.WEAK if part.zero else QueryClass.STRONG


def _check_same_universe(part: Partition, dist: Distribution) -> None:
    if part.universe != dist.support:
        diff = part.universe ^ dist.support
        raise ValidationError(
            f"partition and distribution disagree on hypothesis {min(diff)}")


def answer_probability(part: Partition, dist: Distribution, a: int) -> float:
    """p(ans=a): mass predicting ``a`` plus half the non-predicting mass."""
    _check_same_universe(part, dist)
    side = part.plus if a == 1 else part.minus
    return dist.mass(side) + dist.mass(part.zero) / 2.0


def answer_probabilities(part: Partition, dist: Distribution) -> tuple[float, float]:
    """(p(ans=1), p(ans=0)) computed symmetrically."""
    _check_same_universe(part, dist)
    half = dist.mass(part.zero) / 2.0
    return dist.mass(part.plus) + half, dist.mass(part.minus) + half


def eliminated_set(part: Partition, a: int) -> frozenset[int]:
    """Hypotheses inconsistent with answer ``a``."""
    if a not in (0, 1):
        raise ValidationError(f"answer must be 0 or 1, got {a!r}")
    return part.minus if a == 1 else part.plus


def likelihood(part: Partition, h: int, a: int) -> float:
    """p(ans=a | h) under the half-and-half model for non-predicting hypotheses."""
    if h in part.zero:
        return 0.5
    predicted = 1 if h in part.plus else 0
    return 1.0 if predicted == a else 0.0


def bayes_update(dist: Distribution, part: Partition, a: int) -> Distribution:
    pa = answer_probability(part, dist, a)
    if pa <= 0.0:
        raise ValidationError(f"answer {a} has zero probability")
    dead = eliminated_set(part, a)
    post = {}
    for h, p in dist.weights.items():
        if h in dead:
            continue
        post[h] = p * (0.5 if h in part.zero else 1.0) / pa
    # renormalize away floating-point drift
    return Distribution.normalized(post)


@dataclass(frozen=True)
class Scenario:
    """A hypothesis universe with names, prior and an optional named pool."""

    names: tuple[str, ...]
    dist: Distribution
    partitions: tuple[tuple[str, Partition], ...] = ()
    digest: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValidationError("duplicate hypothesis names")
        if self.dist.support != frozenset(range(len(self.names))):
            raise ValidationError("distribution does not cover the hypotheses")
        for name, part in self.partitions:
            try:
                part.check_universe(self.universe)
            except ValidationError as e:
                raise ValidationError(f"partition {name}: {e}") from None

    @property
    def universe(self) -> tuple[int, ...]:
        return tuple(range(len(self.names)))

    @property
    def pool(self) -> list[Partition]:
        return [p for _, p in self.partitions]

    def partition(self, name: str) -> Partition:
        for n, p in self.partitions:
            if n == name:
                return p
        raise ValidationError(f"no partition named {name!r}")

    def ids(self, names: Iterable[str]) -> frozenset[int]:
        index = {n: i for i, n in enumerate(self.names)}
        out = set()
        for n in names:
            if n not in index:
                raise ValidationError(f"unknown hypothesis {n!r}")
            out.add(index[n])
        return frozenset(out)

    def with_dist(self, dist: Distribution) -> "Scenario":
        return Scenario(self.names, dist, self.partitions, self.digest)

    @classmethod
    def from_dict(cls, doc: dict, digest: str = "") -> "Scenario":
        try:
            names = tuple(str(n) for n in doc["hypotheses"])
            probs = [float(x) for x in doc["p"]]
        except KeyError as e:
            raise ValidationError(f"scenario is missing field {e.args[0]!r}") from None
        if len(probs) != len(names):
            raise ValidationError("field 'p' must have one entry per hypothesis")
        dist = Distribution.from_list(probs)
        index = {n: i for i, n in enumerate(names)}
        parts = []
        for i, entry in enumerate(doc.get("partitions", [])):
            label = entry.get("name", f"Q{i + 1}")
            sides = []
            for key in ("plus", "minus", "zero"):
                ids = []
                for n in entry.get(key, []):
                    if n not in index:
                        raise ValidationError(
                            f"partitions[{i}].{key}: unknown hypothesis {n!r}")
                    ids.append(index[n])
                sides.append(frozenset(ids))
            parts.append((label, Partition(*sides)))
        return cls(names, dist, tuple(parts), digest)

    def to_dict(self) -> dict:
        return {
            "hypotheses": list(self.names),
            "p": self.dist.as_list(),
            "partitions": [dict(name=n, **p.to_json(self.names)) for n, p in self.partitions],
        }


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: not valid JSON ({e})") from None
    return Scenario.from_dict(doc, digest=file_digest(path))


def bundled_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


def running_example(which: str = "p1") -> Scenario:
    """The five-hypothesis running example with priors p1, p2 or p3."""
    path = bundled_path("running_example.json")
    scen = load_scenario(path)
    if which == "p1":
        return scen
    probs = json.loads(path.read_text())["alternatives"][which]
    return scen.with_dist(Distribution.from_list(probs))
