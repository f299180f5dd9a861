"""Query selection measures, their optimization directions and preference order."""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Sequence

from .core import (
    Distribution,
    Partition,
    ValidationError,
    answer_probabilities,
)

#: Values closer than this (absolute or relative) are treated as ties.
TIE_TOL = 1e-12


class Kind(str, enum.Enum):
    LC = "LC"
    M = "M"
    H = "H"
    GI = "GI"
    ENT = "ENT"
    ENT_z = "ENT_z"
    SPL = "SPL"
    SPL_z = "SPL_z"
    VE = "VE"
    KL = "KL"
    EMCa = "EMCa"
    EMCa_z = "EMCa_z"
    EMCb = "EMCb"
    MPS = "MPS"
    MPSp = "MPSp"
    BME = "BME"
    RIOp = "RIOp"
    RIOp_z = "RIOp_z"
    BAL = "BAL"


Z_KINDS = frozenset({Kind.ENT_z, Kind.SPL_z, Kind.EMCa_z, Kind.RIOp_z})
N_KINDS = frozenset({Kind.RIOp, Kind.RIOp_z})
MPS_KINDS = frozenset({Kind.MPS, Kind.MPSp})


class Direction(enum.Enum):
    MINIMIZE = "Minimize"
    MAXIMIZE = "Maximize"


_MINIMIZED = frozenset({Kind.LC, Kind.M, Kind.ENT, Kind.ENT_z, Kind.SPL, Kind.SPL_z,
                        Kind.RIOp, Kind.RIOp_z, Kind.BAL})

#: Equivalence classes over strong DQs, keyed EC1..EC7.
EC_OF_KIND = {
    Kind.EMCa: "EC1", Kind.EMCa_z: "EC1", Kind.GI: "EC1", Kind.LC: "EC1", Kind.M: "EC1",
    Kind.H: "EC1", Kind.ENT: "EC1", Kind.ENT_z: "EC1", Kind.BAL: "EC1",
    Kind.SPL: "EC2", Kind.SPL_z: "EC2", Kind.VE: "EC2",
    Kind.RIOp: "EC3", Kind.RIOp_z: "EC3",
    Kind.KL: "EC4",
    Kind.EMCb: "EC5",
    Kind.MPS: "EC6", Kind.MPSp: "EC6",
    Kind.BME: "EC7",
}


@dataclass(frozen=True)
class MeasureSpec:
    """One measure plus its parameters.

    ``z`` is required exactly for the ``*_z`` kinds, ``n`` exactly for the
    RIO' kinds. ``literal`` switches MPS/MPS' to the table's
    ``||V+|-|V-|| == 2`` gate instead of the singleton-side reading.
    """

    kind: Kind
    z: float | None = None
    n: int | None = None
    literal: bool = False

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if (self.z is not None) != (kind in Z_KINDS):
            raise ValidationError(f"{kind.value}: parameter z is "
                                  + ("required" if kind in Z_KINDS else "not allowed"))
        if self.z is not None:
            if not math.isfinite(self.z):
                raise ValidationError(f"{kind.value}: z must be finite")
            object.__setattr__(self, "z", float(self.z))
        if (self.n is not None) != (kind in N_KINDS):
            raise ValidationError(f"{kind.value}: parameter n is "
                                  + ("required" if kind in N_KINDS else "not allowed"))
        if self.n is not None and int(self.n) < 1:
            raise ValidationError(f"{kind.value}: n must be >= 1")
        if self.literal and kind not in MPS_KINDS:
            raise ValidationError(f"{kind.value}: the literal flag applies to MPS only")

    @classmethod
    def parse(cls, text: str, mps_literal: bool = False) -> "MeasureSpec":
        return parse_measure(text, mps_literal)

    @property
    def ec(self) -> str:
        return EC_OF_KIND[self.kind]

    @property
    def direction(self) -> Direction:
        return direction(self)

    def __str__(self):
        name = {"MPSp": "MPS'", "RIOp": "RIO'", "RIOp_z": "RIO'"}.get(
            self.kind.value, self.kind.value.removesuffix("_z"))
        if self.z is not None:
            name += f"_z={self.z:g}"
        if self.n is not None:
            name += f"_n={self.n}"
        if self.kind in MPS_KINDS:
            name += "[literal]" if self.literal else "[singleton]"
        return name


_ALIASES = {"MPS'": "MPSp", "RIO": "RIOp", "RIO'": "RIOp", "RIOP": "RIOp"}
_TOKEN = re.compile(r"^(z|n)=(.+)$")


def parse_measure(text: str, mps_literal: bool = False) -> MeasureSpec:
    """Parse ``ENT``, ``ENT_z=1.5``, ``RIO_n=2``, ``RIO_z=1.5_n=2`` and friends."""
    tokens = text.strip().split("_")
    head = _ALIASES.get(tokens[0], tokens[0])
    params = {}
    for tok in tokens[1:]:
        m = _TOKEN.match(tok)
        if not m:
            raise ValidationError(f"measure {text!r}: bad token {tok!r}")
        key, raw = m.groups()
        try:
            params[key] = float(raw) if key == "z" else int(raw)
        except ValueError:
            raise ValidationError(f"measure {text!r}: bad value in token {tok!r}") from None
    kind_name = head + ("_z" if "z" in params else "")
    try:
        kind = Kind(kind_name)
    except ValueError:
        raise ValidationError(f"measure {text!r}: unknown measure {tokens[0]!r}") from None
    return MeasureSpec(kind, z=params.get("z"), n=params.get("n"),
                       literal=mps_literal and kind in MPS_KINDS)


def direction(m: MeasureSpec) -> Direction:
    return Direction.MINIMIZE if m.kind in _MINIMIZED else Direction.MAXIMIZE


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def _neg_entropy(p1: float, p0: float) -> float:
    return _xlog2x(p1) + _xlog2x(p0)


def _mps_singleton(part: Partition, dist: Distribution, literal: bool) -> float | None:
    """p of the singleton side when the MPS condition holds, else None."""
    if not part.is_strong:
        return None
    a, b = len(part.plus), len(part.minus)
    if literal:
        if abs(a - b) != 2:
            return None
        return dist.mass(part.plus if a < b else part.minus)
    sides = [s for s in (part.plus, part.minus) if len(s) == 1]
    if not sides:
        return None
    return max(dist.mass(s) for s in sides)


def evaluate(m: MeasureSpec, part: Partition, dist: Distribution) -> float:
    """Value of measure ``m`` on a discriminating partition."""
    if not part.is_dq:
        raise ValidationError(f"{m}: partition {part.format()} is not discriminating")
    p1, p0 = answer_probabilities(part, dist)
    k = m.kind
    if k is Kind.LC:
        return max(p1, p0)
    if k is Kind.M:
        return abs(p1 - p0)
    if k is Kind.H:
        return -_neg_entropy(p1, p0)
    if k is Kind.GI:
        return 1.0 - p1 * p1 - p0 * p0
    if k in (Kind.ENT, Kind.ENT_z):
        z = 1.0 if k is Kind.ENT else m.z
        return z * dist.mass(part.zero) + _neg_entropy(p1, p0)
    if k in (Kind.SPL, Kind.SPL_z):
        z = 1.0 if k is Kind.SPL else m.z
        return abs(len(part.plus) - len(part.minus)) + z * len(part.zero)
    if k is Kind.VE:
        c = len(part.plus) + len(part.minus)
        return -(_xlog2x(len(part.plus) / c) + _xlog2x(len(part.minus) / c))
    if k is Kind.KL:
        c = len(part.plus) + len(part.minus)
        pp, pm = dist.mass(part.plus), dist.mass(part.minus)
        pc = pp + pm
        return -(len(part.plus) / c * math.log2(pp / pc)
                 + len(part.minus) / c * math.log2(pm / pc))
    if k in (Kind.EMCa, Kind.EMCa_z):
        z = 1.0 if k is Kind.EMCa else m.z
        return 2.0 * (p1 - p1 * p1) - z * dist.mass(part.zero) / 2.0
    if k is Kind.EMCb:
        return p1 * len(part.minus) + p0 * len(part.plus)
    if k in MPS_KINDS:
        single = _mps_singleton(part, dist, m.literal)
        if single is not None:
            return single
        return 0.0 if k is Kind.MPS else -float(len(part.zero))
    if k is Kind.BME:
        pp, pm = dist.mass(part.plus), dist.mass(part.minus)
        if pm < pp:
            return float(len(part.minus))
        if pp < pm:
            return float(len(part.plus))
        return 0.0
    if k in N_KINDS:
        z = 1.0 if k is Kind.RIOp else m.z
        ent = z * dist.mass(part.zero) + _neg_entropy(p1, p0)
        return ent / 2.0 + rio_shortfall(part, m.n)
    if k is Kind.BAL:
        return abs(dist.mass(part.plus) - dist.mass(part.minus)) + dist.mass(part.zero)
    raise AssertionError(k)


def rio_shortfall(part: Partition, n: int) -> float:
    """min(|V+|,|V-|) - n if that is >= 0, else |V|."""
    smaller = min(len(part.plus), len(part.minus))
    if smaller >= n:
        return float(smaller - n)
    return float(len(part.universe))


def is_tie(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=TIE_TOL, abs_tol=TIE_TOL)


def better(m: MeasureSpec, a: float, b: float) -> bool:
    """Strictly better value under ``m``'s direction."""
    if is_tie(a, b):
        return False
    return a < b if direction(m) is Direction.MINIMIZE else a > b


def prefers(m: MeasureSpec, q: Partition, q2: Partition, dist: Distribution) -> bool:
    return better(m, evaluate(m, q, dist), evaluate(m, q2, dist))


def select_best(m: MeasureSpec, pool: Sequence[Partition], dist: Distribution) -> tuple[int, float]:
    """Index and value of the best pool element; the lowest index wins ties."""
    if not pool:
        raise ValidationError("empty pool")
    best_i, best_v = -1, 0.0
    for i, part in enumerate(pool):
        if not part.is_dq:
            raise ValidationError(f"pool element {i} {part.format()} is not discriminating")
        v = evaluate(m, part, dist)
        if best_i < 0 or better(m, v, best_v):
            best_i, best_v = i, v
    return best_i, best_v


def ent_z_threshold(t: float) -> float:
    """Smallest z making ENT_z respect the DPO when every answer probability exceeds t."""
    if not 0.0 < t < 0.5:
        raise ValidationError(f"t must lie in (0, 0.5), got {t!r}")
    return max(-0.5 * (math.log2(t) - math.log2(1.0 - t)), 1.0)


def ent_z_threshold_inverse(z: float) -> float:
    """Smallest answer-probability bound t for which ``ent_z_threshold(t) <= z``."""
    if z < 1.0:
        raise ValidationError("ENT_z below z=1 has no guaranteeing bound")
    return 1.0 / (1.0 + 2.0 ** (2.0 * z))


def min_answer_probability(parts: Sequence[Partition], dist: Distribution) -> float:
    return min(min(answer_probabilities(p, dist)) for p in parts)
