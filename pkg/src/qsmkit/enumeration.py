"""Exhaustive partition enumeration, the brute-force oracle behind empirical checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .core import Distribution, Partition, ValidationError
from .qsm import MeasureSpec, better, evaluate

#: 3**12 assignments is about half a million; beyond that use sampling.
DEFAULT_CAP = 12

# digit per hypothesis in the ternary assignment vector
PLUS, MINUS, ZERO = 0, 1, 2


@dataclass(frozen=True)
class EnumOptions:
    strong_only: bool = False
    canonical_dedup: bool = False
    cap: int = DEFAULT_CAP


def _check_universe(universe: Sequence[int], cap: int) -> list[int]:
    universe = list(universe)
    if not 1 <= len(universe) <= cap:
        raise ValidationError(
            f"universe size {len(universe)} outside 1..{cap}; "
            "sample partitions instead of enumerating them")
    if len(set(universe)) != len(universe):
        raise ValidationError("duplicate hypothesis in universe")
    return universe


def from_assignment(universe: Sequence[int], digits: Sequence[int]) -> Partition:
    sides = ([], [], [])
    for h, d in zip(universe, digits):
        sides[d].append(h)
    return Partition(*map(frozenset, sides))


def all_partitions(universe: Sequence[int], cap: int = DEFAULT_CAP,
                   start: int = 0) -> Iterator[Partition]:
    """Every ternary partition, including non-discriminating ones.

    Order is lexicographic over the assignment vector (first hypothesis most
    significant, digits plus < minus < zero); ``start`` skips that many.
    """
    universe = _check_universe(universe, cap)
    product = itertools.product((PLUS, MINUS, ZERO), repeat=len(universe))
    for digits in itertools.islice(product, start, None):
        yield from_assignment(universe, digits)


def all_dps(universe: Sequence[int], opts: EnumOptions = EnumOptions(),
            start: int = 0) -> Iterator[Partition]:
    """Discriminating partitions of ``universe`` in assignment order."""
    universe = _check_universe(universe, opts.cap)
    alphabet = (PLUS, MINUS) if opts.strong_only else (PLUS, MINUS, ZERO)
    product = itertools.product(alphabet, repeat=len(universe))
    for digits in itertools.islice(product, start, None):
        if PLUS not in digits or MINUS not in digits:
            continue
        if opts.canonical_dedup and digits.index(PLUS) > digits.index(MINUS):
            # keep the mirror whose first predicting hypothesis is positive
            continue
        yield from_assignment(universe, digits)


def count_dps(n: int, strong_only: bool = False) -> int:
    if strong_only:
        return 2 ** n - 2
    return 3 ** n - 2 * 2 ** n + 1


def brute_force_optimum(m: MeasureSpec, universe: Sequence[int], dist: Distribution,
                        opts: EnumOptions = EnumOptions()) -> tuple[Partition, float]:
    """Exact optimizer of ``m`` over the enumerated DPs; the first one wins ties."""
    best, best_v = None, 0.0
    for part in all_dps(universe, opts):
        v = evaluate(m, part, dist)
        if best is None or better(m, v, best_v):
            best, best_v = part, v
    if best is None:
        raise ValidationError("no discriminating partition exists for this universe")
    return best, best_v
