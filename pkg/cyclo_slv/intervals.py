"""
Exact interval unions on the line and periodic sets built from them.

Endpoints are Fractions. Intervals are treated as open; merging touching
intervals only changes a set by finitely many points, which no measure or
translation search can see.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from cyclo_slv.core import DEFAULT_GUARDS, ScaleGuards, format_rational, lcm_all
from cyclo_slv.exceptions import FalsificationError, PreconditionError

logger = logging.getLogger(__name__)

Interval = Tuple[Fraction, Fraction]


def merge_intervals(intervals: Iterable[Tuple[Any, Any]]) -> List[Interval]:
    """Sort by left endpoint and merge overlapping or touching intervals"""
    ordered = sorted((Fraction(a), Fraction(b)) for a, b in intervals if a < b)
    merged: List[Interval] = []
    for a, b in ordered:
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


def _intersect_sorted(left: Sequence[Tuple[Any, Any]], right: Sequence[Tuple[Any, Any]]) -> List[Tuple[Any, Any]]:
    out = []
    i = j = 0
    while i < len(left) and j < len(right):
        a = max(left[i][0], right[j][0])
        b = min(left[i][1], right[j][1])
        if a < b:
            out.append((a, b))
        if left[i][1] < right[j][1]:
            i += 1
        else:
            j += 1
    return out


@dataclass(frozen=True)
class IntervalUnion:
    """A finite union of disjoint open intervals, sorted and merged"""
    intervals: Tuple[Interval, ...] = ()

    @classmethod
    def from_intervals(cls, intervals: Iterable[Tuple[Any, Any]]) -> "IntervalUnion":
        return cls(tuple(merge_intervals(intervals)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(tuple(_intersect_sorted(self.intervals, other.intervals)))

    def shift(self, x: Fraction) -> "IntervalUnion":
        return IntervalUnion(tuple((a + x, b + x) for a, b in self.intervals))

    def scale(self, factor: Fraction) -> "IntervalUnion":
        if factor <= 0:
            raise PreconditionError(f"scale factor must be positive, got {factor}")
        return IntervalUnion(tuple((a * factor, b * factor) for a, b in self.intervals))

    def clip(self, lo: Fraction, hi: Fraction) -> "IntervalUnion":
        return self.intersect(IntervalUnion(((Fraction(lo), Fraction(hi)),)))

    def contains(self, x: Fraction) -> bool:
        return any(a < x < b for a, b in self.intervals)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform random points of the union (floating point)"""
        if self.is_empty():
            raise PreconditionError("cannot sample an empty interval union")
        starts = np.array([float(a) for a, _ in self.intervals])
        lengths = np.array([float(b - a) for a, b in self.intervals])
        picks = rng.choice(len(lengths), size=size, p=lengths / lengths.sum())
        return starts[picks] + rng.random(size) * lengths[picks]

    def to_json(self) -> List[List[str]]:
        return [[format_rational(a), format_rational(b)] for a, b in self.intervals]


@dataclass(frozen=True)
class PeriodicSet:
    """
    A periodic union of intervals, given by its base intervals in [0, period).

    Attributes:
        period: Positive rational period
        base: Intervals contained in [0, period)
    """
    period: Fraction
    base: IntervalUnion

    def __post_init__(self):
        if self.period <= 0:
            raise PreconditionError(f"period must be positive, got {self.period}")
        if self.base.intervals and (self.base.intervals[0][0] < 0 or self.base.intervals[-1][1] > self.period):
            raise PreconditionError("base intervals must lie in [0, period)")

    @classmethod
    def from_intervals(cls, period: Fraction, intervals: Iterable[Tuple[Any, Any]]) -> "PeriodicSet":
        """Wrap arbitrary intervals into [0, period); a long interval covers everything"""
        period = Fraction(period)
        pieces: List[Interval] = []
        for a, b in intervals:
            a, b = Fraction(a), Fraction(b)
            if b - a >= period:
                pieces = [(Fraction(0), period)]
                break
            shift = (a // period) * period
            a, b = a - shift, b - shift
            if b <= period:
                pieces.append((a, b))
            else:
                pieces.append((a, period))
                pieces.append((Fraction(0), b - period))
        return cls(period, IntervalUnion.from_intervals(pieces))

    @classmethod
    def full(cls, period: Fraction = Fraction(1)) -> "PeriodicSet":
        return cls(Fraction(period), IntervalUnion(((Fraction(0), Fraction(period)),)))

    def density(self) -> Fraction:
        return self.base.measure() / self.period

    def window(self, lo: Fraction, hi: Fraction, guards: ScaleGuards = DEFAULT_GUARDS) -> IntervalUnion:
        """All copies of the base intersected with [lo, hi]"""
        lo, hi = Fraction(lo), Fraction(hi)
        k_lo = math.floor(lo / self.period) - 1
        k_hi = math.ceil(hi / self.period)
        guards.check("window intervals", (k_hi - k_lo + 1) * len(self.base), "max_intervals")
        copies = [
            (a + k * self.period, b + k * self.period)
            for k in range(k_lo, k_hi + 1)
            for a, b in self.base.intervals
        ]
        return IntervalUnion.from_intervals(copies).clip(lo, hi)

    def unit_measure(self) -> Fraction:
        """|[0, 1] ∩ set|"""
        return self.window(Fraction(0), Fraction(1)).measure()

    def shift(self, x: Fraction) -> "PeriodicSet":
        return PeriodicSet.from_intervals(self.period, ((a + x, b + x) for a, b in self.base.intervals))

    def scale(self, factor: Fraction) -> "PeriodicSet":
        return PeriodicSet(self.period * factor, self.base.scale(factor))

    def intersect(self, other: "PeriodicSet") -> "PeriodicSet":
        if self.period != other.period:
            raise PreconditionError(f"period mismatch: {self.period} vs {other.period}")
        return PeriodicSet(self.period, self.base.intersect(other.base))

    def to_json(self) -> Dict[str, Any]:
        return {"period": format_rational(self.period), "base": self.base.to_json()}


def _as_integers(values: Iterable[Fraction], denominator: int) -> List[int]:
    return [int(v * denominator) for v in values]


def _overlap_at(u: Sequence[Tuple[int, int]], v: Sequence[Tuple[int, int]], period: int, shift: int) -> int:
    """|U ∩ (V + shift)| with V periodic, all in integer units"""
    lo, hi = u[0][0], u[-1][1]
    k_lo = (lo - v[-1][1] - shift) // period - 1
    k_hi = (hi - v[0][0] - shift) // period + 1
    copies = [
        (c + shift + k * period, d + shift + k * period)
        for k in range(k_lo, k_hi + 1)
        for c, d in v
    ]
    return sum(b - a for a, b in _intersect_sorted(u, copies))


def best_shift(
    U: IntervalUnion,
    V: PeriodicSet,
    guards: ScaleGuards = DEFAULT_GUARDS
) -> Tuple[Fraction, Fraction]:
    """
    Maximize f(σ) = |U ∩ (V + σ)| over σ in [0, period).

    f is periodic and piecewise linear with breakpoints where an endpoint of
    U meets an endpoint of a copy of V, and its average over a period is
    |U| times the density of V. The breakpoints are swept once, in integer
    units over a common denominator, accumulating slope changes.

    Returns:
        (σ, f(σ)) for the smallest breakpoint σ attaining the maximum
    """
    if U.is_empty() or V.base.is_empty():
        return Fraction(0), Fraction(0)
    guards.check("breakpoint pairs", len(U) * len(V.base), "max_intervals")
    endpoints = [x for iv in U.intervals for x in iv] + [x for iv in V.base.intervals for x in iv] + [V.period]
    denominator = lcm_all(x.denominator for x in endpoints)
    period = int(V.period * denominator)
    u = list(zip(_as_integers((a for a, _ in U.intervals), denominator),
                 _as_integers((b for _, b in U.intervals), denominator)))
    v = list(zip(_as_integers((c for c, _ in V.base.intervals), denominator),
                 _as_integers((d for _, d in V.base.intervals), denominator)))

    deltas: Dict[int, int] = defaultdict(int)
    for a, b in u:
        for c, d in v:
            deltas[(a - d) % period] += 1
            deltas[(a - c) % period] -= 1
            deltas[(b - d) % period] -= 1
            deltas[(b - c) % period] += 1
    positions = sorted(x for x, dv in deltas.items() if dv)
    if len(positions) < 2:
        return Fraction(0), Fraction(_overlap_at(u, v, period, 0), denominator)

    values = [_overlap_at(u, v, period, positions[0]), _overlap_at(u, v, period, positions[1])]
    slope = (values[1] - values[0]) // (positions[1] - positions[0])
    for i in range(1, len(positions) - 1):
        slope += deltas[positions[i]]
        values.append(values[i] + slope * (positions[i + 1] - positions[i]))
    best_index = max(range(len(values)), key=lambda i: (values[i], -i))
    best_value = values[best_index]
    check = _overlap_at(u, v, period, positions[best_index])
    if check != best_value:
        raise FalsificationError(
            "breakpoint sweep disagrees with direct evaluation",
            {"sweep": best_value, "direct": check}
        )
    logger.debug(f"best shift: {len(positions)} breakpoints, value {best_value}/{denominator}")
    return Fraction(positions[best_index], denominator), Fraction(best_value, denominator)
