#!/usr/bin/env python3
"""
Threshold intervals with explicit endpoint closedness.

All endpoints are Fractions so that comparisons against the random line
1 - t are exact. Floats only appear when an interval is exported to JSON.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Union

Number = Union[int, float, Fraction]


def as_fraction(value: Number) -> Fraction:
    """Exact rational value of an int, float or Fraction"""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def as_decimal(value: Number) -> Fraction:
    """Rational value of a user-supplied bound; a float is read as the decimal it prints as"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'lo', as_fraction(self.lo))
        object.__setattr__(self, 'hi', as_fraction(self.hi))

    @property
    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed)
        return False

    @property
    def is_degenerate(self) -> bool:
        """A single point [x, x]"""
        return self.lo == self.hi and self.lo_closed and self.hi_closed

    @property
    def width(self) -> Fraction:
        if self.is_empty:
            return Fraction(0)
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, t: Number) -> bool:
        t = as_fraction(t)
        above_lo = t > self.lo or (self.lo_closed and t == self.lo)
        below_hi = t < self.hi or (self.hi_closed and t == self.hi)
        return above_lo and below_hi

    def intersect(self, other: 'Interval') -> 'Interval':
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed

        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def at_most(self, x: Number, inclusive: bool = True) -> 'Interval':
        """The part of this interval with t <= x (t < x when not inclusive)"""
        return self.intersect(Interval(self.lo, x, self.lo_closed, inclusive))

    def at_least(self, x: Number, inclusive: bool = True) -> 'Interval':
        """The part of this interval with t >= x (t > x when not inclusive)"""
        return self.intersect(Interval(x, self.hi, inclusive, self.hi_closed))

    def to_dict(self) -> Dict:
        return {
            "lo": float(self.lo),
            "hi": float(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    def __str__(self) -> str:
        left = '[' if self.lo_closed else '('
        right = ']' if self.hi_closed else ')'
        return f"{left}{float(self.lo):g}, {float(self.hi):g}{right}"


# Random-model and pairwise threshold comparisons quantify over (0, 1)
OPEN_UNIT = Interval(0, 1, False, False)


def _touches(left: Interval, right: Interval) -> bool:
    """True when right starts inside left or exactly where left ends with no gap"""
    if right.lo < left.hi:
        return True
    if right.lo == left.hi:
        return left.hi_closed or right.lo_closed
    return False


def merge_intervals(intervals: Iterable[Interval]) -> List[Interval]:
    """Sorted, pairwise-disjoint union of the given intervals"""
    pending = sorted(
        (iv for iv in intervals if not iv.is_empty),
        key=lambda iv: (iv.lo, not iv.lo_closed),
    )
    merged: List[Interval] = []
    for iv in pending:
        if merged and _touches(merged[-1], iv):
            last = merged[-1]
            if iv.hi > last.hi:
                hi, hi_closed = iv.hi, iv.hi_closed
            elif iv.hi < last.hi:
                hi, hi_closed = last.hi, last.hi_closed
            else:
                hi, hi_closed = last.hi, last.hi_closed or iv.hi_closed
            merged[-1] = Interval(last.lo, hi, last.lo_closed, hi_closed)
        else:
            merged.append(iv)
    return merged


def intersect_interval_lists(a: Iterable[Interval], b: Iterable[Interval]) -> List[Interval]:
    b = list(b)
    return merge_intervals(x.intersect(y) for x in a for y in b)


def drop_degenerate(intervals: Iterable[Interval]) -> List[Interval]:
    return [iv for iv in intervals if not iv.is_empty and not iv.is_degenerate]


def total_width(intervals: Iterable[Interval]) -> Fraction:
    return sum((iv.width for iv in intervals), Fraction(0))


def intervals_to_dicts(intervals: Iterable[Interval]) -> List[Dict]:
    return [iv.to_dict() for iv in intervals]
