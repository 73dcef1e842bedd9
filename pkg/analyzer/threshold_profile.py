#!/usr/bin/env python3
"""
Threshold Profile - TPR(t) and FPR(t) as piecewise-constant functions of the
threshold, and the better-than-random analysis built on them.

A model is better than random when, for every t in (0,1),
    TPR(t) >= 1 - t  and  FPR(t) <= 1 - t,
with strict inequality for at least one t.

The check is exact, not sampled. On a segment [a, b) where a rate is the
constant c, comparing c against the strictly decreasing line 1 - t only needs
the crossing point t = 1 - c: the set where c >= 1 - t is [1 - c, b) and the
set where c <= 1 - t is [a, 1 - c], each clipped to the segment.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from analyzer.core_metrics import ScoredDataset, check_threshold
from analyzer.errors import EvaluationError, ThresholdRangeError
from analyzer.intervals import (
    OPEN_UNIT,
    Interval,
    Number,
    as_fraction,
    drop_degenerate,
    merge_intervals,
)

logger = logging.getLogger(__name__)

EXTREME_LOW = Fraction(1, 10)
EXTREME_HIGH = Fraction(9, 10)


@dataclass(frozen=True)
class StepFunction:
    """
    values[i] holds on [breakpoints[i], breakpoints[i+1]); the last value is
    the value at t=1. Breakpoints start at 0, end at 1 and strictly increase.
    """
    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(as_fraction(b) for b in self.breakpoints)
        vals = tuple(as_fraction(v) for v in self.values)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise EvaluationError("step function breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise EvaluationError("step function breakpoints must strictly increase")
        if len(vals) != len(bps):
            raise EvaluationError("step function needs one value per breakpoint")
        object.__setattr__(self, 'breakpoints', bps)
        object.__setattr__(self, 'values', vals)

    @classmethod
    def constant(cls, value: Number) -> 'StepFunction':
        return cls((Fraction(0), Fraction(1)), (as_fraction(value), as_fraction(value)))

    @classmethod
    def from_pieces(cls, pieces: Sequence[Tuple[Number, Number]],
                    value_at_one: Optional[Number] = None) -> 'StepFunction':
        """
        pieces: (start, value) pairs, the first starting at 0; each value holds
        until the next start. value_at_one defaults to the last piece's value.
        """
        starts = [as_fraction(s) for s, _ in pieces]
        values = [as_fraction(v) for _, v in pieces]
        at_one = values[-1] if value_at_one is None else as_fraction(value_at_one)
        return cls(tuple(starts) + (Fraction(1),), tuple(values) + (at_one,))

    def __call__(self, t: Number) -> Fraction:
        t = check_threshold(t)
        return self.values[bisect_right(self.breakpoints, t) - 1]

    def segments(self) -> Iterator[Tuple[Interval, Fraction]]:
        """Segments clipped to the open interval (0,1), with their values"""
        for i in range(len(self.breakpoints) - 1):
            segment = Interval(self.breakpoints[i], self.breakpoints[i + 1], True, False)
            yield segment.intersect(OPEN_UNIT), self.values[i]

    def refine(self, breakpoints: Sequence[Fraction]) -> 'StepFunction':
        """Same function expressed on a finer breakpoint set"""
        return StepFunction(tuple(breakpoints), tuple(self(b) for b in breakpoints))

    def is_non_increasing(self) -> bool:
        return all(a >= b for a, b in zip(self.values, self.values[1:]))

    def in_unit_range(self) -> bool:
        return all(0 <= v <= 1 for v in self.values)

    def to_dict(self) -> Dict:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [float(v) for v in self.values],
        }


def common_breakpoints(*functions: StepFunction) -> Tuple[Fraction, ...]:
    merged = set()
    for fn in functions:
        merged.update(fn.breakpoints)
    return tuple(sorted(merged))


def common_refinement(*functions: StepFunction) -> List[StepFunction]:
    """All functions re-expressed on the union of their breakpoints"""
    bps = common_breakpoints(*functions)
    return [fn.refine(bps) for fn in functions]


@dataclass(frozen=True)
class ThresholdProfile:
    tpr: StepFunction
    fpr: StepFunction
    prevalence: Optional[Fraction] = None
    ap: Optional[int] = None
    an: Optional[int] = None
    name: str = ""
    # distinct scores of the dataset, 0 and 1 included; empty for hand-built profiles
    scores: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        for label, fn in (("TPR", self.tpr), ("FPR", self.fpr)):
            if not fn.in_unit_range():
                raise EvaluationError(f"{label} profile values must lie in [0, 1]")
            if not fn.is_non_increasing():
                raise EvaluationError(f"{label} profile must be non-increasing in t")
        if self.tpr.breakpoints != self.fpr.breakpoints:
            tpr, fpr = common_refinement(self.tpr, self.fpr)
            object.__setattr__(self, 'tpr', tpr)
            object.__setattr__(self, 'fpr', fpr)

    @property
    def breakpoints(self) -> Tuple[Fraction, ...]:
        return self.tpr.breakpoints

    def segments(self) -> Iterator[Tuple[Interval, Fraction, Fraction]]:
        """(segment within (0,1), TPR, FPR) for every segment"""
        for (segment, tpr), (_, fpr) in zip(self.tpr.segments(), self.fpr.segments()):
            yield segment, tpr, fpr

    def at(self, t: Number) -> Tuple[Fraction, Fraction]:
        return self.tpr(t), self.fpr(t)


class QuadrantLabel(Enum):
    BETTER = "better"
    POSITIVE_TRADEOFF = "positive-tradeoff"  # better on positives, worse on negatives
    NEGATIVE_TRADEOFF = "negative-tradeoff"  # better on negatives, worse on positives
    WORSE = "worse"


@dataclass(frozen=True)
class Quadrant:
    label: QuadrantLabel
    boundary: bool = False  # a rate equals 1 - t exactly


@dataclass(frozen=True)
class RandomComparisonVerdict:
    better_than_random: bool
    tpr_violations: List[Interval] = field(default_factory=list)
    fpr_violations: List[Interval] = field(default_factory=list)
    ok_ranges: List[Interval] = field(default_factory=list)
    strict_somewhere: bool = False
    boundary_contacts: List[Fraction] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "better_than_random": self.better_than_random,
            "strict_somewhere": self.strict_somewhere,
            "tpr_violations": [iv.to_dict() for iv in self.tpr_violations],
            "fpr_violations": [iv.to_dict() for iv in self.fpr_violations],
            "ok_ranges": [iv.to_dict() for iv in self.ok_ranges],
            "boundary_contacts": [float(t) for t in self.boundary_contacts],
        }


@dataclass(frozen=True)
class PerfectRange:
    interval: Optional[Interval] = None

    @property
    def is_empty(self) -> bool:
        return self.interval is None or self.interval.is_empty

    @property
    def t_l(self) -> Optional[Fraction]:
        return None if self.is_empty else self.interval.lo

    @property
    def t_h(self) -> Optional[Fraction]:
        return None if self.is_empty else self.interval.hi

    def to_dict(self) -> Optional[Dict]:
        return None if self.is_empty else self.interval.to_dict()


@dataclass(frozen=True)
class ImbalanceReport:
    prevalence: Optional[float]
    arc_share_high: float  # share of ROC arc length produced by thresholds > 0.9
    arc_share_low: float  # share produced by thresholds < 0.1
    extreme_breakpoint_share: float
    concentrated: bool
    dominant_side: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            "prevalence": self.prevalence,
            "arc_share_high": self.arc_share_high,
            "arc_share_low": self.arc_share_low,
            "extreme_breakpoint_share": self.extreme_breakpoint_share,
            "concentrated_at_extremes": self.concentrated,
            "dominant_side": self.dominant_side,
        }


def profile(ds: ScoredDataset) -> ThresholdProfile:
    ds.require_both_classes()
    interior = [s for s in ds.distinct_scores if 0 < s < 1]
    breakpoints = (Fraction(0),) + tuple(interior) + (Fraction(1),)

    tpr_values, fpr_values = [], []
    for b in breakpoints[:-1]:
        tp, fp = ds.count_above(b)
        tpr_values.append(Fraction(tp, ds.ap))
        fpr_values.append(Fraction(fp, ds.an))
    # strict rule: nothing is above t=1
    tpr_values.append(Fraction(0))
    fpr_values.append(Fraction(0))

    return ThresholdProfile(
        tpr=StepFunction(breakpoints, tuple(tpr_values)),
        fpr=StepFunction(breakpoints, tuple(fpr_values)),
        prevalence=ds.prevalence,
        ap=ds.ap,
        an=ds.an,
        name=ds.name,
        scores=tuple(ds.distinct_scores),
    )


def check_better_than_random(p: ThresholdProfile) -> RandomComparisonVerdict:
    tpr_violations, fpr_violations, ok_pieces = [], [], []
    strict_somewhere = False
    contacts = set()

    for segment, tpr, fpr in p.segments():
        tpr_cross = 1 - tpr  # TPR(t) >= 1 - t  <=>  t >= 1 - TPR
        fpr_cross = 1 - fpr  # FPR(t) <= 1 - t  <=>  t <= 1 - FPR

        tpr_violations.append(segment.at_most(tpr_cross, inclusive=False))
        fpr_violations.append(segment.at_least(fpr_cross, inclusive=False))
        ok_pieces.append(segment.at_least(tpr_cross).at_most(fpr_cross))

        if not segment.at_least(tpr_cross, inclusive=False).is_empty:
            strict_somewhere = True
        if not segment.at_most(fpr_cross, inclusive=False).is_empty:
            strict_somewhere = True
        for cross in (tpr_cross, fpr_cross):
            if segment.contains(cross):
                contacts.add(cross)

    tpr_violations = merge_intervals(tpr_violations)
    fpr_violations = merge_intervals(fpr_violations)
    verdict = not tpr_violations and not fpr_violations and strict_somewhere
    if verdict and contacts:
        logger.debug("better than random with boundary contacts at %s",
                     sorted(float(c) for c in contacts))

    return RandomComparisonVerdict(
        better_than_random=verdict,
        tpr_violations=tpr_violations,
        fpr_violations=fpr_violations,
        ok_ranges=drop_degenerate(merge_intervals(ok_pieces)),
        strict_somewhere=strict_somewhere,
        boundary_contacts=sorted(contacts),
    )


def better_than_random_ranges(p: ThresholdProfile) -> List[Interval]:
    return check_better_than_random(p).ok_ranges


def perfect_range(p: ThresholdProfile) -> PerfectRange:
    pieces = [segment for segment, tpr, fpr in p.segments() if tpr == 1 and fpr == 0]
    merged = merge_intervals(pieces)
    if not merged:
        return PerfectRange()
    # both rates are non-increasing, so the perfect set is one interval
    return PerfectRange(merged[0])


def quadrant(p: ThresholdProfile, t: Number) -> Quadrant:
    t = as_fraction(t)
    if not OPEN_UNIT.contains(t):
        raise ThresholdRangeError("threshold out of range: quadrant needs 0 < t < 1")
    tpr, fpr = p.at(t)
    baseline = 1 - t
    tpr_good = tpr >= baseline
    fpr_good = fpr <= baseline
    if tpr_good and fpr_good:
        label = QuadrantLabel.BETTER
    elif tpr_good:
        label = QuadrantLabel.POSITIVE_TRADEOFF
    elif fpr_good:
        label = QuadrantLabel.NEGATIVE_TRADEOFF
    else:
        label = QuadrantLabel.WORSE
    return Quadrant(label, boundary=(tpr == baseline or fpr == baseline))


def _arc_length(dx: Fraction, dy: Fraction) -> float:
    return float(dx * dx + dy * dy) ** 0.5


def imbalance_diagnostics(p: ThresholdProfile,
                          extreme_low: Number = EXTREME_LOW,
                          extreme_high: Number = EXTREME_HIGH) -> ImbalanceReport:
    """
    Where along the threshold axis the ROC curve is produced. Crossing
    breakpoint b moves the ROC point from (FPR, TPR) of the segment before b
    to that of the segment starting at b; that step is credited to b. The
    curve starts at (1,1), so the first step is credited to t=0.
    """
    low, high = as_fraction(extreme_low), as_fraction(extreme_high)
    bps = p.breakpoints
    tprs = (Fraction(1),) + p.tpr.values
    fprs = (Fraction(1),) + p.fpr.values

    total = high_arc = low_arc = 0.0
    for i, b in enumerate(bps):
        step = _arc_length(fprs[i] - fprs[i + 1], tprs[i] - tprs[i + 1])
        total += step
        if b > high:
            high_arc += step
        elif b < low:
            low_arc += step

    scores = p.scores or bps[1:-1]
    extreme = [s for s in scores if s < low or s > high]
    extreme_share = len(extreme) / len(scores) if scores else 0.0
    concentrated = extreme_share > 0.5

    dominant = None
    if concentrated:
        n_high = sum(1 for b in extreme if b > high)
        dominant = "high" if n_high * 2 >= len(extreme) else "low"

    return ImbalanceReport(
        prevalence=None if p.prevalence is None else float(p.prevalence),
        arc_share_high=high_arc / total if total else 0.0,
        arc_share_low=low_arc / total if total else 0.0,
        extreme_breakpoint_share=extreme_share,
        concentrated=concentrated,
        dominant_side=dominant,
    )
