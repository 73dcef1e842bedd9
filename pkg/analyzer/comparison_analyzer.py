#!/usr/bin/env python3
"""
Comparison Analyzer - pairwise model comparison.

Two genuinely different orders are computed side by side:
  * ROC dominance, evaluated on curves (FPR-parameterised, threshold-free);
  * threshold superiority, evaluated on profiles: for every t in (0,1)
    TPR_A(t) >= TPR_B(t) and FPR_A(t) <= FPR_B(t), strictly somewhere.
Superiority implies dominance whenever the two curves differ; the converse
does not hold.

Also covers acceptable-range analysis (TPR_min / FPR_max bounds) and expected
misclassification cost as a function of the threshold.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from analyzer.errors import DegenerateClassError, DegenerateCostError, EvaluationError
from analyzer.intervals import (
    Interval,
    Number,
    as_decimal,
    intersect_interval_lists,
    merge_intervals,
    total_width,
)
from analyzer.roc_analyzer import RocCurve
from analyzer.threshold_profile import StepFunction, ThresholdProfile, common_refinement


@dataclass(frozen=True)
class DominanceVerdict:
    a_dominates_b: bool
    b_dominates_a: bool
    curves_cross: bool
    identical: bool = False

    def to_dict(self) -> Dict:
        return {
            "a_dominates_b": self.a_dominates_b,
            "b_dominates_a": self.b_dominates_a,
            "curves_cross": self.curves_cross,
            "identical_curves": self.identical,
        }


@dataclass(frozen=True)
class TradeoffInterval:
    interval: Interval
    tpr_leader: str  # the model with the higher TPR (and therefore the higher FPR)


@dataclass(frozen=True)
class SuperiorityVerdict:
    a_superior: bool
    b_superior: bool
    disagreement_intervals: List[Interval] = field(default_factory=list)
    tradeoffs: List[TradeoffInterval] = field(default_factory=list)
    tpr_curves_cross: bool = False
    fpr_curves_cross: bool = False

    def to_dict(self) -> Dict:
        return {
            "a_superior": self.a_superior,
            "b_superior": self.b_superior,
            "disagreement_intervals": [iv.to_dict() for iv in self.disagreement_intervals],
            "tradeoffs": [
                {"interval": tr.interval.to_dict(), "tpr_leader": tr.tpr_leader}
                for tr in self.tradeoffs
            ],
            "tpr_curves_cross": self.tpr_curves_cross,
            "fpr_curves_cross": self.fpr_curves_cross,
        }


@dataclass(frozen=True)
class AcceptableRange:
    model_id: str
    intervals: List[Interval]
    total_width: Fraction

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def to_dict(self) -> Dict:
        return {
            "model_id": self.model_id,
            "intervals": [iv.to_dict() for iv in self.intervals],
            "total_width": float(self.total_width),
        }


@dataclass(frozen=True)
class AcceptableComparison:
    range_a: AcceptableRange
    range_b: AcceptableRange
    intersection: List[Interval]
    width_preference: Optional[str]
    in_range_preference: Optional[str]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "range_a": self.range_a.to_dict(),
            "range_b": self.range_b.to_dict(),
            "intersection": [iv.to_dict() for iv in self.intersection],
            "width_preference": self.width_preference,
            "in_range_preference": self.in_range_preference,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class CostCurve:
    cost: StepFunction
    c_fp: Fraction
    c_fn: Fraction
    minimum: Fraction
    argmin: List[Interval]

    @property
    def argmin_width(self) -> Fraction:
        return total_width(self.argmin)

    def to_dict(self) -> Dict:
        return {
            "c_fp": float(self.c_fp),
            "c_fn": float(self.c_fn),
            "cost": self.cost.to_dict(),
            "minimum": float(self.minimum),
            "argmin": [iv.to_dict() for iv in self.argmin],
            "argmin_width": float(self.argmin_width),
        }


@dataclass(frozen=True)
class CostComparison:
    preferred: Optional[str]
    reason: str

    def to_dict(self) -> Dict:
        return {"preferred": self.preferred, "reason": self.reason}


# ---------------------------------------------------------------------------
# ROC dominance
# ---------------------------------------------------------------------------

def _vertical_extents(curve: RocCurve) -> Dict[Fraction, Tuple[Fraction, Fraction]]:
    """FPR -> (lowest TPR, highest TPR) over the curve's vertices at that FPR"""
    extents: Dict[Fraction, Tuple[Fraction, Fraction]] = {}
    for p in curve.points:
        lo, hi = extents.get(p.fpr, (p.tpr, p.tpr))
        extents[p.fpr] = (min(lo, p.tpr), max(hi, p.tpr))
    return extents


def _tpr_limits(extents: Dict[Fraction, Tuple[Fraction, Fraction]],
                xs: List[Fraction], x: Fraction) -> Tuple[Fraction, Fraction]:
    """
    (left limit, right limit) of the curve's TPR at FPR=x. Curves are
    non-decreasing in x, so a vertical run spans [left, right]; off the
    vertices the linear interpolation is single-valued.
    """
    if x in extents:
        return extents[x]
    right_index = next(i for i, v in enumerate(xs) if v > x)
    x_lo, x_hi = xs[right_index - 1], xs[right_index]
    y_lo = extents[x_lo][1]  # the curve leaves x_lo from the top of its run
    y_hi = extents[x_hi][0]  # and reaches x_hi at the bottom of the next one
    y = y_lo + (y_hi - y_lo) * (x - x_lo) / (x_hi - x_lo)
    return y, y


def dominates(a: RocCurve, b: RocCurve) -> DominanceVerdict:
    """
    A dominates B iff TPR_A(x) >= TPR_B(x) for all x with strict inequality
    somewhere. Between consecutive breakpoints of either curve both are
    linear, so comparing one-sided limits at the breakpoints is exact.
    """
    ext_a, ext_b = _vertical_extents(a), _vertical_extents(b)
    xs_a, xs_b = sorted(ext_a), sorted(ext_b)

    a_above = b_above = False
    for x in sorted(set(xs_a) | set(xs_b)):
        limits_a = _tpr_limits(ext_a, xs_a, x)
        limits_b = _tpr_limits(ext_b, xs_b, x)
        for ya, yb in zip(limits_a, limits_b):
            if ya > yb:
                a_above = True
            elif yb > ya:
                b_above = True

    return DominanceVerdict(
        a_dominates_b=a_above and not b_above,
        b_dominates_a=b_above and not a_above,
        curves_cross=a_above and b_above,
        identical=not a_above and not b_above,
    )


# ---------------------------------------------------------------------------
# Threshold superiority
# ---------------------------------------------------------------------------

def _merge_tradeoffs(tradeoffs: List[TradeoffInterval]) -> List[TradeoffInterval]:
    merged: List[TradeoffInterval] = []
    for tr in tradeoffs:
        if merged and merged[-1].tpr_leader == tr.tpr_leader:
            joined = merge_intervals([merged[-1].interval, tr.interval])
            if len(joined) == 1:
                merged[-1] = TradeoffInterval(joined[0], tr.tpr_leader)
                continue
        merged.append(tr)
    return merged


def threshold_superior(pa: ThresholdProfile, pb: ThresholdProfile,
                       labels: Tuple[str, str] = ("A", "B")) -> SuperiorityVerdict:
    """Evaluated exactly on the merged breakpoint refinement of both profiles"""
    tpr_a, fpr_a, tpr_b, fpr_b = common_refinement(pa.tpr, pa.fpr, pb.tpr, pb.fpr)

    a_never_worse = b_never_worse = True
    a_better_somewhere = b_better_somewhere = False
    tpr_a_higher = tpr_b_higher = fpr_a_higher = fpr_b_higher = False
    tradeoffs: List[TradeoffInterval] = []

    segments = zip(tpr_a.segments(), fpr_a.segments(), tpr_b.segments(), fpr_b.segments())
    for (segment, ta), (_, fa), (_, tb), (_, fb) in segments:
        if ta < tb or fa > fb:
            a_never_worse = False
        if tb < ta or fb > fa:
            b_never_worse = False
        if ta > tb or fa < fb:
            a_better_somewhere = True
        if tb > ta or fb < fa:
            b_better_somewhere = True

        tpr_a_higher |= ta > tb
        tpr_b_higher |= tb > ta
        fpr_a_higher |= fa > fb
        fpr_b_higher |= fb > fa

        if ta > tb and fa > fb:
            tradeoffs.append(TradeoffInterval(segment, labels[0]))
        elif ta < tb and fa < fb:
            tradeoffs.append(TradeoffInterval(segment, labels[1]))

    tradeoffs = _merge_tradeoffs(tradeoffs)
    return SuperiorityVerdict(
        a_superior=a_never_worse and a_better_somewhere,
        b_superior=b_never_worse and b_better_somewhere,
        disagreement_intervals=merge_intervals(tr.interval for tr in tradeoffs),
        tradeoffs=tradeoffs,
        tpr_curves_cross=tpr_a_higher and tpr_b_higher,
        fpr_curves_cross=fpr_a_higher and fpr_b_higher,
    )


# ---------------------------------------------------------------------------
# Acceptable ranges
# ---------------------------------------------------------------------------

def acceptable_ranges(p: ThresholdProfile, tpr_min: Number, fpr_max: Number,
                      model_id: str = "") -> AcceptableRange:
    tpr_min, fpr_max = as_decimal(tpr_min), as_decimal(fpr_max)
    intervals = merge_intervals(
        segment for segment, tpr, fpr in p.segments()
        if tpr >= tpr_min and fpr <= fpr_max
    )
    return AcceptableRange(model_id or p.name, intervals, total_width(intervals))


def _in_range_preference(pa: ThresholdProfile, pb: ThresholdProfile,
                         region: List[Interval], labels: Tuple[str, str]) -> Optional[str]:
    tpr_a, fpr_a, tpr_b, fpr_b = common_refinement(pa.tpr, pa.fpr, pb.tpr, pb.fpr)

    a_never_worse = b_never_worse = True
    a_better = b_better = False
    segments = zip(tpr_a.segments(), fpr_a.segments(), tpr_b.segments(), fpr_b.segments())
    for (segment, ta), (_, fa), (_, tb), (_, fb) in segments:
        if not intersect_interval_lists([segment], region):
            continue
        a_never_worse &= ta >= tb and fa <= fb
        b_never_worse &= tb >= ta and fb <= fa
        a_better |= ta > tb or fa < fb
        b_better |= tb > ta or fb < fa

    if a_never_worse and a_better:
        return labels[0]
    if b_never_worse and b_better:
        return labels[1]
    return None


def compare_in_acceptable_region(pa: ThresholdProfile, pb: ThresholdProfile,
                                 tpr_min: Number, fpr_max: Number,
                                 labels: Tuple[str, str] = ("A", "B")) -> AcceptableComparison:
    range_a = acceptable_ranges(pa, tpr_min, fpr_max, labels[0])
    range_b = acceptable_ranges(pb, tpr_min, fpr_max, labels[1])
    common = intersect_interval_lists(range_a.intervals, range_b.intervals)
    notes = []

    # a model acceptable over a wider range is less sensitive to the chosen threshold
    if range_a.total_width > range_b.total_width:
        width_preference = labels[0]
    elif range_b.total_width > range_a.total_width:
        width_preference = labels[1]
    else:
        width_preference = None
    if range_a.is_empty and range_b.is_empty:
        notes.append("neither model reaches the acceptable bounds at any threshold")

    if common:
        in_range_preference = _in_range_preference(pa, pb, common, labels)
        if in_range_preference is None:
            notes.append("within the common acceptable thresholds neither model is better on both rates")
    else:
        in_range_preference = None
        notes.append("no common acceptable threshold")

    # the two criteria are reported side by side, never folded into one winner
    if width_preference and in_range_preference and width_preference != in_range_preference:
        notes.append("width and in-range criteria disagree")

    return AcceptableComparison(range_a, range_b, common, width_preference,
                                in_range_preference, notes)


# ---------------------------------------------------------------------------
# Cost curves
# ---------------------------------------------------------------------------

def cost_curve(p: ThresholdProfile, c_fp: Number, c_fn: Number, ap: int, an: int) -> CostCurve:
    """cost(t) = c_FP * FPR(t) * AN + c_FN * (1 - TPR(t)) * AP, in cost units"""
    c_fp, c_fn = as_decimal(c_fp), as_decimal(c_fn)
    if c_fp < 0 or c_fn < 0:
        raise EvaluationError("costs must be non-negative")
    if c_fp == 0 and c_fn == 0:
        raise DegenerateCostError()
    if ap <= 0 or an <= 0:
        raise DegenerateClassError()

    values = tuple(
        c_fp * fpr * an + c_fn * (1 - tpr) * ap
        for tpr, fpr in zip(p.tpr.values, p.fpr.values)
    )
    cost = StepFunction(p.breakpoints, values)

    interior = list(cost.segments())
    minimum = min(value for _, value in interior)
    argmin = merge_intervals(segment for segment, value in interior if value == minimum)
    return CostCurve(cost, c_fp, c_fn, minimum, argmin)


def compare_cost_curves(ca: CostCurve, cb: CostCurve,
                        labels: Tuple[str, str] = ("A", "B")) -> CostComparison:
    if ca.minimum < cb.minimum:
        return CostComparison(labels[0], "lower minimum expected cost")
    if cb.minimum < ca.minimum:
        return CostComparison(labels[1], "lower minimum expected cost")
    if ca.argmin_width > cb.argmin_width:
        return CostComparison(labels[0], "same minimum cost over a wider threshold range")
    if cb.argmin_width > ca.argmin_width:
        return CostComparison(labels[1], "same minimum cost over a wider threshold range")
    return CostComparison(None, "equal minimum cost over equally wide threshold ranges")
