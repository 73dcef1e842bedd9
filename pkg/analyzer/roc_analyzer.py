#!/usr/bin/env python3
"""
ROC Analyzer - decorated (threshold-annotated) ROC curves, AUC and the
traditional interpretations of both.

Each ROC vertex remembers the interval of thresholds that produces it, so a
point of the curve can always be traced back to the thresholds behind it.
Vertices are listed from (1,1) (lowest thresholds) to (0,0) (highest).
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from analyzer.core_metrics import ScoredDataset, check_threshold
from analyzer.errors import EvaluationError
from analyzer.intervals import Interval, Number


class AucBand(Enum):
    """Traditional AUC interpretation bands"""
    WORSE_THAN_RANDOM = "worse-than-random"  # below 0.5, outside the classic table
    RANDOM = "random"
    POOR = "poor"
    ACCEPTABLE = "acceptable"
    EXCELLENT = "excellent"
    OUTSTANDING = "outstanding"


# Lower bounds (inclusive) of the bands above 0.5, checked from the top
AUC_BAND_FLOORS = (
    (0.9, AucBand.OUTSTANDING),
    (0.8, AucBand.EXCELLENT),
    (0.7, AucBand.ACCEPTABLE),
)


@dataclass(frozen=True)
class RocPoint:
    fpr: Fraction
    tpr: Fraction
    thresholds: Interval

    @property
    def t_low(self) -> Fraction:
        return self.thresholds.lo

    @property
    def t_high(self) -> Fraction:
        return self.thresholds.hi

    @property
    def achievable(self) -> bool:
        """False for a terminal point no threshold in [0,1] reaches"""
        return not self.thresholds.is_empty

    @property
    def xy(self) -> Tuple[Fraction, Fraction]:
        return self.fpr, self.tpr


@dataclass(frozen=True)
class RocCurve:
    points: Tuple[RocPoint, ...]
    area: Fraction

    @property
    def auc(self) -> float:
        return float(self.area)

    @property
    def interior(self) -> Tuple[RocPoint, ...]:
        return self.points[1:-1]


@dataclass(frozen=True)
class ThresholdMarker:
    t: Fraction
    point: RocPoint


def _trapezoid_area(points: Iterable[RocPoint]) -> Fraction:
    points = list(points)
    area = Fraction(0)
    for left, right in zip(points, points[1:]):
        area += (left.fpr - right.fpr) * (left.tpr + right.tpr) / 2
    return area


def build_roc(ds: ScoredDataset) -> RocCurve:
    ds.require_both_classes()
    scores = ds.distinct_scores

    # t below the smallest score: everything estimated positive
    points = [RocPoint(Fraction(1), Fraction(1), Interval(0, scores[0], True, False))]
    for j, s in enumerate(scores):
        tp, fp = ds.count_above(s)
        if j + 1 < len(scores):
            regime = Interval(s, scores[j + 1], True, False)
        else:
            regime = Interval(s, 1, True, True)
        points.append(RocPoint(Fraction(fp, ds.an), Fraction(tp, ds.ap), regime))

    return RocCurve(points=tuple(points), area=_trapezoid_area(points))


def auc(curve: RocCurve) -> float:
    return float(_trapezoid_area(curve.points))


def interpret_auc(a: float) -> AucBand:
    if not 0.0 <= a <= 1.0:
        raise EvaluationError(f"AUC {a!r} outside [0, 1]")
    if a < 0.5:
        return AucBand.WORSE_THAN_RANDOM
    if a == 0.5:
        return AucBand.RANDOM
    for floor, band in AUC_BAND_FLOORS:
        if a >= floor:
            return band
    return AucBand.POOR


def strictly_above_bisector(curve: RocCurve) -> bool:
    """
    Every interior vertex has TPR > FPR. Segments between such vertices (and
    towards the terminal points) are then strictly above y=x as well; a curve
    with no interior vertex is the bisector itself.
    """
    interior = curve.interior
    return bool(interior) and all(p.tpr > p.fpr for p in interior)


def no_points_below_bisector(curve: RocCurve) -> bool:
    """Vertices and interpolated segments never drop below y=x"""
    return all(p.tpr >= p.fpr for p in curve.points)


def locate_threshold(curve: RocCurve, t: Number) -> Optional[RocPoint]:
    t = check_threshold(t)
    for point in curve.points:
        if point.thresholds.contains(t):
            return point
    return None


def threshold_markers(curve: RocCurve, ts: Iterable[Number]) -> List[ThresholdMarker]:
    markers = []
    for t in ts:
        point = locate_threshold(curve, t)
        if point is not None:
            markers.append(ThresholdMarker(Fraction(t), point))
    return markers
