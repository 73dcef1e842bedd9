#!/usr/bin/env python3
"""
Core Metrics - confusion matrices, derived rates and the random-model baseline.

Classification rule used everywhere in this project: a module is estimated
positive (faulty) iff its score is strictly above the threshold t. Ties at
the threshold are estimated negative, so t=0 marks positive every module with
a non-zero score and t=1 marks every module negative.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple

from analyzer.errors import (
    DegenerateClassError,
    EmptyDatasetError,
    EvaluationError,
    ThresholdRangeError,
)
from analyzer.intervals import Number, as_fraction


def check_threshold(t: Number) -> Fraction:
    """Exact value of t, rejecting anything outside [0, 1]"""
    t = as_fraction(t)
    if t < 0 or t > 1:
        raise ThresholdRangeError()
    return t


@dataclass(frozen=True)
class LabeledScore:
    score: float
    label: bool  # True = faulty (positive)

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise EvaluationError(f"score {self.score!r} outside [0, 1]")
        object.__setattr__(self, 'label', bool(self.label))


@dataclass(frozen=True)
class ScoredDataset:
    items: Tuple[LabeledScore, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'items', tuple(self.items))
        if not self.items:
            raise EmptyDatasetError()

    @classmethod
    def from_pairs(cls, scores: Iterable[float], labels: Iterable, name: str = "") -> 'ScoredDataset':
        return cls(tuple(LabeledScore(float(s), bool(l)) for s, l in zip(scores, labels)), name)

    @property
    def n(self) -> int:
        return len(self.items)

    @cached_property
    def ap(self) -> int:
        return sum(1 for item in self.items if item.label)

    @property
    def an(self) -> int:
        return self.n - self.ap

    @property
    def prevalence(self) -> Fraction:
        return Fraction(self.ap, self.n)

    @property
    def scores(self) -> List[float]:
        return [item.score for item in self.items]

    @property
    def labels(self) -> List[bool]:
        return [item.label for item in self.items]

    @cached_property
    def sorted_positive_scores(self) -> List[Fraction]:
        return sorted(Fraction(i.score) for i in self.items if i.label)

    @cached_property
    def sorted_negative_scores(self) -> List[Fraction]:
        return sorted(Fraction(i.score) for i in self.items if not i.label)

    @cached_property
    def distinct_scores(self) -> List[Fraction]:
        return sorted({Fraction(i.score) for i in self.items})

    def count_above(self, t: Fraction) -> Tuple[int, int]:
        """(positives, negatives) with score strictly greater than t"""
        pos = self.sorted_positive_scores
        neg = self.sorted_negative_scores
        return len(pos) - bisect_right(pos, t), len(neg) - bisect_right(neg, t)

    def require_both_classes(self):
        if self.ap == 0 or self.an == 0:
            raise DegenerateClassError()

    def summary(self) -> Dict:
        return {
            "n": self.n,
            "AP": self.ap,
            "AN": self.an,
            "prevalence": float(self.prevalence),
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise EvaluationError("confusion matrix counts must be non-negative")

    @property
    def ap(self) -> int:
        return self.tp + self.fn

    @property
    def an(self) -> int:
        return self.fp + self.tn

    def to_dict(self) -> Dict:
        return {"TP": self.tp, "FP": self.fp, "TN": self.tn, "FN": self.fn,
                "AP": self.ap, "AN": self.an}


@dataclass(frozen=True)
class Rates:
    tpr: Fraction
    fpr: Fraction
    tnr: Fraction
    ppv: Optional[Fraction] = None

    def to_dict(self) -> Dict:
        return {
            "TPR": float(self.tpr),
            "FPR": float(self.fpr),
            "TNR": float(self.tnr),
            "PPV": None if self.ppv is None else float(self.ppv),
        }


@dataclass(frozen=True)
class RandomExpectation:
    t: Fraction
    tp_rnd: Fraction
    fp_rnd: Fraction
    tn_rnd: Fraction
    fn_rnd: Fraction
    tpr_rnd: Fraction
    fpr_rnd: Fraction

    @property
    def rates(self) -> Rates:
        return Rates(tpr=self.tpr_rnd, fpr=self.fpr_rnd, tnr=1 - self.fpr_rnd)


def confusion_at_threshold(ds: ScoredDataset, t: Number) -> ConfusionMatrix:
    if not ds.items:
        raise EmptyDatasetError()
    t = check_threshold(t)
    tp, fp = ds.count_above(t)
    return ConfusionMatrix(tp=tp, fp=fp, tn=ds.an - fp, fn=ds.ap - tp)


def rates(cm: ConfusionMatrix) -> Rates:
    if cm.ap == 0 or cm.an == 0:
        raise DegenerateClassError()
    fpr = Fraction(cm.fp, cm.an)
    predicted_positive = cm.tp + cm.fp
    ppv = Fraction(cm.tp, predicted_positive) if predicted_positive else None
    return Rates(tpr=Fraction(cm.tp, cm.ap), fpr=fpr, tnr=1 - fpr, ppv=ppv)


def random_expectation(t: Number, ap: int, an: int) -> RandomExpectation:
    t = check_threshold(t)
    if ap < 0 or an < 0:
        raise EvaluationError("class counts must be non-negative")
    return RandomExpectation(
        t=t,
        tp_rnd=(1 - t) * ap,
        fp_rnd=(1 - t) * an,
        tn_rnd=t * an,
        fn_rnd=t * ap,
        tpr_rnd=1 - t,
        fpr_rnd=1 - t,
    )


def rates_at_threshold(ds: ScoredDataset, t: Number) -> Rates:
    return rates(confusion_at_threshold(ds, t))

