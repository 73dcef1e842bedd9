#!/usr/bin/env python3
"""
Report Builder - versioned JSON reports for single-model evaluations,
pairwise comparisons and scoring runs.

Every report is validated against report_schema.json before it is written.
Intervals always carry explicit endpoint markers: {"lo", "hi", "lo_closed",
"hi_closed"}.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import jsonschema
from jsonschema.exceptions import best_match

from analyzer.comparison_analyzer import (
    AcceptableRange,
    CostCurve,
    acceptable_ranges,
    compare_cost_curves,
    compare_in_acceptable_region,
    cost_curve,
    dominates,
    threshold_superior,
)
from analyzer.core_metrics import ScoredDataset
from analyzer.errors import EvaluationError, ReportSchemaError
from analyzer.intervals import Number
from analyzer.roc_analyzer import (
    RocCurve,
    build_roc,
    interpret_auc,
    no_points_below_bisector,
    strictly_above_bisector,
    threshold_markers,
)
from analyzer.threshold_profile import (
    ImbalanceReport,
    PerfectRange,
    RandomComparisonVerdict,
    ThresholdProfile,
    check_better_than_random,
    imbalance_diagnostics,
    perfect_range,
    profile,
)
from evaluator.settings import get_default_config

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
SCHEMA_PATH = Path(__file__).parent / "report_schema.json"


@lru_cache(maxsize=1)
def load_schema() -> Dict:
    with open(SCHEMA_PATH, 'r', encoding='utf-8') as f:
        return json.load(f)


def validate_report(report: Dict):
    validator = jsonschema.Draft7Validator(load_schema())
    error = best_match(validator.iter_errors(report))
    if error is not None:
        location = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise ReportSchemaError(f"report does not match schema at {location}: {error.message}")


def write_report(report: Dict, path: Path) -> Path:
    validate_report(report)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(report, f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info("report written to %s", path)
    return path


def _paired(first: Optional[Number], second: Optional[Number], names: str) -> bool:
    if (first is None) != (second is None):
        raise EvaluationError(f"{names} must be given together")
    return first is not None


@dataclass(frozen=True)
class ModelEvaluation:
    """Everything computed for one scored dataset"""
    dataset: ScoredDataset
    curve: RocCurve
    profile: ThresholdProfile
    verdict: RandomComparisonVerdict
    perfect: PerfectRange
    imbalance: ImbalanceReport
    marker_thresholds: Tuple[float, ...]
    acceptable: Optional[AcceptableRange] = None
    cost: Optional[CostCurve] = None

    @property
    def name(self) -> str:
        return self.dataset.name

    def to_dict(self) -> Dict:
        band = interpret_auc(self.curve.auc)
        markers = threshold_markers(self.curve, self.marker_thresholds)
        return {
            "dataset": {"name": self.dataset.name, **self.dataset.summary()},
            "roc": {
                "auc": self.curve.auc,
                "auc_exact": str(self.curve.area),
                "auc_band": band.value,
                "strictly_above_bisector": strictly_above_bisector(self.curve),
                "no_points_below_bisector": no_points_below_bisector(self.curve),
                "points": [
                    {"fpr": float(p.fpr), "tpr": float(p.tpr),
                     "thresholds": p.thresholds.to_dict(), "achievable": p.achievable}
                    for p in self.curve.points
                ],
            },
            "markers": [
                {"t": float(m.t), "fpr": float(m.point.fpr), "tpr": float(m.point.tpr),
                 "thresholds": m.point.thresholds.to_dict()}
                for m in markers
            ],
            "profile": {"tpr": self.profile.tpr.to_dict(), "fpr": self.profile.fpr.to_dict()},
            "better_than_random": {
                **self.verdict.to_dict(),
                # true verdicts that touch 1-t at isolated thresholds are still true
                "equality_points_tolerated": self.verdict.better_than_random
                and bool(self.verdict.boundary_contacts),
            },
            "perfect_range": self.perfect.to_dict(),
            "acceptable_ranges": None if self.acceptable is None else self.acceptable.to_dict(),
            "cost": None if self.cost is None else self.cost.to_dict(),
            "imbalance": self.imbalance.to_dict(),
        }


def evaluate_model(ds: ScoredDataset, config: Optional[Dict] = None,
                   tpr_min: Optional[Number] = None, fpr_max: Optional[Number] = None,
                   cost_fp: Optional[Number] = None, cost_fn: Optional[Number] = None) -> ModelEvaluation:
    config = config or get_default_config()
    curve = build_roc(ds)
    prof = profile(ds)
    imbalance = config['imbalance']

    acceptable = None
    if _paired(tpr_min, fpr_max, "--tpr-min and --fpr-max"):
        acceptable = acceptable_ranges(prof, tpr_min, fpr_max, ds.name)
    cost = None
    if _paired(cost_fp, cost_fn, "--cost-fp and --cost-fn"):
        cost = cost_curve(prof, cost_fp, cost_fn, ds.ap, ds.an)

    return ModelEvaluation(
        dataset=ds,
        curve=curve,
        profile=prof,
        verdict=check_better_than_random(prof),
        perfect=perfect_range(prof),
        imbalance=imbalance_diagnostics(prof, imbalance['extreme_low'], imbalance['extreme_high']),
        marker_thresholds=tuple(config['markers']['thresholds']),
        acceptable=acceptable,
        cost=cost,
    )


def build_evaluation_report(evaluation: ModelEvaluation) -> Dict:
    return {"schema_version": SCHEMA_VERSION, "kind": "evaluation", **evaluation.to_dict()}


def comparison_statement(dominance, superiority, labels: Tuple[str, str]) -> str:
    a, b = labels
    if dominance.a_dominates_b:
        leader, superior = a, superiority.a_superior
        first = f"{a} dominates {b}"
    elif dominance.b_dominates_a:
        leader, superior = b, superiority.b_superior
        first = f"{b} dominates {a}"
    else:
        first = "ROC curves cross" if dominance.curves_cross else "ROC curves are identical"
        if superiority.a_superior:
            return f"{first}; {a} is threshold-superior"
        if superiority.b_superior:
            return f"{first}; {b} is threshold-superior"
        return f"{first}; neither model is threshold-superior"
    qualifier = "is" if superior else "is NOT"
    return f"{first}; {leader} {qualifier} threshold-superior"


def build_comparison_report(ev_a: ModelEvaluation, ev_b: ModelEvaluation,
                            tpr_min: Optional[Number] = None, fpr_max: Optional[Number] = None,
                            labels: Tuple[str, str] = ("A", "B")) -> Dict:
    dominance = dominates(ev_a.curve, ev_b.curve)
    superiority = threshold_superior(ev_a.profile, ev_b.profile, labels)

    comparison = {
        "labels": list(labels),
        "statement": comparison_statement(dominance, superiority, labels),
        "auc_gap": abs(ev_a.curve.auc - ev_b.curve.auc),
        "dominance": dominance.to_dict(),
        "superiority": superiority.to_dict(),
        "acceptable_region": None,
        "cost": None,
    }
    if tpr_min is not None and fpr_max is not None:
        comparison["acceptable_region"] = compare_in_acceptable_region(
            ev_a.profile, ev_b.profile, tpr_min, fpr_max, labels).to_dict()
    if ev_a.cost is not None and ev_b.cost is not None:
        comparison["cost"] = compare_cost_curves(ev_a.cost, ev_b.cost, labels).to_dict()

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "comparison",
        "models": {labels[0]: ev_a.to_dict(), labels[1]: ev_b.to_dict()},
        "comparison": comparison,
    }


def build_scoring_report(dataset_name: str, n: int, features: Sequence[str], loocv: Dict,
                         full_model: Optional[Dict], scores_file: str,
                         evaluation: Optional[ModelEvaluation] = None) -> Dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "scoring",
        "dataset": {"name": dataset_name, "n": n},
        "features": list(features),
        "loocv": loocv,
        "full_model": full_model,
        "scores_file": scores_file,
        "evaluation": None if evaluation is None else evaluation.to_dict(),
    }


def summary_lines(evaluation: ModelEvaluation) -> List[str]:
    """Console summary in the banner style of the CLI"""
    verdict = evaluation.verdict
    ok = ", ".join(str(iv) for iv in verdict.ok_ranges) or "none"
    lines = [
        f"  Dataset: {evaluation.name}  (n={evaluation.dataset.n}, "
        f"AP={evaluation.dataset.ap}, AN={evaluation.dataset.an})",
        f"  AUC: {evaluation.curve.auc:.4f} ({interpret_auc(evaluation.curve.auc).value})",
        f"  Strictly above bisector: {strictly_above_bisector(evaluation.curve)}",
        f"  Better than random for every t: {verdict.better_than_random}",
        f"  Better-than-random thresholds: {ok}",
        f"  Perfect range: {evaluation.perfect.interval if not evaluation.perfect.is_empty else 'none'}",
    ]
    if evaluation.imbalance.concentrated:
        lines.append(f"  WARNING: ROC breakpoints concentrated at "
                     f"{evaluation.imbalance.dominant_side} thresholds")
    return lines
