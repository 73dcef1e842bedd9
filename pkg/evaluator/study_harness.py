#!/usr/bin/env python3
"""
Study Harness - batch evaluation of a model collection.

For every dataset, one model per k-combination of the configured features
and per scorer. Every model gets its ROC curve, AUC, threshold profile and
better-than-random verdict; every pair of models on the same dataset gets
ROC dominance and threshold superiority. Aggregate counts go to a JSON
report, per-model and per-pair records to CSV, and the aggregates are
audited against a recount of those CSV files.

Work is spread with joblib; results come back in submission order, so the
output does not depend on the number of workers.
"""

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import yaml
from joblib import Parallel, delayed

from analyzer.comparison_analyzer import dominates, threshold_superior
from analyzer.core_metrics import ScoredDataset
from analyzer.errors import DegenerateClassError, EvaluationError, StudyConfigError
from analyzer.logistic_scorer import FeatureDataset, loocv_scores
from analyzer.roc_analyzer import (
    RocCurve,
    build_roc,
    no_points_below_bisector,
    strictly_above_bisector,
)
from analyzer.threshold_profile import ThresholdProfile, check_better_than_random, profile
from evaluator.generate_summary import audit_study
from evaluator.ingest import feature_columns, read_features, read_scores
from evaluator.report_builder import SCHEMA_VERSION, write_report
from evaluator.settings import get_default_config

logger = logging.getLogger(__name__)

SCORER_KINDS = ("builtin", "external")
HALF = Fraction(1, 2)
AUC_GOOD = Fraction(4, 5)

MODEL_COLUMNS = [
    "model_id", "dataset", "scorer", "features", "n", "AP", "AN",
    "auc", "auc_exact", "auc_gt_half", "no_points_below_bisector",
    "strictly_above_bisector", "auc_ge_08", "condition1",
    "fallback_folds", "separation_folds",
]

PAIR_COLUMNS = [
    "dataset", "model_a", "model_b", "auc_a", "auc_b", "auc_gap", "auc_gap_exact",
    "a_dominates_b", "b_dominates_a", "curves_cross", "a_superior", "b_superior",
    "dominance", "condition2", "condition2_without_dominance",
]


@dataclass(frozen=True)
class ScorerSpec:
    name: str
    kind: str = "builtin"
    directory: Optional[Path] = None

    def to_dict(self) -> Dict:
        return {"name": self.name, "kind": self.kind,
                "directory": None if self.directory is None else str(self.directory)}


@dataclass(frozen=True)
class ModelSpec:
    dataset: str
    features: Tuple[str, ...]
    scorer: ScorerSpec

    @property
    def model_id(self) -> str:
        return f"{self.dataset}:{self.scorer.name}:{'+'.join(self.features)}"

    def external_score_file(self) -> Path:
        """<directory>/<dataset>__<f1>+<f2>+...csv"""
        return self.scorer.directory / f"{self.dataset}__{'+'.join(self.features)}.csv"


@dataclass
class StudyConfig:
    datasets: List[Path]
    scorers: List[ScorerSpec]
    output_dir: Path
    features: Optional[List[str]] = None
    combination_size: int = 3
    workers: int = 1
    backend: str = "loky"
    auc_gap_thresholds: List[float] = field(default_factory=lambda: [0.2])
    ridge: float = 0.0
    label_column: str = "label"
    max_iterations: int = 100
    tolerance: float = 1e-8
    separation_bound: float = 20.0

    def __post_init__(self):
        if self.combination_size < 1:
            raise StudyConfigError("combination_size must be at least 1")
        if not self.datasets:
            raise StudyConfigError("study needs at least one dataset")
        if not self.scorers:
            raise StudyConfigError("study needs at least one scorer")
        if self.workers < 1:
            raise StudyConfigError("workers must be at least 1")
        for scorer in self.scorers:
            if scorer.kind not in SCORER_KINDS:
                raise StudyConfigError(f"scorer '{scorer.name}': unknown kind '{scorer.kind}'")
            if scorer.kind == "external" and scorer.directory is None:
                raise StudyConfigError(f"external scorer '{scorer.name}' needs a directory")
        if len({s.name for s in self.scorers}) != len(self.scorers):
            raise StudyConfigError("scorer names must be unique")
        if self.features is not None and len(set(self.features)) != len(self.features):
            raise StudyConfigError("features must not repeat")

    @classmethod
    def from_mapping(cls, data: Dict, base_dir: Path, config: Optional[Dict] = None) -> 'StudyConfig':
        defaults = (config or get_default_config())
        study_defaults = defaults['study']
        scorer_defaults = defaults['scorer']
        if not isinstance(data, dict):
            raise StudyConfigError("study configuration must be a mapping")

        datasets: List[Path] = []
        for entry in data.get('datasets') or []:
            path = base_dir / entry
            if path.is_dir():
                datasets.extend(sorted(path.glob("*.csv")))
            else:
                datasets.append(path)

        scorers = []
        for raw in data.get('scorers') or [{'name': 'blr', 'kind': 'builtin'}]:
            if not isinstance(raw, dict) or 'name' not in raw:
                raise StudyConfigError("every scorer needs a name")
            directory = raw.get('directory')
            scorers.append(ScorerSpec(
                name=str(raw['name']),
                kind=str(raw.get('kind', 'builtin')),
                directory=None if directory is None else base_dir / directory,
            ))

        features = data.get('features')
        try:
            return cls(
                datasets=datasets,
                scorers=scorers,
                output_dir=base_dir / data.get('output_dir', 'results/study'),
                features=None if features is None else [str(f) for f in features],
                combination_size=int(data.get('combination_size', study_defaults['combination_size'])),
                workers=int(data.get('workers', study_defaults['workers'])),
                backend=str(data.get('backend', 'loky')),
                auc_gap_thresholds=[float(g) for g in
                                    data.get('auc_gap_thresholds', study_defaults['auc_gap_thresholds'])],
                ridge=float(data.get('ridge', scorer_defaults['ridge'])),
                label_column=str(data.get('label_column', study_defaults['label_column'])),
                max_iterations=int(scorer_defaults['max_iterations']),
                tolerance=float(scorer_defaults['tolerance']),
                separation_bound=float(scorer_defaults['separation_bound']),
            )
        except StudyConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise StudyConfigError(f"invalid study configuration: {e}")

    @classmethod
    def from_file(cls, path, config: Optional[Dict] = None) -> 'StudyConfig':
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except OSError as e:
            raise StudyConfigError(f"cannot read study configuration {path}: {e}")
        except yaml.YAMLError as e:
            raise StudyConfigError(f"study configuration {path} is not valid YAML: {e}")
        return cls.from_mapping(data, path.parent, config)

    def to_dict(self) -> Dict:
        # workers and backend are left out: they never change the results
        return {
            "datasets": [str(p) for p in self.datasets],
            "features": self.features,
            "combination_size": self.combination_size,
            "scorers": [s.to_dict() for s in self.scorers],
            "auc_gap_thresholds": list(self.auc_gap_thresholds),
            "ridge": self.ridge,
            "label_column": self.label_column,
        }


@dataclass(frozen=True)
class ModelOutcome:
    spec: ModelSpec
    record: Dict
    curve: Optional[RocCurve] = None
    profile: Optional[ThresholdProfile] = None

    @property
    def success(self) -> bool:
        return self.record.get('success', False)


@dataclass
class StudyReport:
    config: Dict
    dataset_stats: Dict
    model_counts: Dict
    pair_counts: Dict
    model_records: List[Dict]
    pair_records: List[Dict]
    failures: List[Dict]
    audit: Dict = field(default_factory=lambda: {"consistent": True, "mismatches": []})

    @property
    def total_models(self) -> int:
        return self.model_counts['total_models']

    def nesting_violations(self) -> List[str]:
        m, p = self.model_counts, self.pair_counts
        problems = []
        chain = [("count_condition1_holds", m['count_condition1_holds']),
                 ("count_strictly_above", m['count_strictly_above']),
                 ("count_no_points_below_bisector", m['count_no_points_below_bisector']),
                 ("total_models", m['total_models'])]
        for (lo_name, lo), (hi_name, hi) in zip(chain, chain[1:]):
            if lo > hi:
                problems.append(f"{lo_name} ({lo}) > {hi_name} ({hi})")
        if not p['condition2_count'] <= p['dominance_count'] <= p['total_comparisons']:
            problems.append("condition2_count <= dominance_count <= total_comparisons violated")
        return problems

    def to_dict(self) -> Dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "study",
            "config": self.config,
            "datasets": self.dataset_stats,
            "models": self.model_counts,
            "pairs": self.pair_counts,
            "failures": self.failures,
            "audit": self.audit,
        }


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _dataset_features(cfg: StudyConfig, path: Path) -> List[str]:
    if cfg.features is not None:
        return list(cfg.features)
    return feature_columns(path, cfg.label_column)


def _models_for_dataset(cfg: StudyConfig, dataset: str, features: Sequence[str]) -> List[ModelSpec]:
    if cfg.combination_size > len(features):
        raise StudyConfigError(
            f"combination size {cfg.combination_size} exceeds the {len(features)} "
            f"feature(s) of dataset '{dataset}'"
        )
    return [
        ModelSpec(dataset, combo, scorer)
        for combo in itertools.combinations(features, cfg.combination_size)
        for scorer in cfg.scorers
    ]


def enumerate_models(cfg: StudyConfig) -> List[ModelSpec]:
    """C(m, k) x datasets x scorers models, ordered by dataset then combination"""
    specs: List[ModelSpec] = []
    for path in cfg.datasets:
        specs.extend(_models_for_dataset(cfg, path.stem, _dataset_features(cfg, path)))
    return specs


# ---------------------------------------------------------------------------
# Per-model and per-pair work
# ---------------------------------------------------------------------------

def _score_model(spec: ModelSpec, dataset: FeatureDataset, cfg: StudyConfig) -> Tuple[ScoredDataset, Dict]:
    if spec.scorer.kind == "builtin":
        result = loocv_scores(dataset.select(spec.features),
                              max_iterations=cfg.max_iterations,
                              tolerance=cfg.tolerance,
                              separation_bound=cfg.separation_bound,
                              ridge=cfg.ridge,
                              name=spec.model_id)
        return result.scores, {"fallback_folds": len(result.fallback_folds),
                               "separation_folds": len(result.separation_folds)}

    scores = read_scores(spec.external_score_file(), spec.model_id)
    if scores.n != dataset.n or scores.labels != dataset.labels.tolist():
        raise EvaluationError(f"{spec.external_score_file()}: labels do not match dataset '{spec.dataset}'")
    return scores, {"fallback_folds": 0, "separation_folds": 0}


def evaluate_spec(spec: ModelSpec, dataset: FeatureDataset, cfg: StudyConfig) -> ModelOutcome:
    record = {"model_id": spec.model_id, "dataset": spec.dataset,
              "scorer": spec.scorer.name, "features": "+".join(spec.features)}
    try:
        scores, scoring_info = _score_model(spec, dataset, cfg)
        curve = build_roc(scores)
        prof = profile(scores)
        verdict = check_better_than_random(prof)
    except EvaluationError as e:
        logger.warning("model %s failed: %s", spec.model_id, e)
        return ModelOutcome(spec, {**record, "success": False, "error": str(e)})

    record.update({
        "success": True,
        "n": scores.n,
        "AP": scores.ap,
        "AN": scores.an,
        "auc": curve.auc,
        "auc_exact": str(curve.area),
        "auc_gt_half": curve.area > HALF,
        "no_points_below_bisector": no_points_below_bisector(curve),
        "strictly_above_bisector": strictly_above_bisector(curve),
        "auc_ge_08": curve.area >= AUC_GOOD,
        "condition1": verdict.better_than_random,
        **scoring_info,
    })
    return ModelOutcome(spec, record, curve, prof)


def pairwise_report(models: Sequence[Tuple[str, RocCurve, ThresholdProfile]],
                    dataset: str = "") -> List[Dict]:
    """One record per unordered pair, in model order"""
    records = []
    for (id_a, curve_a, prof_a), (id_b, curve_b, prof_b) in itertools.combinations(models, 2):
        dominance = dominates(curve_a, curve_b)
        superiority = threshold_superior(prof_a, prof_b)
        either_dominates = dominance.a_dominates_b or dominance.b_dominates_a
        dominant_is_superior = ((dominance.a_dominates_b and superiority.a_superior)
                                or (dominance.b_dominates_a and superiority.b_superior))
        gap = abs(curve_a.area - curve_b.area)
        records.append({
            "dataset": dataset,
            "model_a": id_a,
            "model_b": id_b,
            "auc_a": curve_a.auc,
            "auc_b": curve_b.auc,
            "auc_gap": float(gap),
            "auc_gap_exact": str(gap),
            "a_dominates_b": dominance.a_dominates_b,
            "b_dominates_a": dominance.b_dominates_a,
            "curves_cross": dominance.curves_cross,
            "a_superior": superiority.a_superior,
            "b_superior": superiority.b_superior,
            "dominance": either_dominates,
            "condition2": dominant_is_superior,
            # rank-equivalent models: same curve, different score values
            "condition2_without_dominance": (superiority.a_superior or superiority.b_superior)
            and not either_dominates,
        })
    return records


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def gap_bound(gap: float) -> Fraction:
    """Decimal value of a configured AUC-gap threshold, e.g. 0.2 -> 1/5"""
    return Fraction(str(gap))


def count_models(records: Sequence[Dict]) -> Dict:
    ok = [r for r in records if r.get('success')]
    holds = [r for r in ok if r['condition1']]
    return {
        "total_models": len(ok),
        "count_auc_gt_half": sum(1 for r in ok if r['auc_gt_half']),
        "count_no_points_below_bisector": sum(1 for r in ok if r['no_points_below_bisector']),
        "count_strictly_above": sum(1 for r in ok if r['strictly_above_bisector']),
        "count_auc_ge_08": sum(1 for r in ok if r['auc_ge_08']),
        "count_condition1_holds": len(holds),
        "condition1_within": {
            "auc_gt_half": sum(1 for r in holds if r['auc_gt_half']),
            "no_points_below_bisector": sum(1 for r in holds if r['no_points_below_bisector']),
            "strictly_above": sum(1 for r in holds if r['strictly_above_bisector']),
            "auc_ge_08": sum(1 for r in holds if r['auc_ge_08']),
            "strictly_above_and_auc_ge_08": sum(
                1 for r in holds if r['strictly_above_bisector'] and r['auc_ge_08']),
        },
    }


def count_pairs(records: Sequence[Dict], gaps: Sequence[float]) -> Dict:
    by_gap = []
    for gap in gaps:
        bound = gap_bound(gap)
        wide = [r for r in records if Fraction(r['auc_gap_exact']) > bound]
        by_gap.append({
            "gap": gap,
            "dominance_count": sum(1 for r in wide if r['dominance']),
            "condition2_count": sum(1 for r in wide if r['condition2']),
        })
    return {
        "total_comparisons": len(records),
        "dominance_count": sum(1 for r in records if r['dominance']),
        "condition2_count": sum(1 for r in records if r['condition2']),
        "condition2_without_dominance": sum(1 for r in records if r['condition2_without_dominance']),
        "by_auc_gap": by_gap,
    }


def _describe(values: Sequence[float]) -> Dict:
    if not values:
        return {"mean": None, "min": None, "max": None}
    return {"mean": math.fsum(values) / len(values), "min": min(values), "max": max(values)}


def dataset_statistics(datasets: Sequence[FeatureDataset]) -> Dict:
    return {
        "count": len(datasets),
        "modules": _describe([float(ds.n) for ds in datasets]),
        "percent_faulty": _describe([100.0 * ds.ap / ds.n for ds in datasets]),
    }


# ---------------------------------------------------------------------------
# Records on disk
# ---------------------------------------------------------------------------

def _csv_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def write_records(records: Sequence[Dict], columns: Sequence[str], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for record in records:
            writer.writerow([_csv_value(record.get(c)) for c in columns])
    return path


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def _load_dataset(cfg: StudyConfig, path: Path) -> FeatureDataset:
    ds = read_features(path, cfg.label_column, features=cfg.features, name=path.stem)
    if ds.ap == 0 or ds.ap == ds.n:
        raise DegenerateClassError()
    return ds


def run_study(cfg: StudyConfig, config: Optional[Dict] = None) -> StudyReport:
    config = config or get_default_config()
    output = config['output']
    failures: List[Dict] = []
    loaded: List[FeatureDataset] = []
    work: List[Tuple[ModelSpec, FeatureDataset]] = []

    for path in cfg.datasets:
        try:
            ds = _load_dataset(cfg, path)
        except EvaluationError as e:
            logger.warning("dataset %s skipped: %s", path.stem, e)
            failures.append({"success": False, "dataset": path.stem, "error": str(e)})
            continue
        specs = _models_for_dataset(cfg, ds.name, ds.feature_names)
        loaded.append(ds)
        work.extend((spec, ds) for spec in specs)

    logger.info("evaluating %d model(s) over %d dataset(s)", len(work), len(loaded))
    outcomes: List[ModelOutcome] = Parallel(n_jobs=cfg.workers, backend=cfg.backend)(
        delayed(evaluate_spec)(spec, ds, cfg) for spec, ds in work
    )
    for outcome in outcomes:
        if not outcome.success:
            failures.append({"success": False, "dataset": outcome.spec.dataset,
                             "model_id": outcome.spec.model_id, "error": outcome.record['error']})

    per_dataset: Dict[str, List[Tuple[str, RocCurve, ThresholdProfile]]] = {}
    for outcome in outcomes:
        if outcome.success:
            per_dataset.setdefault(outcome.spec.dataset, []).append(
                (outcome.spec.model_id, outcome.curve, outcome.profile))

    pair_batches = Parallel(n_jobs=cfg.workers, backend=cfg.backend)(
        delayed(pairwise_report)(models, name) for name, models in per_dataset.items()
    )
    pair_records = [record for batch in pair_batches for record in batch]
    model_records = [o.record for o in outcomes if o.success]

    report = StudyReport(
        config=cfg.to_dict(),
        dataset_stats=dataset_statistics(loaded),
        model_counts=count_models(model_records),
        pair_counts=count_pairs(pair_records, cfg.auc_gap_thresholds),
        model_records=model_records,
        pair_records=pair_records,
        failures=failures,
    )

    out_dir = Path(cfg.output_dir)
    models_csv = write_records(model_records, MODEL_COLUMNS, out_dir / output['model_records'])
    pairs_csv = write_records(pair_records, PAIR_COLUMNS, out_dir / output['pair_records'])

    mismatches = report.nesting_violations()
    mismatches.extend(audit_study(report, models_csv, pairs_csv, cfg.auc_gap_thresholds))
    report.audit = {"consistent": not mismatches, "mismatches": mismatches}
    if mismatches:
        logger.error("study self-audit failed: %s", "; ".join(mismatches))

    write_report(report.to_dict(), out_dir / output['study_report'])
    return report
