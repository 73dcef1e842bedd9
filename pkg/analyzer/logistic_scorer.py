#!/usr/bin/env python3
"""
Logistic Scorer - built-in binary logistic regression with leave-one-out
cross-validation, producing fault-proneness scores from feature datasets.

Fitting is plain maximum likelihood by Newton / IRLS steps with step-halving,
so the log-likelihood never decreases between iterations. A coefficient whose
magnitude exceeds the separation bound means the data is (quasi-)separable
and there is no finite MLE; the fit stops and says so.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analyzer.core_metrics import ScoredDataset
from analyzer.errors import (
    CollinearFeaturesError,
    DegenerateClassError,
    EmptyDatasetError,
    EvaluationError,
    ScorerError,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 100
DEFAULT_TOLERANCE = 1e-8
DEFAULT_SEPARATION_BOUND = 20.0
MAX_STEP_HALVINGS = 30


@dataclass(frozen=True, eq=False)
class FeatureDataset:
    rows: np.ndarray  # shape (n, m)
    labels: np.ndarray  # shape (n,), bool
    feature_names: Tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        labels = np.asarray(self.labels, dtype=bool)
        if rows.size == 0 or labels.size == 0:
            raise EmptyDatasetError()
        if rows.ndim == 1:
            rows = rows.reshape(-1, 1)
        if rows.ndim != 2 or rows.shape[0] != labels.shape[0]:
            raise EvaluationError("feature rows and labels must have matching lengths")
        if rows.shape[1] != len(self.feature_names):
            raise EvaluationError(
                f"{rows.shape[1]} feature columns but {len(self.feature_names)} feature names"
            )
        if not np.all(np.isfinite(rows)):
            raise EvaluationError("feature values must be finite")
        object.__setattr__(self, 'rows', rows)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'feature_names', tuple(self.feature_names))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def m(self) -> int:
        return self.rows.shape[1]

    @property
    def ap(self) -> int:
        return int(self.labels.sum())

    def select(self, features: Sequence[str]) -> 'FeatureDataset':
        """Dataset restricted to the given feature columns, in the given order"""
        missing = [f for f in features if f not in self.feature_names]
        if missing:
            raise EvaluationError(f"unknown feature(s): {', '.join(missing)}")
        columns = [self.feature_names.index(f) for f in features]
        return FeatureDataset(self.rows[:, columns], self.labels, tuple(features), self.name)


@dataclass(frozen=True, eq=False)
class LogisticModel:
    coefficients: np.ndarray  # intercept first, then one weight per feature
    converged: bool
    iterations: int
    separation: bool = False
    log_likelihood: float = float('nan')
    ridge: float = 0.0
    feature_names: Tuple[str, ...] = ()
    # penalised log-likelihood at the start and after every accepted step
    log_likelihood_trace: Tuple[float, ...] = ()

    @property
    def intercept(self) -> float:
        return float(self.coefficients[0])

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients[1:]

    def predict(self, x) -> np.ndarray:
        """Scores for one feature vector or a matrix of them"""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return _sigmoid(self.intercept + x @ self.weights)

    def to_dict(self) -> Dict:
        return {
            "intercept": self.intercept,
            "weights": dict(zip(self.feature_names, (float(w) for w in self.weights))),
            "converged": self.converged,
            "iterations": self.iterations,
            "separation": self.separation,
            "log_likelihood": self.log_likelihood,
            "ridge": self.ridge,
        }


@dataclass(frozen=True)
class LoocvResult:
    scores: ScoredDataset
    fallback_folds: List[Tuple[int, str]] = field(default_factory=list)
    separation_folds: List[int] = field(default_factory=list)
    non_converged_folds: List[int] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "fallback_folds": [{"row": i, "reason": reason} for i, reason in self.fallback_folds],
            "separation_folds": list(self.separation_folds),
            "non_converged_folds": list(self.non_converged_folds),
        }


def _sigmoid(eta: np.ndarray) -> np.ndarray:
    # exp(-log(1 + exp(-eta))) does not overflow for large |eta|
    return np.exp(-np.logaddexp(0.0, -eta))


def _design(rows: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(rows.shape[0]), rows])


def _penalised_log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray,
                              ridge: float) -> float:
    eta = X @ beta
    ll = float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    return ll - 0.5 * ridge * float(beta[1:] @ beta[1:])


def log_likelihood_gradient(ds: FeatureDataset, coefficients: np.ndarray,
                            ridge: float = 0.0) -> np.ndarray:
    """Gradient of the (penalised) log-likelihood; zero at the MLE"""
    X = _design(ds.rows)
    y = ds.labels.astype(float)
    gradient = X.T @ (y - _sigmoid(X @ coefficients))
    gradient[1:] -= ridge * coefficients[1:]
    return gradient


def fit_logistic(ds: FeatureDataset,
                 max_iterations: int = DEFAULT_MAX_ITERATIONS,
                 tolerance: float = DEFAULT_TOLERANCE,
                 separation_bound: float = DEFAULT_SEPARATION_BOUND,
                 ridge: float = 0.0) -> LogisticModel:
    if ds.n < ds.m + 2:
        raise ScorerError(f"need at least {ds.m + 2} rows to fit {ds.m} feature(s), got {ds.n}")
    if ds.ap == 0 or ds.ap == ds.n:
        raise DegenerateClassError()

    X = _design(ds.rows)
    y = ds.labels.astype(float)
    if ridge == 0.0 and np.linalg.matrix_rank(X) < X.shape[1]:
        raise CollinearFeaturesError()

    penalty = np.eye(X.shape[1]) * ridge
    penalty[0, 0] = 0.0  # the intercept is never shrunk

    beta = np.zeros(X.shape[1])
    ll = _penalised_log_likelihood(X, y, beta, ridge)
    trace = [ll]
    converged = separation = False
    iteration = 0

    for iteration in range(1, max_iterations + 1):
        p = _sigmoid(X @ beta)
        w = p * (1.0 - p)
        gradient = X.T @ (y - p) - penalty @ beta
        hessian = X.T @ (w[:, None] * X) + penalty
        try:
            step = np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, gradient, rcond=None)[0]

        scale = 1.0
        for _ in range(MAX_STEP_HALVINGS):
            candidate = beta + scale * step
            candidate_ll = _penalised_log_likelihood(X, y, candidate, ridge)
            if candidate_ll >= ll:
                break
            scale /= 2.0
        else:
            # no uphill step left at machine precision
            converged = True
            logger.debug("IRLS stalled at iteration %d (ll=%.12g)", iteration, ll)
            break

        change = float(np.max(np.abs(candidate - beta)))
        beta, ll = candidate, candidate_ll
        trace.append(ll)
        logger.debug("IRLS iteration %d: ll=%.12g max change=%.3g step scale=%g",
                     iteration, ll, change, scale)

        if np.max(np.abs(beta)) > separation_bound:
            separation = True
            logger.debug("coefficient magnitude above %g: data is (quasi-)separable",
                         separation_bound)
            break
        if change < tolerance:
            converged = True
            break

    return LogisticModel(
        coefficients=beta,
        converged=converged and not separation,
        iterations=iteration,
        separation=separation,
        log_likelihood=_penalised_log_likelihood(X, y, beta, 0.0),
        ridge=ridge,
        feature_names=ds.feature_names,
        log_likelihood_trace=tuple(trace),
    )


def loocv_scores(ds: FeatureDataset,
                 max_iterations: int = DEFAULT_MAX_ITERATIONS,
                 tolerance: float = DEFAULT_TOLERANCE,
                 separation_bound: float = DEFAULT_SEPARATION_BOUND,
                 ridge: float = 0.0,
                 name: Optional[str] = None) -> LoocvResult:
    """
    Leave-one-out scores: row i is scored by a model fitted on every other
    row. Folds whose training data has a single class or a rank-deficient
    design are scored with the intercept-only fit, i.e. the fold prevalence.
    """
    if ds.n < ds.m + 3:
        raise ScorerError(f"leave-one-out needs at least {ds.m + 3} rows for {ds.m} feature(s)")

    scores: List[float] = []
    fallback_folds: List[Tuple[int, str]] = []
    separation_folds: List[int] = []
    non_converged_folds: List[int] = []

    for i in range(ds.n):
        keep = np.arange(ds.n) != i
        train = FeatureDataset(ds.rows[keep], ds.labels[keep], ds.feature_names, ds.name)
        fold_prevalence = train.ap / train.n

        if train.ap in (0, train.n):
            fallback_folds.append((i, "single-class"))
            scores.append(fold_prevalence)
            continue
        try:
            model = fit_logistic(train, max_iterations, tolerance, separation_bound, ridge)
        except CollinearFeaturesError:
            fallback_folds.append((i, "collinear"))
            scores.append(fold_prevalence)
            continue

        if model.separation:
            separation_folds.append(i)
        elif not model.converged:
            non_converged_folds.append(i)
        scores.append(float(model.predict(ds.rows[i])[0]))

    if fallback_folds:
        logger.warning("%s: %d fold(s) scored by the intercept-only fallback",
                       ds.name or "dataset", len(fallback_folds))

    scored = ScoredDataset.from_pairs(scores, ds.labels.tolist(),
                                      name if name is not None else ds.name)
    return LoocvResult(scored, fallback_folds, separation_folds, non_converged_folds)
