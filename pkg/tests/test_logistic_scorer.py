import math

import numpy as np
import pytest

from analyzer.errors import CollinearFeaturesError, DegenerateClassError, EvaluationError, ScorerError
from analyzer.logistic_scorer import (
    FeatureDataset,
    fit_logistic,
    log_likelihood_gradient,
    loocv_scores,
)


def one_feature(xs, labels, name="toy"):
    return FeatureDataset(np.asarray(xs, dtype=float).reshape(-1, 1), labels, ("x",), name)


def random_fitable(rng, n_min=60, n_max=120):
    n = int(rng.integers(n_min, n_max + 1))
    m = int(rng.integers(1, 4))
    rows = rng.normal(size=(n, m))
    beta = rng.uniform(-1.0, 1.0, size=m + 1)
    p = 1.0 / (1.0 + np.exp(-(beta[0] + rows @ beta[1:])))
    labels = rng.random(n) < p
    return FeatureDataset(rows, labels, tuple(f"f{i}" for i in range(m)))


def test_gradient_vanishes_at_the_fit():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 200:
        ds = random_fitable(rng)
        if ds.ap < 3 or ds.ap > ds.n - 3:
            continue
        model = fit_logistic(ds)
        if model.separation:
            continue
        assert model.converged
        gradient = log_likelihood_gradient(ds, model.coefficients)
        assert np.max(np.abs(gradient)) < 1e-6
        checked += 1


def test_log_likelihood_never_decreases():
    rng = np.random.default_rng(99)
    for _ in range(50):
        ds = random_fitable(rng, n_min=20, n_max=60)
        if ds.ap in (0, ds.n):
            continue
        for ridge in (0.0, 0.5):
            trace = fit_logistic(ds, ridge=ridge).log_likelihood_trace
            assert len(trace) >= 2
            assert all(later >= earlier for earlier, later in zip(trace, trace[1:]))
        model = fit_logistic(ds)
        assert model.log_likelihood == pytest.approx(model.log_likelihood_trace[-1])


def test_affine_rescaling_keeps_the_predictions():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 30:
        ds = random_fitable(rng)
        if ds.ap < 3 or ds.ap > ds.n - 3:
            continue
        model = fit_logistic(ds)
        if model.separation:
            continue
        scale = rng.uniform(0.5, 3.0, size=ds.m)
        shift = rng.uniform(-2.0, 2.0, size=ds.m)
        rescaled = FeatureDataset(ds.rows * scale + shift, ds.labels, ds.feature_names)
        other = fit_logistic(rescaled)
        assert other.converged
        np.testing.assert_allclose(other.predict(rescaled.rows), model.predict(ds.rows), atol=1e-6)
        checked += 1


def test_loocv_score_ignores_the_held_out_label():
    rng = np.random.default_rng(13)
    ds = random_fitable(rng, n_min=30, n_max=30)
    baseline = loocv_scores(ds).scores.scores
    for i in (0, 7, 19):
        flipped = ds.labels.copy()
        flipped[i] = not flipped[i]
        scores = loocv_scores(FeatureDataset(ds.rows, flipped, ds.feature_names)).scores.scores
        assert scores[i] == baseline[i]


def test_uninformative_feature_recovers_the_intercept_only_fit():
    # every feature value has one faulty and three clean modules
    xs = [v for v in (0.0, 1.0, 2.0) for _ in range(4)]
    labels = [k == 0 for _ in range(3) for k in range(4)]
    model = fit_logistic(one_feature(xs, labels))
    assert model.converged and not model.separation
    assert abs(model.intercept - math.log(1 / 3)) < 1e-6
    assert abs(float(model.weights[0])) < 1e-6
    assert model.predict([1.0])[0] == pytest.approx(0.25, abs=1e-6)


def test_separation_is_flagged():
    model = fit_logistic(one_feature([-3, -2, -1, 1, 2, 3], [0, 0, 0, 1, 1, 1]))
    assert model.separation
    assert not model.converged
    assert float(model.weights[0]) > 0


def test_single_class_rejected():
    with pytest.raises(DegenerateClassError):
        fit_logistic(one_feature([1, 2, 3, 4], [1, 1, 1, 1]))


def test_too_few_rows_rejected():
    with pytest.raises(ScorerError):
        fit_logistic(one_feature([1, 2], [0, 1]))


def test_collinear_features_rejected():
    rows = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0], [5.0, 10.0]])
    ds = FeatureDataset(rows, [0, 1, 0, 1, 1], ("a", "b"))
    with pytest.raises(CollinearFeaturesError, match="collinear features"):
        fit_logistic(ds)


def test_ridge_makes_collinear_features_fitable():
    rows = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0], [5.0, 10.0], [6.0, 12.0]])
    ds = FeatureDataset(rows, [0, 1, 0, 1, 1, 0], ("a", "b"))
    model = fit_logistic(ds, ridge=1.0)
    assert model.ridge == 1.0
    assert np.max(np.abs(log_likelihood_gradient(ds, model.coefficients, ridge=1.0))) < 1e-6


def test_feature_dataset_validation():
    with pytest.raises(EvaluationError):
        FeatureDataset(np.array([[1.0], [np.nan]]), [0, 1], ("x",))
    with pytest.raises(EvaluationError):
        FeatureDataset(np.array([[1.0], [2.0]]), [0, 1, 1], ("x",))
    ds = FeatureDataset(np.array([[1.0, 5.0], [2.0, 6.0]]), [0, 1], ("a", "b"))
    assert ds.select(["b"]).rows.tolist() == [[5.0], [6.0]]
    with pytest.raises(EvaluationError):
        ds.select(["c"])


def test_loocv_on_separable_data():
    result = loocv_scores(one_feature([-3, -2, 2, 3], [0, 0, 1, 1]))
    scores = result.scores.scores
    assert scores[0] < 0.5 and scores[1] < 0.5
    assert scores[2] > 0.5 and scores[3] > 0.5
    assert result.separation_folds


def test_loocv_constant_feature_uses_fold_prevalence():
    labels = [1, 0, 0, 1, 0, 0, 0, 1]
    result = loocv_scores(one_feature([5.0] * 8, labels))
    ap = sum(labels)
    for i, (score, label) in enumerate(zip(result.scores.scores, labels)):
        assert score == pytest.approx((ap - label) / 7)
    assert [reason for _, reason in result.fallback_folds] == ["collinear"] * 8


def test_loocv_single_class_fold_falls_back():
    # leaving out the only faulty module leaves a single-class training set
    result = loocv_scores(one_feature([0.5, 1.0, 1.5, 2.0, 2.5, 3.0], [0, 0, 1, 0, 0, 0]))
    assert (2, "single-class") in result.fallback_folds
    assert result.scores.scores[2] == 0.0


def test_loocv_duplicated_rows_agree():
    xs = [0.1, 0.7, 1.3, 1.9, 2.4, 0.4]
    labels = [0, 1, 0, 1, 1, 0]
    result = loocv_scores(one_feature(xs + xs, labels + labels))
    scores = result.scores.scores
    for i in range(len(xs)):
        assert abs(scores[i] - scores[i + len(xs)]) < 1e-9


def test_loocv_needs_enough_rows():
    with pytest.raises(ScorerError):
        loocv_scores(one_feature([1, 2, 3], [0, 1, 0]))


def test_model_and_loocv_dicts():
    xs = [0.1, 0.7, 1.3, 1.9, 2.4, 0.4]
    ds = one_feature(xs, [0, 1, 0, 1, 1, 0])
    model = fit_logistic(ds).to_dict()
    assert set(model["weights"]) == {"x"}
    assert model["ridge"] == 0.0
    assert loocv_scores(ds).to_dict()["fallback_folds"] == []
