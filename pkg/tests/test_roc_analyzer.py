import random
from fractions import Fraction

import pytest

from analyzer.errors import DegenerateClassError, EvaluationError
from analyzer.roc_analyzer import (
    AucBand,
    auc,
    build_roc,
    interpret_auc,
    locate_threshold,
    no_points_below_bisector,
    strictly_above_bisector,
    threshold_markers,
)
from conftest import dataset, mann_whitney, random_dyadic_dataset


def coords(curve):
    return [(p.fpr, p.tpr) for p in curve.points]


def test_four_point_curve_and_threshold_regimes(four_point):
    curve = build_roc(four_point)
    half = Fraction(1, 2)
    assert coords(curve) == [(1, 1), (half, 1), (0, 1), (0, half), (0, 0)]
    regimes = [(float(p.t_low), float(p.t_high)) for p in curve.points]
    assert regimes == [(0.0, 0.2), (0.2, 0.3), (0.3, 0.8), (0.8, 0.9), (0.9, 1.0)]
    assert curve.points[-1].thresholds.hi_closed


def test_perfect_curve(perfect):
    curve = build_roc(perfect)
    assert coords(curve) == [(1, 1), (0, 1), (0, 0)]
    # (1,1) needs t < 0, so no threshold in [0, 1] reaches it
    assert not curve.points[0].achievable
    assert curve.area == 1
    assert auc(curve) == 1.0


def test_single_distinct_score_is_the_bisector(uniform_half):
    curve = build_roc(uniform_half)
    assert coords(curve) == [(1, 1), (0, 0)]
    assert curve.area == Fraction(1, 2)
    assert not strictly_above_bisector(curve)
    assert no_points_below_bisector(curve)


def test_auc_with_ties_matches_hand_count():
    ds = dataset([0.6, 0.4], [0.4, 0.6])
    assert build_roc(ds).area == Fraction(1, 2)


def test_degenerate_classes_rejected():
    with pytest.raises(DegenerateClassError):
        build_roc(dataset([0.3, 0.6], []))


def test_auc_equals_mann_whitney_on_random_datasets():
    rng = random.Random(20240611)
    for _ in range(1000):
        ds, _, _ = random_dyadic_dataset(rng, max_n=30)
        curve = build_roc(ds)
        assert curve.area == mann_whitney(ds)
        assert 0 <= curve.auc <= 1


def test_curve_is_monotone_from_one_one_to_origin():
    rng = random.Random(99)
    for _ in range(200):
        ds, _, _ = random_dyadic_dataset(rng)
        points = build_roc(ds).points
        assert (points[0].fpr, points[0].tpr) == (1, 1)
        assert (points[-1].fpr, points[-1].tpr) == (0, 0)
        for a, b in zip(points, points[1:]):
            assert a.fpr >= b.fpr and a.tpr >= b.tpr
            assert (a.fpr, a.tpr) != (b.fpr, b.tpr)


@pytest.mark.parametrize("a, band", [
    (0.803, AucBand.EXCELLENT),
    (0.5, AucBand.RANDOM),
    (0.95, AucBand.OUTSTANDING),
    (0.9, AucBand.OUTSTANDING),
    (0.75, AucBand.ACCEPTABLE),
    (0.65, AucBand.POOR),
    (0.3, AucBand.WORSE_THAN_RANDOM),
])
def test_interpret_auc(a, band):
    assert interpret_auc(a) is band


@pytest.mark.parametrize("a", [-0.1, 1.01])
def test_interpret_auc_range(a):
    with pytest.raises(EvaluationError):
        interpret_auc(a)


def test_vertex_below_the_diagonal():
    # a negative outranks both positives
    curve = build_roc(dataset([0.5, 0.4], [0.9, 0.1]))
    assert (Fraction(1, 2), 0) in coords(curve)
    assert not strictly_above_bisector(curve)
    assert not no_points_below_bisector(curve)


def test_touching_the_diagonal_is_not_strictly_above():
    curve = build_roc(dataset([0.8, 0.2], [0.6, 0.1]))
    assert (Fraction(1, 2), Fraction(1, 2)) in coords(curve)
    assert not strictly_above_bisector(curve)
    assert no_points_below_bisector(curve)


def test_perfect_curve_is_strictly_above(perfect):
    assert strictly_above_bisector(build_roc(perfect))


def test_locate_threshold(four_point):
    curve = build_roc(four_point)
    point = locate_threshold(curve, 0.5)
    assert (point.fpr, point.tpr) == (0, 1)
    assert locate_threshold(curve, 0.2).fpr == Fraction(1, 2)
    assert (locate_threshold(curve, 1).fpr, locate_threshold(curve, 1).tpr) == (0, 0)


def test_markers_cover_every_threshold(four_point):
    curve = build_roc(four_point)
    markers = threshold_markers(curve, [k / 10 for k in range(1, 10)])
    assert len(markers) == 9
    for marker in markers:
        assert marker.point.thresholds.contains(marker.t)


def test_auc_is_invariant_under_monotone_rescoring():
    rng = random.Random(2024)
    for _ in range(200):
        ds, ks, labels = random_dyadic_dataset(rng)
        squared = dataset([k * k / 1024 for k, l in zip(ks, labels) if l],
                          [k * k / 1024 for k, l in zip(ks, labels) if not l])
        assert build_roc(squared).area == build_roc(ds).area
