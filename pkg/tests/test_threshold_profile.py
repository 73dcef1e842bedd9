import random
from fractions import Fraction

import pytest

from analyzer.errors import EvaluationError, ThresholdRangeError
from analyzer.intervals import OPEN_UNIT, Interval
from analyzer.roc_analyzer import build_roc, strictly_above_bisector
from analyzer.threshold_profile import (
    QuadrantLabel,
    StepFunction,
    ThresholdProfile,
    better_than_random_ranges,
    check_better_than_random,
    imbalance_diagnostics,
    perfect_range,
    profile,
    quadrant,
)
from conftest import GRID, dataset, grid_points, grid_rates, random_dyadic_dataset

F = Fraction


def in_any(intervals, t):
    return any(iv.contains(t) for iv in intervals)


def test_four_point_profile(four_point):
    p = profile(four_point)
    assert p.tpr(0) == 1 and p.tpr(0.79) == 1
    assert p.tpr(0.8) == F(1, 2) and p.tpr(0.89) == F(1, 2)
    assert p.tpr(0.9) == 0 and p.tpr(1) == 0
    assert p.fpr(0) == 1 and p.fpr(0.19) == 1
    assert p.fpr(0.2) == F(1, 2) and p.fpr(0.29) == F(1, 2)
    assert p.fpr(0.3) == 0 and p.fpr(1) == 0


def test_perfect_profile(perfect):
    p = profile(perfect)
    assert p.tpr(0) == 1 and p.tpr(0.999) == 1 and p.tpr(1) == 0
    assert p.fpr(0) == 0 and p.fpr(0.5) == 0 and p.fpr(1) == 0


def test_uniform_profile(uniform_half):
    p = profile(uniform_half)
    assert p.at(0.25) == (1, 1)
    assert p.at(0.5) == (0, 0)


def test_profiles_are_non_increasing_step_functions():
    rng = random.Random(5)
    for _ in range(200):
        ds, _, _ = random_dyadic_dataset(rng)
        p = profile(ds)
        assert p.tpr.is_non_increasing() and p.fpr.is_non_increasing()
        assert p.tpr(1) == 0 and p.fpr(1) == 0


def test_step_function_validation():
    with pytest.raises(EvaluationError):
        StepFunction((F(0), F(1, 2)), (F(1), F(0)))
    with pytest.raises(EvaluationError):
        StepFunction((F(0), F(1, 2), F(1, 2), F(1)), (1, 1, 0, 0))
    with pytest.raises(EvaluationError):
        ThresholdProfile(StepFunction.from_pieces([(0, F(1, 2)), (F(1, 2), 1)]), StepFunction.constant(0))


def test_perfect_model_is_better_than_random(perfect):
    verdict = check_better_than_random(profile(perfect))
    assert verdict.better_than_random
    assert verdict.tpr_violations == [] and verdict.fpr_violations == []
    assert verdict.ok_ranges == [OPEN_UNIT]


def test_equal_rates_are_never_better_than_random():
    # TPR(t) = FPR(t) would have to equal 1-t on a whole segment
    rng = random.Random(3)
    for _ in range(100):
        starts = [F(0)] + [F(c, 16) for c in sorted(rng.sample(range(1, 16), 4))]
        values = sorted((F(rng.randint(0, 8), 8) for _ in starts), reverse=True)
        fn = StepFunction.from_pieces(list(zip(starts, values)))
        assert not check_better_than_random(ThresholdProfile(fn, fn)).better_than_random


def test_uniform_half_violations(uniform_half):
    verdict = check_better_than_random(profile(uniform_half))
    assert not verdict.better_than_random
    assert verdict.fpr_violations == [Interval(0, F(1, 2), False, False)]
    # TPR(0.5) = 0 < 0.5 already, so the violation includes t = 0.5
    assert verdict.tpr_violations == [Interval(F(1, 2), 1, True, False)]
    assert verdict.ok_ranges == []


def test_constant_rates_range():
    p = ThresholdProfile(StepFunction.constant(1), StepFunction.constant(F(3, 10)))
    verdict = check_better_than_random(p)
    assert better_than_random_ranges(p) == [Interval(0, F(7, 10), False, True)]
    assert verdict.fpr_violations == [Interval(F(7, 10), 1, False, False)]
    assert not verdict.better_than_random
    assert verdict.boundary_contacts == [F(7, 10)]


def test_above_bisector_does_not_imply_better_than_random(above_bisector_not_better):
    curve = build_roc(above_bisector_not_better)
    assert curve.area == F(7, 8)
    assert strictly_above_bisector(curve)
    verdict = check_better_than_random(profile(above_bisector_not_better))
    assert not verdict.better_than_random
    assert in_any(verdict.tpr_violations, F(1, 2))


def test_positive_scores_always_violate_near_zero():
    # every module scores above t for small t, so FPR(t) = 1 > 1 - t
    verdict = check_better_than_random(profile(dataset([0.99, 0.98], [0.01, 0.02])))
    assert not verdict.better_than_random
    assert in_any(verdict.fpr_violations, F(1, 200))


def test_verdict_agrees_with_dense_grid():
    """
    Scores are k/32 and the grid is j/512: every breakpoint lies on the grid
    and each open segment between breakpoints holds at least fifteen grid
    points, so a verdict that is right on the grid is right everywhere.
    """
    rng = random.Random(31337)
    for _ in range(500):
        ds, ks, labels = random_dyadic_dataset(rng)
        verdict = check_better_than_random(profile(ds))
        grid_ok = True
        for j in grid_points():
            tp, ap, fp, an = grid_rates(ks, labels, j)
            t = F(j, GRID)
            # TPR < 1 - t  <=>  tp * GRID < (GRID - j) * ap
            assert in_any(verdict.tpr_violations, t) == (tp * GRID < (GRID - j) * ap)
            assert in_any(verdict.fpr_violations, t) == (fp * GRID > (GRID - j) * an)
            ok = tp * GRID >= (GRID - j) * ap and fp * GRID <= (GRID - j) * an
            # an isolated admissible point is a boundary contact, not a range
            if in_any(verdict.ok_ranges, t):
                assert ok
            elif ok:
                assert t in verdict.boundary_contacts
            grid_ok &= ok
        assert verdict.better_than_random == grid_ok
        if verdict.better_than_random:
            assert not verdict.tpr_violations and not verdict.fpr_violations


def test_better_than_random_implies_strictly_above_bisector():
    rng = random.Random(4242)
    seen = 0
    for i in range(400):
        if i % 2:
            ds, _, _ = random_dyadic_dataset(rng)
        else:
            # low negatives with one at 0, high positives with one at 1
            pos = [1.0] + [rng.randint(24, 32) / 32 for _ in range(rng.randint(0, 3))]
            neg = [0.0] + [rng.randint(0, 8) / 32 for _ in range(rng.randint(0, 3))]
            ds = dataset(pos, neg)
        if check_better_than_random(profile(ds)).better_than_random:
            seen += 1
            assert strictly_above_bisector(build_roc(ds))
    assert seen > 0


def test_perfect_range_example():
    p = profile(dataset([0.45, 0.45, 0.45], [0.3, 0.1, 0.2]))
    pr = perfect_range(p)
    assert not pr.is_empty
    assert float(pr.t_l) == 0.3 and float(pr.t_h) == 0.45
    assert pr.interval.lo_closed and not pr.interval.hi_closed
    assert p.tpr(0.6) == 0 and p.fpr(0.6) == 0


def test_perfect_range_of_zero_one_scores(perfect):
    assert perfect_range(profile(perfect)).interval == OPEN_UNIT


def test_perfect_range_is_empty_for_imperfect_ranking(four_point, above_bisector_not_better):
    assert perfect_range(profile(above_bisector_not_better)).is_empty
    assert not perfect_range(profile(four_point)).is_empty


def test_perfect_range_iff_auc_one():
    rng = random.Random(77)
    perfect_seen = 0
    for i in range(500):
        if i % 3 == 0:
            # force a separated ranking
            cut = rng.randint(1, 31)
            pos = [rng.randint(cut, 32) / 32 for _ in range(rng.randint(1, 5))]
            neg = [rng.randint(0, cut - 1) / 32 for _ in range(rng.randint(1, 5))]
            ds = dataset(pos, neg)
        else:
            ds, _, _ = random_dyadic_dataset(rng)
        is_perfect = build_roc(ds).area == 1
        perfect_seen += is_perfect
        assert (not perfect_range(profile(ds)).is_empty) == is_perfect
    assert perfect_seen > 0


def test_quadrants(perfect, uniform_half):
    assert quadrant(profile(perfect), 0.5).label is QuadrantLabel.BETTER
    p = profile(uniform_half)
    assert quadrant(p, 0.2).label is QuadrantLabel.POSITIVE_TRADEOFF
    assert quadrant(p, 0.7).label is QuadrantLabel.NEGATIVE_TRADEOFF

    worse = profile(dataset([0.1], [0.9]))
    assert quadrant(worse, 0.5).label is QuadrantLabel.WORSE


def test_quadrant_boundary_counts_as_good():
    p = ThresholdProfile(StepFunction.constant(F(1, 2)), StepFunction.constant(F(1, 2)))
    q = quadrant(p, F(1, 2))
    assert q.label is QuadrantLabel.BETTER
    assert q.boundary


@pytest.mark.parametrize("t", [0, 1, 1.2])
def test_quadrant_needs_open_interval(perfect, t):
    with pytest.raises(ThresholdRangeError):
        quadrant(profile(perfect), t)


def test_imbalance_flag_for_scores_near_one():
    positives = [0.95 + k / 1000 for k in range(23)]
    negatives = [0.93, 0.96]
    report = imbalance_diagnostics(profile(dataset(positives, negatives)))
    assert report.concentrated
    assert report.dominant_side == "high"
    assert report.arc_share_high > 0.5
    assert report.prevalence == pytest.approx(23 / 25)


def test_imbalance_flag_for_scores_near_zero():
    positives = [0.05, 0.08]
    negatives = [k / 1000 for k in range(1, 24)]
    report = imbalance_diagnostics(profile(dataset(positives, negatives)))
    assert report.concentrated
    assert report.dominant_side == "low"
    assert report.arc_share_low > 0.5


def test_no_imbalance_flag_for_spread_scores():
    positives = [k / 20 for k in range(11, 20)]
    negatives = [k / 20 for k in range(1, 10)]
    report = imbalance_diagnostics(profile(dataset(positives, negatives)))
    assert not report.concentrated
    assert report.dominant_side is None


def test_imbalance_counts_scores_at_zero_and_one():
    # distinct scores 0, 0.05 and 0.5: two of three sit below 0.1
    report = imbalance_diagnostics(profile(dataset([0.5, 0.05], [0.0, 0.05])))
    assert report.extreme_breakpoint_share == pytest.approx(2 / 3)
    assert report.concentrated
    assert report.dominant_side == "low"

    report = imbalance_diagnostics(profile(dataset([1.0, 1.0, 0.95], [0.5])))
    assert report.extreme_breakpoint_share == pytest.approx(2 / 3)
    assert report.dominant_side == "high"
