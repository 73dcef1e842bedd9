from fractions import Fraction

from analyzer.intervals import (
    OPEN_UNIT,
    Interval,
    drop_degenerate,
    intersect_interval_lists,
    merge_intervals,
    total_width,
)


def test_empty_and_degenerate():
    assert Interval(0.5, 0.5, True, False).is_empty
    assert not Interval(0.5, 0.5, True, True).is_empty
    assert Interval(0.5, 0.5, True, True).is_degenerate
    assert Interval(0.6, 0.5).is_empty
    assert Interval(0.6, 0.5).width == 0


def test_contains_respects_closedness():
    iv = Interval(Fraction(1, 4), Fraction(3, 4), lo_closed=False, hi_closed=True)
    assert not iv.contains(Fraction(1, 4))
    assert iv.contains(Fraction(3, 4))
    assert iv.contains(0.5)
    assert not OPEN_UNIT.contains(0)
    assert not OPEN_UNIT.contains(1)


def test_intersect_keeps_the_tighter_endpoint():
    a = Interval(0, Fraction(1, 2), True, True)
    b = Interval(Fraction(1, 2), 1, True, False)
    point = a.intersect(b)
    assert point.is_degenerate
    assert point.lo == Fraction(1, 2)

    c = Interval(0, Fraction(1, 2), True, False)
    assert c.intersect(b).is_empty


def test_at_most_and_at_least():
    seg = Interval(Fraction(1, 5), Fraction(4, 5), True, False)
    assert seg.at_most(Fraction(1, 2)) == Interval(Fraction(1, 5), Fraction(1, 2), True, True)
    assert seg.at_most(Fraction(1, 2), inclusive=False) == Interval(Fraction(1, 5), Fraction(1, 2), True, False)
    assert seg.at_least(Fraction(1, 2), inclusive=False) == Interval(Fraction(1, 2), Fraction(4, 5), False, False)
    assert seg.at_least(1).is_empty


def test_merge_joins_touching_intervals_only_without_a_gap():
    merged = merge_intervals([
        Interval(Fraction(1, 2), Fraction(3, 4), True, False),
        Interval(0, Fraction(1, 2), False, False),
    ])
    assert merged == [Interval(0, Fraction(3, 4), False, False)]

    # (0, 1/2) and (1/2, 1) leave the point 1/2 out
    split = merge_intervals([Interval(0, Fraction(1, 2), False, False),
                             Interval(Fraction(1, 2), 1, False, False)])
    assert len(split) == 2


def test_merge_drops_empty_pieces():
    assert merge_intervals([Interval(0.3, 0.3, True, False), Interval(0.5, 0.2)]) == []


def test_interval_list_intersection_and_width():
    a = [Interval(0, Fraction(1, 2)), Interval(Fraction(3, 4), 1)]
    b = [Interval(Fraction(1, 4), Fraction(7, 8))]
    common = intersect_interval_lists(a, b)
    assert common == [Interval(Fraction(1, 4), Fraction(1, 2)), Interval(Fraction(3, 4), Fraction(7, 8))]
    assert total_width(common) == Fraction(3, 8)


def test_drop_degenerate():
    pieces = [Interval(0.5, 0.5, True, True), Interval(0.1, 0.2)]
    assert drop_degenerate(pieces) == [Interval(0.1, 0.2)]


def test_string_and_dict_forms():
    iv = Interval(Fraction(3, 10), Fraction(9, 20), True, False)
    assert str(iv) == "[0.3, 0.45)"
    assert iv.to_dict() == {"lo": 0.3, "hi": 0.45, "lo_closed": True, "hi_closed": False}
