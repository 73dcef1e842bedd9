#!/usr/bin/env python3
"""
SVG Renderer - static plots for evaluation reports.

  * decorated ROC curve: curve, bisector, threshold markers on both, and the
    better-than-random arc highlighted;
  * classification plot: TPR(t), FPR(t), the random line 1 - t and the
    violation intervals shaded;
  * comparison plot: two models' rates against the acceptable bounds;
  * cost plot: expected cost against the threshold.

Output is a plain string built element by element. Coordinates are printed
with two decimals and elements are emitted in a fixed order, so identical
inputs give byte-identical documents.
"""

from fractions import Fraction
from html import escape
from typing import Dict, List, Optional, Sequence, Tuple

from analyzer.comparison_analyzer import CostCurve, acceptable_ranges
from analyzer.intervals import Interval, Number, intersect_interval_lists
from analyzer.roc_analyzer import RocCurve, locate_threshold
from analyzer.threshold_profile import (
    StepFunction,
    ThresholdProfile,
    check_better_than_random,
)
from evaluator.settings import get_default_config

# floats, like the scores they are compared with
MARKER_THRESHOLDS = tuple(k / 10 for k in range(1, 10))

# one glyph per marked threshold, in threshold order
MARKER_SHAPES = (
    "circle", "triangle-up", "plus", "cross", "diamond",
    "triangle-down", "boxed-cross", "asterisk", "boxed-plus",
)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class SvgCanvas:
    """Accumulates SVG elements and maps unit coordinates onto the plot area"""

    def __init__(self, plot_config: Optional[Dict] = None, y_max: float = 1.0):
        config = plot_config or get_default_config()['plot']
        self.width = config['width']
        self.height = config['height']
        self.margin = config['margin']
        self.palette = config['palette']
        self.y_max = y_max if y_max > 0 else 1.0
        self.parts: List[str] = []

    def x(self, value: Number) -> float:
        return self.margin + float(value) * (self.width - 2 * self.margin)

    def y(self, value: Number) -> float:
        span = self.height - 2 * self.margin
        return self.height - self.margin - float(value) / self.y_max * span

    def add(self, element: str):
        self.parts.append(element)

    def line(self, x1, y1, x2, y2, stroke: str, css_class: str = "", extra: str = ""):
        cls = f' class="{css_class}"' if css_class else ""
        self.add(f'<line{cls} x1="{_fmt(self.x(x1))}" y1="{_fmt(self.y(y1))}" '
                 f'x2="{_fmt(self.x(x2))}" y2="{_fmt(self.y(y2))}" stroke="{stroke}"{extra}/>')

    def polyline(self, points: Sequence[Tuple[Number, Number]], stroke: str,
                 css_class: str = "", extra: str = ""):
        coords = " ".join(f"{_fmt(self.x(px))},{_fmt(self.y(py))}" for px, py in points)
        cls = f' class="{css_class}"' if css_class else ""
        self.add(f'<polyline{cls} points="{coords}" fill="none" stroke="{stroke}"{extra}/>')

    def band(self, interval: Interval, fill: str, css_class: str, y_lo: Number = 0,
             y_hi: Optional[Number] = None, tooltip: str = ""):
        """Vertical band over a threshold interval"""
        y_hi = self.y_max if y_hi is None else y_hi
        x0, x1 = self.x(interval.lo), self.x(interval.hi)
        top, bottom = self.y(y_hi), self.y(y_lo)
        title = f"<title>{escape(tooltip)}</title>" if tooltip else ""
        self.add(f'<rect class="{css_class}" x="{_fmt(x0)}" y="{_fmt(top)}" '
                 f'width="{_fmt(x1 - x0)}" height="{_fmt(bottom - top)}" '
                 f'fill="{fill}" fill-opacity="0.2">{title}</rect>')

    def text(self, px: float, py: float, content: str, anchor: str = "middle", size: int = 11):
        self.add(f'<text x="{_fmt(px)}" y="{_fmt(py)}" font-size="{size}" '
                 f'text-anchor="{anchor}">{escape(content)}</text>')

    def frame(self, title: str, x_label: str, y_label: str):
        axis = self.palette['axis']
        grid = self.palette['grid']
        for k in range(1, 5):
            tick = k / 5
            self.line(tick, 0, tick, self.y_max, grid, "grid")
            self.line(0, self.y_max * tick, 1, self.y_max * tick, grid, "grid")
        left, right = self.x(0), self.x(1)
        top, bottom = self.y(self.y_max), self.y(0)
        self.add(f'<rect class="frame" x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(right - left)}" '
                 f'height="{_fmt(bottom - top)}" fill="none" stroke="{axis}"/>')
        for k in range(0, 6):
            tick = k / 5
            self.text(self.x(tick), bottom + 14, f"{tick:g}")
            self.text(left - 6, self.y(self.y_max * tick) + 4, f"{self.y_max * tick:g}", anchor="end")
        self.text(self.width / 2, self.margin / 2, title, size=13)
        self.text(self.width / 2, self.height - 8, x_label)
        self.add(f'<text x="12" y="{_fmt(self.height / 2)}" font-size="11" text-anchor="middle" '
                 f'transform="rotate(-90 12 {_fmt(self.height / 2)})">{escape(y_label)}</text>')

    def legend(self, entries: Sequence[Tuple[str, str, str]]):
        """entries: (label, stroke, dash pattern or "")"""
        px = self.x(0) + 8
        py = self.y(self.y_max) + 14
        for label, stroke, dash in entries:
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            self.add(f'<line class="legend" x1="{_fmt(px)}" y1="{_fmt(py - 4)}" '
                     f'x2="{_fmt(px + 18)}" y2="{_fmt(py - 4)}" stroke="{stroke}"{dash_attr}/>')
            self.text(px + 22, py, label, anchor="start", size=10)
            py += 14

    def render(self) -> str:
        header = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                  f'width="{self.width}" height="{self.height}" '
                  f'viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([header, *self.parts, "</svg>"]) + "\n"


def _glyph(shape: str, cx: float, cy: float, color: str, r: float = 4.0) -> str:
    c, s = _fmt(cx), _fmt(cy)
    stroke = f'fill="none" stroke="{color}"'

    def seg(x1, y1, x2, y2):
        return f"M{_fmt(x1)},{_fmt(y1)} L{_fmt(x2)},{_fmt(y2)}"

    plus = f"{seg(cx - r, cy, cx + r, cy)} {seg(cx, cy - r, cx, cy + r)}"
    cross = f"{seg(cx - r, cy - r, cx + r, cy + r)} {seg(cx - r, cy + r, cx + r, cy - r)}"
    box = (f"M{_fmt(cx - r)},{_fmt(cy - r)} L{_fmt(cx + r)},{_fmt(cy - r)} "
           f"L{_fmt(cx + r)},{_fmt(cy + r)} L{_fmt(cx - r)},{_fmt(cy + r)} Z")

    if shape == "circle":
        return f'<circle cx="{c}" cy="{s}" r="{_fmt(r)}" {stroke}/>'
    if shape == "triangle-up":
        d = f"M{c},{_fmt(cy - r)} L{_fmt(cx + r)},{_fmt(cy + r)} L{_fmt(cx - r)},{_fmt(cy + r)} Z"
    elif shape == "triangle-down":
        d = f"M{c},{_fmt(cy + r)} L{_fmt(cx + r)},{_fmt(cy - r)} L{_fmt(cx - r)},{_fmt(cy - r)} Z"
    elif shape == "diamond":
        d = f"M{c},{_fmt(cy - r)} L{_fmt(cx + r)},{s} L{c},{_fmt(cy + r)} L{_fmt(cx - r)},{s} Z"
    elif shape == "plus":
        d = plus
    elif shape == "cross":
        d = cross
    elif shape == "asterisk":
        d = f"{plus} {cross}"
    elif shape == "boxed-cross":
        d = f"{box} {cross}"
    elif shape == "boxed-plus":
        d = f"{box} {plus}"
    else:
        raise ValueError(f"unknown marker shape '{shape}'")
    return f'<path d="{d}" {stroke}/>'


def _highlighted_segments(curve: RocCurve, ok_ranges: List[Interval]) -> List[int]:
    """Indices i of segments (points[i], points[i+1]) on the better-than-random arc"""
    ok_vertex = [bool(intersect_interval_lists([p.thresholds], ok_ranges)) for p in curve.points]
    return [i for i in range(len(curve.points) - 1) if ok_vertex[i] or ok_vertex[i + 1]]


def render_decorated_roc(curve: RocCurve, profile: ThresholdProfile,
                         markers: Sequence[Number] = MARKER_THRESHOLDS,
                         plot_config: Optional[Dict] = None,
                         title: str = "ROC curve") -> str:
    canvas = SvgCanvas(plot_config)
    palette = canvas.palette
    canvas.frame(title, "FPR", "TPR")

    canvas.line(0, 0, 1, 1, palette['random'], "bisector", ' stroke-dasharray="4 3"')
    canvas.polyline([p.xy for p in curve.points], palette['curve'], "roc",
                    ' stroke-width="1.5"')

    ok_ranges = check_better_than_random(profile).ok_ranges
    for i in _highlighted_segments(curve, ok_ranges):
        a, b = curve.points[i], curve.points[i + 1]
        canvas.polyline([a.xy, b.xy], palette['highlight'], "better-than-random",
                        ' stroke-width="3"')

    for shape, t in zip(MARKER_SHAPES, markers):
        t = Fraction(t)
        baseline = 1 - t
        canvas.add(f'<g class="marker random-marker" data-t="{float(t):g}">'
                   f'<title>t={float(t):g} random model</title>'
                   f'{_glyph(shape, canvas.x(baseline), canvas.y(baseline), palette["random"])}</g>')
        point = locate_threshold(curve, t)
        if point is None:
            continue
        canvas.add(f'<g class="marker roc-marker" data-t="{float(t):g}" '
                   f'data-interval="{escape(str(point.thresholds))}">'
                   f'<title>t={float(t):g} thresholds {escape(str(point.thresholds))}</title>'
                   f'{_glyph(shape, canvas.x(point.fpr), canvas.y(point.tpr), palette["curve"])}</g>')

    canvas.legend([("ROC curve", palette['curve'], ""),
                   ("better than random", palette['highlight'], ""),
                   ("random model", palette['random'], "4 3")])
    return canvas.render()


def _step_points(fn: StepFunction) -> List[Tuple[Fraction, Fraction]]:
    """Vertices of the step path over [0, 1)"""
    points = []
    bps = fn.breakpoints
    for i in range(len(bps) - 1):
        points.append((bps[i], fn.values[i]))
        points.append((bps[i + 1], fn.values[i]))
    return points


def render_classification_plot(profile: ThresholdProfile,
                               plot_config: Optional[Dict] = None,
                               title: str = "Classification plot") -> str:
    canvas = SvgCanvas(plot_config)
    palette = canvas.palette
    verdict = check_better_than_random(profile)

    for interval in verdict.tpr_violations:
        canvas.band(interval, palette['tpr'], "tpr-violation", tooltip=f"TPR below 1-t on {interval}")
    for interval in verdict.fpr_violations:
        canvas.band(interval, palette['fpr'], "fpr-violation", tooltip=f"FPR above 1-t on {interval}")

    canvas.frame(title, "threshold t", "rate")
    canvas.line(0, 1, 1, 0, palette['random'], "random", ' stroke-dasharray="4 3"')
    canvas.polyline(_step_points(profile.tpr), palette['tpr'], "tpr", ' stroke-width="1.5"')
    canvas.polyline(_step_points(profile.fpr), palette['fpr'], "fpr", ' stroke-width="1.5"')
    canvas.legend([("TPR(t)", palette['tpr'], ""),
                   ("FPR(t)", palette['fpr'], ""),
                   ("random: 1-t", palette['random'], "4 3")])
    return canvas.render()


def render_comparison_plot(pa: ThresholdProfile, pb: ThresholdProfile,
                           tpr_min: Optional[Number] = None, fpr_max: Optional[Number] = None,
                           labels: Tuple[str, str] = ("A", "B"),
                           plot_config: Optional[Dict] = None,
                           title: str = "Model comparison") -> str:
    canvas = SvgCanvas(plot_config)
    palette = canvas.palette

    if tpr_min is not None and fpr_max is not None:
        range_a = acceptable_ranges(pa, tpr_min, fpr_max, labels[0])
        range_b = acceptable_ranges(pb, tpr_min, fpr_max, labels[1])
        for interval in range_a.intervals:
            canvas.band(interval, palette['tpr'], "acceptable-a", 0, 0.5,
                        tooltip=f"{labels[0]} acceptable on {interval}")
        for interval in range_b.intervals:
            canvas.band(interval, palette['fpr'], "acceptable-b", 0.5, 1,
                        tooltip=f"{labels[1]} acceptable on {interval}")
        for interval in intersect_interval_lists(range_a.intervals, range_b.intervals):
            canvas.band(interval, palette['acceptable'], "acceptable-both",
                        tooltip=f"both acceptable on {interval}")

    canvas.frame(title, "threshold t", "rate")
    if tpr_min is not None:
        canvas.line(0, tpr_min, 1, tpr_min, palette['acceptable'], "tpr-min", ' stroke-dasharray="2 2"')
    if fpr_max is not None:
        canvas.line(0, fpr_max, 1, fpr_max, palette['acceptable'], "fpr-max", ' stroke-dasharray="6 2"')

    dash_b = ' stroke-dasharray="5 3"'
    canvas.polyline(_step_points(pa.tpr), palette['tpr'], "tpr-a", ' stroke-width="1.5"')
    canvas.polyline(_step_points(pa.fpr), palette['fpr'], "fpr-a", ' stroke-width="1.5"')
    canvas.polyline(_step_points(pb.tpr), palette['tpr'], "tpr-b", dash_b)
    canvas.polyline(_step_points(pb.fpr), palette['fpr'], "fpr-b", dash_b)
    canvas.legend([(f"TPR {labels[0]}", palette['tpr'], ""),
                   (f"FPR {labels[0]}", palette['fpr'], ""),
                   (f"TPR {labels[1]}", palette['tpr'], "5 3"),
                   (f"FPR {labels[1]}", palette['fpr'], "5 3")])
    return canvas.render()


def render_cost_plot(curves: Sequence[Tuple[str, CostCurve]],
                     plot_config: Optional[Dict] = None,
                     title: str = "Expected cost") -> str:
    y_max = max((float(max(c.cost.values)) for _, c in curves), default=1.0)
    canvas = SvgCanvas(plot_config, y_max=y_max)
    palette = canvas.palette
    strokes = (palette['tpr'], palette['fpr'], palette['acceptable'], palette['curve'])

    for index, (label, curve) in enumerate(curves):
        for interval in curve.argmin:
            canvas.band(interval, strokes[index % len(strokes)], f"argmin argmin-{index}",
                        tooltip=f"{label} minimum cost {float(curve.minimum):g} on {interval}")

    canvas.frame(title, "threshold t", "cost")
    entries = []
    for index, (label, curve) in enumerate(curves):
        stroke = strokes[index % len(strokes)]
        dash = "" if index == 0 else "5 3"
        extra = f' stroke-dasharray="{dash}"' if dash else ' stroke-width="1.5"'
        canvas.polyline(_step_points(curve.cost), stroke, f"cost cost-{index}", extra)
        entries.append((label, stroke, dash))
    canvas.legend(entries)
    return canvas.render()
