import enum
import html
import logging
import math
import time
from dataclasses import dataclass, replace
from typing import Optional

from .career import Trajectory
from .diagram import DiagramPoint, ModeFraction
from .exceptions import MismatchedSpec
from .stats import DegreeHistogram
from .utils import format_number

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
MARGIN = 40
MAJOR_COLOR = "red"
MINOR_COLOR = "blue"
COMBINED_COLOR = "purple"


class PlotKind(str, enum.Enum):
    DIAGRAM_SCATTER = "DiagramScatter"
    FRACTION_SCATTER = "FractionScatter"
    HISTOGRAM_PAIR = "HistogramPair"
    TRAJECTORY_PATH = "TrajectoryPath"

    def __str__(self):
        return self.value


class LabelPolicy(str, enum.Enum):
    INDICES = "Indices"
    NAMES = "Names"
    NONE = "None"

    def __str__(self):
        return self.value


class Overlay(str, enum.Enum):
    # x + y = 1, the line every mode-fraction point lies on
    FRACTION_LINE = "FractionLine"
    # Axes through the marked point C/a
    AXES = "Axes"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PlotSpec:
    kind: PlotKind
    width: int = 480
    height: int = 480
    x_range: Optional[tuple] = None
    y_range: Optional[tuple] = None
    label_policy: LabelPolicy = LabelPolicy.INDICES
    overlays: tuple = ()


def default_spec(kind):
    """
    The standard figure for each kind of plot.

    :param kind: PlotKind
    :return: PlotSpec
    """
    kind = PlotKind(kind)
    if kind is PlotKind.DIAGRAM_SCATTER:
        return PlotSpec(kind, x_range=(-8, 8), y_range=(-8, 8), overlays=(Overlay.AXES,))
    if kind is PlotKind.FRACTION_SCATTER:
        return PlotSpec(kind, x_range=(0, 1), y_range=(0, 1), overlays=(Overlay.FRACTION_LINE,))
    if kind is PlotKind.HISTOGRAM_PAIR:
        return PlotSpec(kind, width=840, label_policy=LabelPolicy.NONE)
    return PlotSpec(kind, x_range=(-8, 8), y_range=(-8, 8), overlays=(Overlay.AXES,))


class _SvgDocument:
    """
    Line-per-element SVG writer.  Attribute order is the order given and numbers go through format_number, so the
    same calls always give the same bytes.
    """

    def __init__(self, width, height):
        self.lines = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="{SVG_NS}" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
            'font-family="sans-serif" font-size="10">',
        ]
        self.element("rect", cls="background", x=0, y=0, width=width, height=height, fill="white")

    @staticmethod
    def _attrs(attrs):
        out = []
        for k, v in attrs.items():
            name = "class" if k == "cls" else k.replace("_", "-")
            value = format_number(v) if isinstance(v, (int, float)) else str(v)
            out.append(f'{name}="{html.escape(value, quote=True)}"')
        return " ".join(out)

    def element(self, tag, **attrs):
        self.lines.append(f"<{tag} {self._attrs(attrs)}/>")

    def text(self, content, **attrs):
        self.lines.append(f"<text {self._attrs(attrs)}>{html.escape(str(content), quote=False)}</text>")

    def finish(self):
        return "\n".join(self.lines + ["</svg>"]) + "\n"


def _expand(rng, values, default):
    lo, hi = rng if rng is not None else default
    if values:
        lo = min(lo, math.floor(min(values)))
        hi = max(hi, math.ceil(max(values)))
    if hi <= lo:
        hi = lo + 1
    return lo, hi


class _Frame:
    """
    Maps data coordinates into the plotting area and draws the frame, range ticks and axis titles.
    """

    def __init__(self, doc, spec, x_range, y_range, left, top, width, height):
        self.doc = doc
        self.spec = spec
        self.x_range = x_range
        self.y_range = y_range
        self.left = left
        self.top = top
        self.width = width
        self.height = height

    def px(self, x):
        lo, hi = self.x_range
        return self.left + (x - lo) / (hi - lo) * self.width

    def py(self, y):
        lo, hi = self.y_range
        return self.top + self.height - (y - lo) / (hi - lo) * self.height

    def contains(self, x, y):
        return self.x_range[0] <= x <= self.x_range[1] and self.y_range[0] <= y <= self.y_range[1]

    def draw(self, x_title, y_title):
        doc = self.doc
        bottom = self.top + self.height
        doc.element(
            "rect",
            cls="frame",
            x=self.left,
            y=self.top,
            width=self.width,
            height=self.height,
            fill="none",
            stroke="black",
        )
        for v in self.x_range:
            doc.text(format_number(v), cls="tick", x=self.px(v), y=bottom + 16, text_anchor="middle")
        for v in self.y_range:
            doc.text(format_number(v), cls="tick", x=self.left - 6, y=self.py(v) + 4, text_anchor="end")
        cx = self.left + self.width / 2
        cy = self.top + self.height / 2
        doc.text(x_title, cls="title", x=cx, y=bottom + 32, text_anchor="middle")
        doc.text(
            y_title,
            cls="title",
            x=self.left - 28,
            y=cy,
            text_anchor="middle",
            transform=f"rotate(-90 {format_number(self.left - 28)} {format_number(cy)})",
        )

    def overlays(self):
        doc = self.doc
        for overlay in self.spec.overlays:
            overlay = Overlay(overlay)
            if overlay is Overlay.AXES:
                if self.x_range[0] <= 0 <= self.x_range[1]:
                    doc.element(
                        "line",
                        cls="axis",
                        x1=self.px(0),
                        y1=self.top,
                        x2=self.px(0),
                        y2=self.top + self.height,
                        stroke="gray",
                        stroke_dasharray="4 4",
                    )
                if self.y_range[0] <= 0 <= self.y_range[1]:
                    doc.element(
                        "line",
                        cls="axis",
                        x1=self.left,
                        y1=self.py(0),
                        x2=self.left + self.width,
                        y2=self.py(0),
                        stroke="gray",
                        stroke_dasharray="4 4",
                    )
            else:
                doc.element(
                    "line", cls="reference", x1=self.px(0), y1=self.py(1), x2=self.px(1), y2=self.py(0), stroke="gray"
                )

    def marked_point(self):
        if self.contains(0, 0):
            self.doc.element("circle", cls="marked", cx=self.px(0), cy=self.py(0), r=5, fill="none", stroke="black")
            self.doc.text("C/a", cls="marked-label", x=self.px(0) + 7, y=self.py(0) + 12)


def _labels(ids, spec, labels):
    policy = LabelPolicy(spec.label_policy)
    if policy is LabelPolicy.NONE:
        return {}
    if policy is LabelPolicy.NAMES:
        return {cid: cid for cid in ids}
    labels = labels or {}
    alphabetical = {cid: str(i) for i, cid in enumerate(sorted(set(ids)), start=1)}
    return {cid: labels.get(cid, alphabetical[cid]) for cid in ids}


def _scatter_frame(doc, spec, xs, ys, default_x, default_y):
    inner_w = spec.width - 2 * MARGIN
    inner_h = spec.height - 2 * MARGIN
    return _Frame(
        doc,
        spec,
        _expand(spec.x_range, xs, default_x),
        _expand(spec.y_range, ys, default_y),
        MARGIN,
        MARGIN,
        inner_w,
        inner_h,
    )


def _render_points(doc, frame, coords, ids, spec, labels):
    names = _labels(ids, spec, labels)
    for (x, y), cid in zip(coords, ids):
        cx, cy = frame.px(x), frame.py(y)
        doc.element("circle", cls="point", cx=cx, cy=cy, r=3, fill="black")
        if cid in names:
            doc.text(names[cid], cls="label", x=cx + 5, y=cy - 5)


def _render_diagram(points, spec, labels):
    doc = _SvgDocument(spec.width, spec.height)
    coords = [(p.x, p.y) for p in points]
    frame = _scatter_frame(doc, spec, [c[0] for c in coords], [c[1] for c in coords], (-8, 8), (-8, 8))
    frame.draw("major", "minor")
    frame.overlays()
    frame.marked_point()
    _render_points(doc, frame, coords, [p.composer_id for p in points], spec, labels)
    return doc.finish()


def _render_fractions(fractions, spec, labels):
    doc = _SvgDocument(spec.width, spec.height)
    coords = [(f.major_fraction, f.minor_fraction) for f in fractions]
    frame = _scatter_frame(doc, spec, [c[0] for c in coords], [c[1] for c in coords], (0, 1), (0, 1))
    frame.draw("major fraction", "minor fraction")
    frame.overlays()
    _render_points(doc, frame, coords, [f.composer_id for f in fractions], spec, labels)
    return doc.finish()


def _render_trajectory(t, spec, labels):
    doc = _SvgDocument(spec.width, spec.height)
    xs = [s.x for s in t.samples]
    ys = [s.y for s in t.samples]
    frame = _scatter_frame(doc, spec, xs, ys, (-8, 8), (-8, 8))
    doc.text(t.composer_id, cls="caption", x=spec.width / 2, y=24, text_anchor="middle")
    frame.draw("major", "minor")
    frame.overlays()
    frame.marked_point()
    if t.samples:
        path = " ".join(f"{format_number(frame.px(s.x))},{format_number(frame.py(s.y))}" for s in t.samples)
        doc.element("polyline", cls="path", points=path, fill="none", stroke="black")
    for s in t.samples:
        doc.element("circle", cls="sample", cx=frame.px(s.x), cy=frame.py(s.y), r=2, fill="black")
    if t.samples and LabelPolicy(spec.label_policy) is not LabelPolicy.NONE:
        ends = [t.samples[0]] if len(t.samples) == 1 else [t.samples[0], t.samples[-1]]
        for s in ends:
            doc.text(s.year, cls="label", x=frame.px(s.x) + 5, y=frame.py(s.y) - 5)
    return doc.finish()


def _render_histogram(h, spec):
    doc = _SvgDocument(spec.width, spec.height)
    panel_w = (spec.width - 3 * MARGIN) / 2
    panel_h = spec.height - 2 * MARGIN
    bottom = MARGIN + panel_h
    n = max(len(h.degrees), 1)
    bin_w = panel_w / n
    combined = [a + b for a, b in zip(h.major, h.minor)]

    panels = [
        ("major / minor", MARGIN, max(max(h.major, default=0), max(h.minor, default=0), 1)),
        ("combined", 2 * MARGIN + panel_w, max(max(combined, default=0), 1)),
    ]
    for caption, left, top_count in panels:
        doc.text(caption, cls="caption", x=left + panel_w / 2, y=24, text_anchor="middle")
        doc.element("rect", cls="frame", x=left, y=MARGIN, width=panel_w, height=panel_h, fill="none", stroke="black")
        doc.text(0, cls="tick", x=left - 6, y=bottom + 4, text_anchor="end")
        doc.text(top_count, cls="tick", x=left - 6, y=MARGIN + 4, text_anchor="end")
        for i, d in enumerate(h.degrees):
            doc.text(d, cls="tick", x=left + (i + 0.5) * bin_w, y=bottom + 16, text_anchor="middle")

        if caption == "combined":
            bars = [(combined, 2, bin_w - 4, COMBINED_COLOR)]
        else:
            bars = [(h.major, 2, (bin_w - 4) / 2, MAJOR_COLOR), (h.minor, bin_w / 2, (bin_w - 4) / 2, MINOR_COLOR)]
        for counts, offset, bar_w, color in bars:
            for i, c in enumerate(counts):
                if c == 0:
                    continue
                bar_h = c / top_count * panel_h
                doc.element(
                    "rect",
                    cls="bar",
                    x=left + i * bin_w + offset,
                    y=bottom - bar_h,
                    width=bar_w,
                    height=bar_h,
                    fill=color,
                )
    return doc.finish()


def _is_sequence_of(data, cls):
    return isinstance(data, (list, tuple)) and all(isinstance(d, cls) for d in data)


def render(data, spec, labels=None):
    """
    Draws an analysis result as a standalone SVG 1.1 document.  Output is byte-deterministic for given inputs: fixed
    element order, numbers at 6 significant digits, no ids or timestamps.  Axis ranges grow to whole degrees when a
    point falls outside them.

     * DiagramScatter: list of DiagramPoint, labelled by composer index (Indices) or id (Names)
     * FractionScatter: list of ModeFraction
     * HistogramPair: DegreeHistogram, major/minor bars on the left and the pooled counts on the right
     * TrajectoryPath: Trajectory

    :param data: the analysis result
    :param spec: PlotSpec (or a PlotKind for the default figure)
    :param labels: optional composer id -> label for the Indices policy; alphabetical numbering otherwise
    :return: SVG text
    """
    start_time = time.perf_counter()
    if not isinstance(spec, PlotSpec):
        spec = default_spec(spec)
    spec = replace(spec, kind=PlotKind(spec.kind))

    if spec.kind is PlotKind.DIAGRAM_SCATTER and _is_sequence_of(data, DiagramPoint):
        out = _render_diagram(list(data), spec, labels)
    elif spec.kind is PlotKind.FRACTION_SCATTER and _is_sequence_of(data, ModeFraction):
        out = _render_fractions(list(data), spec, labels)
    elif spec.kind is PlotKind.HISTOGRAM_PAIR and isinstance(data, DegreeHistogram):
        out = _render_histogram(data, spec)
    elif spec.kind is PlotKind.TRAJECTORY_PATH and isinstance(data, Trajectory):
        out = _render_trajectory(data, spec, labels)
    else:
        err_msg = f"Cannot draw {type(data).__name__} as a {spec.kind.value} plot"
        logger.error(err_msg)
        raise MismatchedSpec(err_msg)

    logger.info(f"Rendered {spec.kind.value} in {1e3*(time.perf_counter() - start_time):.3f} ms ({len(out)} bytes)")
    return out
