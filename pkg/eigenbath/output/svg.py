"""
Minimal self-contained SVG views of histograms and curves.
"""

import colorsys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from atomicwrites import atomic_write
import jinja2
import numpy as np

jinja_env = jinja2.Environment(
    loader=jinja2.PackageLoader("eigenbath", "output/templates"),
    autoescape=jinja2.select_autoescape(enabled_extensions=("svg.j2",)),
)
jinja_env.filters["px"] = lambda x: "%.2f" % x


def make_color_hex(index: int) -> str:
    """Well separated hues for successive series."""
    hue = (210.0 + 137.5 * index) % 360.0
    r, g, b = colorsys.hsv_to_rgb(hue / 360, 0.85, 0.8)
    return "#%02x%02x%02x" % (round(r * 255), round(g * 255), round(b * 255))


@dataclass
class Frame:
    """Maps data coordinates into the plot area."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    WIDTH = 640
    HEIGHT = 420
    LEFT = 70
    RIGHT = 20
    TOP = 40
    BOTTOM = 60

    def __post_init__(self):
        if self.x_max <= self.x_min:
            self.x_max = self.x_min + 1.0
        if self.y_max <= self.y_min:
            self.y_max = self.y_min + 1.0

    @staticmethod
    def around(xs, ys, y_floor: Optional[float] = None) -> "Frame":
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        y_min = float(ys.min()) if y_floor is None else min(y_floor, float(ys.min()))
        y_max = float(ys.max())
        pad = 0.05 * (y_max - y_min or 1.0)
        return Frame(float(xs.min()), float(xs.max()), y_min - (0 if y_floor is not None else pad), y_max + pad)

    @property
    def plot_left(self) -> float:
        return self.LEFT

    @property
    def plot_right(self) -> float:
        return self.WIDTH - self.RIGHT

    @property
    def plot_top(self) -> float:
        return self.TOP

    @property
    def plot_bottom(self) -> float:
        return self.HEIGHT - self.BOTTOM

    def x(self, value: float) -> float:
        span = self.plot_right - self.plot_left
        return self.plot_left + (value - self.x_min) / (self.x_max - self.x_min) * span

    def y(self, value: float) -> float:
        span = self.plot_bottom - self.plot_top
        return self.plot_bottom - (value - self.y_min) / (self.y_max - self.y_min) * span

    def points(self, xs, ys) -> str:
        return " ".join("%.2f,%.2f" % (self.x(x), self.y(y)) for x, y in zip(xs, ys))

    def x_ticks(self, count: int = 5) -> list[tuple[float, str]]:
        return [(self.x(v), "%.3g" % v) for v in np.linspace(self.x_min, self.x_max, count)]

    def y_ticks(self, count: int = 5) -> list[tuple[float, str]]:
        return [(self.y(v), "%.3g" % v) for v in np.linspace(self.y_min, self.y_max, count)]


@dataclass
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]


def render_histogram(
    edges,
    heights,
    caption: str,
    curve: Optional[Series] = None,
    x_label: str = "λ",
    y_label: str = "density",
) -> str:
    """Bars over `edges` with an optional overlaid curve."""
    edges = np.asarray(edges, dtype=float)
    heights = np.asarray(heights, dtype=float)
    top = heights.max(initial=0.0)
    if curve is not None:
        top = max(top, float(np.max(curve.ys)))
    frame = Frame(float(edges[0]), float(edges[-1]), 0.0, 1.05 * top if top > 0 else 1.0)
    bars = [
        {
            "x": frame.x(left),
            "y": frame.y(height),
            "width": frame.x(right) - frame.x(left),
            "height": frame.y(0.0) - frame.y(height),
        }
        for left, right, height in zip(edges[:-1], edges[1:], heights)
        if height > 0
    ]
    lines = []
    if curve is not None:
        lines.append(
            {"label": curve.label, "points": frame.points(curve.xs, curve.ys), "color": "#000000"}
        )
    return jinja_env.get_template("histogram.svg.j2").render(
        frame=frame,
        bars=bars,
        lines=lines,
        caption=caption,
        x_label=x_label,
        y_label=y_label,
    )


def render_lines(
    series: Sequence[Series],
    caption: str,
    x_label: str,
    y_label: str,
    h_refs: Sequence[tuple[float, str]] = (),
    v_refs: Sequence[tuple[float, str]] = (),
) -> str:
    """Polylines for each series with dashed horizontal/vertical references."""
    xs = np.concatenate([np.asarray(s.xs, dtype=float) for s in series])
    ys = np.concatenate(
        [np.asarray(s.ys, dtype=float) for s in series] + [np.array([y for y, _ in h_refs])]
    )
    frame = Frame.around(xs, ys)
    lines = [
        {"label": s.label, "points": frame.points(s.xs, s.ys), "color": make_color_hex(i)}
        for i, s in enumerate(series)
    ]
    refs = [
        {"x1": frame.plot_left, "x2": frame.plot_right, "y1": frame.y(y), "y2": frame.y(y), "label": label}
        for y, label in h_refs
    ]
    refs += [
        {"x1": frame.x(x), "x2": frame.x(x), "y1": frame.plot_top, "y2": frame.plot_bottom, "label": label}
        for x, label in v_refs
        if frame.x_min <= x <= frame.x_max
    ]
    return jinja_env.get_template("lines.svg.j2").render(
        frame=frame,
        lines=lines,
        refs=refs,
        caption=caption,
        x_label=x_label,
        y_label=y_label,
    )


def emit_svg(path: Path, text: str) -> Path:
    with atomic_write(path, overwrite=True, encoding="utf-8") as file:
        file.write(text)
    return path
