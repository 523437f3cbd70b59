"""SVG rendering in the Poincare disk.

Everything arrives in Klein coordinates; chords are sampled and pushed to
the disk so geodesics come out as circular arcs.
"""

from __future__ import annotations

from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .hyperbolic import to_disk

SIZE = 640
MARGIN = 20
CURVE_COLORS = {"h": "#1f5fbf", "b": "#1f5fbf", "b1": "#1f5fbf", "b2": "#2a9d5c", "trace": "#c0392b"}


def _xy(k) -> tuple[float, float]:
    z = to_disk(k)
    r = (SIZE - 2 * MARGIN) / 2
    return MARGIN + r + r * z.real, MARGIN + r - r * z.imag


def _sample(a, b, n: int = 24):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return [_xy(a + t * (b - a)) for t in np.linspace(0.0, 1.0, n)]


def _points_attr(pts) -> str:
    return " ".join(f"{x:.3f},{y:.3f}" for x, y in pts)


class Drawing:
    def __init__(self, title: str = ""):
        self.title = title
        self.items: list[str] = []
        self.counts = {"polygons": 0, "curves": 0, "points": 0}

    def boundary_circle(self):
        c = SIZE / 2
        r = (SIZE - 2 * MARGIN) / 2
        self.items.append(f'<circle cx="{c:.3f}" cy="{c:.3f}" r="{r:.3f}" fill="none" '
                          f'stroke="#888" stroke-width="1"/>')

    def polygon(self, klein_vertices: Sequence, fill: str = "#f3efe2", stroke: str = "#333",
                label: str | None = None):
        pts = []
        n = len(klein_vertices)
        for i in range(n):
            pts.extend(_sample(klein_vertices[i], klein_vertices[(i + 1) % n])[:-1])
        cls = f' class="{escape(label)}"' if label else ""
        self.items.append(f'<polygon{cls} points="{_points_attr(pts)}" fill="{fill}" '
                          f'stroke="{stroke}" stroke-width="1"/>')
        self.counts["polygons"] += 1

    def chord(self, a, b, name: str, width: float = 2.0, count: bool = True):
        color = CURVE_COLORS.get(name, "#444")
        self.items.append(f'<polyline class="curve {escape(name)}" points="{_points_attr(_sample(a, b))}" '
                          f'fill="none" stroke="{color}" stroke-width="{width}"/>')
        self.counts["curves"] += int(count)

    def point(self, k, label: str, color: str = "#000"):
        x, y = _xy(k)
        self.items.append(f'<circle class="marked" cx="{x:.3f}" cy="{y:.3f}" r="4" fill="{color}"/>')
        self.items.append(f'<text x="{x + 6:.3f}" y="{y - 6:.3f}" font-size="13" '
                          f'font-family="sans-serif">{escape(label)}</text>')
        self.counts["points"] += 1

    def to_string(self) -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">\n')
        title = f"<title>{escape(self.title)}</title>\n" if self.title else ""
        return head + title + "\n".join(self.items) + "\n</svg>\n"


def render_domain(domain, drawing: Drawing | None = None, labels: bool = True) -> Drawing:
    d = drawing or Drawing()
    d.boundary_circle()
    d.polygon(list(domain.klein), label="domain")
    if labels:
        for k, lab in zip(domain.klein, domain.labels):
            x, y = _xy(k)
            d.items.append(f'<text x="{x + 4:.3f}" y="{y + 14:.3f}" font-size="12" fill="#555" '
                           f'font-family="sans-serif">{escape(lab)}</text>')
    return d


def render_curves(curves: Iterable, drawing: Drawing) -> Drawing:
    for curve in curves:
        for ch in curve.chords:
            drawing.chord(ch.start, ch.end, curve.name)
    return drawing


def render_points(points: dict, drawing: Drawing) -> Drawing:
    for label, k in points.items():
        drawing.point(k, label)
    return drawing


def render_path(path, drawing: Drawing) -> Drawing:
    for a, b in path:
        drawing.chord(a, b, "trace", width=1.0, count=False)
    return drawing
