# Copyright 2022 Huawei Technologies Co., Ltd
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================

"""SVG figures of m-spirals and CSV tables.

Geometry is written in kernel (y-up) coordinates. The only flip is the matrix
transform on the root group.
"""

import io
import logging
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Mapping, Optional, Tuple

import pandas as pd
import svgwrite

from src.diagonals import extreme_vertices
from src.errors import BadOptions, CapExceeded, RenderMismatch
from src.spiral import (MAX_SQUARES, arc_geometry, arc_polyline, make_spec, pole_closed, square_center_closed,
                        square_vertices, whirl_squares)

logger = logging.getLogger(__name__)

LAYERS = ("squares", "arcs", "diagonals", "circumcircles", "pole", "pole_circle")
VIEWPORTS = ("content", "first_square")
MIN_PIXELS = 64
MAX_MARGIN = 0.45
POLE_CIRCLE_TOL = 1e-12
CSV_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True)
class Stroke:
    """Stroke of one layer. width and dash lengths are in pixels."""
    color: str
    width: float
    dash: Optional[Tuple[float, ...]] = None


DEFAULT_STYLES = {
    "squares": Stroke("#404040", 1.0),
    "arcs": Stroke("#b03a2e", 2.0),
    "diagonals": Stroke("#1f4e79", 1.0, (6.0, 4.0)),
    "circumcircles": Stroke("#808080", 0.75, (2.0, 3.0)),
    "pole": Stroke("#000000", 1.0),
    "pole_circle": Stroke("#1e8449", 1.0, (4.0, 2.0)),
}


@dataclass(frozen=True)
class RenderOptions:
    width_px: int = 800
    height_px: int = 600
    margin_fraction: float = 0.05
    layers: FrozenSet[str] = frozenset(("squares", "arcs", "diagonals", "pole"))
    styles: Mapping[str, Stroke] = field(default_factory=dict)
    arcs_as_polyline: bool = False
    samples_per_arc: int = 32
    pole_ratios: Tuple[float, ...] = ()
    pole_marker_px: float = 3.0
    viewport: str = "content"

    def __post_init__(self):
        for name in ("width_px", "height_px"):
            value = getattr(self, name)
            if int(value) != value or value < MIN_PIXELS:
                raise BadOptions(f"{name} must be an integer >= {MIN_PIXELS}, got {value!r}")
        if not 0.0 <= self.margin_fraction <= MAX_MARGIN:
            raise BadOptions(f"margin_fraction must be in [0, {MAX_MARGIN}], got {self.margin_fraction!r}")
        layers = frozenset(self.layers)
        unknown = layers.difference(LAYERS).union(set(self.styles).difference(LAYERS))
        if unknown:
            raise BadOptions(f"unknown layers: {', '.join(sorted(unknown))}")
        if self.viewport not in VIEWPORTS:
            raise BadOptions(f"viewport must be one of {VIEWPORTS}, got {self.viewport!r}")
        if not self.pole_marker_px > 0.0:
            raise BadOptions(f"pole_marker_px must be > 0, got {self.pole_marker_px!r}")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "pole_ratios", tuple(float(m) for m in self.pole_ratios))

    def style(self, layer):
        return self.styles.get(layer, DEFAULT_STYLES[layer])


def _poles_on_circle(spec, ratios):
    """
    Poles sharing the first square of spec, each re-checked against the
    first circumcircle.
    """
    radius = spec.L / math.sqrt(2.0)
    poles = []
    for m in (spec.m,) + tuple(ratios):
        pole = pole_closed(make_spec(m, spec.L, spec.center0)).point
        gap = abs(pole.distance(spec.center0) - radius)
        if gap > POLE_CIRCLE_TOL * spec.L:
            raise RenderMismatch(f"pole for m={m!r} is {gap!r} off the first circumcircle")
        poles.append(pole)
    return poles


def _bounds(spec, squares, opts, poles):
    if opts.viewport == "first_square":
        h = spec.L / 2
        return spec.center0.x - h, spec.center0.y - h, spec.center0.x + h, spec.center0.y + h
    xs, ys = [], []
    for sq in squares:
        reach = sq.side / math.sqrt(2.0) if "circumcircles" in opts.layers else sq.side / 2
        xs += [sq.center.x - reach, sq.center.x + reach]
        ys += [sq.center.y - reach, sq.center.y + reach]
    if "diagonals" in opts.layers:
        for p in extreme_vertices(spec)[:4]:
            xs.append(p.x)
            ys.append(p.y)
    if "pole_circle" in opts.layers:
        r = spec.L / math.sqrt(2.0)
        xs += [spec.center0.x - r, spec.center0.x + r]
        ys += [spec.center0.y - r, spec.center0.y + r]
    if "pole" in opts.layers:
        xs += [p.x for p in poles]
        ys += [p.y for p in poles]
    return min(xs), min(ys), max(xs), max(ys)


def document_transform(bounds, opts):
    """
    (scale, tx, ty) of the map x -> tx + scale*x, y -> ty - scale*y that fits
    bounds into the page with the requested margin.
    """
    x0, y0, x1, y1 = bounds
    w, h = opts.width_px, opts.height_px
    usable_w = w * (1.0 - 2.0 * opts.margin_fraction)
    usable_h = h * (1.0 - 2.0 * opts.margin_fraction)
    scale = min(usable_w / (x1 - x0), usable_h / (y1 - y0))
    tx = w / 2.0 - scale * (x0 + x1) / 2.0
    ty = h / 2.0 + scale * (y0 + y1) / 2.0
    return scale, tx, ty


def _layer_group(dwg, name, stroke, scale, filled=False):
    attrs = {"id": name, "fill": stroke.color if filled else "none", "stroke": stroke.color,
             "stroke_width": stroke.width / scale}
    if stroke.dash:
        attrs["stroke_dasharray"] = ",".join(repr(d / scale) for d in stroke.dash)
    return dwg.g(**attrs)


def _arc_path(squares):
    arcs = [arc_geometry(sq) for sq in squares]
    parts = [f"M {arcs[0].start.x!r} {arcs[0].start.y!r}"]
    for arc in arcs:
        # sweep flag 0: clockwise in y-up user space
        parts.append(f"A {arc.radius!r} {arc.radius!r} 0 0 0 {arc.end.x!r} {arc.end.y!r}")
    return " ".join(parts)


def render_svg(spec, n_squares, opts=None, max_squares=MAX_SQUARES):
    """
    Draw the requested layers of the first n_squares squares as an SVG document.

    Returns:
        SVG text, identical for identical inputs.
    """
    opts = RenderOptions() if opts is None else opts
    squares = whirl_squares(spec, n_squares, max_squares)
    poles = _poles_on_circle(spec, opts.pole_ratios)
    scale, tx, ty = document_transform(_bounds(spec, squares, opts, poles), opts)
    logger.debug("render_svg: m=%r n=%d scale=%r layers=%s", spec.m, n_squares, scale, sorted(opts.layers))

    dwg = svgwrite.Drawing(size=(f"{opts.width_px}px", f"{opts.height_px}px"), profile="full", debug=False)
    dwg.viewbox(0, 0, opts.width_px, opts.height_px)
    root = dwg.g(transform=f"matrix({scale!r} 0 0 {-scale!r} {tx!r} {ty!r})")

    for name in LAYERS:
        if name not in opts.layers:
            continue
        group = _layer_group(dwg, name, opts.style(name), scale, filled=(name == "pole"))
        if name == "squares":
            for sq in squares:
                _, _, ll, _ = square_vertices(sq)
                group.add(dwg.rect(insert=(ll.x, ll.y), size=(sq.side, sq.side)))
        elif name == "arcs":
            if opts.arcs_as_polyline:
                pts = arc_polyline(spec, n_squares, opts.samples_per_arc, max_squares)
                group.add(dwg.polyline(points=[(float(x), float(y)) for x, y in pts]))
            else:
                group.add(dwg.path(d=_arc_path(squares)))
        elif name == "diagonals":
            a, b, c, d, _ = extreme_vertices(spec)
            group.add(dwg.line(start=a.as_tuple(), end=c.as_tuple()))
            group.add(dwg.line(start=b.as_tuple(), end=d.as_tuple()))
        elif name == "circumcircles":
            for sq in squares:
                center = square_center_closed(spec, sq.index)
                group.add(dwg.circle(center=center.as_tuple(), r=sq.side / math.sqrt(2.0)))
        elif name == "pole":
            for pole in poles:
                group.add(dwg.circle(center=pole.as_tuple(), r=opts.pole_marker_px / scale))
        elif name == "pole_circle":
            group.add(dwg.circle(center=spec.center0.as_tuple(), r=spec.L / math.sqrt(2.0)))
        root.add(group)
    dwg.add(root)

    out = io.StringIO()
    dwg.write(out)
    return out.getvalue()


def _frame_to_csv(frame):
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def emit_centers_csv(spec, max_i):
    """Closed-form centers and sides of squares 0..max_i."""
    if int(max_i) != max_i or not 0 <= max_i <= MAX_SQUARES:
        raise CapExceeded(f"max_i must be an integer in [0, {MAX_SQUARES}], got {max_i!r}")
    rows = []
    for i in range(int(max_i) + 1):
        center = square_center_closed(spec, i)
        try:
            side = spec.L / spec.m ** i
        except OverflowError:
            side = 0.0
        rows.append((i, center.x, center.y, side))
    return _frame_to_csv(pd.DataFrame(rows, columns=["i", "x", "y", "side"]))


def emit_pfib_csv(rows):
    frame = pd.DataFrame([(r.p, r.alpha, r.residual, r.iterations) for r in rows],
                         columns=["p", "alpha", "residual", "iterations"])
    return _frame_to_csv(frame)


def emit_samples_csv(samples):
    return _frame_to_csv(pd.DataFrame(samples.xy, columns=["x", "y"]))
