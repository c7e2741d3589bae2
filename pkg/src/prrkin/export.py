"""CSV and SVG writers.

Numbers in CSV use 17 significant digits so a value read back is bit-identical
to the one written. SVG output keeps the y-axis pointing up.
"""

from __future__ import annotations

import io

import numpy as np

from .workspace import CellClass, WorkspaceGrid, dead_zones


def fmt(v) -> str:
    if isinstance(v, (str, bool)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


class _Canvas:
    def __init__(self, rect, scale, margin=10.0):
        self.x0, self.x1, self.y0, self.y1 = rect
        self.scale = scale
        self.margin = margin
        self.width = (self.x1 - self.x0) * scale + 2 * margin
        self.height = (self.y1 - self.y0) * scale + 2 * margin
        self.parts = []

    def px(self, x, y):
        return (
            self.margin + (x - self.x0) * self.scale,
            self.margin + (self.y1 - y) * self.scale,
        )

    def text(self):
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width:.2f}" '
            f'height="{self.height:.2f}" viewBox="0 0 {self.width:.2f} {self.height:.2f}">\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _grid_cell_size(grid: WorkspaceGrid):
    xs, ys = grid.spec.xs(), grid.spec.ys()
    return xs[1] - xs[0], ys[1] - ys[0]


def workspace_svg(grid: WorkspaceGrid, scale: float = 50.0, traces=()) -> str:
    """Heat map of reachable cells with dead zones hatched.

    Fill darkness tracks the fraction of reachable orientations. The reachable
    envelope is outlined cell edge by cell edge. ``traces`` are sequences of
    ``(x, y)`` drawn as polylines on top.
    """
    xs, ys = grid.spec.xs(), grid.spec.ys()
    dx, dy = _grid_cell_size(grid)
    x0, x1, y0, y1 = grid.spec.rectangle
    canvas = _Canvas((x0 - dx / 2, x1 + dx / 2, y0, y1 + dy / 2), scale)
    canvas.parts.append(
        '<defs><pattern id="hatch" width="4" height="4" patternUnits="userSpaceOnUse" '
        'patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="4" stroke="#c00" stroke-width="1"/>'
        "</pattern></defs>"
    )
    w, h = dx * scale, dy * scale
    k = grid.spec.orientation_samples
    classes = grid.classes
    # one rect per horizontal run of equal counts
    for j, y in enumerate(ys):
        i = 0
        while i < len(xs):
            n = int(grid.counts[i, j])
            run = i + 1
            while run < len(xs) and int(grid.counts[run, j]) == n:
                run += 1
            if n > 0:
                px, py = canvas.px(xs[i] - dx / 2, y + dy / 2)
                shade = int(round(220 - 180 * n / k))
                cls = "all" if classes[i, j] == CellClass.ALL_ORIENTATIONS else "some"
                canvas.parts.append(
                    f'<rect class="{cls}" x="{px:.3f}" y="{py:.3f}" width="{w * (run - i):.3f}" '
                    f'height="{h:.3f}" fill="rgb({shade},{shade},255)"/>'
                )
            i = run
    for region in dead_zones(grid):
        for i, j in region:
            px, py = canvas.px(xs[i] - dx / 2, ys[j] + dy / 2)
            canvas.parts.append(
                f'<rect class="dead" x="{px:.3f}" y="{py:.3f}" width="{w:.3f}" height="{h:.3f}" fill="url(#hatch)"/>'
            )
    reach = grid.reachable
    segs = []
    nx, ny = reach.shape
    for i in range(nx):
        for j in range(ny):
            if not reach[i, j]:
                continue
            xl, xr = xs[i] - dx / 2, xs[i] + dx / 2
            yb, yt = ys[j] - dy / 2, ys[j] + dy / 2
            if i == 0 or not reach[i - 1, j]:
                segs.append((xl, yb, xl, yt))
            if i == nx - 1 or not reach[i + 1, j]:
                segs.append((xr, yb, xr, yt))
            if j == 0 or not reach[i, j - 1]:
                segs.append((xl, yb, xr, yb))
            if j == ny - 1 or not reach[i, j + 1]:
                segs.append((xl, yt, xr, yt))
    if segs:
        d = []
        for xa, ya, xb, yb in segs:
            pa, pb = canvas.px(xa, ya), canvas.px(xb, yb)
            d.append(f"M{pa[0]:.3f},{pa[1]:.3f}L{pb[0]:.3f},{pb[1]:.3f}")
        canvas.parts.append(f'<path class="envelope" d="{"".join(d)}" stroke="black" stroke-width="1" fill="none"/>')
    for trace in traces:
        canvas.parts.append(_polyline(canvas, trace))
    return canvas.text()


def _polyline(canvas, points) -> str:
    pts = " ".join("{:.3f},{:.3f}".format(*canvas.px(x, y)) for x, y in points)
    return f'<polyline class="trace" points="{pts}" stroke="#d60" stroke-width="1.5" fill="none"/>'


def trace_svg(points, rect, scale: float = 50.0, grid: WorkspaceGrid | None = None) -> str:
    """Trajectory polyline, optionally over a workspace heat map."""
    if grid is not None:
        return workspace_svg(grid, scale, traces=[points])
    canvas = _Canvas(rect, scale)
    x0, x1, y0, y1 = rect
    a, b = canvas.px(x0, y1), canvas.px(x1, y0)
    canvas.parts.append(
        f'<rect x="{a[0]:.3f}" y="{a[1]:.3f}" width="{b[0] - a[0]:.3f}" height="{b[1] - a[1]:.3f}" '
        'fill="none" stroke="#888"/>'
    )
    if len(points):
        canvas.parts.append(_polyline(canvas, points))
    return canvas.text()
