"""Workspace reachability on a grid, and stroke-length sweeps.

A grid point is reachable at an orientation when some assignment of elbow
branches puts every slider inside its stroke. The scan works column-block by
column-block with numpy. Orientation cosines and sines are computed once with
``math`` so each cell sees the same floating-point operations as
``inverse_kinematics`` would. The result therefore does not depend on how the
grid is split between worker threads.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .geometry import Geometry
from .kinematics import wrap_angle


class CellClass(enum.IntEnum):
    UNREACHABLE = 0
    SOME_ORIENTATIONS = 1
    ALL_ORIENTATIONS = 2


@dataclass(frozen=True)
class WorkspaceSpec:
    rectangle: tuple  # (x_min, x_max, y_min, y_max)
    n_x: int = 200
    n_y: int = 200
    orientation_samples: int = 36
    orientation_range: tuple = (-math.pi, math.pi)

    def __post_init__(self):
        x0, x1, y0, y1 = self.rectangle
        if self.n_x < 2 or self.n_y < 2:
            raise ValueError("grid resolution must be at least 2x2")
        if self.orientation_samples < 1:
            raise ValueError("need at least one orientation sample")
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate rectangle {self.rectangle}")
        if not self.orientation_range[1] > self.orientation_range[0]:
            raise ValueError("empty orientation range")

    def xs(self) -> np.ndarray:
        """Column coordinates; both rectangle edges included."""
        x0, x1, _, _ = self.rectangle
        return np.linspace(x0, x1, self.n_x)

    def ys(self) -> np.ndarray:
        """Row coordinates covering (y_min, y_max]."""
        _, _, y0, y1 = self.rectangle
        step = (y1 - y0) / self.n_y
        return y0 + step * np.arange(1, self.n_y + 1)

    def thetas(self) -> np.ndarray:
        """Orientations evenly spaced over (theta_min, theta_max], wrapped to (-pi, pi]."""
        t0, t1 = self.orientation_range
        step = (t1 - t0) / self.orientation_samples
        return np.array([wrap_angle(t0 + step * (k + 1)) for k in range(self.orientation_samples)])


def bounding_rectangle(geometry: Geometry):
    """Height ``h``, width ``w`` and the rectangle enclosing the workspace above the rails.

    ``h = min(L_iG + L_ii)`` and ``w = 2h + L``; the rectangle extends ``h``
    beyond each end of the stroke measured from the leftmost anchor, and
    spans ``(0, h]`` across the rails.
    """
    h = float(min(o + l for o, l in zip(geometry.platform_offsets, geometry.link_lengths)))
    L = geometry.stroke
    w = 2.0 * h + L
    x_lo = float(min(np.dot(geometry.anchors, geometry.directions[0])))
    return h, w, (x_lo - h, x_lo + L + h, 0.0, h)


def default_spec(geometry: Geometry, n_x=200, n_y=200, orientation_samples=36, orientation_range=(-math.pi, math.pi)):
    _, _, rect = bounding_rectangle(geometry)
    return WorkspaceSpec(rect, n_x, n_y, orientation_samples, orientation_range)


@dataclass(frozen=True)
class WorkspaceGrid:
    spec: WorkspaceSpec
    counts: np.ndarray  # (n_x, n_y) number of reachable orientations

    @property
    def reachable(self) -> np.ndarray:
        return self.counts > 0

    @property
    def classes(self) -> np.ndarray:
        out = np.full(self.counts.shape, CellClass.SOME_ORIENTATIONS, dtype=np.int8)
        out[self.counts == 0] = CellClass.UNREACHABLE
        out[self.counts == self.spec.orientation_samples] = CellClass.ALL_ORIENTATIONS
        return out

    @property
    def S(self) -> float:
        return float(np.count_nonzero(self.counts)) / self.counts.size

    CSV_HEADER = ("x", "y", "class", "reachable_orientation_count")

    def rows(self):
        xs, ys = self.spec.xs(), self.spec.ys()
        classes = self.classes
        names = {c.value: c.name.lower() for c in CellClass}
        for j in range(len(ys)):
            for i in range(len(xs)):
                yield (xs[i], ys[j], names[int(classes[i, j])], int(self.counts[i, j]))


def _count_block(geometry: Geometry, xs, ys, cos_t, sin_t) -> np.ndarray:
    X = xs[:, None, None]
    Y = ys[None, :, None]
    ok = None
    for i in range(3):
        a = geometry.rails[i].anchor
        d = geometry.rails[i].direction
        o = geometry.platform_offsets[i]
        link = geometry.link_lengths[i]
        stroke = geometry.rails[i].stroke
        # same operation order as platform_points / solve_leg
        rx = (X - o * cos_t) - a[0]
        ry = (Y - o * sin_t) - a[1]
        s = rx * d[0] + ry * d[1]
        e = -rx * d[1] + ry * d[0]
        disc = link * link - e * e
        root = np.sqrt(np.where(disc >= 0.0, disc, 0.0))
        back = s - root
        ahead = s + root
        leg = (disc >= 0.0) & (((back >= 0.0) & (back <= stroke)) | ((ahead >= 0.0) & (ahead <= stroke)))
        ok = leg if ok is None else ok & leg
    return np.count_nonzero(ok, axis=2).astype(np.int32)


def scan(geometry: Geometry, spec: WorkspaceSpec, workers: int = 1, block: int | None = None) -> WorkspaceGrid:
    """Reachability counts for every grid point.

    Leg reachability factorises: a branch assignment exists for the whole
    mechanism iff each leg has an admissible branch, so the 8 combinations
    are covered by testing both roots per leg.
    """
    xs, ys = spec.xs(), spec.ys()
    thetas = spec.thetas()
    cos_t = np.array([math.cos(t) for t in thetas])[None, None, :]
    sin_t = np.array([math.sin(t) for t in thetas])[None, None, :]
    counts = np.zeros((spec.n_x, spec.n_y), dtype=np.int32)
    if block is None:
        block = max(1, -(-spec.n_x // max(1, workers)))
    starts = range(0, spec.n_x, block)

    def work(start):
        stop = min(start + block, spec.n_x)
        counts[start:stop] = _count_block(geometry, xs[start:stop], ys, cos_t, sin_t)

    if workers <= 1:
        for st in starts:
            work(st)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    return WorkspaceGrid(spec, counts)


def dead_zones(grid: WorkspaceGrid) -> list:
    """Unreachable regions enclosed by the reachable envelope.

    4-connected components of unreachable cells that do not touch the grid
    border. Each region is an ``(k, 2)`` array of ``(ix, iy)`` indices; regions
    are ordered by their first cell.
    """
    blocked = ~grid.reachable
    labels, n = ndimage.label(blocked)
    if n == 0:
        return []
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])).tolist())
    regions = []
    for lab in range(1, n + 1):
        if lab in border:
            continue
        regions.append(np.argwhere(labels == lab))
    regions.sort(key=lambda r: tuple(r[0]))
    return regions


@dataclass(frozen=True)
class SweepRow:
    stroke: float
    S: float
    dead_zone_count: int

    @property
    def has_dead_zones(self) -> bool:
        return self.dead_zone_count > 0


SWEEP_CSV_HEADER = ("L", "S", "dead_zone_count")


def stroke_sweep(geometry: Geometry, strokes, template: WorkspaceSpec | None = None, workers: int = 1) -> list:
    """Workspace fraction and dead-zone count per stroke length.

    The rectangle is rebuilt for each stroke; resolution and orientation
    sampling come from ``template`` (its rectangle is ignored).
    """
    rows = []
    for L in strokes:
        if not L > 0:
            raise ValueError(f"stroke must be positive, got {L!r}")
        g = geometry.with_stroke(L)
        _, _, rect = bounding_rectangle(g)
        spec = default_spec(g) if template is None else replace(template, rectangle=rect)
        grid = scan(g, spec, workers=workers)
        rows.append(SweepRow(float(L), grid.S, len(dead_zones(grid))))
    return rows
