import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prrkin import geometry as G
from prrkin import kinematics as K
from prrkin import workspace as W


def scalar_count(geo, x, y, thetas):
    return sum(bool(K.feasible_branches((x, y, t), geo, strict_stroke=True)) for t in thetas)


def flood_interior(blocked):
    """Independent oracle: BFS from every border unreachable cell, whatever is left is interior."""
    nx, ny = blocked.shape
    outside = np.zeros_like(blocked)
    queue = deque()
    for i in range(nx):
        for j in range(ny):
            if blocked[i, j] and (i in (0, nx - 1) or j in (0, ny - 1)):
                outside[i, j] = True
                queue.append((i, j))
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < nx and 0 <= b < ny and blocked[a, b] and not outside[a, b]:
                outside[a, b] = True
                queue.append((a, b))
    interior = blocked & ~outside
    # count components among interior cells
    seen = np.zeros_like(blocked)
    n = 0
    for i in range(nx):
        for j in range(ny):
            if interior[i, j] and not seen[i, j]:
                n += 1
                seen[i, j] = True
                queue.append((i, j))
                while queue:
                    p, q = queue.popleft()
                    for dp, dq in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        a, b = p + dp, q + dq
                        if 0 <= a < nx and 0 <= b < ny and interior[a, b] and not seen[a, b]:
                            seen[a, b] = True
                            queue.append((a, b))
    return interior, n


def fake_grid(counts, k=1):
    counts = np.asarray(counts, dtype=np.int32)
    spec = W.WorkspaceSpec((0.0, 1.0, 0.0, 1.0), counts.shape[0], counts.shape[1], k)
    return W.WorkspaceGrid(spec, counts)


def test_bounding_equal_links(equal_links):
    h, w, rect = W.bounding_rectangle(equal_links)
    assert (h, w) == (30.0, 70.0)
    assert rect == (-30.0, 40.0, 0.0, 30.0)


def test_bounding_graded(graded):
    h, w, rect = W.bounding_rectangle(graded)
    assert h == 2.9 and w == 8.8
    assert rect[1] - rect[0] == pytest.approx(w, abs=1e-15)


@given(st.floats(0.01, 100.0))
def test_bounding_scales(k):
    geo = G.graded_links_geometry()
    h, w, _ = W.bounding_rectangle(geo)
    hk, wk, _ = W.bounding_rectangle(geo.scaled(k))
    assert hk == pytest.approx(k * h, rel=1e-12)
    assert wk == pytest.approx(k * w, rel=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        W.WorkspaceSpec((0, 1, 0, 1), 1, 5)
    with pytest.raises(ValueError):
        W.WorkspaceSpec((0, 1, 0, 1), 5, 5, 0)
    with pytest.raises(ValueError):
        W.WorkspaceSpec((1, 1, 0, 1), 5, 5)


def test_spec_sampling(graded):
    spec = W.default_spec(graded, 4, 5, 4)
    np.testing.assert_allclose(spec.xs(), np.linspace(-2.9, 5.9, 4))
    assert spec.ys()[0] > 0 and spec.ys()[-1] == pytest.approx(2.9)
    np.testing.assert_allclose(spec.thetas(), [-math.pi / 2, 0.0, math.pi / 2, math.pi], atol=1e-15)


def test_above_reach_is_empty(graded):
    top = max(o + l for o, l in zip(graded.platform_offsets, graded.link_lengths))
    spec = W.WorkspaceSpec((-3.0, 6.0, top + 0.01, top + 2.0), 20, 20, 12)
    assert W.scan(graded, spec).S == 0.0


def test_tiny_stroke_gives_small_fraction(graded):
    assert W.scan(graded.with_stroke(0.01), W.default_spec(graded.with_stroke(0.01), 40, 40, 12)).S < 0.1


def test_scan_matches_scalar_ik(graded):
    spec = W.default_spec(graded, 30, 20, 12)
    grid = W.scan(graded, spec)
    rng = np.random.default_rng(0)
    xs, ys, ts = spec.xs(), spec.ys(), spec.thetas()
    for _ in range(100):
        i, j = rng.integers(spec.n_x), rng.integers(spec.n_y)
        assert grid.counts[i, j] == scalar_count(graded, xs[i], ys[j], ts)


def test_all_orientation_cells_pass_every_orientation(graded):
    # over a full turn no cell is reachable at every angle; narrow the range
    spec = W.default_spec(graded, 100, 100, 36, (-0.5, 0.5))
    grid = W.scan(graded, spec)
    cells = np.argwhere(grid.classes == W.CellClass.ALL_ORIENTATIONS)
    assert len(cells) >= 100
    rng = np.random.default_rng(1)
    xs, ys = spec.xs(), spec.ys()
    for i, j in cells[rng.choice(len(cells), 100, replace=False)]:
        for t in spec.thetas():
            assert K.feasible_branches((xs[i], ys[j], t), graded, strict_stroke=True)


def test_workers_do_not_change_grid(graded):
    spec = W.default_spec(graded, 53, 41, 12)
    base = W.scan(graded, spec).counts
    for workers in (2, 4, 8):
        assert np.array_equal(W.scan(graded, spec, workers=workers).counts, base)
    assert np.array_equal(W.scan(graded, spec, block=7).counts, base)


def test_refinement_bound(graded):
    for n in (25, 50):
        coarse = W.scan(graded, W.default_spec(graded, n, n, 36)).S
        fine = W.scan(graded, W.default_spec(graded, 2 * n, 2 * n, 36)).S
        assert abs(fine - coarse) <= 2.0 / n


def test_grid_rows_and_classes():
    grid = fake_grid([[0, 1], [2, 2]], k=2)
    rows = list(grid.rows())
    assert rows[0] == (0.0, 0.5, "unreachable", 0)
    assert rows[1] == (1.0, 0.5, "all_orientations", 2)
    assert rows[2] == (0.0, 1.0, "some_orientations", 1)
    assert grid.S == 0.75


def test_no_dead_zones_when_fully_reachable():
    assert W.dead_zones(fake_grid(np.ones((6, 5)))) == []


def test_ring_fixture_has_one_zone():
    counts = np.ones((7, 7))
    counts[2:5, 2:5] = 0
    counts[3, 3] = 1
    zones = W.dead_zones(fake_grid(counts))
    assert len(zones) == 1
    assert len(zones[0]) == 8


def test_border_touching_hole_is_not_interior():
    counts = np.ones((6, 6))
    counts[0:3, 2] = 0
    assert W.dead_zones(fake_grid(counts)) == []


def test_diagonal_neighbours_are_separate_zones():
    counts = np.ones((6, 6))
    counts[2, 2] = counts[3, 3] = 0
    assert len(W.dead_zones(fake_grid(counts))) == 2


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 0.7))
def test_dead_zones_match_flood_fill(seed, p):
    rng = np.random.default_rng(seed)
    counts = (rng.random((12, 9)) > p).astype(np.int32)
    interior, n = flood_interior(counts == 0)
    zones = W.dead_zones(fake_grid(counts))
    assert len(zones) == n
    marked = np.zeros_like(interior)
    for z in zones:
        marked[z[:, 0], z[:, 1]] = True
    assert np.array_equal(marked, interior)


def test_dead_zones_on_real_grid_match_flood_fill(graded):
    grid = W.scan(graded.with_stroke(1.0), W.default_spec(graded.with_stroke(1.0), 100, 100, 36))
    _, n = flood_interior(~grid.reachable)
    assert len(W.dead_zones(grid)) == n


def test_single_value_sweep_equals_scan(graded):
    template = W.default_spec(graded, 40, 40, 12)
    (row,) = W.stroke_sweep(graded, [2.0], template)
    geo = graded.with_stroke(2.0)
    grid = W.scan(geo, W.default_spec(geo, 40, 40, 12))
    assert row.stroke == 2.0 and row.S == grid.S
    assert row.dead_zone_count == len(W.dead_zones(grid))


def test_sweep_is_nondecreasing(graded):
    rows = W.stroke_sweep(graded, [1.0, 1.5, 2.0, 2.5, 3.0], W.default_spec(graded, 60, 60, 36))
    s = [r.S for r in rows]
    assert all(b >= a for a, b in zip(s, s[1:]))


def test_sweep_rejects_bad_stroke(graded):
    with pytest.raises(ValueError):
        W.stroke_sweep(graded, [0.0])
