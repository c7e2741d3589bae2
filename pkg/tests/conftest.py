import math

import hypothesis
import numpy as np
import pytest

from prrkin import geometry as G
from prrkin import kinematics as K
from prrkin import workspace as W
from prrkin.errors import DomainError

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES = []


def record_acceptance(number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def equal_links():
    return G.equal_links_geometry()


@pytest.fixture
def graded():
    return G.graded_links_geometry(3.0)


GEOMETRIES = {
    "equal-links": G.equal_links_geometry,
    "graded-links": G.graded_links_geometry,
}


def random_reachable_poses(geometry, n, seed, strict=True):
    """``n`` poses inside the bounding rectangle with at least one feasible branch.

    Yields ``(pose, branches)``.
    """
    rng = np.random.default_rng(seed)
    _, _, (x0, x1, y0, y1) = W.bounding_rectangle(geometry)
    out = []
    while len(out) < n:
        pose = K.Pose(rng.uniform(x0, x1), rng.uniform(y0, y1), rng.uniform(-math.pi, math.pi))
        branches = K.feasible_branches(pose, geometry, strict)
        if branches:
            out.append((pose, branches))
    return out


def random_regular_configs(geometry, n, seed, min_margin=1e-3):
    """Strict-stroke configurations whose normalised singular margin is at least ``min_margin``."""
    from prrkin import singularity as S

    rng = np.random.default_rng(seed)
    out = []
    for pose, branches in random_reachable_poses(geometry, 4 * n, seed):
        br = branches[rng.integers(len(branches))]
        cfg = K.inverse_kinematics(pose, geometry, br, strict_stroke=True)
        if S.min_singular_margin(cfg, geometry) >= min_margin:
            out.append(cfg)
        if len(out) == n:
            return out
    raise RuntimeError("not enough regular configurations")


def try_ik(pose, geometry, branch):
    try:
        return K.inverse_kinematics(pose, geometry, branch)
    except DomainError:
        return None
