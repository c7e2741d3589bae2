"""Singularity classification and proximity metrics.

Determinants are normalised so thresholds do not depend on the size of the
mechanism: ``det(B)`` by ``prod(L_ii)`` (leaving ``prod(cos alpha_i)``) and
``det(A)`` by ``prod(L_ii) * max(L_iG)`` (A's third column carries
length squared).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import kinematics
from .errors import Unreachable
from .geometry import Geometry, cross, perp, platform_points, validate

EPS_SERIAL = 1e-8
EPS_PARALLEL = 1e-8


class Kind(enum.Enum):
    REGULAR = "regular"
    SERIAL = "serial"
    PARALLEL_INTERSECTING = "parallel-intersecting"
    PARALLEL_PARALLEL = "parallel-parallel"


@dataclass(frozen=True)
class SingularityReport:
    kind: Kind
    detA_normalized: float
    detB_normalized: float
    min_cos_alpha: float
    serial_legs: frozenset = frozenset()

    @property
    def label(self) -> str:
        if self.kind is Kind.SERIAL:
            return "serial:" + ";".join(str(i) for i in sorted(self.serial_legs))
        return self.kind.value

    CSV_HEADER = ("kind", "detA_normalized", "detB_normalized", "min_cos_alpha")

    def csv_row(self) -> tuple:
        return (self.label, self.detA_normalized, self.detB_normalized, self.min_cos_alpha)


def det_a_scale(geometry: Geometry) -> float:
    return float(np.prod(geometry.links)) * geometry.moment_arm


def det_b_scale(geometry: Geometry) -> float:
    return float(np.prod(geometry.links))


def classify(config, geometry: Geometry, eps_serial=EPS_SERIAL, eps_parallel=EPS_PARALLEL) -> SingularityReport:
    """Classify a configuration.

    Checked in priority order: serial (some link perpendicular to its rail),
    parallel-parallel (all three links parallel), parallel-intersecting
    (``det A`` vanishes without parallel links, i.e. the link lines are
    concurrent), regular. A configuration that is both serial and parallel is
    reported as serial; the determinant fields still show both.
    """
    jac = kinematics.jacobians(config, geometry)
    det_a = jac.detA / det_a_scale(geometry)
    det_b = jac.detB / det_b_scale(geometry)
    cos_alpha = np.abs(np.diag(jac.B)) / geometry.links
    min_cos = float(cos_alpha.min())

    serial = frozenset(i + 1 for i in range(3) if cos_alpha[i] <= eps_serial)
    if serial:
        kind = Kind.SERIAL
    else:
        v = config.links
        l = geometry.links
        c12 = abs(cross(v[0], v[1])) / (l[0] * l[1])
        c13 = abs(cross(v[0], v[2])) / (l[0] * l[2])
        if c12 <= eps_parallel and c13 <= eps_parallel:
            kind = Kind.PARALLEL_PARALLEL
        elif abs(det_a) <= eps_parallel:
            kind = Kind.PARALLEL_INTERSECTING
        else:
            kind = Kind.REGULAR
    return SingularityReport(kind, float(det_a), float(det_b), min_cos, serial)


def min_singular_margin(config, geometry: Geometry) -> float:
    jac = kinematics.jacobians(config, geometry)
    return min(abs(jac.detA) / det_a_scale(geometry), abs(jac.detB) / det_b_scale(geometry))


# --- constructed singular configurations ----------------------------------

def serial_configuration(pose, geometry: Geometry, leg: int = 1):
    """Configuration with link ``leg`` (1-based) perpendicular to its rail.

    The pose is shifted across the rail so that ``c_leg`` sits exactly
    ``L_leg`` away from it; the other legs take the forward elbow. Raises
    ``Unreachable`` if the shift takes another leg out of reach.
    """
    pose = kinematics.Pose(*pose)
    i = leg - 1
    c = platform_points(pose, geometry)
    n = perp(geometry.directions[i])
    e = float(np.dot(c[i] - geometry.anchors[i], n))
    target = math.copysign(geometry.links[i], e if e != 0 else 1.0)
    shift = (target - e) * n
    shifted = kinematics.Pose(pose.x + shift[0], pose.y + shift[1], pose.theta)
    c = platform_points(shifted, geometry)
    rho = np.empty(3)
    for j in range(3):
        if j == i:
            # the slider sits at the foot of c_i; avoids sqrt of a rounding-negative
            rho[j] = float(np.dot(c[j] - geometry.anchors[j], geometry.directions[j]))
            continue
        r, off = kinematics.solve_leg(c[j], geometry.anchors[j], geometry.directions[j], geometry.links[j], -1)
        if math.isnan(r):
            raise Unreachable(j + 1, abs(off) - geometry.links[j], f"leg {j + 1} cannot reach the shifted pose")
        rho[j] = r
    cfg = kinematics.configuration(shifted, rho, geometry)
    return replace(cfg, branch=(-1, -1, -1))


def parallel_links_pose(geometry: Geometry, alpha: float, x: float = 0.0):
    """Pose at which all three links can make the same angle ``alpha`` with the rails.

    Solves ``(g - a_i).n - L_iG sin(theta - phi) = L_ii sin(alpha)`` for the
    off-rail coordinate of ``g`` and the platform tilt. Only possible when the
    link lengths are an affine function of the platform offsets (and anchors
    are collinear across the rails); raises ``ValueError`` otherwise.
    Returns ``(pose, branch)``.
    """
    d = geometry.directions[0]
    n = perp(d)
    phi = math.atan2(d[1], d[0])
    offs = geometry.offsets
    rhs = geometry.links * math.sin(alpha) + geometry.anchors @ n
    M = np.column_stack([np.ones(3), -offs])
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.max(np.abs(M @ sol - rhs)) > 1e-12 * max(1.0, np.max(np.abs(rhs))):
        raise ValueError("link lengths are not affine in the platform offsets; no parallel-links pose")
    y_n, s = sol
    if abs(s) > 1.0:
        raise ValueError("required platform tilt out of range")
    theta = phi + math.asin(s)
    g = x * d + y_n * n
    elbow = -1 if math.cos(alpha) >= 0 else 1
    return kinematics.Pose(g[0], g[1], theta), (elbow, elbow, elbow)


def concurrent_lines_configuration(pose, point, geometry: Geometry):
    """Re-dimension the links so that every line B_iC_i passes through ``point``.

    Each slider is placed where the line from ``point`` through ``c_i`` meets
    rail i, and the link lengths are set to the resulting distances.
    Returns ``(geometry, configuration)``.
    """
    pose = kinematics.Pose(*pose)
    P = np.asarray(point, dtype=float)
    c = platform_points(pose, geometry)
    rho = np.empty(3)
    for i in range(3):
        w = c[i] - P
        a = geometry.anchors[i]
        d = geometry.directions[i]
        denom = cross(d, w)
        if denom == 0.0:
            raise ValueError(f"line through leg {i + 1} is parallel to its rail")
        rho[i] = -cross(a - P, w) / denom
    b = geometry.anchors + rho[:, None] * geometry.directions
    links = tuple(float(v) for v in np.linalg.norm(c - b, axis=1))
    new_geometry = validate(replace(geometry, link_lengths=links, _checked=False))
    return new_geometry, kinematics.configuration(pose, rho, new_geometry)
