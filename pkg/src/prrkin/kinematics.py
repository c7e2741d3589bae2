"""Position and velocity kinematics.

Velocity relation: ``A @ twist == B @ joint_rates`` with twist
``(xdot_G, ydot_G, thetadot_G)``. Row i of ``A`` is
``[(c_i - b_i)^T, (c_i - b_i)^T perp(c_i - g)]`` and ``B`` is diagonal with
``B_ii = (c_i - b_i)^T d_i = L_ii cos(alpha_i)``. The third column follows from
differentiating ``|c_i - b_i|^2 = L_ii^2`` with ``c_i = g - L_iG u(theta)``;
``perp(c_i - g) == -perp(g - c_i)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import singularity
from .errors import (
    NoConvergence,
    ParallelSingularity,
    SerialSingularity,
    SingularIteration,
    StrokeViolation,
    Unreachable,
)
from .geometry import Geometry, perp, platform_points

FK_TOL = 1e-10
FK_MAX_ITER = 50
FK_COND_LIMIT = 1e12

ALL_BRANCHES = tuple(itertools.product((1, -1), repeat=3))


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    return theta - 2.0 * math.pi * math.ceil((theta - math.pi) / (2.0 * math.pi))


def angle_diff(a: float, b: float) -> float:
    return wrap_angle(a - b)


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def __iter__(self):
        return iter((self.x, self.y, self.theta))

    def __add__(self, twist):
        dx, dy, dth = twist
        return Pose(self.x + dx, self.y + dy, self.theta + dth)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta])

    @property
    def g(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class Configuration:
    pose: Pose
    joints: np.ndarray  # (3,) slider extensions rho_i
    b: np.ndarray  # (3, 2) slider points
    c: np.ndarray  # (3, 2) platform joints
    alpha: np.ndarray  # (3,) link angles from the rail direction
    branch: tuple[int, int, int]

    @property
    def links(self) -> np.ndarray:
        return self.c - self.b


@dataclass(frozen=True)
class JacobianPair:
    A: np.ndarray
    B: np.ndarray
    detA: float
    detB: float


def det3(m) -> float:
    """Cofactor expansion along the first row."""
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def _link_angles(links: np.ndarray, directions: np.ndarray) -> np.ndarray:
    along = np.einsum("ij,ij->i", links, directions)
    across = np.einsum("ij,ij->i", links, perp(directions))
    return np.arctan2(across, along)


def solve_leg(c_i, anchor, direction, link, elbow):
    """Closed-form single-leg IK.

    Returns ``(rho, off_rail)`` where ``rho`` is the along-rail coordinate of the
    slider measured from ``anchor``. ``off_rail`` is the signed distance of
    ``c_i`` from the rail line; the leg has no real solution when it exceeds
    ``link`` in magnitude (the caller decides what to do with that).
    """
    rel = c_i - anchor
    s = rel[0] * direction[0] + rel[1] * direction[1]
    e = -rel[0] * direction[1] + rel[1] * direction[0]
    disc = link * link - e * e
    if disc < 0.0:
        return math.nan, e
    return s + elbow * math.sqrt(disc), e


def inverse_kinematics(pose, geometry: Geometry, branch=(-1, -1, -1), strict_stroke=False) -> Configuration:
    """Slider extensions for a platform pose.

    ``branch[i] = -1`` puts slider i behind the foot of ``c_i`` on its rail
    (link leaning forward, ``cos alpha_i > 0``); ``+1`` puts it ahead.
    """
    pose = pose if isinstance(pose, Pose) else Pose(*pose)
    c = platform_points(pose, geometry)
    anchors = geometry.anchors
    dirs = geometry.directions
    links = geometry.links
    rho = np.empty(3)
    for i in range(3):
        r, e = solve_leg(c[i], anchors[i], dirs[i], links[i], branch[i])
        if math.isnan(r):
            raise Unreachable(i + 1, abs(e) - links[i], f"leg {i + 1} cannot reach: off-rail distance {abs(e):.6g} > link {links[i]:.6g}")
        rho[i] = r
    if strict_stroke:
        strokes = geometry.strokes
        for i in range(3):
            if rho[i] < 0.0:
                raise StrokeViolation(i + 1, -rho[i], f"leg {i + 1} below stroke: rho = {rho[i]:.6g}")
            if rho[i] > strokes[i]:
                raise StrokeViolation(i + 1, rho[i] - strokes[i], f"leg {i + 1} beyond stroke: rho = {rho[i]:.6g} > {strokes[i]:.6g}")
    b = anchors + rho[:, None] * dirs
    alpha = _link_angles(c - b, dirs)
    return Configuration(pose, rho, b, c, alpha, tuple(int(s) for s in branch))


def configuration(pose, joints, geometry: Geometry) -> Configuration:
    """Assemble a configuration from a pose and joints known to be compatible."""
    pose = pose if isinstance(pose, Pose) else Pose(*pose)
    rho = np.asarray(joints, dtype=float)
    dirs = geometry.directions
    b = geometry.anchors + rho[:, None] * dirs
    c = platform_points(pose, geometry)
    alpha = _link_angles(c - b, dirs)
    branch = tuple(-1 if math.cos(a) >= 0.0 else 1 for a in alpha)
    return Configuration(pose, rho, b, c, alpha, branch)


def feasible_branches(pose, geometry: Geometry, strict_stroke=True):
    out = []
    for br in ALL_BRANCHES:
        try:
            inverse_kinematics(pose, geometry, br, strict_stroke)
        except (Unreachable, StrokeViolation):
            continue
        out.append(br)
    return out


def _a_matrix(g, b, c) -> np.ndarray:
    v = c - b
    moment = np.einsum("ij,ij->i", v, perp(c - g))
    return np.column_stack([v, moment])


def jacobians(config: Configuration, geometry: Geometry) -> JacobianPair:
    A = _a_matrix(config.pose.g, config.b, config.c)
    diag = np.einsum("ij,ij->i", config.links, geometry.directions)
    B = np.diag(diag)
    return JacobianPair(A, B, det3(A), float(diag[0] * diag[1] * diag[2]))


def twist_to_joint_rates(config, geometry, twist, eps_serial=None) -> np.ndarray:
    eps = singularity.EPS_SERIAL if eps_serial is None else eps_serial
    jac = jacobians(config, geometry)
    diag = np.diag(jac.B)
    cos_alpha = diag / geometry.links
    for i in range(3):
        if abs(cos_alpha[i]) <= eps:
            raise SerialSingularity(i + 1, abs(cos_alpha[i]))
    return jac.A @ np.asarray(twist, dtype=float) / diag


def joint_rates_to_twist(config, geometry, joint_rates, eps_parallel=None) -> np.ndarray:
    eps = singularity.EPS_PARALLEL if eps_parallel is None else eps_parallel
    jac = jacobians(config, geometry)
    norm = jac.detA / singularity.det_a_scale(geometry)
    if abs(norm) <= eps:
        raise ParallelSingularity(f"normalized det(A) = {norm:.3e}")
    return np.linalg.solve(jac.A, jac.B @ np.asarray(joint_rates, dtype=float))


@dataclass(frozen=True)
class FKInfo:
    iterations: int
    residual: float


def fk_residuals(p, slider_points, geometry: Geometry) -> np.ndarray:
    c = platform_points(p, geometry)
    v = c - slider_points
    return np.einsum("ij,ij->i", v, v) - geometry.links**2


def forward_kinematics(
    joints,
    geometry: Geometry,
    seed,
    tol: float = FK_TOL,
    max_iter: int = FK_MAX_ITER,
    full_output: bool = False,
):
    """Platform pose for given slider extensions, by damped Newton iteration.

    Solves ``|c_i(pose) - b_i|^2 = L_ii^2``. The residual Jacobian is
    ``2 A`` evaluated at the iterate. Steps are halved until the residual
    norm decreases. The result is the assembly mode whose Newton basin holds
    the seed; close to a parallel singularity two modes are near each other
    and a loose seed can land on either. Raises ``SingularIteration`` when the
    (column-scaled) Newton matrix has condition number above 1e12 at an
    iterate that still needs a step, ``NoConvergence`` after ``max_iter``. An
    exact seed returns unchanged even at a singular pose.
    """
    rho = np.asarray(joints, dtype=float)
    b = geometry.anchors + rho[:, None] * geometry.directions
    p = np.array(list(seed), dtype=float)
    col_scale = np.array([1.0, 1.0, 1.0 / geometry.moment_arm])
    r = fk_residuals(p, b, geometry)
    it = 0
    J = 2.0 * _a_matrix(p[:2], b, platform_points(p, geometry))
    while np.max(np.abs(r)) > tol:
        if it >= max_iter:
            raise NoConvergence(it, float(np.max(np.abs(r))))
        if np.linalg.cond(J * col_scale) > FK_COND_LIMIT:
            raise SingularIteration(f"Newton matrix near-singular at iteration {it}")
        step = np.linalg.solve(J, -r)
        norm0 = np.linalg.norm(r)
        lam = 1.0
        while True:
            trial = p + lam * step
            r_trial = fk_residuals(trial, b, geometry)
            if np.linalg.norm(r_trial) < norm0 or lam < 1e-6:
                break
            lam *= 0.5
        p, r = trial, r_trial
        it += 1
        J = 2.0 * _a_matrix(p[:2], b, platform_points(p, geometry))
    if it > 0:
        # one undamped polish step; Newton is quadratic here
        trial = p + np.linalg.solve(J, -r)
        r_trial = fk_residuals(trial, b, geometry)
        if np.max(np.abs(r_trial)) <= np.max(np.abs(r)):
            p, r = trial, r_trial
    pose = Pose(*p)
    if full_output:
        return pose, FKInfo(it, float(np.max(np.abs(r))))
    return pose
