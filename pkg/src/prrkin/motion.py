"""Simple-motion rate laws and a joint-space trajectory integrator.

The three laws give slider rates for a canonical platform twist without
inverting the Jacobian:

* horizontal translation at speed V (along the rails): every slider moves at V;
* vertical translation at speed V: ``rho_i' = V tan(alpha_i)``;
* pure rotation at rate w: ``rho_i' = L_iG w sin(theta_G - alpha_i) / cos(alpha_i)``.

Angles here are measured in the rail frame, so "horizontal" is the rail
direction and ``theta_G`` is taken relative to it. The rotation sign follows
from ``c_i = g - L_iG u(theta_G)``; it is checked against
``twist_to_joint_rates`` in the tests rather than taken on trust.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kinematics, singularity
from .errors import DomainError, RailMisaligned, SerialSingularity, SingularityEncountered
from .geometry import Geometry, cross

DEFAULT_DT = 1e-3
MARGIN_FLOOR = 1e-6


class LawKind(enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    ROTATION = "rotation"
    TWIST = "twist"


@dataclass(frozen=True)
class RateLaw:
    kind: LawKind
    value: tuple

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.value):
            raise ValueError(f"rate law parameter must be finite, got {self.value}")

    @classmethod
    def horizontal(cls, speed):
        return cls(LawKind.HORIZONTAL, (float(speed),))

    @classmethod
    def vertical(cls, speed):
        return cls(LawKind.VERTICAL, (float(speed),))

    @classmethod
    def rotation(cls, rate):
        return cls(LawKind.ROTATION, (float(rate),))

    @classmethod
    def twist(cls, xdot, ydot, thetadot):
        return cls(LawKind.TWIST, (float(xdot), float(ydot), float(thetadot)))

    def canonical_twist(self, geometry: Geometry) -> np.ndarray:
        """The world-frame platform twist this law is meant to produce."""
        if self.kind is LawKind.TWIST:
            return np.array(self.value)
        d = geometry.directions[0]
        v = self.value[0]
        if self.kind is LawKind.HORIZONTAL:
            return np.array([v * d[0], v * d[1], 0.0])
        if self.kind is LawKind.VERTICAL:
            return np.array([-v * d[1], v * d[0], 0.0])
        return np.array([0.0, 0.0, v])

    def rates(self, config, geometry: Geometry, eps_serial=singularity.EPS_SERIAL) -> np.ndarray:
        if self.kind is LawKind.HORIZONTAL:
            return horizontal_rates(self.value[0], geometry)
        if self.kind is LawKind.VERTICAL:
            return vertical_rates(config, self.value[0], eps_serial)
        if self.kind is LawKind.ROTATION:
            return rotation_rates(config, geometry, self.value[0], eps_serial)
        return kinematics.twist_to_joint_rates(config, geometry, self.value, eps_serial)

    def __str__(self):
        return f"{self.kind.value}:" + ",".join(repr(v) for v in self.value)


def horizontal_rates(speed: float, geometry: Geometry, axis=(1.0, 0.0)) -> np.ndarray:
    """Equal slider speeds; needs no configuration at all.

    ``axis`` is the requested translation direction. It has to coincide with
    the rails, otherwise equal slider motion does not translate along it.
    """
    axis = np.asarray(axis, dtype=float)
    for i, d in enumerate(geometry.directions, start=1):
        if abs(cross(d, axis)) > 1e-12 or float(np.dot(d, axis)) <= 0.0:
            raise RailMisaligned(f"rail {i} direction {tuple(d)} is not the translation axis {tuple(axis)}")
    return np.full(3, float(speed))


def _check_cos(cos_alpha, eps):
    for i, ca in enumerate(cos_alpha, start=1):
        if abs(ca) <= eps:
            raise SerialSingularity(i, abs(ca))


def vertical_rates(config, speed: float, eps_serial=singularity.EPS_SERIAL) -> np.ndarray:
    cos_alpha = np.cos(config.alpha)
    _check_cos(cos_alpha, eps_serial)
    return speed * np.sin(config.alpha) / cos_alpha


def rotation_rates(config, geometry: Geometry, rate: float, eps_serial=singularity.EPS_SERIAL) -> np.ndarray:
    cos_alpha = np.cos(config.alpha)
    _check_cos(cos_alpha, eps_serial)
    d = geometry.directions[0]
    theta = config.pose.theta - math.atan2(d[1], d[0])
    return geometry.offsets * rate * np.sin(theta - config.alpha) / cos_alpha


def measure_beta(config) -> float:
    """Angle at C_1 turning counter-clockwise from the link (towards B_1) to the platform (towards G), in [0, 2 pi)."""
    to_b = config.b[0] - config.c[0]
    to_g = config.pose.g - config.c[0]
    beta = math.atan2(to_g[1], to_g[0]) - math.atan2(to_b[1], to_b[0])
    return beta % (2.0 * math.pi)


def theta_from_alpha_beta(alpha_1: float, beta: float) -> float:
    """Platform orientation from leg 1's link angle and the joint angle at C_1."""
    return kinematics.wrap_angle(beta + alpha_1 - math.pi)


@dataclass(frozen=True)
class Sample:
    t: float
    pose: kinematics.Pose
    joints: np.ndarray
    margin: float


@dataclass
class TrajectoryTrace:
    law: RateLaw
    dt: float
    initial: Sample
    samples: list = field(default_factory=list)
    status: str = "running"

    CSV_HEADER = ("t", "x_G", "y_G", "theta_G", "rho_1", "rho_2", "rho_3", "margin")

    def rows(self):
        for s in self.samples:
            yield (s.t, s.pose.x, s.pose.y, s.pose.theta, *s.joints, s.margin)

    @property
    def final(self) -> Sample:
        return self.samples[-1] if self.samples else self.initial


def simulate(
    initial,
    law: RateLaw,
    dt: float,
    steps: int,
    geometry: Geometry,
    branch=(-1, -1, -1),
    margin_floor: float = MARGIN_FLOOR,
    eps_serial: float = singularity.EPS_SERIAL,
    fk_tol: float = kinematics.FK_TOL,
) -> TrajectoryTrace:
    """Integrate ``law`` in joint space with classical RK4.

    Each stage recovers the pose by forward kinematics seeded with the last
    accepted pose. After every step the singularity margin is recorded; the
    run stops with ``SingularityEncountered`` (trace attached) when it falls
    below ``margin_floor``, when a leg switches elbow (it went through a serial
    singularity between samples) or when a rate law hits its own singular
    guard. ``NoConvergence`` from forward kinematics propagates unchanged.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    config = kinematics.inverse_kinematics(initial, geometry, branch)
    trace = TrajectoryTrace(law, dt, Sample(0.0, config.pose, config.joints, singularity.min_singular_margin(config, geometry)))
    if trace.initial.margin < margin_floor:
        trace.status = "halted"
        raise SingularityEncountered(0, singularity.classify(config, geometry), trace)

    # elbow signs as read back from the link angles; a flip means a serial crossing
    branch = kinematics.configuration(config.pose, config.joints, geometry).branch
    pose = config.pose
    rho = config.joints

    def f(q, seed):
        p = kinematics.forward_kinematics(q, geometry, seed, tol=fk_tol)
        return law.rates(kinematics.configuration(p, q, geometry), geometry, eps_serial), p

    for step in range(1, steps + 1):
        try:
            k1, p1 = f(rho, pose)
            k2, p2 = f(rho + 0.5 * dt * k1, p1)
            k3, p3 = f(rho + 0.5 * dt * k2, p2)
            k4, _ = f(rho + dt * k3, p3)
        except DomainError as exc:
            trace.status = "halted"
            report = singularity.classify(kinematics.configuration(pose, rho, geometry), geometry)
            raise SingularityEncountered(step, report, trace) from exc
        rho_next = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        try:
            pose_next = kinematics.forward_kinematics(rho_next, geometry, pose, tol=fk_tol)
        except DomainError as exc:
            trace.status = "halted"
            report = singularity.classify(kinematics.configuration(pose, rho, geometry), geometry)
            raise SingularityEncountered(step, report, trace) from exc
        cfg = kinematics.configuration(pose_next, rho_next, geometry)
        margin = singularity.min_singular_margin(cfg, geometry)
        if margin < margin_floor or cfg.branch != branch:
            trace.status = "halted"
            raise SingularityEncountered(step, singularity.classify(cfg, geometry), trace)
        rho, pose = rho_next, pose_next
        trace.samples.append(Sample(step * dt, pose, rho, margin))
    trace.status = "completed"
    return trace
