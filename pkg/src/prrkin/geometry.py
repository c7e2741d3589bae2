"""Fixed mechanism geometry for the planar 3-PRR manipulator.

Three sliders travel on parallel rails. Slider i sits at
``b_i = anchor_i + rho_i * direction`` and carries a link of length
``link_lengths[i]`` ending at the platform joint ``c_i``. The platform is a
straight bar through ``c_1, c_2, c_3`` and the end-effector point ``g``; the
joints sit behind ``g`` along the bar:

    c_i = g - platform_offsets[i] * (cos theta, sin theta)

Points and vectors are plain ``numpy`` arrays of shape ``(2,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .errors import (
    ConfigError,
    NonParallelRails,
    NonPositiveLength,
    NonUnitDirection,
    UnorderedPlatformOffsets,
)

UNIT_TOL = 1e-12
PARALLEL_TOL = 1e-12

Vec2 = np.ndarray


def vec(x: float, y: float) -> Vec2:
    return np.array([x, y], dtype=float)


def perp(v: Vec2) -> Vec2:
    """Rotate by +90 degrees: ``(x, y) -> (-y, x)``. Works on ``(..., 2)`` arrays."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def cross(a: Vec2, b: Vec2) -> float:
    """Scalar z-component of the planar cross product."""
    return float(a[0] * b[1] - a[1] * b[0])


def unit(theta: float) -> Vec2:
    return np.array([math.cos(theta), math.sin(theta)])


@dataclass(frozen=True)
class Rail:
    anchor: tuple[float, float]
    direction: tuple[float, float]
    stroke: float

    @property
    def a(self) -> Vec2:
        return np.array(self.anchor, dtype=float)

    @property
    def d(self) -> Vec2:
        return np.array(self.direction, dtype=float)


@dataclass(frozen=True)
class Geometry:
    rails: tuple[Rail, Rail, Rail]
    link_lengths: tuple[float, float, float]
    platform_offsets: tuple[float, float, float]
    _checked: bool = field(default=False, repr=False, compare=False)

    @property
    def links(self) -> np.ndarray:
        return np.array(self.link_lengths, dtype=float)

    @property
    def offsets(self) -> np.ndarray:
        return np.array(self.platform_offsets, dtype=float)

    @property
    def anchors(self) -> np.ndarray:
        return np.array([r.anchor for r in self.rails], dtype=float)

    @property
    def directions(self) -> np.ndarray:
        return np.array([r.direction for r in self.rails], dtype=float)

    @property
    def strokes(self) -> np.ndarray:
        return np.array([r.stroke for r in self.rails], dtype=float)

    @property
    def stroke(self) -> float:
        """Common stroke; the largest one if the rails differ."""
        return float(max(r.stroke for r in self.rails))

    @property
    def moment_arm(self) -> float:
        return float(max(self.platform_offsets))

    def with_stroke(self, stroke: float) -> Geometry:
        rails = tuple(replace(r, stroke=float(stroke)) for r in self.rails)
        return validate(replace(self, rails=rails, _checked=False))

    def scaled(self, k: float) -> Geometry:
        rails = tuple(
            Rail((r.anchor[0] * k, r.anchor[1] * k), r.direction, r.stroke * k)
            for r in self.rails
        )
        return validate(
            Geometry(
                rails,
                tuple(x * k for x in self.link_lengths),
                tuple(x * k for x in self.platform_offsets),
            )
        )

    def translated(self, dx: float, dy: float) -> Geometry:
        rails = tuple(
            Rail((r.anchor[0] + dx, r.anchor[1] + dy), r.direction, r.stroke)
            for r in self.rails
        )
        return validate(replace(self, rails=rails, _checked=False))


def validate(geometry: Geometry) -> Geometry:
    """Return ``geometry`` marked as checked, or raise on the first broken invariant."""
    if geometry._checked:
        return geometry
    if len(geometry.rails) != 3 or len(geometry.link_lengths) != 3 or len(geometry.platform_offsets) != 3:
        raise NonPositiveLength("a geometry needs exactly three legs")
    for i, rail in enumerate(geometry.rails, start=1):
        norm = math.hypot(*rail.direction)
        if abs(norm - 1.0) > UNIT_TOL:
            raise NonUnitDirection(f"rail {i} direction has norm {norm!r}")
        if not rail.stroke > 0:
            raise NonPositiveLength(f"rail {i} stroke must be > 0, got {rail.stroke!r}")
    for name, values in (("link_lengths", geometry.link_lengths), ("platform_offsets", geometry.platform_offsets)):
        for i, v in enumerate(values, start=1):
            if not v > 0:
                raise NonPositiveLength(f"{name}[{i}] must be > 0, got {v!r}")
    o = geometry.platform_offsets
    if not (o[0] > o[1] > o[2]):
        raise UnorderedPlatformOffsets(f"platform offsets must be strictly decreasing, got {o}")
    d0 = geometry.rails[0].direction
    for i, rail in enumerate(geometry.rails[1:], start=2):
        c = d0[0] * rail.direction[1] - d0[1] * rail.direction[0]
        if abs(c) > PARALLEL_TOL:
            raise NonParallelRails(f"rail {i} is not parallel to rail 1 (cross {c:.3e})")
    return replace(geometry, _checked=True)


def make_geometry(
    link_lengths,
    platform_offsets,
    stroke,
    anchors=((0.0, 0.0), (0.0, 0.0), (0.0, 0.0)),
    direction=(1.0, 0.0),
) -> Geometry:
    """Build and validate a geometry whose rails share one direction and stroke."""
    rails = tuple(
        Rail((float(a[0]), float(a[1])), (float(direction[0]), float(direction[1])), float(stroke))
        for a in anchors
    )
    return validate(
        Geometry(
            rails,
            tuple(float(x) for x in link_lengths),
            tuple(float(x) for x in platform_offsets),
        )
    )


def equal_links_geometry() -> Geometry:
    """Links of 25, joints spaced 5 apart along the bar, stroke 10."""
    return make_geometry((25.0, 25.0, 25.0), (15.0, 10.0, 5.0), 10.0)


def graded_links_geometry(stroke: float = 3.0) -> Geometry:
    """Links 1.7 / 1.8 / 1.9, joints spaced 1 apart, variable stroke."""
    return make_geometry((1.7, 1.8, 1.9), (3.0, 2.0, 1.0), stroke)


PRESETS = {
    "equal-links": equal_links_geometry,
    "graded-links": graded_links_geometry,
}


def platform_points(pose, geometry: Geometry) -> np.ndarray:
    """Platform joint positions ``c_i`` as a ``(3, 2)`` array."""
    x, y, theta = pose
    u = np.array([math.cos(theta), math.sin(theta)])
    return np.array([x, y]) - geometry.offsets[:, None] * u


# --- geometry files --------------------------------------------------------

def _node_value(node, path):
    """Convert a composed YAML node into python data, keeping line numbers for errors."""
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            out[k.value] = (_node_value(v, f"{path}.{k.value}" if path else k.value), k.start_mark.line + 1)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [(_node_value(v, f"{path}[{i}]"), v.start_mark.line + 1) for i, v in enumerate(node.value)]
    try:
        return float(node.value)
    except ValueError:
        raise ConfigError(f"expected a number, got {node.value!r}", field=path, line=node.start_mark.line + 1)


def _require(mapping, key, path, line):
    if not isinstance(mapping, dict):
        raise ConfigError("expected a mapping", field=path or "<root>", line=line)
    if key not in mapping:
        raise ConfigError("missing", field=f"{path}.{key}" if path else key, line=line)
    return mapping[key]


def _numbers(entry, path, n):
    value, line = entry
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"expected a list of {n} numbers", field=path, line=line)
    out = []
    for i, (v, vline) in enumerate(value):
        if not isinstance(v, float):
            raise ConfigError("expected a number", field=f"{path}[{i}]", line=vline)
        out.append(v)
    return out


def parse_geometry(text: str) -> Geometry:
    """Parse the YAML geometry format (see README) and validate it.

    Syntax and schema problems raise ``ConfigError`` naming the field and line;
    well-formed files that break a geometric invariant raise the matching
    ``GeometryError`` subclass.
    """
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(str(getattr(exc, "problem", exc)), line=mark.line + 1 if mark else None)
    if root is None:
        raise ConfigError("empty geometry file", line=1)
    data = _node_value(root, "")
    rails_entry = _require(data, "rails", "", 1)
    rails_val, rails_line = rails_entry
    if not isinstance(rails_val, list) or len(rails_val) != 3:
        raise ConfigError("expected a list of 3 rails", field="rails", line=rails_line)
    rails = []
    for i, (r, rline) in enumerate(rails_val):
        path = f"rails[{i}]"
        anchor = _numbers(_require(r, "anchor", path, rline), f"{path}.anchor", 2)
        direction = _numbers(_require(r, "direction", path, rline), f"{path}.direction", 2)
        stroke_val, sline = _require(r, "stroke", path, rline)
        if not isinstance(stroke_val, float):
            raise ConfigError("expected a number", field=f"{path}.stroke", line=sline)
        rails.append(Rail(tuple(anchor), tuple(direction), stroke_val))
    links = _numbers(_require(data, "link_lengths", "", 1), "link_lengths", 3)
    offsets = _numbers(_require(data, "platform_offsets", "", 1), "platform_offsets", 3)
    return validate(Geometry(tuple(rails), tuple(links), tuple(offsets)))


def dump_geometry(geometry: Geometry) -> str:
    data = {
        "rails": [
            {"anchor": list(r.anchor), "direction": list(r.direction), "stroke": r.stroke}
            for r in geometry.rails
        ],
        "link_lengths": list(geometry.link_lengths),
        "platform_offsets": list(geometry.platform_offsets),
    }
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)


def load_geometry(path) -> Geometry:
    """Load a geometry file, or a preset given as ``preset:<name>``."""
    spec = str(path)
    if spec.startswith("preset:"):
        name = spec.split(":", 1)[1]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
        return PRESETS[name]()
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read geometry file: {exc.strerror}", field=spec)
    return parse_geometry(text)
