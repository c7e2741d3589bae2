"""Kinematics, singularity and workspace tools for a planar 3-PRR manipulator."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    Geometry,
    Rail,
    equal_links_geometry,
    graded_links_geometry,
    load_geometry,
    make_geometry,
    platform_points,
    validate,
)
from .kinematics import (  # noqa: E402
    Configuration,
    JacobianPair,
    Pose,
    forward_kinematics,
    inverse_kinematics,
    jacobians,
    joint_rates_to_twist,
    twist_to_joint_rates,
)
from .singularity import Kind, SingularityReport, classify, min_singular_margin  # noqa: E402
from .workspace import WorkspaceSpec, bounding_rectangle, dead_zones, scan, stroke_sweep  # noqa: E402
