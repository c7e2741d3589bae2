"""FK(IK(pose)) over random reachable poses, with failures binned by distance to singularity.

    python scripts/fk_round_trip.py --poses 1000 --noise 0.1
"""

import argparse
import math

import numpy as np

from prrkin import geometry, kinematics, singularity, workspace
from prrkin.errors import PRRError


def reachable_poses(geo, n, rng):
    _, _, (x0, x1, y0, y1) = workspace.bounding_rectangle(geo)
    while n:
        pose = kinematics.Pose(rng.uniform(x0, x1), rng.uniform(y0, y1), rng.uniform(-math.pi, math.pi))
        branches = kinematics.feasible_branches(pose, geo, strict_stroke=True)
        if branches:
            n -= 1
            yield pose, branches


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--poses", type=int, default=1000)
    ap.add_argument("--noise", type=float, default=0.1, help="seed noise as a fraction of h")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    bins = [0.0, 1e-3, 1e-2, 1e-1, np.inf]
    for name, make in geometry.PRESETS.items():
        geo = make()
        h = workspace.bounding_rectangle(geo)[0]
        rng = np.random.default_rng(args.seed)
        scale = args.noise * h * np.array([1.0, 1.0, 1.0 / geo.moment_arm])
        margins, failed = [], []
        for pose, branches in reachable_poses(geo, args.poses, rng):
            for br in branches:
                cfg = kinematics.inverse_kinematics(pose, geo, br)
                try:
                    out = kinematics.forward_kinematics(cfg.joints, geo, pose.as_array() + rng.uniform(-1, 1, 3) * scale)
                    err = max(abs(out.x - pose.x), abs(out.y - pose.y), abs(kinematics.angle_diff(out.theta, pose.theta)))
                except PRRError:
                    err = math.inf
                margins.append(singularity.min_singular_margin(cfg, geo))
                failed.append(err >= 1e-9)
        margins, failed = np.array(margins), np.array(failed)
        print(f"{name}: {failed.sum()} of {len(failed)} round trips off by >= 1e-9")
        for lo, hi in zip(bins, bins[1:]):
            sel = (margins >= lo) & (margins < hi)
            print(f"  margin in [{lo:g}, {hi:g}): {failed[sel].sum():4d} / {sel.sum():5d}")


if __name__ == "__main__":
    main()
