"""Workspace fraction S against stroke length for the graded-links geometry.

    python scripts/stroke_sweep.py --out results/sweep.csv
"""

import argparse
import time
from pathlib import Path

import numpy as np

from prrkin import geometry, workspace
from prrkin.export import csv_text


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--geometry", default="preset:graded-links")
    ap.add_argument("--strokes", default="1,1.5,2,2.5,3")
    ap.add_argument("--resolution", type=int, default=200)
    ap.add_argument("--orientations", type=int, default=36)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    geo = geometry.load_geometry(args.geometry)
    strokes = [float(v) for v in args.strokes.split(",")]
    template = workspace.WorkspaceSpec((0.0, 1.0, 0.0, 1.0), args.resolution, args.resolution, args.orientations)
    start = time.perf_counter()
    rows = workspace.stroke_sweep(geo, strokes, template, workers=args.threads)
    elapsed = time.perf_counter() - start

    print(f"{'L':>6} {'S':>8} {'dead zones':>11}")
    for r in rows:
        print(f"{r.stroke:6g} {r.S:8.4f} {r.dead_zone_count:11d}")
    s = np.array([r.S for r in rows])
    print(f"nondecreasing: {bool(np.all(np.diff(s) >= 0))}   ({elapsed:.1f} s)")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(csv_text(workspace.SWEEP_CSV_HEADER, [(r.stroke, r.S, r.dead_zone_count) for r in rows]))


if __name__ == "__main__":
    main()
