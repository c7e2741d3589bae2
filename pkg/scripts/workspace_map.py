"""Scan one geometry and write the grid CSV and an SVG heat map.

Also reports how the fraction and the interior dead zones change with the
number of sampled orientations, which is what the small zones at long
strokes depend on.

    python scripts/workspace_map.py --stroke 3 --out results/ws_L3
"""

import argparse
from pathlib import Path

from prrkin import export, geometry, workspace


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--geometry", default="preset:graded-links")
    ap.add_argument("--stroke", type=float)
    ap.add_argument("--resolution", type=int, default=200)
    ap.add_argument("--orientations", default="36,72,360", help="comma-separated sample counts to compare")
    ap.add_argument("--out", type=Path, help="prefix for the grid of the first orientation count")
    args = ap.parse_args()

    geo = geometry.load_geometry(args.geometry)
    if args.stroke is not None:
        geo = geo.with_stroke(args.stroke)
    h, w, rect = workspace.bounding_rectangle(geo)
    print(f"h={h:g} w={w:g} rectangle={rect}")

    for n, k in enumerate(int(v) for v in args.orientations.split(",")):
        grid = workspace.scan(geo, workspace.default_spec(geo, args.resolution, args.resolution, k))
        zones = workspace.dead_zones(grid)
        sizes = sorted((len(z) for z in zones), reverse=True)
        print(f"orientations={k:4d}  S={grid.S:.4f}  dead zones={len(zones)} sizes={sizes[:8]}")
        if n == 0 and args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            Path(f"{args.out}_grid.csv").write_text(export.csv_text(workspace.WorkspaceGrid.CSV_HEADER, grid.rows()))
            Path(f"{args.out}_grid.svg").write_text(export.workspace_svg(grid, scale=600 / w))


if __name__ == "__main__":
    main()
