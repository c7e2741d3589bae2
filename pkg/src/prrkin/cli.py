"""``prrkin`` command line.

Angles on the command line are in degrees; everything written to CSV is in
radians. Exit codes: 0 success, 1 bad input, 2 unreachable or singular,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, export, kinematics, motion, singularity, workspace
from .errors import ConfigError, DomainError, GeometryError, NumericalError, PRRError
from .geometry import load_geometry

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text, n, what):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected {n} comma-separated numbers, got {text!r}", field=what)
    if len(vals) != n:
        raise ConfigError(f"expected {n} comma-separated numbers, got {text!r}", field=what)
    return vals


def _pose(text, what="--pose"):
    x, y, th = _floats(text, 3, what)
    return kinematics.Pose(x, y, math.radians(th))


def _branch(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("+", "+1", "1"):
            out.append(1)
        elif tok in ("-", "-1"):
            out.append(-1)
        else:
            raise ConfigError(f"branch entries must be + or -, got {tok!r}", field="--branch")
    if len(out) != 3:
        raise ConfigError("branch needs three entries", field="--branch")
    return tuple(out)


def _resolution(text):
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"expected NxM, got {text!r}", field="--resolution")
    return nx, ny


def _law(text):
    kind, _, rest = text.partition(":")
    try:
        if kind == "horizontal":
            return motion.RateLaw.horizontal(float(rest))
        if kind == "vertical":
            return motion.RateLaw.vertical(float(rest))
        if kind == "rotation":
            return motion.RateLaw.rotation(math.radians(float(rest)))
        if kind == "twist":
            vx, vy, w = _floats(rest, 3, "--law")
            return motion.RateLaw.twist(vx, vy, math.radians(w))
    except ValueError as exc:
        raise ConfigError(str(exc), field="--law")
    raise ConfigError(f"unknown law {text!r}; use horizontal:V, vertical:V, rotation:DEG_PER_S or twist:VX,VY,DEG_PER_S", field="--law")


def _deg(rad):
    return math.degrees(rad)


def _num(v):
    return export.fmt(v)


def _write_outputs(files: dict):
    for path, text in files.items():
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return when.replace(microsecond=0).isoformat()


def _manifest(args, argv, outputs):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "geometry")}
    return json.dumps(
        {
            "command": args.command,
            "geometry_path": args.geometry,
            "parameters": params,
            "argv": list(argv),
            "output_paths": sorted(outputs),
            "timestamp": _timestamp(),
            "tool_version": __version__,
        },
        indent=2,
    ) + "\n"


# --- subcommands ------------------------------------------------------------

def cmd_ik(args, argv, out):
    geometry = load_geometry(args.geometry)
    cfg = kinematics.inverse_kinematics(_pose(args.pose), geometry, _branch(args.branch), args.strict)
    out.write("leg,rho,alpha_deg,b_x,b_y,c_x,c_y\n")
    for i in range(3):
        out.write(",".join([str(i + 1), _num(cfg.joints[i]), _num(_deg(cfg.alpha[i])), *map(_num, cfg.b[i]), *map(_num, cfg.c[i])]) + "\n")
    return EXIT_OK


def cmd_fk(args, argv, out):
    geometry = load_geometry(args.geometry)
    joints = _floats(args.joints, 3, "--joints")
    seed = _pose(args.seed_pose, "--seed-pose")
    pose, info = kinematics.forward_kinematics(joints, geometry, seed, tol=args.tol, max_iter=args.max_iter, full_output=True)
    out.write("x_G,y_G,theta_G_deg,iterations,residual\n")
    out.write(",".join([_num(pose.x), _num(pose.y), _num(_deg(pose.theta)), str(info.iterations), _num(info.residual)]) + "\n")
    return EXIT_OK


def cmd_jacobian(args, argv, out):
    geometry = load_geometry(args.geometry)
    cfg = kinematics.inverse_kinematics(_pose(args.pose), geometry, _branch(args.branch))
    jac = kinematics.jacobians(cfg, geometry)
    out.write("matrix,row,c1,c2,c3\n")
    for name, m in (("A", jac.A), ("B", jac.B)):
        for i in range(3):
            out.write(",".join([name, str(i + 1), *map(_num, m[i])]) + "\n")
    out.write(f"detA,{_num(jac.detA)}\ndetB,{_num(jac.detB)}\n")
    return EXIT_OK


def cmd_singularity(args, argv, out):
    geometry = load_geometry(args.geometry)
    cfg = kinematics.inverse_kinematics(_pose(args.pose), geometry, _branch(args.branch))
    report = singularity.classify(cfg, geometry, args.eps_serial, args.eps_parallel)
    text = export.csv_text(singularity.SingularityReport.CSV_HEADER, [report.csv_row()])
    out.write(text)
    if args.out:
        _write_outputs({f"{args.out}_singularity.csv": text})
    return EXIT_OK


def _spec_for(geometry, args):
    nx, ny = _resolution(args.resolution)
    return workspace.default_spec(geometry, nx, ny, args.orientations)


def cmd_workspace(args, argv, out):
    geometry = load_geometry(args.geometry)
    if args.stroke is not None:
        geometry = geometry.with_stroke(args.stroke)
    spec = _spec_for(geometry, args)
    h, w, rect = workspace.bounding_rectangle(geometry)
    grid = workspace.scan(geometry, spec, workers=args.threads)
    zones = workspace.dead_zones(grid)
    files = {
        f"{args.out}_grid.csv": export.csv_text(workspace.WorkspaceGrid.CSV_HEADER, grid.rows()),
        f"{args.out}_grid.svg": export.workspace_svg(grid, scale=args.scale),
    }
    files[f"{args.out}_manifest.json"] = _manifest(args, argv, files)
    _write_outputs(files)
    out.write(f"h={h!r} w={w!r} S={grid.S:.4f} dead_zones={len(zones)}\n")
    return EXIT_OK


def cmd_sweep(args, argv, out):
    geometry = load_geometry(args.geometry)
    try:
        strokes = [float(v) for v in args.strokes.split(",")]
    except ValueError:
        raise ConfigError(f"expected comma-separated stroke lengths, got {args.strokes!r}", field="--strokes")
    if not all(v > 0 for v in strokes):
        raise ConfigError("stroke lengths must be positive", field="--strokes")
    spec = _spec_for(geometry, args)
    rows = workspace.stroke_sweep(geometry, strokes, spec, workers=args.threads)
    text = export.csv_text(workspace.SWEEP_CSV_HEADER, [(r.stroke, r.S, r.dead_zone_count) for r in rows])
    files = {f"{args.out}_sweep.csv": text}
    files[f"{args.out}_manifest.json"] = _manifest(args, argv, files)
    _write_outputs(files)
    out.write(text)
    return EXIT_OK


def cmd_simulate(args, argv, out):
    geometry = load_geometry(args.geometry)
    law = _law(args.law)
    status = EXIT_OK
    try:
        trace = motion.simulate(
            _pose(args.pose), law, args.dt, args.steps, geometry, _branch(args.branch), args.margin_floor
        )
    except PRRError as exc:
        trace = getattr(exc, "trace", None)
        if trace is None:
            raise
        out.write(f"halted: {exc}\n")
        status = EXIT_DOMAIN
    points = [(trace.initial.pose.x, trace.initial.pose.y)] + [(s.pose.x, s.pose.y) for s in trace.samples]
    _, _, rect = workspace.bounding_rectangle(geometry)
    grid = None
    if args.overlay:
        grid = workspace.scan(geometry, _spec_for(geometry, args), workers=args.threads)
    files = {
        f"{args.out}_trace.csv": export.csv_text(motion.TrajectoryTrace.CSV_HEADER, trace.rows()),
        f"{args.out}_trace.svg": export.trace_svg(points, rect, scale=args.scale, grid=grid),
    }
    files[f"{args.out}_manifest.json"] = _manifest(args, argv, files)
    _write_outputs(files)
    f = trace.final
    out.write(
        f"steps={len(trace.samples)} final x_G={_num(f.pose.x)} y_G={_num(f.pose.y)} "
        f"theta_G_deg={_num(_deg(f.pose.theta))} margin={_num(f.margin)}\n"
    )
    return status


def cmd_replay(args, argv, out):
    try:
        data = json.loads(Path(args.manifest).read_text())
        replay_argv = data["argv"]
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read manifest: {exc}", field=args.manifest)
    return run(replay_argv, out)


def build_parser():
    p = _Parser(prog="prrkin", description="Kinematics and workspace tools for a planar 3-PRR manipulator.")
    p.add_argument("--version", action="version", version=f"prrkin {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, pose=True, branch=True):
        sp.add_argument("--geometry", required=True, help="geometry YAML file, or preset:equal-links / preset:graded-links")
        if pose:
            sp.add_argument("--pose", required=True, help="x,y,theta (theta in degrees)")
        if branch:
            sp.add_argument("--branch", default="-,-,-", help="elbow signs per leg, e.g. -,+,-")

    def grid_flags(sp, out_required=True):
        sp.add_argument("--resolution", default="200x200", help="grid size NxM")
        sp.add_argument("--orientations", type=int, default=36, help="orientation samples over (-180, 180]")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", required=out_required, help="output path prefix")
        sp.add_argument("--scale", type=float, default=50.0, help="SVG pixels per model unit")

    sp = sub.add_parser("ik", help="inverse kinematics")
    common(sp)
    sp.add_argument("--strict", action="store_true", help="enforce 0 <= rho <= stroke")
    sp.set_defaults(func=cmd_ik)

    sp = sub.add_parser("fk", help="forward kinematics")
    common(sp, pose=False, branch=False)
    sp.add_argument("--joints", required=True, help="rho_1,rho_2,rho_3")
    sp.add_argument("--seed-pose", required=True, help="x,y,theta (degrees) to start Newton from")
    sp.add_argument("--tol", type=float, default=kinematics.FK_TOL)
    sp.add_argument("--max-iter", type=int, default=kinematics.FK_MAX_ITER)
    sp.set_defaults(func=cmd_fk)

    sp = sub.add_parser("jacobian", help="print the A and B matrices")
    common(sp)
    sp.set_defaults(func=cmd_jacobian)

    sp = sub.add_parser("singularity", help="classify a pose")
    common(sp)
    sp.add_argument("--eps-serial", type=float, default=singularity.EPS_SERIAL)
    sp.add_argument("--eps-parallel", type=float, default=singularity.EPS_PARALLEL)
    sp.add_argument("--out", help="also write <out>_singularity.csv")
    sp.set_defaults(func=cmd_singularity)

    sp = sub.add_parser("workspace", help="grid reachability scan")
    common(sp, pose=False, branch=False)
    grid_flags(sp)
    sp.add_argument("--stroke", type=float, help="override the stroke of every rail")
    sp.set_defaults(func=cmd_workspace)

    sp = sub.add_parser("sweep", help="workspace fraction vs stroke")
    common(sp, pose=False, branch=False)
    grid_flags(sp)
    sp.add_argument("--strokes", required=True, help="comma-separated stroke lengths")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("simulate", help="integrate a rate law")
    common(sp)
    grid_flags(sp)
    sp.add_argument("--law", required=True, help="horizontal:V | vertical:V | rotation:DEG_PER_S | twist:VX,VY,DEG_PER_S")
    sp.add_argument("--dt", type=float, default=motion.DEFAULT_DT)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--margin-floor", type=float, default=motion.MARGIN_FLOOR)
    sp.add_argument("--overlay", action="store_true", help="draw the trace over a workspace scan")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    sp.add_argument("manifest")
    sp.set_defaults(func=cmd_replay)
    return p


# options whose values may start with '-' (negative numbers, elbow signs)
_DASH_VALUED = {"--pose", "--seed-pose", "--joints", "--branch", "--law"}


def _join_dash_values(argv):
    """Rewrite ``--opt -x`` as ``--opt=-x`` so argparse does not read ``-x`` as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _DASH_VALUED:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(_join_dash_values(list(argv)))
        return args.func(args, argv, out)
    except (ConfigError, GeometryError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except DomainError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except NumericalError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


def main(argv=None):
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
