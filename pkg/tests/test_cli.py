import io
import json
import math
import subprocess
import sys

import pytest

from prrkin import geometry as G
from prrkin import kinematics as K
from prrkin import singularity as S
from prrkin.cli import run

GRADED = "preset:graded-links"
EQUAL = "preset:equal-links"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def csv_rows(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_ik_equal_links_example():
    code, out, _ = call("ik", "--geometry", EQUAL, "--pose", "20,20,0")
    assert code == 0
    rows = csv_rows(out)
    assert [float(r["rho"]) for r in rows] == [-10.0, -5.0, 0.0]
    assert float(rows[0]["alpha_deg"]) == pytest.approx(math.degrees(math.atan2(20, 15)))


def test_ik_unreachable_names_leg():
    code, _, err = call("ik", "--geometry", EQUAL, "--pose", "20,60,0")
    assert code == 2
    assert "leg 1" in err


def test_ik_strict_stroke_violation():
    code, _, err = call("ik", "--geometry", EQUAL, "--pose", "20,20,0", "--strict")
    assert code == 2 and "StrokeViolation" in err


def test_malformed_geometry_file(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text(G.dump_geometry(G.graded_links_geometry()).replace("1.8", "eighteen"))
    code, _, err = call("ik", "--geometry", bad, "--pose", "1,1,0")
    assert code == 1
    assert "link_lengths[1]" in err and "line" in err


def test_missing_geometry_file(tmp_path):
    code, _, _ = call("ik", "--geometry", tmp_path / "nope.yaml", "--pose", "1,1,0")
    assert code == 1


def test_invalid_geometry_is_input_error(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text(G.dump_geometry(G.make_geometry((1, 1, 1), (3, 2, 1), 1.0)).replace("stroke: 1.0", "stroke: 0.0", 1))
    code, _, err = call("ik", "--geometry", bad, "--pose", "1,1,0")
    assert code == 1, err


@pytest.mark.parametrize(
    "argv",
    [
        ["ik", "--geometry", GRADED, "--pose", "1,1"],
        ["ik", "--geometry", GRADED, "--pose", "1,1,0", "--branch", "-,x,-"],
        ["ik", "--geometry", GRADED],
        ["workspace", "--geometry", GRADED, "--out", "x", "--resolution", "ten"],
        ["simulate", "--geometry", GRADED, "--pose", "1,1,0", "--law", "spin:3", "--out", "x"],
        ["sweep", "--geometry", GRADED, "--strokes", "1,two", "--out", "x"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_one(argv):
    assert call(*argv)[0] == 1


def test_fk_round_trip_of_ik():
    _, out, _ = call("ik", "--geometry", GRADED, "--pose", "2.8,1.1,10", "--branch", "+,+,-")
    joints = ",".join(r["rho"] for r in csv_rows(out))
    code, out, _ = call("fk", "--geometry", GRADED, "--joints", joints, "--seed-pose", "2.85,1.05,12")
    assert code == 0
    row = csv_rows(out)[0]
    assert float(row["x_G"]) == pytest.approx(2.8, abs=1e-9)
    assert float(row["y_G"]) == pytest.approx(1.1, abs=1e-9)
    assert float(row["theta_G_deg"]) == pytest.approx(10.0, abs=1e-7)


def test_fk_exact_seed_takes_no_iterations():
    cfg = K.inverse_kinematics((2.8, 1.1, 0.0), G.graded_links_geometry(), (1, 1, -1))
    joints = ",".join(repr(float(v)) for v in cfg.joints)
    code, out, _ = call("fk", "--geometry", GRADED, "--joints", joints, "--seed-pose", "2.8,1.1,0")
    assert code == 0
    assert csv_rows(out)[0]["iterations"] == "0"


def test_fk_singular_seed_exits_two():
    geo = G.graded_links_geometry()
    pose = K.Pose(1.5, 1.2, 0.25)
    _, cfg = S.concurrent_lines_configuration(pose, (1.0, 4.0), geo)
    joints = ",".join(repr(float(v)) for v in cfg.joints)
    seed = f"{pose.x!r},{pose.y!r},{math.degrees(pose.theta)!r}"
    code, _, err = call("fk", "--geometry", GRADED, "--joints", joints, "--seed-pose", seed)
    assert code == 2 and "SingularIteration" in err


def test_fk_no_convergence_exits_three():
    cfg = K.inverse_kinematics((2.8, 1.1, 0.0), G.graded_links_geometry(), (1, 1, -1))
    joints = ",".join(repr(float(v)) for v in cfg.joints)
    code, _, err = call("fk", "--geometry", GRADED, "--joints", joints, "--seed-pose", "3.2,0.8,20", "--max-iter", "1")
    assert code == 3 and "NoConvergence" in err


def test_jacobian_output():
    code, out, _ = call("jacobian", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-")
    assert code == 0
    assert out.count("\nA,") == 3 and out.count("\nB,") == 3
    assert "detA," in out and "detB," in out


def test_singularity_kinds(tmp_path):
    code, out, _ = call("singularity", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-")
    assert code == 0 and csv_rows(out)[0]["kind"] == "regular"
    # leg 1 reaches straight up: c_1 sits L_11 above the rail
    code, out, _ = call("singularity", "--geometry", GRADED, "--pose", "4,1.7,0")
    assert csv_rows(out)[0]["kind"].startswith("serial:1")
    geo = G.graded_links_geometry()
    pose, br = S.parallel_links_pose(geo, math.radians(50.0), x=5.0)
    branch = ",".join("+" if b > 0 else "-" for b in br)
    code, out, _ = call(
        "singularity", "--geometry", GRADED, "--pose", f"{pose.x!r},{pose.y!r},{math.degrees(pose.theta)!r}",
        "--branch", branch, "--eps-parallel", "1e-6", "--out", tmp_path / "s",
    )
    assert csv_rows(out)[0]["kind"] == "parallel-parallel"
    assert (tmp_path / "s_singularity.csv").read_text() == out


def test_workspace_smoke(tmp_path):
    prefix = tmp_path / "ws"
    code, out, _ = call("workspace", "--geometry", GRADED, "--resolution", "2x2", "--orientations", "4", "--out", prefix)
    assert code == 0
    assert out.startswith("h=2.9 w=8.8 S=")
    rows = csv_rows((tmp_path / "ws_grid.csv").read_text())
    assert len(rows) == 4 and set(rows[0]) == {"x", "y", "class", "reachable_orientation_count"}
    assert (tmp_path / "ws_grid.svg").read_text().startswith("<svg")
    manifest = json.loads((tmp_path / "ws_manifest.json").read_text())
    assert manifest["command"] == "workspace"
    assert manifest["geometry_path"] == GRADED
    assert sorted(manifest["output_paths"]) == sorted([f"{prefix}_grid.csv", f"{prefix}_grid.svg"])


def test_workspace_repeatable_and_thread_independent(tmp_path):
    outs = []
    for n, threads in enumerate((1, 1, 4)):
        prefix = tmp_path / f"run{n}"
        call("workspace", "--geometry", GRADED, "--resolution", "40x30", "--orientations", "12",
             "--threads", threads, "--out", prefix)
        outs.append(((tmp_path / f"run{n}_grid.csv").read_bytes(), (tmp_path / f"run{n}_grid.svg").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_sweep(tmp_path):
    code, out, _ = call("sweep", "--geometry", GRADED, "--strokes", "1,2,3", "--resolution", "40x40",
                        "--orientations", "12", "--out", tmp_path / "sw")
    assert code == 0
    rows = csv_rows(out)
    assert [float(r["L"]) for r in rows] == [1.0, 2.0, 3.0]
    s = [float(r["S"]) for r in rows]
    assert s == sorted(s)
    assert (tmp_path / "sw_sweep.csv").read_text() == out


def test_simulate_horizontal(tmp_path):
    code, out, _ = call("simulate", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-",
                        "--law", "horizontal:1", "--steps", "100", "--out", tmp_path / "h")
    assert code == 0
    rows = csv_rows((tmp_path / "h_trace.csv").read_text())
    assert len(rows) == 100
    assert float(rows[-1]["x_G"]) == pytest.approx(2.9, abs=1e-8)
    assert float(rows[-1]["y_G"]) == pytest.approx(1.1, abs=1e-8)
    assert "<polyline" in (tmp_path / "h_trace.svg").read_text()


def test_simulate_rotation_drift(tmp_path):
    code, _, _ = call("simulate", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-",
                      "--law", "rotation:30", "--steps", "1000", "--out", tmp_path / "r")
    assert code == 0
    last = csv_rows((tmp_path / "r_trace.csv").read_text())[-1]
    assert math.hypot(float(last["x_G"]) - 2.8, float(last["y_G"]) - 1.1) < 1e-6 * 2.9
    assert float(last["theta_G"]) == pytest.approx(math.radians(30), abs=1e-9)


def test_simulate_zero_steps_header_only(tmp_path):
    code, _, _ = call("simulate", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-",
                      "--law", "horizontal:1", "--steps", "0", "--out", tmp_path / "z")
    assert code == 0
    assert (tmp_path / "z_trace.csv").read_text() == "t,x_G,y_G,theta_G,rho_1,rho_2,rho_3,margin\n"


def test_simulate_halt_writes_partial_trace(tmp_path):
    code, out, _ = call("simulate", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-",
                        "--law", "vertical:0.5", "--steps", "3000", "--margin-floor", "1e-3", "--out", tmp_path / "v")
    assert code == 2 and out.startswith("halted")
    rows = csv_rows((tmp_path / "v_trace.csv").read_text())
    assert 1000 < len(rows) < 1300


def test_simulate_overlay(tmp_path):
    code, _, _ = call("simulate", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-",
                      "--law", "twist:0.2,0.1,5", "--steps", "50", "--overlay", "--resolution", "20x20",
                      "--orientations", "6", "--out", tmp_path / "o")
    assert code == 0
    svg = (tmp_path / "o_trace.svg").read_text()
    assert "<rect" in svg and "<polyline" in svg


def test_simulate_repeatable(tmp_path):
    texts = []
    for n in range(2):
        call("simulate", "--geometry", GRADED, "--pose", "2.8,1.1,0", "--branch", "+,+,-",
             "--law", "twist:0.2,0.1,5", "--steps", "200", "--out", tmp_path / f"t{n}")
        texts.append((tmp_path / f"t{n}_trace.csv").read_bytes() + (tmp_path / f"t{n}_trace.svg").read_bytes())
    assert texts[0] == texts[1]


def test_replay_reproduces_outputs(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    prefix = tmp_path / "orig"
    call("workspace", "--geometry", GRADED, "--resolution", "30x20", "--orientations", "8", "--out", prefix)
    before = {p: (tmp_path / p).read_bytes() for p in ("orig_grid.csv", "orig_grid.svg", "orig_manifest.json")}
    saved = tmp_path / "saved.json"
    saved.write_bytes(before["orig_manifest.json"])
    for p in before:
        (tmp_path / p).unlink()
    assert call("replay", saved)[0] == 0
    assert {p: (tmp_path / p).read_bytes() for p in before} == before
    assert json.loads(before["orig_manifest.json"])["timestamp"] == "1970-01-01T00:00:00+00:00"


def test_replay_bad_manifest(tmp_path):
    (tmp_path / "m.json").write_text("{}")
    assert call("replay", tmp_path / "m.json")[0] == 1


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "prrkin", "ik", "--geometry", EQUAL, "--pose", "20,60,0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "leg 1" in proc.stderr
