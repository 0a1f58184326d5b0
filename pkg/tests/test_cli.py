import json
import subprocess
import sys

import pytest

from tcbirrt.bench import TRIALS_HEADER, load_scene
from tcbirrt.cli import main

START = "1.0,0,1.0,0,0,1.5707963267948966"
NEAR = "1.0,0.2,1.2,0,0,1.5707963267948966"


@pytest.fixture(scope="module")
def planned(tmp_path_factory):
    out = tmp_path_factory.mktemp("plan")
    rc = main(["plan", "--scene", "desk_tier1", "--start-pose", START, "--goal-pose", NEAR,
               "--seed", "4", "--out", str(out)])
    return rc, out


def test_plan_writes_path_and_stats(planned):
    rc, out = planned
    assert rc == 0
    stats = json.loads((out / "stats.json").read_text())
    assert stats["iterations"] >= 1 and stats["path_len_rad"] > 0
    assert json.loads((out / "path.json").read_text())["segments"]


def test_validate_exit_codes(planned, tmp_path, capsys):
    _, out = planned
    assert main(["validate", "--path", str(out / "path.json"), "--scene", "desk_tier1"]) == 0
    assert "valid:" in capsys.readouterr().out
    data = json.loads((out / "path.json").read_text())
    data["segments"][0]["joints"][-1][1] += 0.5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["validate", "--path", str(bad), "--scene", "desk_tier1"]) == 2
    assert "invalid:" in capsys.readouterr().out
    assert main(["validate", "--path", str(tmp_path / "missing.json"), "--scene", "desk_tier1"]) == 1


def test_plan_timeout_is_failure(tmp_path):
    rc = main(["plan", "--scene", "desk_tier1", "--start-pose", START, "--goal-pose", NEAR,
               "--timeout", "0", "--out", str(tmp_path)])
    assert rc == 2


@pytest.mark.parametrize("argv", [
    ["plan", "--scene", "nowhere.json", "--start-pose", START, "--goal-pose", NEAR, "--out", "x"],
    ["plan", "--scene", "desk_tier1", "--start-pose", "1,2,3", "--goal-pose", NEAR, "--out", "x"],
    ["plan", "--scene", "desk_tier1", "--start-pose", START, "--goal-pose", "0,0,9,0,0,0", "--out", "x"],
    ["bench", "--scene", "desk_tier1", "--tasks", "0", "--out", "x"],
    ["bench", "--scene", "desk_tier1", "--tasks", "2", "--seed", "-1", "--out", "x"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_one(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    try:
        rc = main(argv)
    except SystemExit as exc:
        rc = exc.code
    assert rc == 1


def test_bench_outputs(tmp_path):
    out = tmp_path / "run"
    rc = main(["bench", "--scene", "desk_tier1", "--tasks", "3", "--seed", "2", "--out", str(out),
               "--clock", "work", "--quiet"])
    assert rc == 0
    lines = (out / "trials.csv").read_text().splitlines()
    assert lines[0] == ",".join(TRIALS_HEADER) and len(lines) == 4
    assert (out / "curve.csv").read_text().startswith("t,p\n")
    summary = json.loads((out / "summary.json").read_text())
    assert summary["tasks"] == 3 and summary["n_t_min"] == 40
    for path in (out / "paths").glob("*.json"):
        assert main(["validate", "--path", str(path), "--scene", "desk_tier1"]) == 0


def test_scene_file_by_path(tmp_path, capsys):
    scene_file = tmp_path / "scene.json"
    data = load_scene("desk_tier1").to_dict()
    data["robot"]["arms"][1]["joint_limits"][0] = [2.0, 1.0]
    scene_file.write_text(json.dumps(data, indent=2))
    rc = main(["bench", "--scene", str(scene_file), "--tasks", "1", "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "robot.arms[1].joint_limits[0]" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tcbirrt", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
