import csv
import json

import numpy as np
import pytest

from discpower import cli
from discpower.discord import symmetric_discord
from discpower.mdms import werner
from discpower.states import ClassicalStateSpec, make_classical, save_state


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_parse_angle():
    assert cli.parse_angle("0.25pi") == np.pi / 4
    assert cli.parse_angle("0.25*pi") == np.pi / 4
    assert cli.parse_angle("pi") == np.pi
    assert cli.parse_angle("0.3") == 0.3
    assert cli.parse_angle("-1e-1") == -0.1
    with pytest.raises(cli.UsageError):
        cli.parse_angle("quarter")


def test_parse_grid():
    assert cli.parse_grid("0.25:1:0.05")[-1] == 1.0
    assert len(cli.parse_grid("0.25:1:0.05")) == 16
    assert cli.parse_grid("0.3,0.5") == [0.3, 0.5]
    with pytest.raises(cli.UsageError):
        cli.parse_grid("0:1:0")


def test_discord_command(tmp_path, capsys):
    save_state(tmp_path / "bell.json", werner(1.0))
    code, out, _ = run(capsys, "discord", str(tmp_path / "bell.json"))
    assert code == 0
    assert "delta = 1.000000" in out

    cl = make_classical(ClassicalStateSpec([0.1, 0.2, 0.3, 0.4])).mat
    save_state(tmp_path / "cl.json", cl)
    code, out, _ = run(capsys, "discord", str(tmp_path / "cl.json"))
    sym = float(next(line for line in out.splitlines() if line.startswith("symmetric")).split("=")[1])
    assert code == 0 and abs(sym) < 1e-6

    w = werner(-1 / 3)
    save_state(tmp_path / "w.json", w)
    code, out, _ = run(capsys, "discord", str(tmp_path / "w.json"))
    sym = float(next(line for line in out.splitlines() if line.startswith("symmetric")).split("=")[1])
    assert sym == float(f"{symmetric_discord(w):.9f}")


def test_malformed_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 4}')
    assert run(capsys, "discord", str(bad))[0] == cli.EXIT_INVALID
    assert run(capsys, "discord", str(tmp_path / "missing.json"))[0] == cli.EXIT_INVALID
    bad.write_text(json.dumps({"dim": 4, "re": np.eye(4).tolist(), "im": np.zeros((4, 4)).tolist()}))
    assert run(capsys, "discord", str(bad))[0] == cli.EXIT_INVALID


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == cli.EXIT_USAGE
    assert run(capsys, "power", "--purity", "0.5")[0] == cli.EXIT_USAGE
    assert run(capsys, "power", "--named", "cnot")[0] == cli.EXIT_USAGE
    assert run(capsys, "gate-info", "--coords", "1,2")[0] == cli.EXIT_USAGE


def test_gate_info(capsys):
    code, out, _ = run(capsys, "gate-info", "--named", "cnot")
    assert code == 0
    assert out.splitlines()[0] == "theta = (0.25π, 0, 0)"
    code, out, _ = run(capsys, "gate-info", "--coords", "0.125pi,0.125pi,0.125pi")
    assert out.splitlines()[0] == "theta = (0.125π, 0.125π, 0.125π)"


def test_gate_info_from_file(tmp_path, capsys):
    from discpower.gates import NAMED_MATRICES
    from discpower.states import matrix_to_json

    (tmp_path / "u.json").write_text(json.dumps(matrix_to_json(NAMED_MATRICES["swap"])))
    code, out, _ = run(capsys, "gate-info", "--file", str(tmp_path / "u.json"))
    assert code == 0 and out.startswith("theta = (0.25π, 0.25π, 0.25π)")


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_power_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "p.csv"
    code, _, _ = run(capsys, "power", "--coords", "0,0,0", "--purity-grid", "0.5:0.7:0.1",
                     "--budget", "1500", "--out", str(out), "--gnuplot")
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["mu", "dp", "theta_x", "theta_y", "theta_z", "n_evals"]
    assert len(rows) == 4
    assert all(abs(float(r[1])) < 1e-6 for r in rows[1:])
    manifest = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert manifest["subcommand"] == "power" and manifest["seed"] == 0
    assert "version" in manifest and "wall_time_s" in manifest
    assert (tmp_path / "p.csv.gp").exists()


def test_power_perfect_entangler(tmp_path, capsys):
    code, out, _ = run(capsys, "power", "--coords", "0.25pi,0,0", "--purity", "1", "--budget", "2000")
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert abs(float(row[1]) - 1) < 1e-3


def test_replay_is_byte_identical(tmp_path, capsys):
    first = tmp_path / "a.csv"
    run(capsys, "power", "--coords", "0.3,0.1,0", "--purity", "0.6", "--budget", "1500", "--seed", "4",
        "--out", str(first))
    second = tmp_path / "b.csv"
    code, _, _ = run(capsys, "replay", str(first) + ".manifest.json", "--out", str(second))
    assert code == 0
    assert first.read_bytes() == second.read_bytes()


def test_sweep(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--family", "aa0", "--purity", "0.7", "--alpha-grid", "0,0.125pi",
                     "--budget", "1500", "--out", str(out))
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["alpha", "dp"]
    assert len(rows) == 3
    assert float(rows[1][1]) < 1e-6 < float(rows[2][1])


def test_cloud(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "cloud", "--rank", "2", "--samples", "1000", "--seed", "1", "--out", str(out),
                     "--no-refine")
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["purity", "delta"]
    assert len(rows) == 1001
    mu = np.array([float(r[0]) for r in rows[1:]])
    assert mu.min() >= 0.5 - 1e-9 and mu.max() <= 1 + 1e-9
    # at least 12 significant digits
    assert len(rows[1][0].replace("0.", "").lstrip("0")) >= 12


def test_boundary(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "boundary", "--purity-grid", "0.25,0.3,1", "--out", str(out))
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["mu", "delta_max", "branch", "a", "b", "w"]
    assert [r[2] for r in rows[1:]] == ["R4", "R4", "R2"]
    assert float(rows[3][1]) == pytest.approx(1, abs=1e-6)
