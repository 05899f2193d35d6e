from __future__ import annotations

import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from cubicslice.cli import SCHEMA, build_parser, main
from cubicslice.imageio import read_ppm


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_orbit(capsys):
    code, out, _ = run(["orbit", "--d", "2", "--angle", "1/7"], capsys)
    assert code == 0
    assert out.splitlines() == ["preperiod 0", "period 3", "orbit 1/7 2/7 4/7"]


def test_gap_json(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, _, _ = run(
        ["gap", "--major", "1/3,2/3", "--hole", "1/3,2/3", "--den-bound", "27", "--json", str(path)],
        capsys,
    )
    assert code == 0
    data = json.loads(path.read_text())
    assert data["schema"] == SCHEMA
    assert data["major"]["kind"] == "RegularCritical"
    assert ["1/4", "1/3"] in data["tau_table"]
    assert data["flags"]["den_bound"] == 27
    assert sorted(os.listdir(tmp_path)) == ["out.json"]


def test_gap_hole_too_short(capsys):
    code, _, err = run(["gap", "--major", "0,1/10", "--hole", "0,1/10"], capsys)
    assert code == 1
    assert err.startswith("error: HoleTooShort:")


def test_gap_degenerate_and_no_tau(capsys):
    argv = ["gap", "--major", "7/26,21/26", "--hole", "21/26,7/26"]
    code, _, err = run(argv, capsys)
    assert code == 1 and "NotQuadraticGap" in err
    code, out, _ = run(argv + ["--no-tau", "--den-bound", "26"], capsys)
    data = json.loads(out)
    assert code == 0 and data["tau_table"] is None
    assert data["major"]["period"] == 3 and "7/26" in data["basis"]


def test_tau(capsys):
    code, out, _ = run(
        ["tau", "--major", "1/3,2/3", "--hole", "1/3,2/3", "--angle", "1/4", "--angle", "2/3"], capsys
    )
    assert code == 0 and out.splitlines() == ["1/4 -> 1/3", "2/3 -> 1/2"]
    code, _, err = run(["tau", "--major", "1/3,2/3", "--hole", "1/3,2/3", "--angle", "1/2"], capsys)
    assert code == 1 and "NotInBasis" in err


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["orbit", "--d", "2", "--angle", "1/0"], "--angle"),
        (["orbit", "--d", "5", "--angle", "1/3"], "--d"),
        (["render-julia", "--lambda", "x", "--out", "a.ppm"], "--lambda"),
        (["render-slice", "--lambda", "0.5", "--res", "0x4", "--out", "a.ppm"], "--res"),
        (["check-seq", "--q", "0.4", "--b", "1", "--bad-schedule", "cubic"], "--bad-schedule"),
    ],
)
def test_usage_errors(argv, flag, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert flag in capsys.readouterr().err


def test_render_julia_ppm_and_csv(tmp_path, capsys):
    out, codes = tmp_path / "j.ppm", tmp_path / "j.csv"
    code, stdout, _ = run(
        ["render-julia", "--lambda=-0.5,0.2", "--b", "0.3,0", "--window", "0,0,4,4",
         "--res", "24x16", "--max-iter", "100", "--out", str(out), "--csv", str(codes), "--threads", "2"],
        capsys,
    )
    assert code == 0
    img = read_ppm(out)
    assert img.shape == (16, 24, 3)
    grid = np.loadtxt(codes, delimiter=",", dtype=int)
    assert grid.shape == (16, 24)
    meta = json.loads(stdout)
    assert meta["schema"] == SCHEMA and meta["flags"]["threads"] == 2
    assert sorted(os.listdir(tmp_path)) == ["j.csv", "j.ppm"]


def test_render_slice_layers(tmp_path, capsys):
    for layer in ("escape", "phd", "imr"):
        out = tmp_path / f"{layer}.ppm"
        code, stdout, _ = run(
            ["render-slice", "--lambda", "0.5,0", "--res", "40x40", "--max-iter", "200",
             "--layer", layer, "--out", str(out)],
            capsys,
        )
        assert code == 0 and read_ppm(out).shape == (40, 40, 3)
        assert json.loads(stdout)["phd_layer"] == "enabled"
    code, _, err = run(
        ["render-slice", "--lambda", "1,0", "--res", "8x8", "--layer", "phd", "--out", str(tmp_path / "x.ppm")],
        capsys,
    )
    assert code == 1 and "PhdUnavailable" in err


def test_render_png(tmp_path, capsys):
    pytest.importorskip("PIL")
    from PIL import Image

    out = tmp_path / "s.png"
    code, _, _ = run(["render-slice", "--lambda=-1,0", "--res", "20x10", "--max-iter", "50", "--out", str(out)], capsys)
    assert code == 0 and Image.open(out).size == (20, 10)


def test_trace_ray_csv(tmp_path, capsys):
    out = tmp_path / "ray.csv"
    code, _, err = run(["trace-ray", "--angle", "1/2", "--t-end", "1e-8", "--steps", "50", "--out", str(out)], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["step", "potential", "re", "im", "converged_flag"]
    assert len(rows) == 51
    last = complex(float(rows[-1]["re"]), float(rows[-1]["im"]))
    assert abs(last + 1) < 1e-5
    assert "converged=True" in err


def test_check_seq(tmp_path, capsys):
    path = tmp_path / "seq.json"
    code, out, _ = run(["check-seq", "--q", "0.4", "--b", "1", "--n-max", "400", "--json", str(path)], capsys)
    assert code == 0 and "N = 7" in out
    data = json.loads(path.read_text())
    assert data["passed"] and data["s_at_last_bad"] < 1e-6
    assert data["flags"]["bad_schedule"] == "quadratic"
    code, _, err = run(["check-seq", "--q", "0.4", "--b", "1", "--strict"], capsys)
    assert code == 1 and "GapTooSmall" in err
    code, out, _ = run(["check-seq", "--q", "0.5", "--b", "1", "--bad-schedule", "list:0,20,45"], capsys)
    assert code == 0 and "checked pairs = 2" in out


def test_flag_echo_round_trips(tmp_path, capsys):
    argv = ["render-slice", "--lambda", "0.1,0.30000000000000004", "--window=-0.5,1e-3,3.3,2.2",
            "--res", "6x5", "--max-iter", "20", "--out", str(tmp_path / "r.ppm")]
    _, stdout, _ = run(argv, capsys)
    flags = json.loads(stdout)["flags"]
    parser = build_parser()
    original = vars(parser.parse_args(argv))
    echoed = vars(parser.parse_args(
        ["render-slice", f"--lambda={flags['lam']}", f"--window={flags['window']}",
         "--res", flags["res"], "--max-iter", str(flags["max_iter"]), "--out", flags["out"]]
    ))
    for key in ("lam", "window", "res", "max_iter"):
        assert echoed[key] == original[key]


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "cubicslice.cli", "render-slice", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "1e-08" in proc.stdout
