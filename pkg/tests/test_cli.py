import csv
import json
import math
from pathlib import Path

import pytest

from siegelcurv import cli

CURVES = Path(__file__).resolve().parents[1] / "curves"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_analyze_weierstrass_sweep(capsys, tmp_path, cache_dir):
    code, out, _ = run(capsys, "analyze", "--curve", CURVES / "g3hyp.json", "--sweep", "special",
                       "--cache-dir", cache_dir, "--out", tmp_path)
    assert code == cli.EXIT_OK
    rows = read_rows(tmp_path / "curvature.csv")
    assert len(rows) == 8
    assert all(abs(float(r["H"]) + 1) <= 1e-3 for r in rows)
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["certificates"]["i2"]["dim"] == 1
    assert doc["config"]["seed"] == 0 and doc["config"]["tol"] == "9.9999999999999995e-08"
    assert "tool_version" in doc and "curve_hash" in doc


def test_analyze_genus2(capsys, tmp_path, cache_dir):
    code, out, _ = run(capsys, "analyze", "--curve", CURVES / "g2.json", "--cache-dir", cache_dir,
                       "--out", tmp_path)
    assert code == cli.EXIT_OK
    assert "dim I2 0" in out
    rows = read_rows(tmp_path / "curvature.csv")
    assert all(float(r["H"]) == -1.0 for r in rows)


def test_analyze_quintic_grid(capsys, tmp_path, cache_dir):
    code, _, _ = run(capsys, "analyze", "--curve", CURVES / "quintic.json", "--sweep", "grid:10x10",
                     "--cache-dir", cache_dir, "--out", tmp_path)
    assert code == cli.EXIT_OK
    rows = read_rows(tmp_path / "curvature.csv")
    assert len(rows) == 100
    assert all(float(r["H"]) < -1 for r in rows)
    assert len(read_rows(tmp_path / "mu2_profile.csv")) == 100


def test_analyze_path_sweep(capsys, tmp_path, cache_dir):
    pts = tmp_path / "pts.txt"
    pts.write_text("# x_re x_im sheet\n0.3 0.4 0\n-0.5, 0.2, 1\n")
    code, _, _ = run(capsys, "analyze", "--curve", CURVES / "g3hyp.json", "--sweep", f"path:{pts}",
                     "--cache-dir", cache_dir, "--out", tmp_path / "o")
    assert code == cli.EXIT_OK
    rows = read_rows(tmp_path / "o" / "curvature.csv")
    assert [r["sheet"] for r in rows] == ["0", "1"]


def test_outputs_reproducible_and_cache_neutral(capsys, tmp_path):
    args = ["analyze", "--curve", CURVES / "g2.json", "--sweep", "grid:3x3", "--tol", "1e-6",
            "--cache-dir", tmp_path / "cache"]
    run(capsys, *args, "--out", tmp_path / "cold")
    run(capsys, *args, "--out", tmp_path / "warm")
    for name in ("curvature.csv", "mu2_profile.csv"):
        assert (tmp_path / "cold" / name).read_bytes() == (tmp_path / "warm" / name).read_bytes()
    cold = json.loads((tmp_path / "cold" / "report.json").read_text())
    warm = json.loads((tmp_path / "warm" / "report.json").read_text())
    assert cold["certificates"]["gram"]["cached"] is False and warm["certificates"]["gram"]["cached"] is True
    for doc in (cold, warm):
        doc["certificates"]["gram"].pop("cached")
    assert cold == warm
    assert (tmp_path / "cold" / "run.log").exists()


def test_bad_curve(capsys, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"family": "hyperelliptic", "coefficients": ["0", "0", "-1", "1"]}))
    code, _, err = run(capsys, "analyze", "--curve", spec, "--out", tmp_path)
    assert code == cli.EXIT_ERROR
    assert "[curves]" in err


def test_missing_curve_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", "--curve", tmp_path / "nope.json", "--out", tmp_path)
    assert code == cli.EXIT_ERROR and err.startswith("error:")


def test_siegel_scan(capsys):
    code, out, _ = run(capsys, "siegel", "--g", 3, "--samples", 10000)
    doc = json.loads(out)
    assert code == cli.EXIT_OK
    assert float(doc["min"]) == pytest.approx(-1, abs=1e-3)
    assert float(doc["max"]) == pytest.approx(-1 / 3, abs=1e-3)


def test_siegel_genus_one(capsys):
    code, out, _ = run(capsys, "siegel", "--g", 1, "--samples", 50)
    doc = json.loads(out)
    assert float(doc["min"]) == float(doc["max"]) == pytest.approx(-1, abs=1e-15)
    code, _, _ = run(capsys, "siegel", "--g", 0)
    assert code == cli.EXIT_ERROR


def test_class(capsys):
    code, out, _ = run(capsys, "class")
    doc = json.loads(out)
    assert float(doc["integral"]) == pytest.approx(math.pi / 12, abs=1e-8)
    assert float(doc["c"]) == pytest.approx(math.pi, abs=1e-7)


def test_acceptance_command(capsys, tmp_path, cache_dir):
    code, out, _ = run(capsys, "acceptance", "--cache-dir", cache_dir, "--out", tmp_path)
    lines = out.strip().splitlines()
    assert [l.split()[0] for l in lines] == [f"A{k}" for k in range(1, 12)]
    doc = json.loads((tmp_path / "acceptance.json").read_text())
    assert [c["id"] for c in doc["criteria"]] == [f"A{k}" for k in range(1, 12)]
    assert code == cli.EXIT_OK, out
