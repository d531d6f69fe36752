import json

import numpy as np
import pytest

from eulerhodo.cli import main

EX61_FILE = """\
dimension: 2
hodograph: ["-atanh(u) + 2*atanh(v)", "atanh(u) - atanh(v)"]
domain_lower: [-1, -1]
domain_upper: [1, 1]
n_starts: 24
seed: 5
"""

ROTATION_FILE = """\
dimension: 2
hodograph: ["-v", "u"]
domain_lower: [-1, -1]
domain_upper: [1, 1]
n_starts: 8
seed: 0
"""


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDemo:
    def test_ex61_catastrophe_text(self, capsys):
        code, out, _ = run(capsys, "demo", "ex61", "catastrophe", "--starts", "24")
        assert code == 0
        assert "t_c = 2.41421356" in out
        assert "u_c = (0.00000000, 0.00000000)" in out
        assert "x_c = (0.00000000, 0.00000000)" in out
        assert "negative extremum: t = -0.41421356" in out

    def test_ex81_catastrophe_text(self, capsys):
        code, out, _ = run(capsys, "demo", "ex81", "catastrophe", "--starts", "16")
        assert code == 0
        assert "t_c = 2.00000000" in out
        assert "x_c = (1.00000000, 1.00000000, 1.00000000)" in out

    def test_ex61_branches_at_origin(self, capsys):
        code, out, _ = run(capsys, "demo", "ex61", "branches", "--at", "0,0")
        assert code == 0
        assert "-0.41421356" in out
        assert "2.41421356" in out

    def test_ex64_characteristics(self, capsys):
        code, out, _ = run(capsys, "demo", "ex64", "--starts", "24")
        assert code == 0
        assert "t_c = 0.72813590" in out

    def test_default_analysis_for_maps(self, capsys):
        code, out, _ = run(capsys, "demo", "fold2d", "--grid", "40")
        assert code == 0
        assert "singular locus at t = 1.0" in out

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys, "demo", "ex61", "catastrophe", "--starts", "16", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["schema_version"] == 1
        pos = payload["positive"]
        assert set(("t_c", "u_c", "x_c", "branch_kind")) <= set(pos)
        assert pos["t_c"] == pytest.approx(1 + np.sqrt(2), abs=1e-8)
        assert pos["branch_kind"] == "GC"

    def test_csv_format(self, capsys):
        code, out, _ = run(
            capsys, "demo", "ex61", "catastrophe", "--starts", "16", "--format", "csv"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "side,t_c,branch_kind,u1,u2,x1,x2"
        assert lines[1].startswith("positive,2.41421356")

    def test_deterministic_output(self, capsys):
        argv = ("demo", "ex61", "catastrophe", "--starts", "16", "--format", "json")
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second


class TestFileMode:
    def test_solve(self, tmp_path, capsys):
        path = tmp_path / "p.yaml"
        path.write_text(EX61_FILE)
        code, out, _ = run(
            capsys, "solve", "--file", str(path), "--at", "0.1,0.2", "--t", "0.3"
        )
        assert code == 0
        assert "residual" in out

    def test_timeline_csv(self, tmp_path, capsys):
        path = tmp_path / "p.yaml"
        path.write_text(
            """\
dimension: 2
hodograph: ["u^3/3 + 2*u*v^2/3 - 2*v", "v^3/3 + u^2*v/3 + u"]
domain_lower: [-2, -2]
domain_upper: [2, 2]
"""
        )
        code, out, _ = run(
            capsys, "timeline", "--file", str(path), "--t-range", "0:5",
            "--grid", "60", "--format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "t_lo,t_hi,nonempty"
        assert len(lines) == 2
        assert lines[1].endswith(",0")

    def test_classify2d_csv_header(self, tmp_path, capsys):
        path = tmp_path / "p.yaml"
        path.write_text(EX61_FILE)
        code, out, _ = run(
            capsys, "classify2d", "--file", str(path), "--at", "0,0", "--format", "csv"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "u,v,Delta,t_minus,t_plus,label,abs_mu_at_tplus"
        fields = lines[1].split(",")
        assert float(fields[2]) == pytest.approx(8.0)
        assert fields[5] == "mixed"
        assert float(fields[6]) == pytest.approx(1.0, abs=1e-8)

    def test_map_scan_empty_locus_csv(self, capsys):
        code, out, _ = run(
            capsys, "demo", "ex72", "map-scan", "--t", "0", "--grid", "40",
            "--format", "csv",
        )
        assert code == 0
        assert out == "t,u1,u2\n"  # header only

    def test_map_scan_out_with_sidecar(self, tmp_path, capsys):
        out_path = tmp_path / "locus.csv"
        code, _, _ = run(
            capsys, "demo", "fold2d", "map-scan", "--t", "1.0", "--grid", "40",
            "--format", "csv", "--out", str(out_path),
        )
        assert code == 0
        assert out_path.exists()
        sidecar = json.loads((tmp_path / "locus.csv.segments.json").read_text())
        assert sidecar["schema_version"] == 1
        assert len(sidecar["segments"]) >= 1
        header = out_path.read_text().splitlines()[0]
        assert header == "t,u1,u2"

    def test_missing_file_is_exit_1(self, capsys):
        code, _, err = run(capsys, "branches", "--file", "/nonexistent.yaml", "--at", "0,0")
        assert code == 1
        assert "error" in err

    def test_bad_expression_is_exit_1(self, tmp_path, capsys):
        path = tmp_path / "p.yaml"
        path.write_text(
            """\
dimension: 2
hodograph: ["u +* v", "v"]
domain_lower: [-1, -1]
domain_upper: [1, 1]
"""
        )
        code, _, err = run(capsys, "branches", "--file", str(path), "--at", "0,0")
        assert code == 1
        assert "syntax error" in err

    def test_no_branch_is_exit_2(self, tmp_path, capsys):
        path = tmp_path / "p.yaml"
        path.write_text(ROTATION_FILE)
        code, _, err = run(capsys, "catastrophe", "--file", str(path))
        assert code == 2
        assert "NoBranch" in err

    def test_initial_data_only_blocks_hodograph_analyses(self, tmp_path, capsys):
        path = tmp_path / "p.yaml"
        path.write_text(
            """\
dimension: 2
initial_data: ["exp(-x^2 - y^2)", "exp(-x^2 - 2*y^2)"]
domain_lower: [-1.5, -1.5]
domain_upper: [1.5, 1.5]
"""
        )
        code, _, err = run(capsys, "branches", "--file", str(path), "--at", "0,0")
        assert code == 1
        assert "initial data" in err
        code, out, _ = run(
            capsys, "characteristics", "--file", str(path), "--starts", "16"
        )
        assert code == 0
        assert "t_c = 0.7281" in out


class TestValidate:
    def test_validate_passes(self, capsys):
        code, out, _ = run(capsys, "validate")
        assert code == 0
        assert "FAIL" not in out
        assert out.count("PASS") >= 7
