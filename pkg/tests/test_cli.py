import csv
import json
import math

import numpy as np
import pytest

from lagerstrom import cli, integral_eq
from lagerstrom.cli import main
from lagerstrom.errors import NonConvergenceError


def read_table_csv(path):
    summary, rows = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                summary[key.strip()] = value
            else:
                rows.append(line.rstrip("\n"))
    reader = csv.reader(rows)
    header = next(reader)
    data = np.array([[float(x) for x in row] for row in reader])
    return summary, header, data


class TestSolve:
    def test_profile_csv(self, tmp_path):
        out = tmp_path / "run.csv"
        rc = main(["solve", "--n", "3", "--k", "0", "--eps", "0.1",
                   "--tol", "1e-8", "--out", str(out)])
        assert rc == 0
        summary, header, data = read_table_csv(out)
        assert header == ["r", "u", "u_prime", "w"]
        assert {"c_star", "C", "u_inf", "u_inf_bound"} <= set(summary)
        u = data[:, header.index("u")]
        assert np.all(np.diff(u) >= 0.0)
        assert abs(float(summary["u_inf"]) - 1.0) <= 1e-8

    def test_json_format(self, tmp_path):
        out = tmp_path / "run.json"
        rc = main(["solve", "--n", "3", "--eps", "0.1", "--out", str(out),
                   "--format", "json"])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert set(payload["columns"]) == {"r", "u", "u_prime", "w"}
        assert payload["summary"]["C"] > 1.0

    def test_determinism(self, tmp_path):
        outs = [tmp_path / f"d{i}.csv" for i in range(2)]
        for out in outs:
            assert main(["solve", "--n", "3", "--eps", "0.1",
                         "--out", str(out)]) == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_f_table_matches_constant_k(self, tmp_path):
        table = tmp_path / "f.csv"
        table.write_text("0.0,1.0\n0.5,1.0\n1.0,1.0\n")
        out_t = tmp_path / "t.csv"
        out_k = tmp_path / "k.csv"
        assert main(["solve", "--n", "2", "--eps", "0.1", "--f-table",
                     str(table), "--out", str(out_t)]) == 0
        assert main(["solve", "--n", "2", "--eps", "0.1", "--k", "1",
                     "--out", str(out_k)]) == 0
        s_t, _, _ = read_table_csv(out_t)
        s_k, _, _ = read_table_csv(out_k)
        assert float(s_t["c_star"]) == pytest.approx(float(s_k["c_star"]),
                                                     abs=1e-6)


class TestIe:
    def test_summary_and_monotone_profile(self, tmp_path):
        out = tmp_path / "ie.csv"
        rc = main(["ie", "--n", "3", "--eps", "0.1", "--out", str(out)])
        assert rc == 0
        summary, header, data = read_table_csv(out)
        assert header == ["rho", "v", "u"]
        assert {"C", "Phi", "iterations", "final_residual"} <= set(summary)
        v = data[:, 1]
        assert v[0] == pytest.approx(-1.0, abs=1e-8)
        assert np.all(np.diff(v) >= -1e-12)

    def test_k1_column_name(self, tmp_path):
        out = tmp_path / "ie21.csv"
        rc = main(["ie", "--n", "2", "--k", "1", "--eps", "0.1",
                   "--out", str(out)])
        assert rc == 0
        _, header, data = read_table_csv(out)
        assert header == ["rho", "g", "u"]
        assert data[0, 1] == pytest.approx(1.0 - math.e, abs=1e-8)


class TestAsym:
    def test_inner_grid(self, tmp_path):
        out = tmp_path / "inner.csv"
        rc = main(["asym", "--case", "3,0", "--eps", "0.01",
                   "--grid", "1:10:21", "--out", str(out)])
        assert rc == 0
        summary, header, data = read_table_csv(out)
        assert header == ["r", "u_inner"]
        assert len(data) == 21
        assert data[0, 1] == pytest.approx(0.0, abs=1e-14)

    def test_outer_grid(self, tmp_path):
        out = tmp_path / "outer.csv"
        rc = main(["asym", "--case", "2,1", "--eps", "0.001",
                   "--grid", "0.5:5:11", "--grid-variable", "rho",
                   "--order", "2", "--out", str(out)])
        assert rc == 0
        _, header, data = read_table_csv(out)
        assert header == ["rho", "u_outer"]
        assert np.all(data[:, 1] < 1.0)


class TestSweep:
    def test_rows_match_series_within_budget(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--case", "3,0", "--eps-grid", "0.05,0.02",
                   "--out", str(out)])
        assert rc == 0
        _, header, data = read_table_csv(out)
        cols = {name: data[:, i] for i, name in enumerate(header)}
        assert list(cols["eps"]) == [0.05, 0.02]
        for eps, C, Cs in zip(cols["eps"], cols["C"], cols["C_series"]):
            assert abs(C - Cs) <= 10.0 * eps ** 2 * math.log(eps) ** 2
        assert np.max(np.abs(cols["C"] - cols["C_picard"])) <= 1e-5


class TestVerifyAndIdentities:
    def test_identities_pass(self, tmp_path):
        out = tmp_path / "id.json"
        rc = main(["identities", "--tol", "1e-8", "--out", str(out),
                   "--format", "json"])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert all(c["passed"] for c in payload["checks"])

    def test_verify_single_case(self, tmp_path):
        out = tmp_path / "verify.csv"
        rc = main(["verify", "--case", "3,0", "--eps-grid", "0.1",
                   "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert "cross_solver_sup_norm" in text
        assert "False" not in text


class TestExitCodes:
    def test_missing_required_flags(self, capsys):
        assert main(["solve", "--eps", "0.1"]) == 2
        assert main(["ie", "--n", "3"]) == 2
        capsys.readouterr()

    def test_invalid_values(self, capsys):
        assert main(["solve", "--n", "3", "--eps", "-0.1"]) == 2
        assert main(["asym", "--case", "5,5", "--eps", "0.01"]) == 2
        assert main(["solve", "--n", "0.2", "--eps", "0.1"]) == 2
        capsys.readouterr()

    def test_malformed_flags(self, capsys):
        assert main(["asym", "--case", "3-0", "--eps", "0.01"]) == 2
        assert main(["asym", "--case", "3,0", "--eps", "0.01",
                     "--grid", "1:10"]) == 2
        assert main(["solve", "--n", "3", "--eps", "0.1",
                     "--format", "yaml"]) == 2
        assert main(["nosuchcommand"]) == 2
        capsys.readouterr()

    def test_solver_error_maps_to_one(self, monkeypatch, capsys):
        def explode(params, cfg=None):
            raise NonConvergenceError("forced failure")

        monkeypatch.setattr(cli.integral_eq, "solve_C", explode)
        assert main(["ie", "--n", "3", "--eps", "0.1"]) == 1
        capsys.readouterr()

    def test_verification_failure_maps_to_three(self, tmp_path, monkeypatch):
        # unreachable tolerance forces report failures
        out = tmp_path / "v.csv"
        rc = main(["verify", "--case", "3,0", "--eps-grid", "0.1",
                   "--tol", "1e-16", "--out", str(out)])
        assert rc == 3
