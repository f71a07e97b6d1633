"""CLI tests: output schemas, encodings, determinism, exit codes."""

import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ddcrb.cli import main

BASE = ["--np", "60", "--delta", "0.05", "--Q", "2", "--center", "1.5",
        "--width2", "0.09", "--tau0", "0.1", "--f0", "2.0"]


def run_cli(args, tmp_path=None):
    """Run the CLI in-process, capturing stdout."""
    import contextlib

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def parse_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows


class TestTable1:
    def test_ratio_column(self, tmp_path):
        code, out = run_cli(["table1", *BASE, "--format", "csv"])
        assert code == 0
        rows = parse_csv(out)
        assert [int(r["L"]) for r in rows] == [1, 2, 100]
        ratios = [float(r["ratio_tau0"]) for r in rows]
        np.testing.assert_allclose(ratios, [2.0, 1.5, 1.01], rtol=1e-12)
        np.testing.assert_allclose([float(r["ratio_f0"]) for r in rows],
                                   [2.0, 1.5, 1.01], rtol=1e-12)

    def test_dual_path_agreement(self):
        code, out = run_cli(["table1", *BASE, "--format", "csv"])
        rows = parse_csv(out)
        for row in rows:
            closed = float(row["jcrb_tau0_s"])
            schur = float(row["jcrb_tau0_s_schur"])
            assert abs(closed - schur) <= 1e-8 * closed

    def test_both_conventions(self):
        code, out = run_cli(["table1", *BASE, "--amp-convention", "both"])
        rows = parse_csv(out)
        assert {r["amp_convention"] for r in rows} == {"unit", "sqrt2"}
        assert len(rows) == 6
        by_conv = {c: [r for r in rows if r["amp_convention"] == c]
                   for c in ("unit", "sqrt2")}
        # |b|^2 = 2 doubles the information: bounds halve
        assert float(by_conv["sqrt2"][0]["jcrb_tau0"]) == pytest.approx(
            float(by_conv["unit"][0]["jcrb_tau0"]) / 2, rel=1e-12)

    def test_csv_and_json_values_identical(self, tmp_path):
        csv_path = tmp_path / "t.csv"
        json_path = tmp_path / "t.json"
        assert run_cli(["table1", *BASE, "--format", "csv", "--out", str(csv_path)])[0] == 0
        assert run_cli(["table1", *BASE, "--format", "json", "--out", str(json_path)])[0] == 0
        csv_rows = parse_csv(csv_path.read_text())
        payload = json.loads(json_path.read_text())
        assert len(payload["rows"]) == len(csv_rows)
        for jrow, crow in zip(payload["rows"], csv_rows):
            for key, value in jrow["values"].items():
                if isinstance(value, float):
                    assert float(crow[key]) == value
        # every numeric cell in JSON carries a method tag
        for jrow in payload["rows"]:
            for key, value in jrow["values"].items():
                if isinstance(value, float) and key != "amp_convention":
                    assert jrow["methods"].get(key) in (
                        "closed_form", "schur_numeric", "oracle", "monte_carlo")

    def test_provenance_block(self, tmp_path):
        path = tmp_path / "t.json"
        run_cli(["table1", *BASE, "--format", "json", "--seed", "7",
                 "--out", str(path)])
        payload = json.loads(path.read_text())
        assert payload["provenance"]["seed"] == 7
        assert "version" in payload["provenance"]


class TestSweep:
    def test_l_sweep_families(self):
        code, out = run_cli(["sweep", "--sweep", "L=1:6", *BASE])
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 6
        # P=1 family approaches the known-signal reference from above
        for row in rows:
            assert float(row["jcrb_tau0_s_p1"]) > float(row["jcrb_tau0"])
            assert float(row["jcrb_tau0_b_p1"]) <= float(row["jcrb_tau0_s_p1"])
        # P=L family scales as 2/L
        l1 = float(rows[0]["jcrb_tau0_s_pl"])
        l4 = float(rows[3]["jcrb_tau0_s_pl"])
        assert l4 == pytest.approx(l1 / 4, rel=1e-12)

    def test_np_sweep_with_fixed_period(self):
        code, out = run_cli(["sweep", "--sweep", "n_p=10:20", "--Tp", "4",
                             "--Q", "1", "--tau0", "0.5", "--sigma2", "0.1",
                             "--f0", "2.0"])
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 11
        deltas = [float(r["delta"]) for r in rows]
        np.testing.assert_allclose(deltas, [4.0 / n for n in range(10, 21)])
        for col in ("jcrb_tau0", "jcrb_tau0_s", "jcrb_tau0_b"):
            vals = [float(r[col]) for r in rows]
            assert np.all(np.diff(vals) < 0), col
        for r in rows:
            assert float(r["jcrb_tau0_b"]) <= float(r["jcrb_tau0_s"])

    def test_a_sweep_monotone(self):
        code, out = run_cli(["sweep", "--sweep", "a=0.5:4:0.5", *BASE])
        rows = parse_csv(out)
        vals = [float(r["jcrb_tau0_s"]) for r in rows]
        assert np.all(np.diff(vals) < 0)

    def test_missing_axis_is_usage_error(self):
        code, _ = run_cli(["sweep", *BASE])
        assert code == 1

    def test_bad_axis_is_usage_error(self):
        code, _ = run_cli(["sweep", "--sweep", "bogus=1:5", *BASE])
        assert code == 1


class TestOverlapCommand:
    def test_rows_and_flags(self):
        code, out = run_cli(["overlap", "--M", "16", "--P", "1", "--sigma2", "1"])
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 17
        by_n0 = {int(r["n0"]): r for r in rows}
        assert by_n0[0]["singular"] == "True"
        assert float(by_n0[8]["crb_tau0"]) == pytest.approx(6.0 / 64.0, rel=1e-12)
        assert float(by_n0[16]["crb_tau0"]) == pytest.approx(2.0 / 16.0, rel=1e-12)
        assert float(by_n0[3]["crb_non"]) == pytest.approx(0.125)

    def test_odd_m_usage_error(self):
        code, _ = run_cli(["overlap", "--M", "15"])
        assert code == 1


class TestMonteCarloCommand:
    ARGS = ["montecarlo", "--np", "16", "--delta", "0.25", "--Q", "1",
            "--center", "2", "--width2", "0.16", "--tau0", "1.0", "--f0", "0.3",
            "--sigma2", "0.001", "--trials", "6", "--seed", "42",
            "--fspan", "0.1", "--fpoints", "21"]

    def test_seed_determinism_bytes(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli([*self.ARGS, "--format", "json", "--out", str(p1)])[0] == 0
        assert run_cli([*self.ARGS, "--format", "json", "--out", str(p2)])[0] == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_singular_scenario_exits_zero(self):
        code, out = run_cli([*self.ARGS, "--L", "0"])
        assert code == 0
        rows = parse_csv(out)
        assert all(r["singular"] == "True" for r in rows)

    def test_ratio_columns_present(self):
        code, out = run_cli(self.ARGS)
        rows = parse_csv(out)
        assert {r["parameter"] for r in rows} == {"tau0", "f0", "tau0_known",
                                                  "f0_known"}
        for r in rows:
            assert float(r["ratio"]) > 0


class TestCrbCommand:
    def test_single_row_with_structure_columns(self):
        code, out = run_cli(["crb", *BASE])
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1
        row = rows[0]
        assert float(row["jcrb_tau0_b"]) <= float(row["jcrb_tau0_s"])
        assert row["singular"] == ""

    def test_triangle_signal(self):
        code, out = run_cli(["crb", "--signal", "triangle", "--M", "16",
                             "--delta", "0.5", "--tau0", "1.0", "--f0", "0.1"])
        assert code == 0
        rows = parse_csv(out)
        assert "jcrb_tau0_b" not in rows[0]

    def test_l_zero_flagged_not_crash(self):
        code, out = run_cli(["crb", *BASE, "--L", "0"])
        assert code == 0
        row = parse_csv(out)[0]
        assert "jcrb_tau0_s" in row["singular"]
        assert row["jcrb_tau0_s"] == ""


class TestConfigAndErrors:
    def test_config_file_with_flag_override(self, tmp_path):
        cfg = {"np": 60, "delta": 0.05, "Q": 2, "center": 1.5, "width2": 0.09,
               "tau0": 0.1, "f0": 2.0, "sigma2": 4.0}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        _, out_file = run_cli(["crb", "--config", str(path)])
        _, out_flag = run_cli(["crb", "--config", str(path), "--sigma2", "8.0"])
        v_file = float(parse_csv(out_file)[0]["jcrb_tau0"])
        v_flag = float(parse_csv(out_flag)[0]["jcrb_tau0"])
        assert v_flag == pytest.approx(2 * v_file, rel=1e-12)

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"nonsense": 1}))
        code, _ = run_cli(["crb", "--config", str(path)])
        assert code == 1

    def test_missing_config_file_is_io_error(self):
        code, _ = run_cli(["crb", "--config", "/nonexistent/cfg.json"])
        assert code == 2

    def test_unwritable_out_is_io_error(self):
        code, _ = run_cli(["crb", *BASE, "--out", "/nonexistent/dir/out.csv"])
        assert code == 2

    def test_conflicting_delta_and_tp(self):
        code, _ = run_cli(["crb", *BASE, "--Tp", "7.0"])
        assert code == 1

    def test_signal_file_roundtrip(self, tmp_path):
        sig_path = tmp_path / "sig.json"
        samples = [0.0, 0.5, 1.0, 0.5, 0.0, 0.0]
        sig_path.write_text(json.dumps({
            "delta": 0.5, "samples_real": samples,
            "samples_imag": [0.0] * 6,
        }))
        code, out = run_cli(["crb", "--signal", str(sig_path),
                             "--tau0", "1.0", "--f0", "0.2"])
        assert code == 0
        assert float(parse_csv(out)[0]["jcrb_tau0"]) > 0

    def test_console_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "ddcrb.cli", "crb", *BASE],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "jcrb_tau0" in proc.stdout
