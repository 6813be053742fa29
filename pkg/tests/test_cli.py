import json
import re
import shutil
import subprocess

import numpy as np
import pytest

from dftr.cli import load_config, main
from dftr.errors import ConfigError

HASH_LINE = re.compile(r"^# manifest_hash=[0-9a-f]{16}$")

BASE_INI = """\
[reactor]
v = 0.01
k = 0.001
n = 1
l = 1
peclet = 4
"""

SMALL_GRID = """\
[grid]
num_nodes = 101
"""


def write_ini(path, text):
    path.write_text(text)
    return str(path)


def read_csv(path):
    lines = path.read_text().splitlines()
    assert HASH_LINE.match(lines[0]), lines[0]
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return lines[0], header, rows


class TestLoadConfig:
    def test_defaults_materialized(self, tmp_path):
        cfg = load_config(write_ini(tmp_path / "c.ini", BASE_INI))
        assert cfg.d_ax == pytest.approx(0.0025, rel=1e-15)
        assert cfg.alpha == 0.0
        assert cfg.u_bar == 1.0
        assert cfg.num_nodes == 201
        assert cfg.t_final == 400.0
        assert cfg.horizon == 7000.0
        assert cfg.dt is None
        assert cfg.record_every == 1
        assert cfg.rho0 == 1.0
        assert cfg.gamma == pytest.approx(2.0, rel=1e-15)  # v/(2 d_ax)
        assert cfg.window_fraction == 0.5
        assert cfg.floor is None
        assert cfg.sat_m is None

    def test_explicit_dispersion(self, tmp_path):
        text = BASE_INI.replace("peclet = 4", "d_ax = 0.0025")
        cfg = load_config(write_ini(tmp_path / "c.ini", text))
        assert cfg.d_ax == 0.0025

    def test_both_dispersion_keys_rejected(self, tmp_path):
        text = BASE_INI + "d_ax = 0.0025\n"
        with pytest.raises(ConfigError, match="d_ax.*peclet|peclet.*d_ax"):
            load_config(write_ini(tmp_path / "c.ini", text))

    def test_neither_dispersion_key_rejected(self, tmp_path):
        text = BASE_INI.replace("peclet = 4\n", "")
        with pytest.raises(ConfigError):
            load_config(write_ini(tmp_path / "c.ini", text))

    def test_missing_required_key_is_named(self, tmp_path):
        text = BASE_INI.replace("v = 0.01\n", "")
        with pytest.raises(ConfigError, match=r"\bv\b"):
            load_config(write_ini(tmp_path / "c.ini", text))

    def test_unknown_key_is_named(self, tmp_path):
        text = BASE_INI + "frobnicate = 1\n"
        with pytest.raises(ConfigError, match="frobnicate"):
            load_config(write_ini(tmp_path / "c.ini", text))

    def test_unknown_section_rejected(self, tmp_path):
        text = BASE_INI + "[solver]\ntol = 1e-8\n"
        with pytest.raises(ConfigError, match="solver"):
            load_config(write_ini(tmp_path / "c.ini", text))

    def test_malformed_number_rejected(self, tmp_path):
        text = BASE_INI.replace("k = 0.001", "k = fast")
        with pytest.raises(ConfigError, match="k"):
            load_config(write_ini(tmp_path / "c.ini", text))

    def test_out_of_domain_value_rejected(self, tmp_path):
        text = BASE_INI.replace("v = 0.01", "v = -0.01")
        with pytest.raises(ConfigError):
            load_config(write_ini(tmp_path / "c.ini", text))


class TestSteadyCommand:
    def test_outputs_and_analytic_cross_check(self, tmp_path, capsys):
        cfg = write_ini(tmp_path / "c.ini", BASE_INI)
        out = tmp_path / "out"
        assert main(["steady", "--config", cfg, "--out", str(out)]) == 0

        hash_line, header, rows = read_csv(out / "steady.csv")
        assert header == ["x", "c_bar"]
        assert len(rows) == 201
        assert float(rows[0][0]) == 0.0
        assert float(rows[-1][0]) == 1.0

        manifest = json.loads((out / "manifest.json").read_text())
        assert hash_line == f"# manifest_hash={manifest['hash']}"

        assert (out / "steady_analytic.csv").exists()
        stdout = capsys.readouterr().out
        match = re.search(r"max relative discrepancy vs analytic: (\S+)", stdout)
        assert match and float(match.group(1)) <= 1e-6

    def test_no_analytic_file_for_other_orders(self, tmp_path):
        cfg = write_ini(tmp_path / "c.ini", BASE_INI.replace("n = 1", "n = 2"))
        out = tmp_path / "out"
        assert main(["steady", "--config", cfg, "--out", str(out)]) == 0
        assert not (out / "steady_analytic.csv").exists()

    def test_floats_round_trip_through_formatting(self, tmp_path):
        cfg = write_ini(tmp_path / "c.ini", BASE_INI)
        out = tmp_path / "out"
        main(["steady", "--config", cfg, "--out", str(out)])
        import dftr

        grid = load_config(cfg).grid()
        params = load_config(cfg).reactor_params(t_final=400.0)
        exact = dftr.steady_state_numeric(params, 1.0, grid).profile.values
        _, _, rows = read_csv(out / "steady.csv")
        printed = np.array([float(r[1]) for r in rows])
        assert np.array_equal(printed, exact)  # 17 significant digits


class TestSimulateCommand:
    CFG = BASE_INI + SMALL_GRID + "[time]\nt_final = 50\nrecord_every = 10\n"

    def test_output_files(self, tmp_path):
        cfg = write_ini(tmp_path / "c.ini", self.CFG)
        out = tmp_path / "out"
        code = main(["simulate", "--config", cfg, "--out", str(out),
                     "--snapshots", "0,25,50"])
        assert code == 0

        _, header, rows = read_csv(out / "trajectory.csv")
        assert header == ["t", "x", "w"]
        assert len(rows) == 51 * 101  # 500 steps recorded every 10, plus t=0

        _, header, rows = read_csv(out / "control.csv")
        assert header == ["t", "u_w"]
        assert len(rows) == 51

        _, header, rows = read_csv(out / "energy.csv")
        assert header == ["t", "energy", "norm_rho"]
        energies = np.array([float(r[1]) for r in rows])
        assert np.all(np.diff(energies) <= 1e-12 * energies[0])

        _, _, rows = read_csv(out / "profiles.csv")
        times = sorted({float(r[0]) for r in rows})
        assert times == [0.0, 25.0, 50.0]

    def test_zero_gain_means_zero_control(self, tmp_path):
        cfg = write_ini(tmp_path / "c.ini", self.CFG)
        out = tmp_path / "out"
        main(["simulate", "--config", cfg, "--out", str(out)])
        _, _, rows = read_csv(out / "control.csv")
        assert all(float(r[1]) == 0.0 for r in rows)

    def test_feedback_control_decays(self, tmp_path):
        text = self.CFG + "[control]\nalpha = 0.5\n"
        cfg = write_ini(tmp_path / "c.ini", text)
        out = tmp_path / "out"
        main(["simulate", "--config", cfg, "--out", str(out)])
        _, _, rows = read_csv(out / "control.csv")
        u = np.array([float(r[1]) for r in rows])
        assert u[0] > 0.0
        assert abs(u[-1]) < abs(u[0])


class TestSweepCommand:
    CFG = (BASE_INI + SMALL_GRID
           + "[time]\nt_final = 400\nhorizon = 400\n")

    def test_table_and_csv(self, tmp_path, capsys):
        cfg = write_ini(tmp_path / "c.ini", self.CFG)
        out = tmp_path / "out"
        code = main(["sweep", "--config", cfg, "--out", str(out),
                     "--n-list", "1,2", "--alpha-list", "0,0.5"])
        assert code == 0

        _, header, rows = read_csv(out / "sweep.csv")
        assert header == ["n", "alpha", "lambda_n", "lambda_t", "fit_r2",
                          "floor_hit"]
        assert len(rows) == 4
        for row in rows:
            assert float(row[2]) > 0.0
            assert float(row[3]) == pytest.approx(0.0025, rel=1e-12)
        assert "n\\alpha" in capsys.readouterr().out

    def test_all_cells_failing_exits_five(self, tmp_path, capsys):
        text = self.CFG.replace("k = 0.001", "k = 1")
        cfg = write_ini(tmp_path / "c.ini", text)
        out = tmp_path / "out"
        code = main(["sweep", "--config", cfg, "--out", str(out),
                     "--n-list", "0.5", "--alpha-list", "0"])
        assert code == 5
        _, _, rows = read_csv(out / "sweep.csv")
        assert rows[0][2] == ""  # lambda_n column empty for the failed cell
        assert "failed" in capsys.readouterr().err

    def test_invalid_list_arguments(self, tmp_path):
        cfg = write_ini(tmp_path / "c.ini", self.CFG)
        out = tmp_path / "out"
        assert main(["sweep", "--config", cfg, "--out", str(out),
                     "--alpha-list", "0,0.7"]) == 2
        assert main(["sweep", "--config", cfg, "--out", str(out),
                     "--n-list", "1,zap"]) == 2


class TestVerifyCommand:
    def test_reference_configuration_passes(self, tmp_path, capsys):
        text = (BASE_INI + SMALL_GRID
                + "[time]\nt_final = 50\ndt = 0.5\nhorizon = 400\n")
        cfg = write_ini(tmp_path / "c.ini", text)
        out = tmp_path / "out"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0

        _, header, rows = read_csv(out / "verify.csv")
        assert header == ["check", "metric", "value", "threshold", "pass"]
        names = [r[0] for r in rows]
        assert names == ["dissipativity", "resolvent_error", "resolvent_order",
                         "duhamel_nonlinear", "duhamel_linear", "equilibrium",
                         "envelope"]
        assert all(r[-1] == "true" for r in rows)
        assert "pass" in capsys.readouterr().out

    def test_coarse_grid_skips_resolvent_refinement(self, tmp_path):
        # five nodes cannot host a three-level refinement study; those rows
        # must be marked skipped rather than silently passed
        text = (BASE_INI + "[grid]\nnum_nodes = 21\n"
                + "[time]\nt_final = 10\ndt = 0.5\nhorizon = 100\n")
        cfg = write_ini(tmp_path / "c.ini", text)
        out = tmp_path / "out"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
        _, _, rows = read_csv(out / "verify.csv")
        by_name = {r[0]: r for r in rows}
        assert by_name["resolvent_error"][1] == "skipped_insufficient_resolution"
        assert by_name["resolvent_error"][-1] == "skipped"

    def test_nondissipative_discretization_fails(self, tmp_path, capsys):
        # convection-dominated mesh: h is far beyond 8*d_ax/v, the central
        # generator loses negativity and the suite must say so
        text = """\
[reactor]
v = 10
k = 0.001
n = 1
l = 1
d_ax = 0.001
[grid]
num_nodes = 5
[time]
t_final = 0
horizon = 0
"""
        cfg = write_ini(tmp_path / "c.ini", text)
        out = tmp_path / "out"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 6
        _, _, rows = read_csv(out / "verify.csv")
        by_name = {r[0]: r for r in rows}
        assert by_name["dissipativity"][-1] == "false"
        capsys.readouterr()


class TestExitCodes:
    def test_config_error_is_two(self, tmp_path, capsys):
        text = BASE_INI.replace("v = 0.01\n", "")
        cfg = write_ini(tmp_path / "c.ini", text)
        assert main(["steady", "--config", cfg, "--out", str(tmp_path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_steady_failure_is_three(self, tmp_path, capsys):
        text = BASE_INI.replace("k = 0.001", "k = 1").replace("n = 1", "n = 0.5")
        cfg = write_ini(tmp_path / "c.ini", text)
        assert main(["steady", "--config", cfg, "--out", str(tmp_path)]) == 3
        assert "steady-state failure" in capsys.readouterr().err

    def test_integration_failure_is_four(self, tmp_path, capsys):
        text = (BASE_INI.replace("n = 1", "n = 400") + SMALL_GRID
                + "[time]\nt_final = 1\ndt = 1\n")
        cfg = write_ini(tmp_path / "c.ini", text)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 4
        assert "integration failure" in capsys.readouterr().err


class TestDeterminism:
    CFG = (BASE_INI + SMALL_GRID + "[time]\nt_final = 400\nhorizon = 400\n")

    def test_sweep_reruns_are_byte_identical(self, tmp_path, monkeypatch):
        cfg = write_ini(tmp_path / "c.ini", self.CFG)
        args = ["--n-list", "1,2", "--alpha-list", "0,0.5"]
        out1, out2 = tmp_path / "a", tmp_path / "b"
        monkeypatch.setenv("DFTR_THREADS", "1")
        assert main(["sweep", "--config", cfg, "--out", str(out1)] + args) == 0
        monkeypatch.setenv("DFTR_THREADS", "4")
        assert main(["sweep", "--config", cfg, "--out", str(out2)] + args) == 0
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()

    def test_hash_excludes_output_directory(self, tmp_path):
        cfg = write_ini(tmp_path / "c.ini", BASE_INI)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        main(["steady", "--config", cfg, "--out", str(out1)])
        main(["steady", "--config", cfg, "--out", str(out2)])
        h1 = json.loads((out1 / "manifest.json").read_text())["hash"]
        h2 = json.loads((out2 / "manifest.json").read_text())["hash"]
        assert h1 == h2
        assert (out1 / "steady.csv").read_bytes() == (out2 / "steady.csv").read_bytes()


@pytest.mark.skipif(shutil.which("dftr") is None,
                    reason="console script not on PATH")
def test_console_entry_point(tmp_path):
    cfg = write_ini(tmp_path / "c.ini", BASE_INI)
    proc = subprocess.run(["dftr", "steady", "--config", cfg,
                           "--out", str(tmp_path / "out")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "steady state solved" in proc.stdout
