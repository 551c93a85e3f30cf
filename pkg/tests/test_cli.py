import csv
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from ncmaxwell import __version__
from ncmaxwell.brackets import AUDIT_CHECKS
from ncmaxwell.cli import (
    EXIT_BLOWUP,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    main,
)

GOLDEN = Path(__file__).parent / "golden"
SIM_HEADER = ["time", "total_energy", "gauss_residual", "divB_residual", "faraday_residual", "theta_smallness"]


def bundled(name):
    return str(resources.files("ncmaxwell") / "data" / name)


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


SMALL_SIM = """\
scenario = simulate
[lattice]
dims = 8, 4, 4
[initial]
kind = random_transverse
amplitude = 0.1
[run]
n_steps = {n}
diag_stride = 5
"""


class TestSimulate:
    def test_zero_steps_single_row(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["simulate", "--config", write_cfg(tmp_path, SMALL_SIM.format(n=0)), "--output", str(out)]) == EXIT_OK
        header, rows = read_csv(out)
        assert header == SIM_HEADER
        assert len(rows) == 1 and rows[0][0] == 0.0

    def test_row_count_and_stride(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["simulate", "--config", write_cfg(tmp_path, SMALL_SIM.format(n=12)), "--output", str(out)]) == EXIT_OK
        _, rows = read_csv(out)
        assert [r[0] for r in rows] == [0.0, 1.25, 2.5]

    def test_bundled_plane_wave_energy_constant(self, tmp_path):
        out = tmp_path / "pw.csv"
        assert main(["simulate", "--config", bundled("plane_wave.cfg"), "--output", str(out)]) == EXIT_OK
        _, rows = read_csv(out)
        energy = np.array([r[1] for r in rows])
        assert len(rows) > 2
        assert np.max(np.abs(energy - energy[0])) / energy[0] < 1e-8

    def test_byte_identical_repeat(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SIM.format(n=10) + "seed = 42\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["simulate", "--config", cfg, "--output", str(a)])
        main(["simulate", "--config", cfg, "--output", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SIM.format(n=0))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["simulate", "--config", cfg, "--output", str(a), "--seed", "1"])
        main(["simulate", "--config", cfg, "--output", str(b), "--seed", "2"])
        assert a.read_bytes() != b.read_bytes()

    def test_golden_file(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["simulate", "--config", str(GOLDEN / "simulate_small.cfg"), "--output", str(out)]) == EXIT_OK
        header, rows = read_csv(out)
        gheader, grows = read_csv(GOLDEN / "simulate_small.csv")
        assert header == gheader
        np.testing.assert_allclose(np.array(rows), np.array(grows), rtol=1e-12, atol=1e-15)

    def test_blowup_exit_code_keeps_rows(self, tmp_path):
        text = SMALL_SIM.format(n=200).replace("[run]", "[run]\ndt = 40.0")
        out = tmp_path / "blow.csv"
        assert main(["simulate", "--config", write_cfg(tmp_path, text), "--output", str(out)]) == EXIT_BLOWUP
        _, rows = read_csv(out)
        assert len(rows) >= 1

    def test_io_error(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SIM.format(n=0))
        assert main(["simulate", "--config", cfg, "--output", str(tmp_path / "nope" / "x.csv")]) == EXIT_IO
        assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == EXIT_IO

    def test_config_errors(self, tmp_path):
        assert main(["simulate", "--config", write_cfg(tmp_path, "scenario = simulate\ndt 0.1\n")]) == EXIT_CONFIG
        assert main(["legendre-check", "--config", write_cfg(tmp_path, SMALL_SIM.format(n=0))]) == EXIT_CONFIG
        bad_initial = SMALL_SIM.format(n=0) + "[physics]\ntheta = 0, 0, 0\n"
        bad_initial = bad_initial.replace("amplitude = 0.1", "amplitude = 0.1\ncolour = red")
        assert main(["simulate", "--config", write_cfg(tmp_path, bad_initial)]) == EXIT_CONFIG


LEGENDRE = """\
scenario = legendre-check
seed = 7
[lattice]
dims = 6, 6, 6
[legendre]
field_scale = {scale}
"""


class TestLegendre:
    def test_random_fields_flat(self, tmp_path):
        out = tmp_path / "l.csv"
        assert main(["legendre-check", "--config", write_cfg(tmp_path, LEGENDRE.format(scale=1.0)), "--output", str(out)]) == EXIT_OK
        header, rows = read_csv(out)
        assert header == ["theta", "max_residual", "residual_over_theta_sq"]
        assert len(rows) == 10
        ratio = np.array([r[2] for r in rows])
        assert np.ptp(ratio[5:]) / ratio[5:].mean() < 0.05

    def test_zero_fields_pass(self, tmp_path):
        out = tmp_path / "l.csv"
        assert main(["legendre-check", "--config", write_cfg(tmp_path, LEGENDRE.format(scale=0.0)), "--output", str(out)]) == EXIT_OK
        _, rows = read_csv(out)
        assert all(r[1] == 0.0 for r in rows)

    def test_cubic_field_scaling(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["legendre-check", "--config", write_cfg(tmp_path, LEGENDRE.format(scale=1.0), "a.cfg"), "--output", str(a)])
        main(["legendre-check", "--config", write_cfg(tmp_path, LEGENDRE.format(scale=10.0), "b.cfg"), "--output", str(b)])
        ra = np.array([r[2] for r in read_csv(a)[1]])
        rb = np.array([r[2] for r in read_csv(b)[1]])
        np.testing.assert_allclose(rb / ra, 1000.0, rtol=1e-6)

    def test_tight_tolerance_fails(self, tmp_path):
        text = LEGENDRE.format(scale=1.0) + "tolerance = 1e-16\n"
        assert main(["legendre-check", "--config", write_cfg(tmp_path, text), "--output", str(tmp_path / "l.csv")]) == EXIT_CHECK_FAILED


AUDIT = """\
scenario = bracket-audit
[lattice]
dims = {dims}
[audit]
corrupt_constraint = {corrupt}
"""


class TestAudit:
    def _run(self, tmp_path, dims="4, 4, 4", corrupt="false"):
        out = tmp_path / "a.json"
        code = main(["bracket-audit", "--config", write_cfg(tmp_path, AUDIT.format(dims=dims, corrupt=corrupt)), "--output", str(out)])
        return code, (json.loads(out.read_text()) if out.exists() else None)

    def test_default_passes(self, tmp_path):
        code, doc = self._run(tmp_path)
        assert code == EXIT_OK and doc["passed"]
        names = [c["name"] for c in doc["checks"]]
        assert names == list(AUDIT_CHECKS) and len(set(names)) == len(names)
        assert all(c["status"] == "pass" and c["max_deviation"] < 1e-10 for c in doc["checks"])
        assert doc["version"] == __version__
        assert doc["lattice"]["dims"] == [4, 4, 4]
        assert "bracket_measure" in doc["conventions"]

    def test_degenerate_dimensions(self, tmp_path):
        assert self._run(tmp_path, dims="1, 1, 4")[0] == EXIT_OK

    def test_corrupt_fixture(self, tmp_path):
        code, doc = self._run(tmp_path, corrupt="true")
        assert code == EXIT_CHECK_FAILED
        first = next(c for c in doc["checks"] if c["name"] == "first_class")
        assert first["status"] == "fail"
        assert "offending_pair" in first["detail"]

    def test_above_dense_limit(self, tmp_path):
        assert self._run(tmp_path, dims="8, 8, 8")[0] == EXIT_CONFIG

    def test_stable_key_order(self, tmp_path):
        out = tmp_path / "a.json"
        cfg = write_cfg(tmp_path, AUDIT.format(dims="1, 1, 4", corrupt="false"))
        main(["bracket-audit", "--config", cfg, "--output", str(out)])
        first = out.read_bytes()
        main(["bracket-audit", "--config", cfg, "--output", str(out)])
        assert out.read_bytes() == first
        keys = list(json.loads(first))
        assert keys == sorted(keys)


DISPERSION = """\
scenario = dispersion
[lattice]
dims = 32, 4, 4
[physics]
theta = 0, 0, {tau}
[initial]
kind = plane_wave
amplitude = {amp}
direction = forward
background_B = 0, 0, 1
[run]
n_steps = {n}
[dispersion]
background_scales = 0, 1
"""


class TestDispersion:
    def test_writes_rows(self, tmp_path):
        out = tmp_path / "d.csv"
        cfg = write_cfg(tmp_path, DISPERSION.format(tau=0.05, amp=1e-3, n=64))
        assert main(["dispersion", "--config", cfg, "--output", str(out)]) == EXIT_OK
        header, rows = read_csv(out)
        assert header == ["k", "omega", "omega_over_k", "theta_dot_B_background"]
        assert [r[3] for r in rows] == [0.0, 0.05]
        assert rows[0][2] == pytest.approx(1.0, abs=1e-3)
        assert rows[1][2] == pytest.approx(1.05, abs=1e-3)

    def test_amplitude_limit(self, tmp_path):
        cfg = write_cfg(tmp_path, DISPERSION.format(tau=0.0, amp=0.1, n=64))
        assert main(["dispersion", "--config", cfg, "--output", str(tmp_path / "d.csv")]) == EXIT_CONFIG

    def test_too_few_samples(self, tmp_path):
        cfg = write_cfg(tmp_path, DISPERSION.format(tau=0.0, amp=1e-3, n=1))
        assert main(["dispersion", "--config", cfg, "--output", str(tmp_path / "d.csv")]) == EXIT_CHECK_FAILED


@pytest.mark.parametrize("name", ["plane_wave.cfg", "legendre.cfg", "bracket_audit.cfg", "dispersion.cfg"])
def test_bundled_configs_run(tmp_path, name):
    from ncmaxwell.config import load_config

    cfg = load_config(bundled(name))
    out = tmp_path / "out"
    assert main([cfg.scenario, "--config", bundled(name), "--output", str(out)]) == EXIT_OK
    assert out.stat().st_size > 0


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_SIM.format(n=0))
    out = tmp_path / "d.csv"
    proc = subprocess.run([sys.executable, "-m", "ncmaxwell", "simulate", "--config", cfg, "--output", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith(",".join(SIM_HEADER))
    proc = subprocess.run([sys.executable, "-m", "ncmaxwell", "--version"], capture_output=True, text=True)
    assert __version__ in proc.stdout
