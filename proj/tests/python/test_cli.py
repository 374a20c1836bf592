"""End-to-end checks of the command-line tool."""

import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("OMCSIM_CLI")
CONFIG_DIR = pathlib.Path(os.environ.get("OMCSIM_CONFIG_DIR", "configs"))

pytestmark = pytest.mark.skipif(CLI is None, reason="OMCSIM_CLI not set")


def run(*argv, expect=0):
    proc = subprocess.run([CLI, *argv], capture_output=True, text=True)
    assert proc.returncode == expect, proc.stderr + proc.stdout
    return proc


def test_statics_reports_operating_point(tmp_path):
    proc = run("statics", "--config", str(CONFIG_DIR / "transmission_experiment.cfg"),
               "--out", str(tmp_path))
    assert "finesse" in proc.stdout
    text = (tmp_path / "statics.txt").read_text()
    p_circ = float([l for l in text.splitlines() if l.startswith("p_circ_w")][0].split(",")[1])
    f_os = float([l for l in text.splitlines() if l.startswith("f_os_hz")][0].split(",")[1])
    assert abs(p_circ - 0.153) < 0.003
    assert abs(f_os - 142e3) / 142e3 < 0.10


def test_show_config_echo_is_stable(tmp_path):
    proc1 = run("show-config", "--config", str(CONFIG_DIR / "reflection_experiment.cfg"))
    echoed = tmp_path / "echo.cfg"
    echoed.write_text(proc1.stdout)
    proc2 = run("show-config", "--config", str(echoed))
    assert proc1.stdout == proc2.stdout


def test_budget_without_ancillary(tmp_path):
    run("budget", "--config", str(CONFIG_DIR / "transmission_experiment.cfg"),
        "--out", str(tmp_path), "--port", "transmission", "--angle-deg", "0")
    total = (tmp_path / "budget_total.csv").read_text()
    assert "# params =" in total
    assert (tmp_path / "budget_quantum.csv").exists()
    assert (tmp_path / "budget_thermal.csv").exists()


def test_sweep_angle_reports_roots(tmp_path):
    proc = run("sweep-angle", "--config", str(CONFIG_DIR / "reflection_experiment.cfg"),
               "--out", str(tmp_path), "--port", "reflection", "--freq-hz", "20000")
    assert "quantum = shot noise at" in proc.stdout
    header = (tmp_path / "sweep_angle.csv").read_text().splitlines()[:8]
    roots_line = [l for l in header if l.startswith("# unity_roots_deg")][0]
    roots = [float(tok) for tok in roots_line.split("=")[1].split()]
    assert len(roots) == 2
    assert abs(roots[0] + 90.0) < 3.0


def test_calibrate_recovers_quoted_values(tmp_path):
    proc = run("calibrate", "--config", str(CONFIG_DIR / "reflection_experiment.cfg"),
               "--out", str(tmp_path))
    assert "p_circ" in proc.stdout
    text = (tmp_path / "calibration.txt").read_text()
    loss = float([l for l in text.splitlines() if l.startswith("loss_rt,")][0].split(",")[1])
    assert abs(loss - 200e-6) < 10e-6


def test_mc_csd_is_bit_identical_for_a_fixed_seed(tmp_path):
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    cfg = str(CONFIG_DIR / "transmission_experiment.cfg")
    run("mc-csd", "--config", cfg, "--out", str(out1), "--seed", "5")
    run("mc-csd", "--config", cfg, "--out", str(out2), "--seed", "5")
    for name in ["mc_csd_abs.csv", "mc_psd1.csv", "analytic_open_loop.csv"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    out3 = tmp_path / "run3"
    run("mc-csd", "--config", cfg, "--out", str(out3), "--seed", "6")
    assert (out1 / "mc_csd_abs.csv").read_bytes() != (out3 / "mc_csd_abs.csv").read_bytes()


def test_compare_emits_ratio(tmp_path):
    proc = run("compare", "--config", str(CONFIG_DIR / "orientation_compare.cfg"),
               "--out", str(tmp_path))
    assert "amplitude ratio" in proc.stdout
    ratio_rows = [
        l for l in (tmp_path / "compare_ratio.csv").read_text().splitlines()
        if l and not l.startswith("#")
    ]
    near20 = min(ratio_rows, key=lambda l: abs(float(l.split(",")[0]) - 20e3))
    assert 1.1 < float(near20.split(",")[1]) < 1.45  # about 2 dB


def test_budget_with_ancillary_file(tmp_path):
    spectrum = tmp_path / "dark.csv"
    spectrum.write_text("# units = m^2/Hz\n100,1e-38\n100000,1e-38\n")
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        (CONFIG_DIR / "transmission_experiment.cfg").read_text()
        + "\n[ancillary]\nlabel = dark noise\nfile = dark.csv\nreference = displacement\n")
    run("budget", "--config", str(cfg), "--out", str(tmp_path / "out"))
    assert (tmp_path / "out" / "budget_dark_noise.csv").exists()


def test_unstable_loop_exits_3(tmp_path):
    cfg = tmp_path / "bad_loop.cfg"
    cfg.write_text(
        (CONFIG_DIR / "transmission_experiment.cfg").read_text().replace(
            "dc_gain = 0.05", "dc_gain = -2.0"))
    proc = run("mc-csd", "--config", str(cfg), "--out", str(tmp_path / "out"), expect=3)
    assert "numerical" in proc.stderr


def test_validation_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text((CONFIG_DIR / "reflection_experiment.cfg").read_text().replace(
        "detuning =", "detunning ="))
    proc = run("statics", "--config", str(bad), expect=2)
    assert "nearest valid key" in proc.stderr
    assert "line" in proc.stderr

    missing = run("statics", "--config", str(tmp_path / "nope.cfg"), expect=2)
    assert "error" in missing.stderr
