import json
import shutil
import subprocess
import sys

import pytest

from blueskylab.cli import main

from helpers import CONFIG_DIR


def run(*argv):
    return main(list(argv))


def config(name):
    return str(CONFIG_DIR / f"{name}.json")


def test_validate_ok(capsys):
    assert run("validate", config("demo_m0")) == 0
    out = capsys.readouterr().out
    assert "valid, nu=2.000" in out


def test_validate_invalid_model(capsys):
    assert run("validate", config("demo_m0"), "--set", "lambda=0.5") == 1
    out = capsys.readouterr().out
    assert "NuNotGreaterThanOne" in out


def test_validate_dimension_rule(capsys):
    assert run("validate", config("demo_m0"), "--set", "m=2") == 1
    assert "DimensionForbidsM" in capsys.readouterr().out


def test_validate_missing_file():
    assert run("validate", "/nonexistent/config.json") == 2


def test_validate_malformed_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run("validate", str(bad)) == 2


def test_classify_stable_orbit(capsys, tmp_path):
    code = run("classify", config("demo_m0"), "--mu", "1e-6", "--out", str(tmp_path))
    assert code == 0
    out = capsys.readouterr().out
    assert "StablePeriodicOrbit" in out
    assert "fixed point" in out
    payload = json.loads((tmp_path / "classification.json").read_text())
    assert payload["classification"] == "StablePeriodicOrbit"


def test_classify_klein_bottle(capsys):
    assert run("classify", config("demo_m-1"), "--mu", "1e-4") == 0
    assert "KleinBottle" in capsys.readouterr().out


def test_classify_invariant_torus(capsys):
    assert run("classify", config("demo_m1"), "--mu", "1e-4") == 0
    out = capsys.readouterr().out
    assert "InvariantTorus" in out
    assert "orientation=Preserving" in out


def test_classify_solenoid_prints_interval(capsys):
    assert run("classify", config("demo_m2"), "--mu", "1e-5") == 0
    out = capsys.readouterr().out
    assert "Solenoid" in out
    assert "L_interval=(" in out


def test_classify_indeterminate_exit_code(capsys):
    code = run("classify", config("demo_m0"), "--mu", "1e-5",
               "--set", "h.sin.0=1.2")
    assert code == 3
    assert "Indeterminate" in capsys.readouterr().out


def test_certify_demo(capsys, tmp_path):
    code = run("certify", config("demo_m2"), "--mu", "1e-5", "--grid", "128",
               "--out", str(tmp_path))
    assert code == 0
    out = capsys.readouterr().out
    assert "verdict: True" in out
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["verdict"] is True
    assert cert["L_interval"][0] > 0.0


def test_certify_case_mismatch(capsys):
    assert run("certify", config("demo_m1"), "--mu", "1e-4") == 2


def test_sweep_writes_csv_and_fit(capsys, tmp_path):
    code = run("sweep", config("demo_m0"), "--mu-min", "1e-8", "--mu-max", "1e-3",
               "--per-decade", "4", "--out", str(tmp_path))
    assert code == 0
    out = capsys.readouterr().out
    assert "fitted slope" in out
    csv_text = (tmp_path / "sweep.csv").read_text()
    assert csv_text.startswith("mu,classification,period_proxy,theta_fixed,top_lyapunov,escaped")
    fit = json.loads((tmp_path / "scaling_fit.json").read_text())
    assert fit["slope"] == pytest.approx(1.0, abs=0.02)


def test_sweep_bad_range(tmp_path):
    assert run("sweep", config("demo_m0"), "--mu-min", "1e-3", "--mu-max", "1e-6",
               "--out", str(tmp_path)) == 2


def test_sweep_all_escaped_exit_code(tmp_path):
    # large mu with a strongly negative radial coupling pushes every orbit
    # out of the homoclinic tube
    code = run("sweep", config("demo_m0"), "--set", "coupling_fx.constant=-4",
               "--set", "lambda=1.5", "--mu-min", "0.5", "--mu-max", "0.9",
               "--out", str(tmp_path))
    assert code == 1
    text = (tmp_path / "sweep.csv").read_text()
    assert "Escaped" in text


def test_sweep_determinism(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert run("sweep", config("demo_m0"), "--mu-min", "1e-5", "--mu-max", "1e-3",
                   "--per-decade", "3", "--out", str(out), "--seed", "7") == 0
    assert (out_a / "sweep.csv").read_bytes() == (out_b / "sweep.csv").read_bytes()


def test_override_list_append():
    # alpha.cos.1 appends a second harmonic; alpha.cos.5 is out of range
    assert run("validate", config("demo_m0"), "--set", "alpha.cos.1=0.1") == 0
    assert run("validate", config("demo_m0"), "--set", "alpha.cos.5=0.1") == 2


def test_console_script_entry_point():
    exe = shutil.which("blueskylab")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "validate", config("demo_m2")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "valid" in proc.stdout


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "blueskylab.cli", "validate", config("demo_m1")],
        capture_output=True, text=True)
    assert proc.returncode == 0
