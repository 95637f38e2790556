import json
import math
import subprocess
import sys

import numpy as np
import pytest

from multislope.analytic import NetworkScenario, coverage_dual, db_to_linear
from multislope.cli import bundled_scenarios, load_scenario, main
from multislope.pathloss import make_dual

SCENARIO = """\
density = 1.0
noise = 1.0

[pathloss]
exponents = [2.0, 4.0]
breakpoints = [1.0]

[thresholds]
min_db = -10.0
max_db = 10.0
steps = 5
"""


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def parse_csv(text):
    lines = text.strip().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    meta = [ln for ln in lines if ln.startswith("#")]
    # metadata only trails the table
    assert lines[len(body):] == meta
    header = body[0].split(",")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in body[1:]])
    return header, rows, meta


def parse_record(line):
    return dict(item.split("=", 1) for item in line.split())


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "net.toml"
    path.write_text(SCENARIO)
    return str(path)


def test_bundled_scenarios_present():
    names = bundled_scenarios()
    for prefix in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        assert any(n.startswith(prefix) for n in names)
    for name in names:
        load_scenario(name)


def test_coverage_sinr_dual(capsys):
    status, out, _ = run(capsys, "--scenario", "fig3", "coverage", "--metric", "sinr", "--T-db", "0",
                         "--method", "dual")
    assert status == 0
    rec = parse_record(out.strip())
    assert 0 < float(rec["value"]) < 1
    assert float(rec["error_estimate"]) <= 1e-7
    assert rec["metric"] == "SINR" and rec["method"] == "dual-slope"
    exact = coverage_dual(NetworkScenario(1.0, 1.0, make_dual(2.0, 4.0, 1.0)), 1.0).value
    assert float(rec["value"]) == pytest.approx(exact, abs=1e-12)


def test_coverage_snr_without_noise(capsys):
    status, out, _ = run(capsys, "coverage", "--scenario", "fig1", "--metric", "snr", "--T-db", "0")
    assert status == 0
    assert float(parse_record(out)["value"]) == 1.0


def test_coverage_linear_threshold_matches_db(capsys, scenario_file):
    _, a, _ = run(capsys, "--scenario", scenario_file, "coverage", "--T-linear", "10")
    _, b, _ = run(capsys, "--scenario", scenario_file, "coverage", "--T-db", "10")
    assert float(parse_record(a)["value"]) == pytest.approx(float(parse_record(b)["value"]), abs=1e-12)


def test_coverage_monte_carlo(capsys, scenario_file):
    status, out, _ = run(capsys, "--scenario", scenario_file, "--trials", "20000", "--seed", "3",
                         "coverage", "--method", "monte-carlo", "--T-db", "0")
    assert status == 0
    rec = parse_record(out)
    exact = coverage_dual(NetworkScenario(1.0, 1.0, make_dual(2.0, 4.0, 1.0)), 1.0).value
    assert abs(float(rec["value"]) - exact) <= float(rec["error_estimate"])


def test_missing_file(capsys):
    status, out, err = run(capsys, "coverage", "--scenario", "/no/such/file.toml")
    assert status == 2 and out == "" and "not found" in err


def test_missing_scenario_flag(capsys):
    assert run(capsys, "coverage")[0] == 2


def test_unknown_keys_rejected(capsys, tmp_path):
    for extra in ("colour = 3\n", "[sim]\nturbo = true\n"):
        path = tmp_path / "bad.toml"
        path.write_text(SCENARIO + extra if extra.startswith("[") else extra + SCENARIO)
        status, _, err = run(capsys, "--scenario", str(path), "coverage")
        assert status == 2 and "unknown" in err


def test_json_scenario(capsys, tmp_path):
    path = tmp_path / "net.json"
    path.write_text(json.dumps({"density": 1.0, "noise": 1.0,
                                "pathloss": {"exponents": [2.0, 4.0], "breakpoints": [1.0]},
                                "thresholds": [-5.0, 0.0, 5.0]}))
    status, out, _ = run(capsys, "--scenario", str(path), "ccdf")
    assert status == 0
    header, rows, _ = parse_csv(out)
    assert rows[:, 0].tolist() == [-5.0, 0.0, 5.0]


def test_domain_error_exit(capsys, tmp_path):
    path = tmp_path / "flat.toml"
    path.write_text(SCENARIO.replace("[2.0, 4.0]", "[1.0, 2.0]").replace("noise = 1.0", "noise = 0.0"))
    status, out, err = run(capsys, "--scenario", str(path), "coverage", "--T-db", "0")
    assert status == 2 and out == ""
    assert "alpha_last" in err and "analytic value: 0" in err


def test_method_metric_mismatch(capsys, scenario_file):
    assert run(capsys, "--scenario", scenario_file, "coverage", "--metric", "sir", "--method", "snr-closed")[0] == 2


def test_ccdf_fig4_columns(capsys):
    for name in ("fig4_lambda0p1", "fig4_lambda1", "fig4_lambda10"):
        status, out, _ = run(capsys, "--scenario", name, "--trials", "20000", "ccdf", "--with-mc",
                             "--min-db", "-20", "--max-db", "20", "--steps", "9")
        assert status == 0
        header, rows, meta = parse_csv(out)
        assert header == ["threshold_db", "analytic", "lower_bound", "mc_estimate", "mc_ci"]
        assert np.all(np.diff(rows[:, 0]) > 0)
        assert np.all(rows[:, 2] <= rows[:, 1] + 1e-9)
        inside = np.abs(rows[:, 1] - rows[:, 3]) <= 3 * rows[:, 4]
        assert inside.mean() >= 8 / 9
        assert "# trials=20000" in meta


def test_ccdf_fig6(capsys):
    status, out, _ = run(capsys, "--scenario", "fig6_lambda1e-5", "--trials", "20000", "ccdf", "--with-mc",
                         "--min-db", "-20", "--max-db", "20", "--steps", "9")
    assert status == 0
    header, rows, _ = parse_csv(out)
    assert "lower_bound" not in header
    inside = np.abs(rows[:, 1] - rows[:, 2]) <= rows[:, 3]
    assert inside.mean() >= 8 / 9


def test_ccdf_empty_grid(capsys, tmp_path):
    status = run(capsys, "--scenario", "fig4_lambda1", "ccdf", "--min-db", "0", "--max-db", "1", "--steps", "0")[0]
    assert status == 2
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"density": 1.0, "noise": 0.0,
                                "pathloss": {"exponents": [3.0, 4.0], "breakpoints": [1.0]},
                                "thresholds": []}))
    assert run(capsys, "--scenario", str(path), "ccdf")[0] == 2


def test_ccdf_writes_out_file(capsys, tmp_path, scenario_file):
    target = tmp_path / "curve.csv"
    status, out, _ = run(capsys, "--scenario", scenario_file, "--out", str(target), "ccdf")
    assert status == 0 and out == ""
    header, rows, _ = parse_csv(target.read_text())
    assert rows.shape == (5, 3)
    expected = [coverage_dual(NetworkScenario(1.0, 1.0, make_dual(2.0, 4.0, 1.0)), db_to_linear(t)).value
                for t in rows[:, 0]]
    assert rows[:, 1] == pytest.approx(expected, abs=1e-11)


def test_sweep_fig1_monotone(capsys):
    status, out, _ = run(capsys, "--scenario", "fig1", "sweep", "--T-db", "0")
    assert status == 0
    header, rows, meta = parse_csv(out)
    assert header == ["lambda", "coverage_sir", "coverage_snr", "coverage_sinr", "mu", "tau"]
    assert np.all(np.diff(rows[:, 1]) <= 1e-12)
    assert any(m.startswith("# fitted_exponent=") for m in meta)


def test_sweep_fig5_exponent(capsys):
    status, out, _ = run(capsys, "--scenario", "fig5_alpha0_1p8", "sweep")
    assert status == 0
    _, _, meta = parse_csv(out)
    rec = parse_record(next(m for m in meta if "fitted_exponent" in m).lstrip("# "))
    assert float(rec["fitted_exponent"]) == pytest.approx(2 - 2 / 1.8, abs=0.15)
    assert rec["fit_window"] == "[1000,100000]"


def test_sweep_fig3_interior_peak(capsys):
    status, out, _ = run(capsys, "--scenario", "fig3", "sweep", "--T-db", "0")
    assert status == 0
    _, rows, _ = parse_csv(out)
    peak = int(np.argmax(rows[:, 3]))
    assert 0 < peak < len(rows) - 1
    assert np.all(rows[:, 3] <= np.minimum(rows[:, 1], rows[:, 2]) + 1e-9)


def test_sweep_grid_errors(capsys):
    assert run(capsys, "--scenario", "fig1", "sweep", "--lambda-min", "1", "--lambda-max", "10",
               "--lambda-steps", "10")[0] == 2


@pytest.mark.parametrize("suite", ["theorem2", "fact1", "prop2-bound"])
def test_validate_passes(capsys, suite):
    status, out, _ = run(capsys, "validate", suite, "--seed", "7")
    assert status == 0
    header, *rows = [ln.split(",") for ln in out.splitlines() if not ln.startswith("#")]
    assert header == ["property", "grid_size", "worst_margin", "status"]
    assert rows and all(r[3] == "pass" and float(r[2]) >= 0 and int(r[1]) > 0 for r in rows)
    assert out.splitlines()[-1].endswith("failed=0/%d" % len(rows))


def test_validate_failure_exit(capsys):
    status, out, _ = run(capsys, "validate", "prop1")
    assert status == 1
    assert ",fail" in out


def test_common_flags_before_or_after_subcommand(capsys, scenario_file):
    a = run(capsys, "--scenario", scenario_file, "--trials", "500", "ccdf", "--with-mc")
    b = run(capsys, "ccdf", "--with-mc", "--scenario", scenario_file, "--trials", "500")
    assert a == b and a[0] == 0


def test_bad_threads(capsys, scenario_file):
    assert run(capsys, "--scenario", scenario_file, "--threads", "0", "ccdf")[0] == 2


def test_module_entry_point(scenario_file):
    proc = subprocess.run([sys.executable, "-m", "multislope", "--scenario", scenario_file, "coverage",
                           "--T-db", "0"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert math.isclose(float(parse_record(proc.stdout)["value"]), 0.282403056429, abs_tol=1e-11)
