import json
import math

import pytest

from cqsoliton import cli
from cqsoliton import closed_form as cf
from cqsoliton import validation as vl


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_epsilon_shorthand():
    assert cli.parse_epsilon("0.5") == 0.5
    assert math.isclose(cli.parse_epsilon("0.5*sqrt3"), 0.5 * cf.SQRT3)
    assert math.isclose(cli.parse_epsilon("sqrt3"), cf.SQRT3)
    with pytest.raises(ValueError):
        cli.parse_epsilon("abc")


def test_exact_csv_shape_and_determinism(capsys):
    args = ["exact", "--eps", "0.5", "--k", "0.5", "--branch", "lower",
            "--n", "21", "--range", "-3", "3"]
    code, out1, _ = run_cli(capsys, *args)
    assert code == 0
    code, out2, _ = run_cli(capsys, *args)
    assert out1 == out2  # byte-identical reruns
    lines = out1.strip().splitlines()
    assert lines[0] == "x,u,du,first_integral_residual"
    assert len(lines) == 22
    # 17-significant-digit round trip
    x, u, du, res = lines[1].split(",")
    assert float(u) == cf.eval_profile(
        cf.SolitonSpec(0.5, 0.5, cf.Branch.LOWER), float(x))


def test_exact_json(capsys):
    code, out, _ = run_cli(capsys, "exact", "--eps", "0.5", "--k", "0.5",
                           "--branch", "lower", "--n", "5", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 5
    assert set(rows[0]) == {"x", "u", "du", "first_integral_residual"}


def test_bifurcation_csv(capsys):
    code, out, _ = run_cli(capsys, "bifurcation", "--eps", "0.5*sqrt3",
                           "--n-samples", "12")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,mass,mass_sq_slope,branch"
    assert len(lines) == 13
    fold_rows = [l for l in lines[1:] if l.endswith(",fold")]
    assert len(fold_rows) == 1
    assert fold_rows[0].split(",")[2] == "nan"
    masses = [float(l.split(",")[1]) for l in lines[1:]]
    assert all(b > a for a, b in zip(masses, masses[1:]))


def test_bifurcation_free_space(capsys):
    code, out, _ = run_cli(capsys, "bifurcation", "--eps", "0",
                           "--n-samples", "10")
    assert code == 0
    lines = out.strip().splitlines()[1:]
    assert len(lines) == 10
    assert all(l.endswith(",lower") for l in lines)
    assert all(float(l.split(",")[0]) < 0.75 for l in lines)


def test_solve_json_round_trip(tmp_path, capsys):
    config = {
        "epsilon": "0.5*sqrt3",
        "grid": {"x_min": -15, "x_max": 15, "J": 600},
        "flow": {"dt": 1e-3, "mass_a": 1.2, "max_steps": 100000,
                 "conv_tol": 1e-5},
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(config))
    out_path = tmp_path / "sol.json"
    code = cli.main(["solve", "--config", str(cfg_path), "--format", "json",
                     "--output", str(out_path)])
    assert code == 0
    result = json.loads(out_path.read_text())
    assert result["converged"]
    assert len(result["profile"]) == 601
    assert abs(result["extracted_k"]) < 10.0


def test_solve_missing_config_field(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"epsilon": 0.5, "grid": {}}))
    code, _, err = run_cli(capsys, "solve", "--config", str(cfg_path))
    assert code == 2
    assert "missing config field" in err


def test_usage_exit_codes(capsys):
    # out-of-range coupling
    code, _, err = run_cli(capsys, "exact", "--eps", "2.0", "--k", "0.5",
                           "--branch", "lower")
    assert code == 2
    # k outside the branch range
    code, _, err = run_cli(capsys, "exact", "--eps", "0.5", "--k", "0.05",
                           "--branch", "lower")
    assert code == 2
    # missing required --k
    code, _, _ = run_cli(capsys, "exact", "--eps", "0.5", "--branch", "lower")
    assert code == 2
    # unknown subcommand
    assert cli.main(["frobnicate"]) == 2


def test_spectrum_json(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--eps", "0.5*sqrt3",
                           "--k", "0.5", "--branch", "lower",
                           "--x-min", "-20", "--x-max", "20", "--J", "800",
                           "--format", "json")
    assert code == 0
    report = json.loads(out)  # strict JSON: NaN serialized as null
    assert report["morse_index"] == 1
    assert report["kernel_overlap"] is None
    assert len(report["eigenvalues"]) == 5


def test_spectrum_fold_flag(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--eps", "0.8", "--fold",
                           "--x-min", "-20", "--x-max", "20", "--J", "800",
                           "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["kernel_overlap"] > 0.999
    assert report["zero_mode_gap"] < 1e-2


def test_stability_json(capsys):
    code, out, _ = run_cli(capsys, "stability", "--eps", "0.5*sqrt3",
                           "--k", "0.5", "--branch", "lower",
                           "--x-min", "-20", "--x-max", "20", "--J", "800",
                           "--format", "json")
    assert code == 0
    verdict = json.loads(out)
    assert verdict["stable"] is True
    assert verdict["mechanism"] == "VKSlope"


def test_validate_reports_each_check(tmp_path, capsys):
    out_path = tmp_path / "summary.json"
    code, out, _ = run_cli(capsys, "validate", "--output", str(out_path))
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) == len(vl.ALL_CHECKS)
    summary = json.loads(out_path.read_text())
    assert summary["passed"] is True
    assert len(summary["checks"]) == len(vl.ALL_CHECKS)


def test_validation_mutation_is_caught():
    """A sign-flipped derivative must fail the jump-condition check, so
    the check genuinely constrains the formula."""

    def flipped(spec, x, side=0):
        return -cf.eval_derivative(spec, x, side)

    result = vl.check_jump_condition(derivative_fn=flipped)
    assert not result.passed
    result = vl.check_jump_condition()
    assert result.passed


def test_thread_env(monkeypatch):
    monkeypatch.setenv(vl.THREADS_ENV, "4")
    assert vl.thread_count() == 4
    monkeypatch.setenv(vl.THREADS_ENV, "junk")
    assert vl.thread_count() == 1
    monkeypatch.delenv(vl.THREADS_ENV)
    assert vl.thread_count() == 1
