"""End-to-end CLI runs: verbs, formats, determinism, exit codes."""

import json
import math
import subprocess
import sys

import pytest

from qentropy.cli import main

DICE_SPEC = (
    '{"partition": {"n": 6}, '
    '"constraints": [{"values": [1, 2, 3, 4, 5, 6], "target": 4.5}]}'
)
ESCORT_SPEC = (
    '{"partition": {"n": 2}, '
    '"constraints": [{"values": [0, 1], "target": 0.3}], "q": 2.0}'
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_entropy_tsallis_pmf(capsys):
    code, out, err = run_cli(
        capsys, "entropy", "--kind", "tsallis", "--q", "2", "--input", '{"pmf": [0.5, 0.5]}'
    )
    assert (code, err) == (0, "")
    payload = json.loads(out)
    assert payload["kind"] == "tsallis"
    assert payload["index"] == 2.0
    assert payload["value"] == 0.5


def test_entropy_shannon_density(capsys):
    spec = '{"partition": {"n": 2, "mode": "uniform_probability"}, "density": [1.0, 1.0]}'
    code, out, _ = run_cli(capsys, "entropy", "--kind", "shannon", "--input", spec)
    assert code == 0
    assert json.loads(out)["value"] == 0.0


def test_entropy_measure_kind(capsys):
    spec = '{"partition": {"n": 4, "mode": "uniform_probability"}, "pmf": [0.25, 0.25, 0.25, 0.25]}'
    code, out, _ = run_cli(capsys, "entropy", "--kind", "measure", "--input", spec)
    assert code == 0
    assert abs(json.loads(out)["value"]) < 1e-15


def test_divergence_kl_frozen_value(capsys):
    code, out, _ = run_cli(
        capsys, "divergence", "--kind", "kl", "--input", '{"p": [0.8, 0.2], "r": [0.5, 0.5]}'
    )
    assert code == 0
    assert math.isclose(json.loads(out)["value"], 0.1927447570217575, rel_tol=0, abs_tol=1e-15)


def test_divergence_infinite_value_serializes_as_string(capsys):
    code, out, _ = run_cli(
        capsys, "divergence", "--kind", "kl", "--input", '{"p": [1.0, 0.0], "r": [0.0, 1.0]}'
    )
    assert code == 0
    assert json.loads(out)["value"] == "inf"


def test_approx_csv_table(capsys):
    spec = '{"p": {"expr": "2*x"}, "r": {"expr": "1.0"}}'
    code, out, _ = run_cli(
        capsys,
        "approx", "--alpha", "2", "--levels", "2..4", "--base-resolution", "8", "--input", spec,
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "level,discrete_divergence,reference_divergence,abs_error"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "2"
    # every numeric field round-trips through float()
    for line in lines[1:]:
        for field in line.split(",")[1:]:
            float(field)


def test_approx_json_format(capsys):
    spec = '{"p": {"expr": "2*x"}, "r": {"expr": "1.0"}, "levels": [2, 3]}'
    code, out, _ = run_cli(
        capsys, "approx", "--alpha", "2", "--format", "json", "--base-resolution", "6", "--input", spec
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "renyi"
    assert [row["level"] for row in payload["rows"]] == [2, 3]


def test_maxent_shannon_dice(capsys):
    code, out, _ = run_cli(capsys, "maxent", "--kind", "shannon", "--input", DICE_SPEC)
    assert code == 0
    payload = json.loads(out)
    assert math.isclose(payload["beta"][0], -0.37104893808103334, rel_tol=0, abs_tol=1e-9)
    assert payload["residuals"]["moment"] < 1e-10
    assert payload["residuals"]["entropy_identity"] < 1e-12
    assert payload["residuals"]["log_z_gradient"][0] < 1e-6


def test_maxent_escort_two_point(capsys):
    code, out, _ = run_cli(capsys, "maxent", "--kind", "tsallis", "--input", ESCORT_SPEC)
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "tsallis"
    assert math.isclose(payload["pmf"][0], 0.6043560762610400, rel_tol=0, abs_tol=1e-8)
    assert payload["identity_residuals"]["multiplier_scaling"] == 0.0
    assert payload["thermo_residuals"]["legendre_gap"] < 1e-8


def test_demo_csv_default(capsys):
    code, out, _ = run_cli(capsys, "demo", "--base-resolution", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,discrete_entropy,continuous_entropy"
    assert len(lines) == 11
    assert lines[1] == "2,0.6931471805599453,0.0"


def test_demo_json_negative_interval(capsys):
    code, out, _ = run_cli(
        capsys, "demo", "--format", "json", "--base-resolution", "10",
        "--input", '{"n_list": [2, 4], "interval": [0.0, 0.5]}',
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["continuous_negative"] is True
    assert math.isclose(payload["continuous_entropy"], math.log(0.5), rel_tol=0, abs_tol=1e-12)


def test_verify_verb_small_run(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--seed", "3", "--input", '{"samples": 200, "suites": ["qcalc", "measures"]}'
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert [s["suite"] for s in payload["suites"]] == ["qcalc", "measures"]


def test_output_goes_to_file(tmp_path, capsys):
    target = tmp_path / "result.json"
    code, out, _ = run_cli(
        capsys, "entropy", "--kind", "shannon",
        "--input", '{"pmf": [0.5, 0.5]}', "--output", str(target),
    )
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["value"] == math.log(2.0)


def test_identical_runs_are_byte_identical(capsys):
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "maxent", "--kind", "tsallis", "--input", ESCORT_SPEC)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_validation_failures_exit_one(capsys):
    cases = [
        ("entropy", "--kind", "nonsense", "--input", '{"pmf": [0.5, 0.5]}'),
        ("entropy", "--kind", "shannon"),  # no input
        ("entropy", "--kind", "shannon", "--input", '{"pmf": [0.5, 0.6]}'),
        ("entropy", "--kind", "renyi", "--input", '{"pmf": [0.5, 0.5]}'),  # no index
        ("divergence", "--kind", "kl", "--input", '{"p": [1.0]}'),
        ("approx", "--alpha", "2", "--input", '{"p": {"expr": "2*x"}, "r": {"expr": "1"}}'),
        ("maxent", "--input", '{"partition": {"n": 2}}'),
        ("verify", "--input", '{"suites": ["nope"]}'),
        ("entropy", "--kind", "shannon", "--input", "{bad json"),
        ("entropy", "--kind", "renyi", "--q", "2", "--alpha", "2", "--input", '{"pmf": [0.5, 0.5]}'),
    ]
    for argv in cases:
        code, out, err = run_cli(capsys, *argv)
        assert code == 1, argv
        assert json.loads(err)["error"]["type"] == "validation"


def test_usage_errors_exit_one(capsys):
    assert run_cli(capsys, "explode")[0] == 1
    assert run_cli(capsys, "approx", "--levels", "5..2", "--input", "{}")[0] == 1
    assert run_cli(capsys, "approx", "--levels", "abc", "--input", "{}")[0] == 1


def test_nonconvergence_exits_two(capsys):
    # two Newton steps cannot reach 1e-14 from the zero start
    spec = (
        '{"partition": {"n": 6}, '
        '"constraints": [{"values": [1, 2, 3, 4, 5, 6], "target": 4.5}], '
        '"max_iterations": 2}'
    )
    code, out, err = run_cli(capsys, "maxent", "--kind", "shannon", "--tol", "1e-14",
                             "--input", spec)
    assert code == 2
    payload = json.loads(err)
    assert payload["error"]["type"] == "non_convergence"
    assert payload["error"]["iterations"] == 2
    assert payload["error"]["residual_norm"] > 0.0


def test_io_failures_exit_three(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "entropy", "--kind", "shannon", "--input", str(tmp_path / "missing.json")
    )
    assert code == 3
    assert json.loads(err)["error"]["type"] == "io"
    code, _, err = run_cli(
        capsys, "entropy", "--kind", "shannon", "--input", '{"pmf": [0.5, 0.5]}',
        "--output", str(tmp_path / "no" / "such" / "dir" / "out.json"),
    )
    assert code == 3


def test_help_exits_zero(capsys):
    assert run_cli(capsys, "--help")[0] == 0


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "qentropy.cli", "entropy", "--kind", "shannon",
         "--input", '{"pmf": [0.5, 0.5]}'],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert math.isclose(json.loads(proc.stdout)["value"], math.log(2.0), rel_tol=0, abs_tol=0)


@pytest.mark.parametrize("index_flag", ["--q", "--alpha"])
def test_index_flag_picks_the_family(capsys, index_flag):
    # with no --kind, the index flag alone selects renyi vs tsallis
    code, out, _ = run_cli(
        capsys, "entropy", index_flag, "2", "--input", '{"pmf": [0.5, 0.5]}'
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == ("renyi" if index_flag == "--alpha" else "tsallis")
