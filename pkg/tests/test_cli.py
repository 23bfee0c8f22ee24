import csv
import io
import json

import pytest

from laplab import cli
from laplab.errors import NumericalAccuracyError


def run(argv, capsys=None):
    buf = io.StringIO()
    code = cli.main(argv, stream=buf)
    return code, buf.getvalue()


def test_verify_assumptions_passes(tmp_path):
    code, out = run(["verify-assumptions", "--out", str(tmp_path)])
    assert code == cli.EXIT_PASS and "verify-assumptions: PASS" in out
    assert {p.name for p in tmp_path.iterdir()} == {
        "verify-assumptions.json", "verify-assumptions.csv", "verify-assumptions.schema.json",
        "verify-assumptions.txt"}


def test_failing_preset_exits_one(tmp_path):
    code, out = run(["verify-assumptions", "--preset", "fail_repulsive", "--out", str(tmp_path)])
    assert code == cli.EXIT_FAIL and "FAIL" in out


def test_orbit_writes_per_orbit_rows(tmp_path):
    code, _ = run(["orbit", "--n", "20", "--lambda", "0", "--out", str(tmp_path)])
    assert code == cli.EXIT_PASS
    rows = list(csv.DictReader(open(tmp_path / "orbit.csv")))
    assert len(rows) == 20 and float(rows[0]["min_margin"]) >= -1e-6


def test_orbit_output_is_reproducible(tmp_path):
    args = ["orbit", "--n", "10", "--lambda", "0.5", "--seed", "3"]
    run(args + ["--out", str(tmp_path / "a")])
    run(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "orbit.csv").read_bytes() == (tmp_path / "b" / "orbit.csv").read_bytes()


def test_out_env_overrides_flag(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    code, _ = run(["verify-assumptions", "--out", str(tmp_path / "flag")])
    assert code == 0 and (tmp_path / "env" / "verify-assumptions.json").is_file()
    assert not (tmp_path / "flag").exists()


def test_malformed_plan_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"preset": "soft_power", "lambdas": [1.0,]}')
    code, _ = run(["lap-sweep", "--plan", str(bad), "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG
    err = capsys.readouterr().err
    assert "line 1" in err and "column" in err


def test_missing_plan_and_preset_are_config_errors(tmp_path):
    assert run(["lap-sweep", "--plan", str(tmp_path / "nope.json")])[0] == cli.EXIT_CONFIG
    assert run(["efftime", "--preset", "no_such_preset"])[0] == cli.EXIT_CONFIG


def test_validate_flags_plan_invariants():
    code, out = run(["validate", "--beta", "0.9"])
    assert code == cli.EXIT_CONFIG and "plan invariant violated" in out
    code, out = run(["validate", "--lambda", "1.0"])
    assert code == cli.EXIT_PASS and out.strip() == "valid"


def test_numerical_failure_exits_three(tmp_path, monkeypatch):
    def boom(cfg, plan):
        raise NumericalAccuracyError("residual too large")
    monkeypatch.setattr(cli, "_execute", boom)
    assert run(["resolvent", "--out", str(tmp_path)])[0] == cli.EXIT_NUMERIC


def test_list_presets(tmp_path):
    code, out = run(["list-presets"])
    cat = json.loads(out)
    assert code == 0 and "soft_power" in cat and cat["fail_repulsive"]["expect_fail"]
    assert json.loads(run(["list-presets", "--preset-dir", str(tmp_path)])[1]) == {}
    (tmp_path / "broken.json").write_text("{\n oops")
    entry = json.loads(run(["list-presets", "--preset-dir", str(tmp_path)])[1])["broken"]
    assert "line 2" in entry["error"]


def test_jobs_default_is_available_cores():
    args = cli.make_parser().parse_args(["efftime"])
    assert args.jobs == cli.default_jobs() >= 1


def test_bad_lambda_list_is_rejected():
    with pytest.raises(SystemExit) as exc:
        cli.main(["efftime", "--lambda", "1,x"])
    assert exc.value.code == 2


@pytest.mark.slow
def test_lap_sweep_on_a_reduced_plan(tmp_path):
    code, out = run(["lap-sweep", "--lambda", "0,0.5,1,2", "--mu", "0.1,0.01,0.001", "--grid-rmax", "128",
                     "--jobs", "1", "--out", str(tmp_path)])
    assert code == cli.EXIT_PASS, out
    data = json.loads((tmp_path / "lap-sweep.json").read_text())
    assert {r["lambda"] for r in data["records"]} == {0.0, 0.5, 1.0, 2.0}
