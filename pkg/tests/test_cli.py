"""
Tests for the command-line front end: validation, exit codes and output formats.
"""

import json
import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).parent.parent))

from bell.filtering import CouplingDomain, filtered_state
from cli.commands import EXIT_INVALID, EXIT_IO, EXIT_OK, RunConfig, main, parse_config
from cli.output import format_float
from evaluation.runner import VerificationRunner

REGION_ARGS = ["region", "--d", "3", "--q-min", "0.6", "--q-max", "0.7", "--q-step", "0.1",
               "--xi-min", "0.5", "--xi-max", "0.9", "--xi-step", "0.2"]


def run_json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_value_document(capsys):
    code, doc = run_json(capsys, ["value", "--d", "3", "--q", "1"])
    assert code == EXIT_OK
    assert list(doc) == ["command", "params", "results", "checks"]
    assert doc["command"] == "value"
    assert doc["params"]["d"] == 3
    assert doc["results"]["value"] == pytest.approx(2.8729, abs=1e-4)
    assert doc["results"]["violated"] is True
    assert doc["checks"][0]["name"] == "consistency:closed_form_vs_oracle"
    assert doc["checks"][0]["pass"] is True


def test_filtered_value_reports_success_probability(capsys):
    code, doc = run_json(capsys, ["value", "--d", "3", "--q", "0.9", "--xi", "0.8", "--filtered"])
    assert code == EXIT_OK
    assert 0.0 < doc["results"]["success_probability"] < 1.0
    assert doc["results"]["evaluator"]["path"] == "closed-form"


def test_value_output_is_deterministic(capsys):
    argv = ["value", "--d", "4", "--q", "0.8", "--xi", "0.6", "--filtered"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_threshold_document(capsys):
    code, doc = run_json(capsys, ["threshold", "--d", "3"])
    assert code == EXIT_OK
    assert doc["results"]["status"] == "crossing"
    assert doc["results"]["q_star"] == pytest.approx(0.696, abs=2e-3)
    assert all(check["pass"] for check in doc["checks"])


@pytest.mark.parametrize(
    "argv",
    [
        ["value", "--d", "3", "--q", "1.5"],
        ["value", "--d", "1", "--q", "0.5"],
        ["value", "--d", "3", "--q", "0.9", "--xi", "0.8"],
        ["threshold", "--d", "3", "--filtered"],
        ["value", "--d", "3", "--q", "0.9", "--format", "csv"],
        ["gammas", "--d", "9"],
    ],
)
def test_invalid_flags_exit_2(argv):
    assert main(argv) == EXIT_INVALID


def test_library_parameter_errors_exit_2():
    assert main(["value", "--d", "3", "--q", "0.25", "--xi", "0.9", "--filtered", "--coupling", "strict"]) == EXIT_INVALID


def test_argparse_rejects_unknown_table():
    with pytest.raises(SystemExit) as info:
        main(["tables", "--which", "3"])
    assert info.value.code == 2


def test_region_needs_every_grid_bound():
    with pytest.raises(ValidationError):
        RunConfig(command="region", d=3, q_min=0.5, q_max=1.0, q_step=0.1)


def test_parse_config_defaults():
    config = parse_config(["threshold", "--d", "5", "--xi", "0.71", "--filtered"])
    assert config.command == "threshold"
    assert config.filtered
    assert config.coupling is None
    assert "output" not in config.params()


def test_region_csv(tmp_path):
    path = tmp_path / "region.csv"
    assert main(REGION_ARGS + ["--format", "csv", "--output", str(path)]) == EXIT_OK
    lines = path.read_text(encoding="utf-8").split("\n")
    assert lines[0] == "d,q,xi,value,violated"
    assert lines[-1] == ""
    rows = [line.split(",") for line in lines[1:-1]]
    assert [(r[1], r[2]) for r in rows] == [("0.6", "0.5"), ("0.6", "0.7"), ("0.7", "0.5"), ("0.7", "0.7")]
    for row in rows:
        assert row[0] == "3"
        assert row[4] == ("true" if float(row[3]) > 2.0 else "false")
    assert b"\r\n" not in path.read_bytes()


def test_empty_region_csv_has_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    argv = ["region", "--d", "3", "--q-min", "0.6", "--q-max", "0.6", "--q-step", "0.1",
            "--xi-min", "0.95", "--xi-max", "0.95", "--xi-step", "0.1", "--coupling", "strict",
            "--format", "csv", "--output", str(path)]
    assert main(argv) == EXIT_OK
    assert path.read_text(encoding="utf-8") == "d,q,xi,value,violated\n"


def test_region_json(capsys):
    code, doc = run_json(capsys, REGION_ARGS + ["--coupling", "strict"])
    assert code == EXIT_OK
    assert doc["results"]["valid_cells"] == 4
    assert len(doc["results"]["rows"]) == 4


def test_unwritable_output_exits_4(tmp_path):
    blocker = tmp_path / "file.txt"
    blocker.write_text("x", encoding="utf-8")
    assert main(["value", "--d", "3", "--q", "1", "--output", str(blocker / "out.json")]) == EXIT_IO


def test_json_file_output(tmp_path):
    path = tmp_path / "nested" / "value.json"
    assert main(["value", "--d", "2", "--q", "1", "--output", str(path)]) == EXIT_OK
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert doc["results"]["value"] == pytest.approx(2.0 * 2**0.5, abs=1e-9)
    assert doc["results"]["evaluator"]["inequality"] == "chsh"


def test_format_float():
    assert format_float(0.6) == "0.6"
    assert format_float(None) == ""
    assert format_float(float("nan")) == ""
    assert format_float(1 / 3) == "0.3333333333"


def test_extended_success_probability_matches_trace(capsys):
    argv = ["value", "--d", "3", "--q", "0.25", "--xi", "0.9", "--filtered", "--coupling", "extended"]
    code, doc = run_json(capsys, argv)
    assert code == EXIT_OK
    expected = filtered_state(3, 0.25, 0.9, domain=CouplingDomain.EXTENDED).success_prob
    assert doc["results"]["success_probability"] == pytest.approx(expected, abs=1e-12)
    assert doc["results"]["success_probability"] <= 1.0


def test_verify_saves_reports(tmp_path, capsys, monkeypatch):
    import evaluation

    monkeypatch.setattr(
        evaluation, "VerificationRunner", lambda d_max: VerificationRunner(d_max=d_max, include_reference=False)
    )
    reports = tmp_path / "reports"
    code, doc = run_json(capsys, ["verify", "--d-max", "2", "--report-dir", str(reports)])
    assert code == EXIT_OK
    assert doc["params"]["d_max"] == 2
    saved = json.loads((reports / "verification_report.json").read_text(encoding="utf-8"))
    assert saved["summary"]["consistent"] is True
    assert len(saved["checks"]) == len(doc["checks"])
    assert (reports / "verification_report.txt").read_text(encoding="utf-8").endswith("\n")


def test_report_dir_needs_verify():
    with pytest.raises(ValidationError):
        RunConfig(command="value", d=3, q=1.0, report_dir=Path("reports"))
