import json
import subprocess
import sys
from importlib import resources

import pytest

from nplectic.cli import EXIT_CONFIG, main, parse_dims


def example_path(name="paper_example.nplx"):
    return str(resources.files("nplectic").joinpath("data", name))


def test_parse_dims():
    assert parse_dims("1..5") == [1, 2, 3, 4, 5]
    assert parse_dims("3,2, 2") == [2, 3]
    assert parse_dims("4") == [4]
    for bad in ("0..2", "6", "", "a"):
        with pytest.raises(ValueError):
            parse_dims(bad)


def test_manifest_run(capsys):
    assert main([example_path()]) == 0
    out = capsys.readouterr().out
    assert out.endswith("10 checks: 10 PASS, 0 FAIL, 0 UNSOLVABLE\n")


def test_failing_manifest_exit_code(capsys):
    assert main([example_path("paper_jacobi.nplx")]) == 1


def test_json_output(capsys):
    assert main([example_path(), "--json"]) == 0
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert records[0]["id"] == "01 nplectic" and records[-1]["status"] == "PASS"


def test_space_suites(capsys):
    assert main(["symplectic-R2", "--dims", "1,2", "--count", "3", "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "sh-jacobi dim 2" in out and out.endswith("0 FAIL, 0 UNSOLVABLE\n")


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.nplx"
    bad.write_text("manifold R2 plectic 1\nomega: dx1^dx3\n")
    assert main([str(bad)]) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err
    assert main([str(tmp_path / "missing.nplx")]) == EXIT_CONFIG
    assert main(["paper-R6", "--dims", "9"]) == EXIT_CONFIG


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "nplectic.cli", example_path(), "--threads", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and "10 PASS" in proc.stdout
