import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from unrealizer import cli

PROBLEMS = Path(__file__).parent / "problems"
SCHEMA = json.loads(
    (Path(__file__).parent.parent / "src" / "unrealizer" /
     "verdict_schema.json").read_text())


def _run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_unrealizable_exit_zero(capsys):
    code, out, _ = _run(capsys, "check", str(PROBLEMS / "g1.sy"),
                        "--seed", "0", "--sequential", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Unrealizable"
    assert payload["examples"] == [[-1], [0]]
    jsonschema.validate(payload, SCHEMA)


def test_check_examples_realizable_exit_ten(capsys):
    code, out, _ = _run(capsys, "check-examples", str(PROBLEMS / "g2.sy"),
                        "--examples", "x=1", "--json")
    assert code == 10
    payload = json.loads(out)
    assert payload["verdict"] == "Realizable"
    jsonschema.validate(payload, SCHEMA)


def test_check_unknown_exit_twenty(capsys):
    code, out, _ = _run(capsys, "check", str(PROBLEMS / "gconst.sy"),
                        "--max-rounds", "5", "--json")
    assert code == 20
    payload = json.loads(out)
    assert payload["verdict"] == "Unknown"
    assert payload["reason"] == "max-rounds"


def test_check_examples_emits_solved_values(capsys):
    code, out, _ = _run(capsys, "check-examples", str(PROBLEMS / "g2.sy"),
                        "--examples", "x=1;x=2", "--json")
    assert code == 10
    values = json.loads(out)["trace"][0]["values"]
    assert values["BExp"] == "{tt,tf,ft,ff}"
    assert values["Exp2"] == "{<(0,0),{(2,4)}>}"
    assert values["Exp3"] == "{<(0,0),{(3,6)}>}"
    assert values["Start"] == (
        "{<(0,0),{(0,4),(3,0)}>,<(0,0),{(0,6),(2,0)}>,"
        "<(0,0),{(0,6),(3,0)}>,<(0,0),{(2,4)}>,<(0,0),{(3,6)}>}")


def test_check_examples_refutation(capsys):
    code, out, _ = _run(capsys, "check-examples", str(PROBLEMS / "g1.sy"),
                        "--examples", "x=1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Unrealizable"
    assert payload["trace"][0]["query"] == "unsat"


def test_human_output_format(capsys):
    code, out, _ = _run(capsys, "check", str(PROBLEMS / "g1.sy"),
                        "--seed", "0")
    assert code == 0
    assert out == "verdict: Unrealizable\n"


def test_human_output_check_examples(capsys):
    path = PROBLEMS / "g2.sy"
    code, out, _ = _run(capsys, "check-examples", str(path),
                        "--examples", "x=1")
    assert code == 10
    assert out == "verdict: Realizable\n"


def test_human_output_includes_witness(capsys, tmp_path):
    path = tmp_path / "double.sy"
    path.write_text(
        "(set-logic LIA)\n"
        "(synth-fun f ((x Int)) Int\n"
        "  ((Start Int (x (+ Start Start)))))\n"
        "(constraint (= (f x) (+ x x)))\n"
        "(check-synth)\n")
    code, out, _ = _run(capsys, "check", str(path), "--seed", "0")
    assert code == 10
    assert out == "verdict: Realizable\nwitness: (+ x x)\n"


def test_sequential_runs_are_byte_identical(capsys):
    args = ("check", str(PROBLEMS / "g1.sy"), "--seed", "0",
            "--sequential", "--json")
    outs = {_run(capsys, *args)[1] for _ in range(3)}
    assert len(outs) == 1


def test_verbose_trace_goes_to_stderr(capsys):
    _, out, err = _run(capsys, "check", str(PROBLEMS / "g1.sy"),
                       "--seed", "0", "-v")
    assert "round 1:" in err
    assert "round" not in out
    _, _, err2 = _run(capsys, "check", str(PROBLEMS / "g1.sy"),
                      "--seed", "0", "-vv")
    assert '"check":' in err2  # full JSON records


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("UNREAL_SEED", "3")
    _, from_env, _ = _run(capsys, "check", str(PROBLEMS / "g1.sy"), "--json")
    monkeypatch.delenv("UNREAL_SEED")
    _, explicit, _ = _run(capsys, "check", str(PROBLEMS / "g1.sy"),
                          "--seed", "3", "--json")
    assert from_env == explicit
    # an explicit flag wins over the environment
    monkeypatch.setenv("UNREAL_SEED", "3")
    _, flagged, _ = _run(capsys, "check", str(PROBLEMS / "g1.sy"),
                         "--seed", "0", "--json")
    assert json.loads(flagged)["examples"] == [[-1], [0]]


def test_predabs_mode_flag(capsys):
    code, out, _ = _run(capsys, "check-examples", str(PROBLEMS / "parity.sy"),
                        "--examples", "x=3", "--mode", "predabs", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "Unrealizable"
    assert payload["trace"][0]["values"]["Start"] == "{even}"


def test_export_horn_stdout_and_file(capsys, tmp_path):
    code, out, _ = _run(capsys, "export-horn", str(PROBLEMS / "g1.sy"),
                        "--examples", "x=1")
    assert code == 0
    assert out.startswith("(set-logic HORN)\n")
    assert out.endswith("(check-sat)\n")
    target = tmp_path / "g1.smt2"
    code2, out2, _ = _run(capsys, "export-horn", str(PROBLEMS / "g1.sy"),
                          "--examples", "x=1", "--out", str(target))
    assert code2 == 0 and out2 == ""
    assert target.read_text() == out


def test_dump_equations_golden(capsys):
    code, out, _ = _run(capsys, "dump-equations", str(PROBLEMS / "g1.sy"),
                        "--examples", "x=1;x=2")
    assert code == 0
    assert out == ("n(Start) = n(S1) (x) n(Start) (+) {<(0,0),{}>}\n"
                   "n(S1) = {<(1,2),{}>} (x) n(S2)\n"
                   "n(S2) = {<(1,2),{}>} (x) n(S3)\n"
                   "n(S3) = {<(1,2),{}>}\n"
                   "\n")


def test_missing_file_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["check", "no-such-file.sy"])
    assert exc.value.code == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith("error:")


def test_bad_examples_are_usage_errors(capsys):
    for bad in ("y=1", "x=one", "", "x"):
        with pytest.raises(SystemExit) as exc:
            cli.main(["check-examples", str(PROBLEMS / "g1.sy"),
                      "--examples", bad])
        code = exc.value.code
        assert code == 2
        assert capsys.readouterr().err.startswith("error:")


def test_parse_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.sy"
    bad.write_text("(set-logic LIA")
    with pytest.raises(SystemExit) as exc:
        cli.main(["check", str(bad)])
    assert exc.value.code == 2
    assert "error:" in capsys.readouterr().err


def test_conflicting_modes_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["check", str(PROBLEMS / "g1.sy"),
                  "--sequential", "--parallel"])
    assert exc.value.code == 2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "unrealizer", "check",
         str(PROBLEMS / "g1.sy"), "--seed", "0", "--json"],
        capture_output=True, text=True, timeout=120)
    assert out.returncode == 0
    assert json.loads(out.stdout)["verdict"] == "Unrealizable"


def test_console_script_entry_point():
    out = subprocess.run(
        ["unrealizer", "check-examples", str(PROBLEMS / "g1.sy"),
         "--examples", "x=1", "--json"],
        capture_output=True, text=True, timeout=120)
    assert out.returncode == 0
    assert json.loads(out.stdout)["verdict"] == "Unrealizable"
