import io
import json

import pytest

from prefgames.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, canonical, main, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, report = run(list(argv), stdout=out, stderr=err)
    return code, report, out.getvalue(), err.getvalue()


def test_solve_vi_example_3_1(instance_path):
    code, report, out, _ = call("solve-vi", instance_path("example-3.1"), "--grid", "201")
    assert code == EXIT_OK
    assert report["result"]["representatives"] == [[0.5]]
    assert out.startswith("solve-vi: OK")
    assert "elapsed" in out


def test_verify_reports_witness_direction(instance_path):
    code, report, out, _ = call("verify", instance_path("example-3.1"), "--point", "0.25", "--format", "machine")
    assert code == EXIT_FAIL
    doc = json.loads(out)
    assert doc["result"]["certificate"]["details"]["witness_direction"] == [0.75]
    assert doc["result"]["maximal"]["maximal"] is False
    assert call("verify", instance_path("example-3.1"), "--point", "0.5")[0] == EXIT_OK


def test_verify_game_profile(instance_path):
    code, report, _, _ = call("verify", instance_path("moving-constraint-game"), "--point", "0.5,0.5")
    assert code == EXIT_OK and report["result"]["equilibrium"]["verdict"]


def test_classify_flags_example_3_2(instance_path):
    code, report, out, _ = call("classify", instance_path("example-3.2"))
    assert code == EXIT_FAIL
    assert report["result"]["midpoint_failures"] > 0
    assert "lower_midpoint" in out


def test_audit_moving_constraint_game(instance_path):
    code, report, _, _ = call("audit", instance_path("moving-constraint-game"))
    assert code == EXIT_OK and report["result"]["hypotheses_verified"]


def test_machine_output_is_byte_identical(instance_path, tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert call("solve-vi", instance_path("example-3.1"), "--grid", "101", "--out", str(p))[0] == EXIT_OK
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert b"elapsed" not in a


def test_canonical_rounds_to_twelve_digits():
    assert canonical(0.1 + 0.2) == 0.3
    assert canonical([1 / 3]) == [0.333333333333]
    assert canonical({"v": float("nan"), "w": float("-inf"), "z": -0.0}) == {"v": "nan", "w": "-inf", "z": 0.0}


@pytest.mark.parametrize("argv", [
    ["solve-vi"],
    ["frobnicate", "x.json"],
    ["solve-vi", "/nonexistent/instance.json"],
    ["verify", "{ex}", "--point", "abc"],
    ["verify", "{ex}", "--point", "0.1,0.2"],
    ["verify", "{ex}"],
    ["solve-vi", "{ex}", "--grid", "1"],
    ["solve-vi", "{ex}", "--tol", "-1"],
    ["solve-vi", "{game}"],
    ["solve-qvi", "{game}", "--grid", "10000"],
    ["reproduce-paper", "{ex}"],
])
def test_usage_errors_exit_2(argv, instance_path):
    argv = [a.format(ex=instance_path("example-3.1"), game=instance_path("quadratic-game")) for a in argv]
    code, report, _, _ = call(*argv)
    assert code == EXIT_USAGE and report is None


def test_malformed_instance_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "players": [], "colour": 1}')
    code, _, _, err = call("audit", str(bad))
    assert code == EXIT_USAGE and "colour" in err


def test_main_returns_code(instance_path, capsys):
    assert main(["verify", instance_path("example-3.1"), "--point", "0.5"]) == EXIT_OK
    assert "maximal: True" in capsys.readouterr().out
