#!/usr/bin/env python3
"""
Test suite for the superops command line interface.

Runs main() in-process and checks exit codes and JSON output.
"""

import io
import json
from unittest.mock import patch

import pytest

from cli.main import create_cli_app, main, suite_config_from
from superops.config import ComputationError, ConvergenceError
from superops.verify import PropertyResult

COUNTEREXAMPLE = {"p": 1, "q": 1, "data": [[1, 1], [-1, -1]]}
UNIT_TENSOR = {"a_dim": 2, "b_dim": 2, "factors": [{"a": [[1, 0], [0, 1]], "b": [[1, 0], [0, 1]]}]}
TWO_TERM_TENSOR = {
    "a_dim": 2,
    "b_dim": 2,
    "factors": [
        {"a": [[1, 0], [0, 0]], "b": [[0, 1], [0, 0]]},
        {"a": [[0, 0], [1, 0]], "b": [[[0, 1], 0], [1, 0]]},
    ],
}


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
        return str(path)
    return write


class TestCheckCommand:
    """Test the check subcommand"""

    def test_eps_positive(self, write_json, capsys):
        assert main(["check", "eps-positive", write_json("x.json", COUNTEREXAMPLE)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out == {"check": "eps-positive", "result": True, "tol": 1e-9}

    def test_not_superpositive(self, write_json, capsys):
        assert main(["check", "superpositive", write_json("x.json", COUNTEREXAMPLE)]) == 1
        assert json.loads(capsys.readouterr().out)["result"] is False

    def test_sampled_form(self, write_json):
        path = write_json("x.json", COUNTEREXAMPLE)
        assert main(["check", "eps-positive", path, "--form", "form", "--seed", "3"]) == 0
        assert main(["check", "superpositive", path, "--form", "form"]) == 1

    def test_hermitian_and_omega(self, write_json):
        path = write_json("x.json", COUNTEREXAMPLE)
        assert main(["check", "hermitian", path]) == 0
        assert main(["check", "omega-hermitian", path, "--omega0", "1", "--omega1", "-1"]) == 0

    def test_superunitary_from_stdin(self):
        text = json.dumps({"p": 1, "q": 1, "data": [[1, 0], [0, [0, 1]]]})
        with patch("sys.stdin", io.StringIO(text)):
            assert main(["check", "superunitary", "-"]) == 0

    def test_level_two_input(self, write_json):
        identity = {"p": 1, "q": 0, "data": [[1, 0], [0, 1]]}
        assert main(["check", "eps-positive", write_json("x.json", identity), "--level", "2"]) == 0

    @pytest.mark.parametrize("payload", [
        '{"p": 1, "q": 1, "data": [[1, 1], [-1',
        {"p": 2, "q": 1, "data": [[1, 0], [0, 1]]},
        {"p": 1, "q": 1, "grading": "odd", "data": [[1, 0], [0, 1]]},
    ])
    def test_malformed_input(self, write_json, capsys, payload):
        assert main(["check", "hermitian", write_json("bad.json", payload)]) == 2
        assert capsys.readouterr().err.startswith("Error:")

    def test_missing_file(self, tmp_path):
        assert main(["check", "hermitian", str(tmp_path / "missing.json")]) == 2


class TestNormCommand:
    """Test the norm subcommand"""

    def test_strong_norm(self, write_json, capsys):
        assert main(["norm", "strong", write_json("x.json", COUNTEREXAMPLE)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["norm"] == "strong"
        assert out["value"] == pytest.approx(2.0, abs=1e-6)
        assert out["upper"] >= out["value"]
        assert len(out["maximizer_vector"]) == 2

    def test_operator_and_sigma(self, write_json, capsys):
        path = write_json("x.json", COUNTEREXAMPLE)
        assert main(["norm", "operator", path]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(2.0)
        assert main(["norm", "sigma", path]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(2.0 ** 0.5, abs=1e-6)

    def test_injective(self, write_json, capsys):
        assert main(["norm", "injective", write_json("t.json", UNIT_TENSOR)]) == 0
        assert json.loads(capsys.readouterr().out) == {"norm": "injective", "value": pytest.approx(1.0)}

    def test_haagerup_bracket(self, write_json, capsys):
        path = write_json("t.json", TWO_TERM_TENSOR)
        assert main(["norm", "haagerup", path, "--restarts", "2", "--iters", "100"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["method"] == "gauge-lbfgs"
        assert out["lower"] <= out["upper"] + 1e-9
        assert out["witness"]["a_dim"] == 2

    def test_no_witness(self, write_json, capsys):
        path = write_json("t.json", UNIT_TENSOR)
        assert main(["norm", "projective", path, "--restarts", "1", "--no-witness"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["witness"] is None
        assert out["upper"] == pytest.approx(1.0, abs=1e-9)

    def test_level_two_projective_is_refused(self, write_json):
        tensor = {"a_dim": 1, "b_dim": 1, "level": 2, "factors": [{"a": [[1], [1]], "b": [[1, 1]]}]}
        assert main(["norm", "projective", write_json("t.json", tensor)]) == 2

    def test_computation_failure_has_its_own_exit_code(self, write_json, capsys):
        path = write_json("t.json", TWO_TERM_TENSOR)
        with patch("cli.main.haagerup_norm", side_effect=ComputationError("every restart failed")):
            assert main(["norm", "haagerup", path]) == 3
        err = capsys.readouterr().err
        assert "computation failed" in err
        assert "every restart failed" in err

    def test_unconverged_radius_is_a_computation_failure(self, write_json):
        path = write_json("x.json", COUNTEREXAMPLE)
        with patch("cli.main.strong_norm", side_effect=ConvergenceError("gap above tol")):
            assert main(["norm", "strong", path]) == 3


class TestVerifyCommand:
    """Test the verify subcommand with a stubbed suite runner"""

    RESULTS = [
        PropertyResult("group", "first", True, 4, 0.5),
        PropertyResult("group", "second", False, 2, -0.1, "sample 1"),
    ]

    def test_output_and_exit_code(self, capsys):
        with patch("cli.main.run_suite", return_value=self.RESULTS) as runner:
            assert main(["verify", "--suite", "group", "--seed", "7"]) == 1
        config = runner.call_args[0][0]
        assert (config.suite, config.seed) == ("group", 7)
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert json.loads(lines[1])["property"] == "second"
        assert json.loads(lines[2]) == {"summary": {"suite": "group", "seed": 7, "properties": 2, "failed": 1}}

    def test_passing_suite(self):
        with patch("cli.main.run_suite", return_value=self.RESULTS[:1]):
            assert main(["verify"]) == 0

    def test_config_file_and_overrides(self, write_json):
        path = write_json("suite.json", {"suite": "core", "samples": 9, "optimizer": {"restarts": 3}})
        args = create_cli_app().parse_args(["verify", "--config", path, "--samples", "4", "--iters", "50"])
        config = suite_config_from(args)
        assert (config.suite, config.samples) == ("core", 4)
        assert (config.optimizer.restarts, config.optimizer.iterations) == (3, 50)

    def test_bad_config(self, write_json, capsys):
        assert main(["verify", "--config", write_json("suite.json", {"suite": "everything"})]) == 2
        assert "Error loading config" in capsys.readouterr().err

    @pytest.mark.slow
    def test_real_group_suite(self, capsys):
        assert main(["verify", "--suite", "group", "--samples", "1"]) == 0
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])["summary"]
        assert summary["failed"] == 0


class TestGlobalFlags:
    """Test flags outside the subcommands"""

    def test_schema(self, capsys):
        assert main(["--schema"]) == 0
        assert "graded_operator" in json.loads(capsys.readouterr().out)

    def test_no_command(self):
        assert main([]) == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "superops 0.1.0" in capsys.readouterr().out
