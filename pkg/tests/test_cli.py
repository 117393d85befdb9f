import json
import os

import pytest
from click.testing import CliRunner

from torsorlift.cli import main

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def path(name):
    return os.path.join(DATA, name)


@pytest.fixture()
def runner():
    return CliRunner()


class TestCli:
    def test_check_lie(self, runner):
        result = runner.invoke(main, ["check-lie", "--lie", path("heisenberg.json")])
        assert result.exit_code == 0
        body = json.loads(result.stdout)
        assert body["verdict"] == "pass"

    def test_bch_pretty(self, runner):
        result = runner.invoke(main, ["--quiet", "bch", "--lie", path("heisenberg.json"),
                                      "--a", "x", "--b", "y"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["data"]["pretty"] == "x + y + 1/2 z"

    def test_bch_json_elements(self, runner):
        result = runner.invoke(main, ["--quiet", "bch", "--lie", path("heisenberg.json"),
                                      "--a", '{"x": "2"}', "--b", '{"y": "1/2"}'])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["data"]["result"]["z"] == "1/2"

    def test_dupont_selftest(self, runner):
        result = runner.invoke(main, ["--quiet", "dupont-selftest", "2", "--probe-degree", "2"])
        assert result.exit_code == 0

    def test_mc_check_and_verify(self, runner):
        for cmd in ("mc-check", "cocycle-verify"):
            result = runner.invoke(main, ["--quiet", cmd,
                                          "--cover", path("triangle-cover.json"),
                                          "--lie", path("heisenberg.json"),
                                          "--cocycle", path("phi-heisenberg-triangle.json")])
            assert result.exit_code == 0, result.output

    def test_lift_solve_and_verify(self, runner, tmp_path):
        result = runner.invoke(main, ["--quiet", "lift-solve",
                                      "--cover", path("triangle-cover.json"),
                                      "--extension", path("central-w.json"),
                                      "--cocycle", path("phi-central-triangle.json")])
        assert result.exit_code == 0, result.output
        lift = json.loads(result.stdout)["data"]["lift"]
        lift_file = tmp_path / "lift.json"
        lift_file.write_text(json.dumps(lift))
        result = runner.invoke(main, ["--quiet", "lift-verify",
                                      "--cover", path("triangle-cover.json"),
                                      "--extension", path("central-w.json"),
                                      "--cocycle", path("phi-central-triangle.json"),
                                      "--lift", str(lift_file)])
        assert result.exit_code == 0, result.output

    def test_obstruction_exit_code(self, runner):
        result = runner.invoke(main, ["--quiet", "lift-solve",
                                      "--cover", path("torus-seven.json"),
                                      "--extension", path("central-w.json"),
                                      "--cocycle", path("phi-torus-winding.json")])
        assert result.exit_code == 1
        body = json.loads(result.stdout)
        assert body["verdict"] == "obstruction"
        assert body["data"]["obstruction_level"] == 1

    def test_obstruction_resolved_by_parallel_cocycle(self, runner):
        result = runner.invoke(main, ["--quiet", "lift-solve",
                                      "--cover", path("torus-seven.json"),
                                      "--extension", path("central-w.json"),
                                      "--cocycle", path("phi-torus-parallel.json")])
        assert result.exit_code == 0, result.output

    def test_input_error_exit_code(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        result = runner.invoke(main, ["--quiet", "check-lie", "--lie", str(bad)])
        assert result.exit_code == 2

    def test_trivialize_roundtrip(self, runner):
        result = runner.invoke(main, ["--quiet", "trivialize",
                                      "--cover", path("triangle-cover.json"),
                                      "--lie", path("heisenberg.json"),
                                      "--cocycle", path("phi-heisenberg-triangle.json"),
                                      "--trivialization", path("sigma-example.json")])
        assert result.exit_code == 0, result.output
        body = json.loads(result.stdout)
        assert "cocycle" in body["data"]

    def test_reports_byte_identical(self, runner):
        args = ["--quiet", "kuranishi", "--lie", path("heisenberg.json"), "--samples", "3"]
        out1 = runner.invoke(main, args).stdout
        out2 = runner.invoke(main, args).stdout
        body1 = {k: v for k, v in json.loads(out1).items() if k != "timing_ms"}
        body2 = {k: v for k, v in json.loads(out2).items() if k != "timing_ms"}
        assert body1 == body2
