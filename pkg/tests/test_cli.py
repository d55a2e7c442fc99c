import io
import json
import os
import subprocess
import sys

import jsonschema
import pytest

from torelli import classify, group
from torelli.cli import (
    CLASSIFY_SCHEMA,
    COLLIDE_SCHEMA,
    EVAL_SCHEMA,
    LIFT_SCHEMA,
    run,
)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def json_lines(text):
    return [json.loads(line) for line in text.splitlines()]


class TestExamples:
    def test_theta(self):
        code, out, _ = call("theta", "-k", "4", "-sigma", "(2 3)(4 5)")
        assert code == 0
        assert out == "-1*(z2-1) , -1*(z1-1)\n"

    def test_collide_case_a(self):
        code, out, _ = call("collide", "-k", "4", "-c1", "1,2,3,4", "-c2", "1,2,3,5")
        assert (code, out) == (0, "collision-free (case a)\n")

    def test_collide_witness(self):
        code, out, _ = call("collide", "-k", "4", "-c1", "1,2,3,4", "-c2", "2,1,3,4")
        assert (code, out) == (0, "collides at z = (-1, -3)\n")

    def test_collide_quadratic_witness(self):
        code, out, _ = call("collide", "-k", "4", "-c1", "1,2,3,4", "-c2", "1,3,4,2")
        assert (code, out) == (0, "collides at z = (1/2 + 1/2*sqrt(-3), 18/29)\n")

    def test_enumerate_json(self):
        code, out, err = call("enumerate", "-m", "4", "-n", "3", "--format", "json")
        assert code == 0
        rows = json_lines(out)
        assert len(rows) == 30
        assert err.strip() == "count 30"
        for row in rows:
            jsonschema.validate(row, classify.HOLOMAP_SCHEMA)

    def test_enumerate_text(self):
        code, out, _ = call("enumerate", "-m", "4", "-n", "4")
        assert code == 0
        assert out.splitlines()[-1] == "count 120"

    def test_eval(self):
        assert call("eval", "-map", "-1*(z2-1)^-1", "-at", "2,3")[1] == "-1/2\n"
        assert call("eval", "-map", "1*z1^-1*(z1-1)", "-at", "2")[1] == "1/2\n"

    def test_eval_two_variables(self):
        assert call("eval", "-map", "1*z1*(z1-z2)^-1", "-at", "2,3")[1] == "-2\n"

    def test_classify(self):
        assert call("classify", "-k", "4", "-specs", "1,2,3,4;1,2,3,5")[1] == "valid map into Omega_4\n"
        assert call("classify", "-k", "4", "-specs", "1,2,3,4;2,1,3,4")[1] == "collision at coordinates 1,2\n"
        out = call("classify", "-k", "4", "-specs", "1,2,3,4;1,2,3,5;2,1,3,4")[1]
        assert out == "too many coordinates (3 > 2)\n"

    def test_lift(self):
        code, out, _ = call("lift", "-n", "4", "-m", "5", "-J", "1,2", "-sigma", "(2 3)(4 5)")
        assert code == 0
        hat, verdict, U = out.rstrip("\n").split("\t")
        assert hat == "(2 3)(4 5)"
        assert verdict.startswith("verified")
        assert U == "-1*(z2-1) , -1*(z1-1) , -1*(z3-1)"

    def test_catalog_diff(self):
        code, out, _ = call("catalog", "-k", "4", "--diff-paper")
        assert code == 0
        assert out.splitlines() == ["computed 30, listed 30", "identical"]
        code, out, _ = call("catalog", "-k", "5", "--diff-paper", "--per-list")
        assert out.splitlines()[-1] == "differs"
        assert sum(line.startswith("only computed") for line in out.splitlines()) == 18
        assert not any(line.startswith("only listed") for line in out.splitlines())

    def test_group_fixture(self):
        code, out, _ = call("group", "-k", "3")
        assert code == 0
        assert group.read_group_fixture(out, 3)


class TestJsonSchemas:
    @pytest.mark.parametrize(
        "argv, schema",
        [
            (["theta", "-k", "5", "-sigma", "(1 2 3)"], group.GROUP_ELEMENT_SCHEMA),
            (["eval", "-map", "1*z1*(z1-1)^-1", "-at", "3"], EVAL_SCHEMA),
            (["classify", "-k", "4", "-specs", "1,2,3,4;1,2,3,5"], CLASSIFY_SCHEMA),
            (["classify", "-k", "4", "-specs", "1,2,3,4;2,1,3,4"], CLASSIFY_SCHEMA),
            (["lift", "-n", "4", "-m", "6", "-J", "1,3", "-sigma", "(1 2)"], LIFT_SCHEMA),
            (["collide", "-k", "4", "-c1", "1,2,3,4", "-c2", "1,2,4,3"], COLLIDE_SCHEMA),
            (["collide", "-k", "4", "-c1", "1,2,3,4", "-c2", "1,2,3,5"], COLLIDE_SCHEMA),
            (["catalog", "-k", "4"], group.CATALOG_SCHEMA),
            (["catalog", "-k", "5", "--diff-paper"], group.CATALOG_DIFF_SCHEMA),
            (["group", "-k", "3"], group.GROUP_ELEMENT_SCHEMA),
        ],
    )
    def test_valid(self, argv, schema):
        code, out, _ = call(*argv, "--format", "json")
        assert code == 0
        rows = json_lines(out)
        assert rows
        for row in rows:
            jsonschema.validate(row, schema)


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv, flag",
        [
            (["theta", "-k", "2", "-sigma", "()"], "-k"),
            (["theta", "-k", "4", "-sigma", "(1 9)"], "-sigma"),
            (["theta", "-k", "4", "-sigma", "(1 x)"], "-sigma"),
            (["eval", "-map", "z1^", "-at", "2"], "-map"),
            (["eval", "-map", "1*z1", "-at", "0"], "-at"),
            (["eval", "-map", "1*z3", "-at", "2,3"], "-map"),
            (["collide", "-k", "4", "-c1", "1,2,3", "-c2", "1,2,3,5"], "-c1"),
            (["lift", "-n", "5", "-m", "4", "-J", "1,2", "-sigma", "()"], "-n"),
            (["lift", "-n", "4", "-m", "5", "-J", "1,1", "-sigma", "()"], "-J"),
            (["bogus"], ""),
            (["theta", "-k", "4"], ""),
        ],
    )
    def test_usage(self, argv, flag):
        code, out, err = call(*argv)
        assert code == 2
        assert out == ""
        assert err.startswith("usage error:")
        assert flag in err

    def test_domain_errors(self):
        code, _, err = call("enumerate", "-m", "3", "-n", "4")
        assert code == 1 and "TargetLargerThanSource" in err
        code, _, err = call("collide", "-k", "4", "-c1", "1,2,3,4", "-c2", "2,1,3,4", "--budget", "0")
        assert code == 1 and "BudgetExhausted" in err

    def test_single_theta_ignores_ceiling(self):
        assert call("theta", "-k", "5", "-sigma", "()", "--ceiling", "3")[0] == 0

    def test_ceiling(self, monkeypatch):
        code, _, err = call("enumerate", "-m", "5", "-n", "4", "--ceiling", "4")
        assert code == 1 and "DegreeTooLarge" in err
        monkeypatch.setenv("TORELLI_CEILING", "3")
        code, _, err = call("catalog", "-k", "4")
        assert code == 1 and "DegreeTooLarge" in err
        assert call("catalog", "-k", "4", "--ceiling", "7")[0] == 0

    def test_ceiling_restored(self, monkeypatch):
        monkeypatch.delenv("TORELLI_CEILING", raising=False)
        call("catalog", "-k", "3", "--ceiling", "3")
        assert "TORELLI_CEILING" not in os.environ


class TestReproducibility:
    def test_identical_runs(self):
        argv = ["enumerate", "-m", "5", "-n", "3", "--format", "json"]
        assert call(*argv) == call(*argv)
        argv = ["collide", "-k", "5", "-c1", "1,4,2,6", "-c2", "3,2,5,4", "--seed", "7"]
        assert call(*argv) == call(*argv)

    def test_output_file(self, tmp_path):
        target = tmp_path / "out.txt"
        code, out, _ = call("theta", "-k", "4", "-sigma", "(2 3)(4 5)", "--output", str(target))
        assert code == 0 and out == ""
        assert target.read_text() == "-1*(z2-1) , -1*(z1-1)\n"

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "torelli", "theta", "-k", "3", "-sigma", "(1 2)"],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert proc.stdout == "1*z1^-1\n"
