import json
import subprocess
import sys

import pytest

from rulehide.cli import main
from rulehide.dataset import load_csv, write_csv
from rulehide.fixtures import SINGLE_HIDING_RULE, single_hiding_dataset


@pytest.fixture()
def fixture_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text(write_csv(single_hiding_dataset()))
    return path


def run_main(args):
    return main([str(a) for a in args])


class TestSolveEq:
    def test_first_worked_equation(self, capsys):
        assert run_main(["solve-eq", "37", "58", "855"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["solvable"] is True
        assert doc["minimal"] == [67, 28]

    def test_unsolvable(self, capsys):
        assert run_main(["solve-eq", "2", "2", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["solvable"] is False

    def test_bounded_root_equation(self, capsys):
        assert run_main(["solve-eq", "459", "541", "9000", "--lb-x", "361", "--lb-y", "128"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["minimal"] == [550, 450]


class TestBuildAndRules:
    def test_build_emits_tree(self, fixture_csv, tmp_path, capsys):
        out = tmp_path / "tree.json"
        assert run_main(["build", fixture_csv, "--emit-tree", out]) == 0
        doc = json.loads(out.read_text())
        assert doc["root"]["attribute"] == "a1"
        assert doc["root"]["p"] == 541 and doc["root"]["n"] == 459

    def test_build_parse_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y,class\n1,7,p\n")
        assert run_main(["build", bad]) == 2

    def test_rules_lists_leaves(self, fixture_csv, capsys):
        assert run_main(["rules", fixture_csv]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert SINGLE_HIDING_RULE in lines
        assert len(lines) == 6  # one per leaf


class TestHide:
    def test_hide_writes_sanitized_and_plan(self, fixture_csv, tmp_path):
        out = tmp_path / "out.csv"
        plan_path = tmp_path / "plan.json"
        code = run_main([
            "hide", fixture_csv, "--request", SINGLE_HIDING_RULE,
            "--output", out, "--emit-plan", plan_path,
        ])
        assert code == 0
        sanitized = load_csv(out.read_text())
        assert len(sanitized) == 2000
        plan = json.loads(plan_path.read_text())
        assert plan["total_added"] == 1000

    def test_hide_relaxed_total(self, fixture_csv, tmp_path):
        out = tmp_path / "out.csv"
        plan_path = tmp_path / "plan.json"
        code = run_main([
            "hide", fixture_csv, "--request", SINGLE_HIDING_RULE,
            "--relax", "root:1", "--output", out, "--emit-plan", plan_path,
        ])
        assert code == 0
        assert json.loads(plan_path.read_text())["total_added"] == 700
        assert len(load_csv(out.read_text())) == 1700

    def test_rule_not_found_exit_4(self, fixture_csv, tmp_path):
        code = run_main([
            "hide", fixture_csv, "--request", "a1=1,a2=1 => p",
            "--output", tmp_path / "out.csv",
        ])
        assert code == 4

    def test_deterministic_outputs(self, fixture_csv, tmp_path):
        outs = []
        for run in ("one", "two"):
            out = tmp_path / f"{run}.csv"
            plan = tmp_path / f"{run}-plan.json"
            assert run_main([
                "hide", fixture_csv, "--request", SINGLE_HIDING_RULE,
                "--output", out, "--emit-plan", plan,
            ]) == 0
            outs.append((out.read_bytes(), plan.read_bytes()))
        assert outs[0] == outs[1]

    def test_config_file_supplies_defaults(self, fixture_csv, tmp_path):
        out = tmp_path / "out.csv"
        config = tmp_path / "run.json"
        config.write_text(json.dumps({
            "requests": [SINGLE_HIDING_RULE],
            "relax": ["root:1"],
            "output": str(out),
        }))
        assert run_main(["hide", fixture_csv, "--config", config]) == 0
        assert len(load_csv(out.read_text())) == 1700

    def test_request_by_node_id(self, fixture_csv, tmp_path):
        # the sensitive 9p leaf carries the stable preorder id 10
        out = tmp_path / "out.csv"
        plan_path = tmp_path / "plan.json"
        code = run_main([
            "hide", fixture_csv, "--request-node", "10",
            "--output", out, "--emit-plan", plan_path,
        ])
        assert code == 0
        plan = json.loads(plan_path.read_text())
        assert plan["requests"] == [SINGLE_HIDING_RULE]
        assert plan["total_added"] == 1000

    def test_request_by_internal_node_id_exit_4(self, fixture_csv, tmp_path):
        code = run_main([
            "hide", fixture_csv, "--request-node", "0", "--output", tmp_path / "o.csv",
        ])
        assert code == 4

    def test_even_split_strategy(self, fixture_csv, tmp_path):
        out = tmp_path / "out.csv"
        code = run_main([
            "hide", fixture_csv, "--request", SINGLE_HIDING_RULE,
            "--strategy", "evensplit", "--output", out,
        ])
        assert code == 0
        sanitized = load_csv(out.read_text())
        assert len(sanitized) == 2000
        assert sanitized.is_fully_specified()


class TestEvaluate:
    def test_text_report(self, fixture_csv, capsys):
        assert run_main(["evaluate", fixture_csv, "--request", SINGLE_HIDING_RULE]) == 0
        out = capsys.readouterr().out
        assert "added instances: 1000" in out

    def test_json_report(self, fixture_csv, capsys):
        assert run_main([
            "evaluate", fixture_csv, "--request", SINGLE_HIDING_RULE, "--json",
        ]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["all_hidden"] is True


def test_module_entrypoint_runs(fixture_csv):
    proc = subprocess.run(
        [sys.executable, "-m", "rulehide.cli", "rules", str(fixture_csv)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert SINGLE_HIDING_RULE in proc.stdout
