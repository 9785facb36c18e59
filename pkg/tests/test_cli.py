"""Tests for the command-line harness."""

from __future__ import annotations

import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from setupsched.cli import (
    COLUMNS,
    UsageError,
    parse_gen_spec,
    parse_seeds,
    parse_solver_spec,
    run,
    _split_solvers,
)
from setupsched.model import Kind, compute_loads
from setupsched.serialize import parse_instance, parse_schedule

FIXTURES = Path(__file__).parent.parent / "fixtures"
U1 = str(FIXTURES / "u1.json")

F = Fraction


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(out: str) -> list[list[str]]:
    lines = out.strip().split("\n")
    assert lines[0] == ",".join(COLUMNS)
    import csv as _csv

    return list(_csv.reader(lines[1:]))


class TestSolve:
    def test_one_row_lpt(self, capsys):
        code, out, err = run_cli(
            capsys, "solve", "--solver", "lpt", "--in", U1, "--stable-output"
        )
        assert code == 0 and err == ""
        rows = csv_rows(out)
        assert len(rows) == 1
        row = dict(zip(COLUMNS, rows[0]))
        assert row["instance_id"] == "u1"
        assert row["solver"] == "lpt"
        assert (row["n"], row["m"], row["K"]) == ("6", "2", "2")
        assert row["makespan"] == "21/4"
        assert row["oracle"] == "" and row["ratio"] == ""
        assert row["ms"] == "0.000"

    def test_oracle_flag_fills_ratio(self, capsys):
        code, out, _ = run_cli(
            capsys, "solve", "--solver", "lpt", "--in", U1, "--oracle", "--stable-output"
        )
        assert code == 0
        row = dict(zip(COLUMNS, csv_rows(out)[0]))
        assert row["oracle"] == "21/4"
        assert row["ratio"] == "1"

    def test_emitted_schedule_reverifies(self, capsys, tmp_path):
        sched_path = tmp_path / "s.json"
        code, out, _ = run_cli(
            capsys, "solve", "--solver", "lpt", "--in", U1,
            "--emit-schedule", str(sched_path), "--stable-output",
        )
        assert code == 0
        row = dict(zip(COLUMNS, csv_rows(out)[0]))
        instance = parse_instance(U1)
        schedule = parse_schedule(sched_path, instance)
        assert compute_loads(instance, schedule).makespan == F(row["makespan"])

    def test_randomized_solver_seed_determinism(self, capsys):
        args = ("solve", "--solver", "unrelated:c=3", "--in",
                str(FIXTURES / "unrelated_4x12.json"), "--seed", "5", "--stable-output")
        code1, out1, _ = run_cli(capsys, *args)
        code2, out2, _ = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_sched_seed_env_is_default(self, capsys, monkeypatch):
        inst = str(FIXTURES / "unrelated_4x12.json")
        monkeypatch.setenv("SCHED_SEED", "9")
        _, via_env, _ = run_cli(
            capsys, "solve", "--solver", "unrelated", "--in", inst, "--stable-output"
        )
        monkeypatch.delenv("SCHED_SEED")
        _, via_flag, _ = run_cli(
            capsys, "solve", "--solver", "unrelated", "--in", inst,
            "--seed", "9", "--stable-output",
        )
        assert via_env == via_flag

    def test_ptas_eps_restricted(self, capsys):
        code, _, err = run_cli(
            capsys, "solve", "--solver", "ptas:eps=2/3", "--in", U1
        )
        assert code == 1
        assert "eps must be one of" in err

    def test_kind_mismatch_is_usage_error(self, capsys):
        code, _, err = run_cli(
            capsys, "solve", "--solver", "lpt", "--in",
            str(FIXTURES / "unrelated_4x12.json"),
        )
        assert code == 1
        assert "identical/uniform" in err


class TestExitCodes:
    def test_infeasible_is_2(self, capsys, tmp_path):
        bad = tmp_path / "inf.json"
        bad.write_text(
            '{"kind": "unrelated", "machines": {"count": 2},'
            ' "classes": [{"setups": ["1", "1"]}],'
            ' "jobs": [{"class": 0, "sizes": ["inf", "inf"]}]}'
        )
        code, out, err = run_cli(capsys, "solve", "--solver", "unrelated", "--in", str(bad))
        assert code == 2
        assert "infeasible" in err

    def test_unknown_solver_is_1(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--solver", "nope", "--in", U1)
        assert code == 1 and "unknown solver" in err

    def test_missing_file_is_1(self, capsys):
        code, _, err = run_cli(
            capsys, "solve", "--solver", "lpt", "--in", "no/such/file.json"
        )
        assert code == 1 and "cannot read" in err

    def test_missing_command_is_1(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 1 and "usage" in err

    def test_bad_usage_is_1_not_2(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--solver", "lpt")
        assert code == 1
        assert "--in" in err

    def test_oracle_budget_is_1(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "oracle", "--in", str(FIXTURES / "unrelated_4x12.json"),
            "--max-jobs", "4",
        )
        assert code == 1 and "exceeds" in err


class TestBench:
    def test_grid_row_count(self, capsys):
        code, out, err = run_cli(
            capsys, "bench", "--solvers", "lpt,ptas:eps=1/2",
            "--gen", "uniform:n=8,m=2", "--seeds", "1..20", "--stable-output",
        )
        assert code == 0, err
        rows = csv_rows(out)
        assert len(rows) == 40

    def test_rows_sorted_and_deterministic(self, capsys):
        args = ("bench", "--solvers", "unrelated:c=3,lpt-oops", "--gen",
                "unrelated:n=5,m=2,K=2", "--seeds", "9..11", "--stable-output")
        # lpt-oops is deliberately invalid; usage error must come before any output
        code, out, err = run_cli(capsys, *args)
        assert code == 1 and out == ""

        args = ("bench", "--solvers", "unrelated:c=3", "--gen",
                "unrelated:n=5,m=2,K=2", "--seeds", "11,9,10", "--stable-output")
        code1, out1, _ = run_cli(capsys, *args)
        code2, out2, _ = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2
        seeds = [int(r[8]) for r in csv_rows(out1)]
        assert seeds == sorted(seeds)

    def test_oracle_ratio_at_least_one(self, capsys):
        code, out, _ = run_cli(
            capsys, "bench", "--solvers", "lpt", "--gen", "uniform:n=6,m=2,K=2",
            "--seeds", "1..6", "--oracle", "--stable-output",
        )
        assert code == 0
        for row in csv_rows(out):
            assert F(row[7]) >= 1


class TestGap:
    def test_table_and_determinism(self, capsys):
        args = ("gap", "--yes", str(FIXTURES / "sc_yes.json"),
                "--no", str(FIXTURES / "sc_no.json"), "--trials", "3", "--seed", "1")
        code1, out1, err = run_cli(capsys, *args)
        assert code1 == 0, err
        assert "gap experiment:" in out1
        assert "no lower bound 6" in out1
        assert out1.strip().splitlines()[-1].startswith("yes within r:")
        code2, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_swapped_pair_fails_certification(self, capsys):
        code, _, err = run_cli(
            capsys, "gap", "--yes", str(FIXTURES / "sc_no.json"),
            "--no", str(FIXTURES / "sc_yes.json"), "--trials", "1", "--seed", "1",
        )
        assert code == 1
        assert "error" in err


class TestOracleCommand:
    def test_row(self, capsys):
        code, out, _ = run_cli(capsys, "oracle", "--in", U1, "--stable-output")
        assert code == 0
        row = dict(zip(COLUMNS, csv_rows(out)[0]))
        assert row["solver"] == "oracle"
        assert row["makespan"] == "21/4"
        assert row["ratio"] == "1"


class TestGrammars:
    def test_solver_spec(self):
        assert parse_solver_spec("lpt") == ("lpt", {})
        assert parse_solver_spec("ptas:eps=1/2") == ("ptas", {"eps": "1/2"})
        assert parse_solver_spec("unrelated:c=3") == ("unrelated", {"c": "3"})
        with pytest.raises(UsageError):
            parse_solver_spec("ptas:eps")

    def test_split_solvers(self):
        assert _split_solvers("lpt,ptas:eps=1/2") == ["lpt", "ptas:eps=1/2"]
        assert _split_solvers("ptas:eps=1/2,c=3,lpt") == ["ptas:eps=1/2,c=3", "lpt"]
        with pytest.raises(UsageError):
            _split_solvers("lpt,,ra")

    def test_seeds(self):
        assert parse_seeds("3") == [3]
        assert parse_seeds("1..4") == [1, 2, 3, 4]
        assert parse_seeds("1,5..6") == [1, 5, 6]
        with pytest.raises(UsageError):
            parse_seeds("4..1")
        with pytest.raises(UsageError):
            parse_seeds("x")

    def test_gen_spec(self):
        spec = parse_gen_spec("unrelated:n=12,m=4,K=3,inf=1/8")
        assert spec.kind is Kind.UNRELATED
        assert (spec.n, spec.m, spec.num_classes) == (12, 4, 3)
        assert spec.inf_prob == F(1, 8)
        spec = parse_gen_spec("restricted:variant=class-uniform,size=2..5")
        assert spec.variant == "class-uniform"
        assert spec.size_range == (2, 5)
        with pytest.raises(UsageError):
            parse_gen_spec("weird:n=3")
        with pytest.raises(UsageError):
            parse_gen_spec("uniform:q=3")
        with pytest.raises(UsageError):
            parse_gen_spec("uniform:size=5")


class TestConsoleScript:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "setupsched.cli", "solve", "--solver", "lpt",
             "--in", U1, "--stable-output"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == ",".join(COLUMNS)
