import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from conftest import DATA
from paretogames import cli, jsonio
from paretogames.core import fmt, to_rational

GAME = str(DATA / "example1_game.json")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def outcome(tag):
    return str(DATA / f"example1_outcome_{tag}.json")


def rational_strings(data):
    """Every string leaf that looks numeric parses back to a Fraction."""
    if isinstance(data, dict):
        for v in data.values():
            yield from rational_strings(v)
    elif isinstance(data, list):
        for v in data:
            yield from rational_strings(v)
    elif isinstance(data, str) and data.lstrip("-").replace("/", "").isdigit():
        yield data


class TestCheck:
    @pytest.mark.parametrize("tag,code", [("a", 10), ("b", 0), ("c", 10)])
    def test_example_verdicts(self, capsys, tag, code):
        got, data = run_json(capsys, "check", "--game", GAME, "--outcome", outcome(tag))
        assert got == code
        certs = data["certificates"]
        assert {c["method"] for c in certs} == {"cone", "dominance"}
        if code == 0:
            assert all(c["weights"] for c in certs)
        else:
            assert all(c["witness"] for c in certs)

    @pytest.mark.parametrize("method", ["cone", "dominance"])
    def test_single_method(self, capsys, method):
        code, data = run_json(capsys, "check", "--game", GAME, "--outcome", outcome("b"), "--method", method)
        assert code == 0 and [c["method"] for c in data["certificates"]] == [method]

    def test_prior_override(self, capsys):
        # a1 everywhere is efficient at 7/10 as well
        code, data = run_json(capsys, "check", "--game", GAME, "--outcome", outcome("b"), "--prior", "7/10")
        assert code == 0 and data["prior"] == ["3/10", "7/10"]

    def test_truncated_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(open(GAME).read()[:50])
        code, _, err = run(capsys, "check", "--game", str(bad), "--outcome", outcome("a"))
        assert code == 2 and "input error" in err

    def test_missing_file_and_flag(self, capsys, tmp_path):
        assert run(capsys, "check", "--game", str(tmp_path / "none.json"), "--outcome", outcome("a"))[0] == 2
        assert run(capsys, "check", "--game", GAME)[0] == 2

    def test_dimension_mismatch(self, capsys, tmp_path):
        bad = tmp_path / "o.json"
        bad.write_text(json.dumps({"w0": {"a0": 1}, "w7": {"a0": 1}}))
        assert run(capsys, "check", "--game", GAME, "--outcome", str(bad))[0] == 2

    def test_internal_disagreement_exit(self, capsys, monkeypatch):
        from paretogames import efficiency

        def boom(*a, **k):
            raise efficiency.EfficiencyInternalError("methods disagree")

        monkeypatch.setattr(efficiency, "check", boom)
        assert run(capsys, "check", "--game", GAME, "--outcome", outcome("a"))[0] == 70

    def test_round_trip_and_determinism(self, capsys):
        args = ("check", "--game", GAME, "--outcome", outcome("c"))
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second
        data = json.loads(first)
        assert jsonio.loads(jsonio.dumps(data)) == data
        for s in rational_strings(data):
            assert fmt(to_rational(s)) == s


class TestBound:
    def test_example(self, capsys):
        code, data = run_json(capsys, "bound", "--game", GAME, "--outcome", outcome("a"))
        # 2 + 1 < 2 + 2: the bound alone does not flag case (a)
        assert code == 0 and data["sizes"] == {"w0": 2, "w1": 1}


class TestBp:
    @pytest.mark.parametrize("p,value", [("1/10", "6"), ("3/10", "10"), ("7/10", "11/2")])
    def test_values(self, capsys, p, value):
        code, data = run_json(capsys, "bp", "--game", GAME, "--prior", p)
        assert code == 0 and data["value"] == value and data["cav_value"] == value

    def test_pure_at_three_tenths(self, capsys):
        _, data = run_json(capsys, "bp", "--game", GAME, "--prior", "3/10")
        assert data["outcome"] == {"w0": {"a1": "1"}, "w1": {"a1": "1"}}
        assert data["verdict"] == "efficient"

    def test_three_states_lp_only(self, capsys, tmp_path):
        from paretogames.persuasion import build_threshold_env

        env = build_threshold_env(2, F(7, 10))
        path = tmp_path / "g.json"
        path.write_text(jsonio.dumps(jsonio.game_to_mapping(env.game)))
        code, data = run_json(capsys, "bp", "--game", str(path))
        assert code == 0 and "cav_value" not in data


class TestSweep:
    def test_example_grid(self, capsys):
        code, out, _ = run(capsys, "sweep", "--game", GAME, "--grid", "21")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 19
        assert list(rows[0]) == [
            "p_w0", "p_w1", "sender_value", "support_w0", "support_w1",
            "bound", "cone_verdict", "in_R_star", "T_p",
        ]
        for row in rows:
            p = F(row["p_w1"])
            assert (row["cone_verdict"] == "efficient") == (F(1, 5) <= p <= F(2, 5))
            assert row["in_R_star"] == row["T_p"] == "NA"

    def test_grid_two_is_header_only(self, capsys):
        code, out, _ = run(capsys, "sweep", "--game", GAME, "--grid", "2")
        assert code == 0 and out.count("\n") == 1

    def test_grid_too_small(self, capsys):
        assert run(capsys, "sweep", "--game", GAME, "--grid", "1")[0] == 2

    def test_threshold_env(self, capsys):
        code, out, _ = run(capsys, "sweep", "--n", "2", "--T", "7/10", "--grid", "11")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 36
        inside = [r for r in rows if r["in_R_star"] == "interior"]
        assert inside and all(r["cone_verdict"] == "inefficient" for r in inside)

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        _, out, _ = run(capsys, "sweep", "--game", GAME, "--grid", "11")
        target = tmp_path / "s.csv"
        code, printed, _ = run(capsys, "sweep", "--game", GAME, "--grid", "11", "--out", str(target))
        assert code == 0 and printed == "" and target.read_text() == out


class TestThreshold:
    def test_uniform_prior(self, capsys):
        code, data = run_json(capsys, "threshold", "--n", "2", "--T", "7/10")
        assert code == 10 and data["T_exceeds_T_p"]

    def test_bad_T(self, capsys):
        assert run(capsys, "threshold", "--n", "2", "--T", "2/5")[0] == 2


class TestCheapTalk:
    def test_verify_informative(self, capsys):
        code, data = run_json(
            capsys, "cheaptalk-verify", "--game", GAME,
            "--profile", str(DATA / "cheaptalk_informative_half.json"),
        )
        assert code == 0 and data["equilibrium"] and data["sender_payoff"] == "3"
        assert data["efficiency"]["cone_verdict"] == "inefficient"

    @pytest.mark.parametrize("name,verdict", [("03", "efficient"), ("07", "inefficient")])
    def test_verify_babbling(self, capsys, name, verdict):
        code, data = run_json(
            capsys, "cheaptalk-verify", "--game", GAME,
            "--profile", str(DATA / f"cheaptalk_babbling_{name}.json"),
        )
        assert code == 0 and data["efficiency"]["a_star_verdict"] == verdict

    def test_verify_rejects_off_equilibrium(self, capsys):
        # babbling on a1 is not an equilibrium at p = 7/10
        code, data = run_json(
            capsys, "cheaptalk-verify", "--game", GAME, "--prior", "7/10",
            "--profile", str(DATA / "cheaptalk_babbling_03.json"),
        )
        assert code == 10 and not data["equilibrium"] and "efficiency" not in data

    def test_analyze(self, capsys):
        code, data = run_json(capsys, "cheaptalk-analyze", "--game", GAME, "--prior", "1/2")
        assert code == 0
        assert data["a_star"] == "a1" and data["quasicav_V"] == "3" and data["cav_V"] == "17/2"
        code, data = run_json(
            capsys, "cheaptalk-analyze", "--game", GAME,
            "--profile", str(DATA / "cheaptalk_informative_half.json"),
        )
        assert code == 10 and data["efficiency"]["agree"]


class TestAllocate:
    def test_worked(self, capsys):
        code, data = run_json(
            capsys, "allocate", "--instance", str(DATA / "allocation_worked.json"), "--draws", "3", "--seed", "1"
        )
        assert code == 10 and data["dic"]
        assert data["inefficiency"]["total_support"] == 8 and data["inefficiency"]["bound"] == 7
        assert data["random_value_draws"]["inefficient"] == 3

    def test_withheld(self, capsys):
        code, data = run_json(capsys, "allocate", "--instance", str(DATA / "allocation_worked.json"), "--t", "1/2")
        assert code == 0 and data["inefficiency"]["withheld"]


class TestFigure:
    def test_runs(self, capsys):
        code, data = run_json(capsys, "figure", "--game", GAME, "--outcome", outcome("a"))
        assert code == 0 and data


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "paretogames.cli", "check", "--game", GAME, "--outcome", outcome("b")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "efficient"
