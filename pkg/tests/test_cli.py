"""Command-line interface: exit codes, output formats, file side effects."""

import hashlib
import json

import pytest

from axiswalk.cli import main
from axiswalk.verify import TARGETS


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstants:
    def test_subcritical(self, capsys):
        code, out, _ = run(capsys, ["constants", "--alpha", "0.25"])
        assert code == 0
        assert "subcritical" in out
        assert "1.7170713638299977" in out
        assert "1.1283791670955126" in out  # 2/sqrt(pi) reference line

    def test_ballistic(self, capsys):
        code, out, _ = run(capsys, ["constants", "--alpha", "1.5"])
        assert code == 0
        assert "ballistic" in out
        assert "undefined" in out

    def test_bad_alpha_is_usage_error(self, capsys):
        code, _, err = run(capsys, ["constants", "--alpha", "9"])
        assert code == 2
        assert "error:" in err


class TestDumpTrajectory:
    BASE = ["dump-trajectory", "--model", "quarter-plane", "--alpha", "0.3", "--seed", "5"]

    def test_unit_stride_rows(self, capsys):
        code, out, _ = run(capsys, self.BASE + ["--n", "3", "--stride", "1"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,x,y"
        assert len(lines) == 1 + 4  # t = 0..3
        assert lines[1].startswith("0,")

    def test_oversized_stride_keeps_endpoints(self, capsys):
        code, out, _ = run(capsys, self.BASE + ["--n", "3", "--stride", "100"])
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 1 + 2
        assert lines[1].startswith("0,") and lines[2].startswith("3,")

    def test_full_plane_allows_negative_coordinates(self, capsys):
        code, out, _ = run(
            capsys,
            ["dump-trajectory", "--model", "full-plane", "--n", "200", "--seed", "3",
             "--start", "0", "0"],
        )
        assert code == 0
        assert "-" in out  # some coordinate went negative in 200 steps

    def test_write_to_file(self, capsys, tmp_path):
        out_file = tmp_path / "traj.csv"
        code, out, _ = run(capsys, self.BASE + ["--n", "10", "--out", str(out_file)])
        assert code == 0
        assert "11 rows" in out
        assert out_file.read_text().startswith("t,x,y\n")

    def test_usage_errors(self, capsys):
        assert run(capsys, self.BASE + ["--n", "5", "--stride", "0"])[0] == 2
        assert run(capsys, self.BASE + ["--n", "-2"])[0] == 2
        assert run(capsys, self.BASE + ["--n", "5", "--start", "-1", "0"])[0] == 2
        assert run(capsys, ["dump-trajectory", "--alpha", "9", "--n", "5"])[0] == 2


class TestListTargets:
    def test_lists_every_registered_target(self, capsys):
        code, out, _ = run(capsys, ["list-targets"])
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == len(TARGETS) == 15
        for name in TARGETS:
            assert any(line.startswith(name) for line in lines)


class TestSimulate:
    def test_time_mode_summary(self, capsys, tmp_path):
        out_file = tmp_path / "batch.csv"
        argv = [
            "simulate", "--n", "64", "--replicas", "4", "--seed", "2",
            "--alpha", "0.3", "--out", str(out_file), "--quiet",
        ]
        code, out, _ = run(capsys, argv)
        assert code == 0
        assert "config hash:" in out
        assert "backend:" in out
        assert "4 executed" in out
        assert out_file.exists()
        first = hashlib.sha256(out_file.read_bytes()).hexdigest()
        code, _, _ = run(capsys, argv)
        assert code == 0
        assert hashlib.sha256(out_file.read_bytes()).hexdigest() == first

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "exp.json"
        cfg.write_text(json.dumps({"excursions": 5, "alpha": 0.3, "replicas": 2}))
        code, out, _ = run(
            capsys, ["simulate", "--config", str(cfg), "--replicas", "3", "--quiet"]
        )
        assert code == 0
        assert "3 executed" in out

    def test_usage_errors(self, capsys):
        # both modes at once
        assert run(capsys, ["simulate", "--n", "5", "--excursions", "5"])[0] == 2
        # neither mode
        assert run(capsys, ["simulate", "--replicas", "2"])[0] == 2
        # invalid exponent
        assert run(capsys, ["simulate", "--n", "5", "--alpha", "9"])[0] == 2
        # resume without output path
        assert run(capsys, ["simulate", "--n", "5", "--resume"])[0] == 2

    def test_bad_threads_env(self, capsys, monkeypatch):
        monkeypatch.setenv("AXISWALK_THREADS", "many")
        assert run(capsys, ["simulate", "--n", "5", "--replicas", "1"])[0] == 2


class TestVerify:
    def test_unknown_target(self, capsys):
        code, _, err = run(capsys, ["verify", "no-such-law"])
        assert code == 2
        assert "no-such-law" in err

    def test_underpowered_request_refused(self, capsys):
        code, _, err = run(capsys, ["verify", "lln", "--replicas", "10"])
        assert code == 2
        assert "replicas" in err

    def test_json_verdict_for_failing_analytic_target(self, capsys):
        # mean-asymptotic is pure analytics (fast) and documented as failing
        code, out, _ = run(capsys, ["verify", "mean-asymptotic", "--json", "--quiet"])
        assert code == 1
        verdict = json.loads(out)
        assert verdict["target"] == "mean-asymptotic"
        assert verdict["passed"] is False
        assert "claim" in verdict and "measured" in verdict

    def test_report_format(self, capsys):
        code, out, _ = run(capsys, ["verify", "mean-asymptotic", "--quiet"])
        assert code == 1
        assert out.startswith("target:")
        assert "FAIL mean-asymptotic:" in out


def test_missing_subcommand_exits_with_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
