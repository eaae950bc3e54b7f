import json

import pytest

from dmqkd.cli import EXIT_MODEL, EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, main
from dmqkd.config import RunConfig, config_to_text


def run(*argv):
    return main(list(argv))


class TestEncode:
    def test_writes_schedule_and_table(self, tmp_path, capsys):
        stream = tmp_path / "stream.txt"
        stream.write_text("Z0s Y1s Z0d\n")
        assert run("--out", str(tmp_path), "encode", str(stream)) == EXIT_OK
        out = capsys.readouterr().out
        assert "Z0d" in out
        text = (tmp_path / "schedule.txt").read_text()
        assert text.startswith("# timing ")
        assert len(text.splitlines()) == 1 + 18
        doc = json.loads((tmp_path / "schedule.json").read_text())
        assert len(doc["events"]) == 18

    def test_rerun_is_byte_identical(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("Z0s Y1s\n")
        run("--out", str(tmp_path / "a"), "encode", str(stream))
        run("--out", str(tmp_path / "b"), "encode", str(stream))
        assert (tmp_path / "a" / "schedule.txt").read_bytes() == (
            tmp_path / "b" / "schedule.txt"
        ).read_bytes()

    def test_empty_stream_is_usage_error(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("# nothing\n")
        assert run("--out", str(tmp_path), "encode", str(stream)) == EXIT_USAGE

    def test_y_basis_decoy_rejected(self, tmp_path):
        stream = tmp_path / "stream.txt"
        stream.write_text("Z0s Y0d\n")
        assert run("--out", str(tmp_path), "encode", str(stream)) == EXIT_USAGE

    def test_missing_file(self, tmp_path):
        assert run("--out", str(tmp_path), "encode", str(tmp_path / "no.txt")) == EXIT_USAGE


class TestSweep:
    def test_default_range(self, tmp_path, capsys):
        assert run("--out", str(tmp_path), "sweep") == EXIT_OK
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert len(lines) == 1 + 61
        out = capsys.readouterr().out
        assert "cutoff loss" in out and "r_bps at 15 dB" in out

    def test_single_point(self, tmp_path):
        assert run(
            "--out", str(tmp_path), "--loss-min", "15", "--loss-max", "15", "sweep"
        ) == EXIT_OK
        assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 2

    def test_zero_step_is_usage_error(self, tmp_path):
        assert run("--out", str(tmp_path), "--loss-step", "0", "sweep") == EXIT_USAGE

    def test_invalid_model_exit_code(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("dark_rate_hz = 1e9\n")
        assert run("--config", str(cfg), "--out", str(tmp_path), "sweep") == EXIT_MODEL


class TestMc:
    def test_report_and_determinism(self, tmp_path):
        assert run("--out", str(tmp_path / "a"), "--frames", "20000", "mc") == EXIT_OK
        assert run("--out", str(tmp_path / "b"), "--frames", "20000", "mc") == EXIT_OK
        assert (tmp_path / "a" / "tallies.csv").read_bytes() == (
            tmp_path / "b" / "tallies.csv"
        ).read_bytes()
        report = json.loads((tmp_path / "a" / "mc_report.json").read_text())
        assert report["n_frames"] == 20000
        assert len(report["rows"]) == 4
        assert set(report["bounds_analytic"]) == {"y0_l", "y1_l", "e1_u"}

    def test_seed_changes_output(self, tmp_path):
        run("--out", str(tmp_path / "a"), "--frames", "20000", "--seed", "1", "mc")
        run("--out", str(tmp_path / "b"), "--frames", "20000", "--seed", "2", "mc")
        assert (tmp_path / "a" / "tallies.csv").read_bytes() != (
            tmp_path / "b" / "tallies.csv"
        ).read_bytes()

    def test_too_few_frames(self, tmp_path):
        assert run("--out", str(tmp_path), "--frames", "100", "mc") == EXIT_USAGE


class TestVerify:
    def test_passes_and_writes_report(self, tmp_path, capsys):
        assert run("--out", str(tmp_path), "verify") == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("PASS") == 11 and "FAIL" not in out
        report = json.loads((tmp_path / "security_report.json").read_text())
        assert report["all_passed"] is True

    def test_exit_codes_reserved_value(self):
        assert EXIT_PROPERTY == 2


class TestWriteDefaults:
    def test_stdout(self, capsys):
        assert run("write-defaults") == EXIT_OK
        assert capsys.readouterr().out == config_to_text(RunConfig())

    def test_file_round_trips_through_load(self, tmp_path):
        path = tmp_path / "defaults.txt"
        assert run("write-defaults", str(path)) == EXIT_OK
        assert run("--config", str(path), "--out", str(tmp_path),
                   "--loss-min", "15", "--loss-max", "15", "sweep") == EXIT_OK


class TestUsage:
    def test_unknown_subcommand(self):
        assert run("frobnicate") == EXIT_USAGE

    def test_missing_subcommand(self):
        assert run() == EXIT_USAGE

    def test_unknown_flag(self):
        assert run("--bogus", "sweep") == EXIT_USAGE

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("mystery = 1.0\n")
        assert run("--config", str(cfg), "sweep") == EXIT_USAGE
