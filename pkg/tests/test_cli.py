"""CLI subcommands: tables, reports, exit codes, CSV reproducibility."""

import json
import subprocess
import sys

import pytest

from xrelay.cli import (
    CSV_HEADER,
    EXIT_DEGENERATE,
    EXIT_INFEASIBLE,
    EXIT_OK,
    main,
    parse_int_range,
    parse_snr_grid,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParsers:
    def test_int_range(self):
        assert parse_int_range("5") == [5]
        assert parse_int_range("5..8") == [5, 6, 7, 8]

    def test_snr_grid(self):
        assert parse_snr_grid("0:5:60") == [5.0 * k for k in range(13)]
        assert parse_snr_grid("40:5:60") == [40.0, 45.0, 50.0, 55.0, 60.0]

    def test_bad_grids(self):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            parse_snr_grid("10:0:20")
        with pytest.raises(argparse.ArgumentTypeError):
            parse_snr_grid("10,20")


class TestAnalyze:
    def test_table_rows(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "--M", "5", "--N", "1..10")
        assert code == EXIT_OK
        rows = {tuple(line.split()[:2]): line.split() for line in out.splitlines()[1:]}
        assert rows[("5", "8")] == ["5", "8", "16", "16", "no", "10"]
        assert rows[("5", "9")] == ["5", "9", "18", "8", "no", "10"]

    def test_reduced_column(self, capsys):
        _, out, _ = run_cli(capsys, "analyze", "--M", "3", "--N", "4")
        assert out.splitlines()[1].split() == ["3", "4", "8", "8", "yes", "6"]


class TestDesign:
    def test_pass_at_5_8(self, capsys):
        code, out, _ = run_cli(
            capsys, "design", "--M", "5", "--N", "8", "--scheme", "sajic", "--seed", "1"
        )
        assert code == EXIT_OK
        assert "PASS" in out
        residual = float(out.splitlines()[1].split()[-1])
        assert residual <= 1e-9

    def test_reduced_infeasible_at_5_8(self, capsys):
        code, _, err = run_cli(capsys, "design", "--M", "5", "--N", "8", "--scheme", "reduced")
        assert code == EXIT_INFEASIBLE
        assert "ReducedInfeasible" in err

    def test_wide_relay_infeasible(self, capsys):
        code, _, err = run_cli(capsys, "design", "--M", "2", "--N", "4")
        assert code == EXIT_INFEASIBLE
        assert "InfeasibleRegime" in err

    def test_range_rejected_for_single_value_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["design", "--M", "2..3", "--N", "4"])
        assert exc.value.code == 2


class TestVerify:
    def test_joint_scheme(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--M", "5", "--N", "8", "--trials", "5", "--seed", "0"
        )
        assert code == EXIT_OK
        assert out.startswith("PASS")

    def test_reduced_scheme(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--M", "3", "--N", "4", "--scheme", "reduced", "--trials", "5"
        )
        assert code == EXIT_OK
        assert "0 bit errors" in out

    def test_infeasible(self, capsys):
        code, _, err = run_cli(capsys, "verify", "--M", "5", "--N", "10", "--trials", "2")
        assert code == EXIT_INFEASIBLE
        assert "Infeasible" in err


class TestSimulate:
    def test_csv_schema_and_reproducibility(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        argv = [
            "simulate", "--M", "5", "--N", "8", "--scheme", "sajic",
            "--snr", "40:10:60", "--trials", "4", "--seed", "7", "--out", str(out),
        ]
        assert main(list(argv)) == EXIT_OK
        capsys.readouterr()
        text = out.read_bytes()
        lines = text.decode().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 3  # three SNR points
        first = lines[1].split(",")
        assert first[:3] == ["sajic", "5", "8"]
        assert first[3] == "40.000000"
        assert first[6] == "4"

        manifest_path = out.with_name(out.name + ".manifest.json")
        manifest = json.loads(manifest_path.read_text())
        assert manifest["subcommand"] == "simulate"
        assert manifest["master_seed"] == 7
        assert manifest["flags"]["trials"] == 4

        # Rerun with the manifest's flags: byte-identical CSV.
        out2 = tmp_path / "curve2.csv"
        flags = manifest["flags"]
        argv2 = [
            "simulate", "--M", str(flags["M"][0]), "--N", str(flags["N"][0]),
            "--scheme", flags["scheme"],
            "--snr", "40:10:60", "--trials", str(flags["trials"]),
            "--seed", str(manifest["master_seed"]), "--out", str(out2),
        ]
        assert main(argv2) == EXIT_OK
        capsys.readouterr()
        assert out2.read_bytes() == text

    def test_multi_n_and_all_schemes(self, tmp_path, capsys):
        out = tmp_path / "multi.csv"
        code, stdout, err = run_cli(
            capsys, "simulate", "--M", "5", "--N", "7..8", "--scheme", "all",
            "--snr", "50:10:60", "--trials", "2", "--seed", "1", "--out", str(out),
        )
        assert code == EXIT_OK
        lines = out.read_text().splitlines()[1:]
        schemes = {tuple(l.split(",")[:3]) for l in lines}
        # reduced is infeasible at both N=7 and N=8 for M=5 and gets skipped.
        assert ("sajic", "5", "7") in schemes
        assert ("timeshare", "5", "8") in schemes
        assert not any(s[0] == "reduced" for s in schemes)
        assert "skipping reduced" in err

    def test_explicit_infeasible_scheme_fails(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        code, _, err = run_cli(
            capsys, "simulate", "--M", "5", "--N", "8", "--scheme", "reduced",
            "--snr", "40:10:60", "--trials", "2", "--out", str(out),
        )
        assert code == EXIT_INFEASIBLE
        assert not out.exists()


class TestSeedFallback:
    def test_env_seed_used(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("XRELAY_SEED", "123")
        out = tmp_path / "a.csv"
        main(["simulate", "--M", "3", "--N", "4", "--scheme", "sajic",
              "--snr", "40:10:50", "--trials", "2", "--out", str(out)])
        capsys.readouterr()
        manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        assert manifest["master_seed"] == 123


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--N", "4"])
    assert exc.value.code == 2


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "xrelay.cli", "analyze", "--M", "3", "--N", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "timeshare" in proc.stdout
