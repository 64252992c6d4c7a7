import subprocess
import sys
from pathlib import Path

import pytest

from hybridnet.cli import EXIT_IO, EXIT_OK, EXIT_VALIDATION, main
from hybridnet.sweep import CSV_HEADER

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def write(tmp_path, text, name="s.scn"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_validate_only_defaults(capsys):
    assert main(["--validate-only"]) == EXIT_OK
    err = capsys.readouterr().err
    assert "ok V-band" in err
    assert "waived E-band" in err


def test_regulatory_violation_exits_1(tmp_path, capsys):
    path = write(tmp_path, "radio.v.tx_power_dbm = 30 dBm\n")
    assert main(["--scenario", path, "--validate-only"]) == EXIT_VALIDATION
    err = capsys.readouterr().err
    assert "line 1, key 'radio.v.tx_power_dbm': max transmit power exceeded: 30 dBm > 27 dBm" in err


def test_parse_error_exits_2(tmp_path, capsys):
    path = write(tmp_path, "trials = 3\nbogus.key = 1\n")
    assert main(["--scenario", path]) == EXIT_IO
    assert "line 2" in capsys.readouterr().err


def test_missing_scenario_exits_2(tmp_path):
    assert main(["--scenario", str(tmp_path / "nope.scn")]) == EXIT_IO


def test_unwritable_output_exits_2(tmp_path):
    args = ["--scenario", str(SCENARIOS / "isolated.scn"), "--trials", "1", "--mode", "v",
            "--out", str(tmp_path / "no" / "dir.csv")]
    assert main(args) == EXIT_IO


def test_sweep_to_file(tmp_path):
    out = tmp_path / "o.csv"
    path = write(tmp_path, "sweep.distances_m = 50, 100\n")
    assert main(["--scenario", path, "--trials", "2", "--seed", "5", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 3


def test_density_sweep_single_mode(tmp_path):
    out = tmp_path / "d.csv"
    path = write(tmp_path, "sweep.interferer_counts = 0, 8\n")
    assert main(["--scenario", path, "--sweep", "density", "--mode", "hybrid",
                 "--trials", "2", "--out", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["Hybrid", "Hybrid"]


def test_console_entry_point_writes_stdout(tmp_path):
    path = write(tmp_path, "sweep.distances_m = 100\n")
    proc = subprocess.run(
        [sys.executable, "-m", "hybridnet", "--scenario", path, "--trials", "1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == CSV_HEADER


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_cli_output_independent_of_jobs(tmp_path, jobs):
    path = write(tmp_path, "sweep.distances_m = 30, 300\n")
    ref, out = tmp_path / "ref.csv", tmp_path / f"j{jobs}.csv"
    assert main(["--scenario", path, "--trials", "3", "--out", str(ref)]) == EXIT_OK
    assert main(["--scenario", path, "--trials", "3", "--jobs", jobs, "--out", str(out)]) == EXIT_OK
    assert ref.read_bytes() == out.read_bytes()
