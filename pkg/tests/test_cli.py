import csv
import io
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from wgqed import ConfigError
from wgqed.cli import (
    EXIT_INVALID,
    EXIT_NUMERICAL,
    EXIT_OK,
    ResultTable,
    SCHEMAS,
    emit_plot_data,
    main,
    parse_config,
    run_command,
)

PAIR = """\
units: {rate: Gamma0, length: lambda}
waveguide: {wavelength: 1.0}
emitters:
  - {z: 0.0, gamma_wg: 1.0}
  - {z: %(d)s, gamma_wg: 1.0}
grid: {min: -2, max: 2, points: 2001}
"""

LOSSY_CHAIN = """\
units: {rate: gamma0, length: lambda}
emitters:
  - {z: 0.0, gamma_wg: 5.0, gamma_free: 1.0}
  - {z: 0.05, gamma_wg: 5.0, gamma_free: 1.0}
  - {z: 0.10, gamma_wg: 5.0, gamma_free: 1.0}
"""

SENSE = """\
units: {rate: gamma0, length: lambda}
emitters:
  - {z: 0.0, gamma_wg: 10.0, gamma_free: 1.0}
  - {z: 0.01, gamma_wg: 10.0, gamma_free: 1.0}
sensing:
  d: 0.01
  gamma_wg: 10.0
  gamma_free: 1.0
  shifts: [92.0, 1.0]
"""


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def write(tmp_path, text, name="scenario.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


# ---------------------------------------------------------------- config

def test_parse_and_round_trip():
    cfg = parse_config(LOSSY_CHAIN)
    assert len(cfg.emitters) == 3 and cfg.rate_unit == "gamma0"
    again = parse_config(cfg.to_text())
    assert again.to_dict() == cfg.to_dict()
    assert parse_config(again.to_text()).to_text() == again.to_text()


def test_units_are_mandatory():
    with pytest.raises(ConfigError, match="units.rate"):
        parse_config("emitters:\n  - {z: 0, gamma_wg: 1}\n")


@pytest.mark.parametrize("text, field, line", [
    ("units: {rate: gamma0, length: lambda}\nemitters: []\n", "emitters", 2),
    ("units: {rate: gamma0, length: lambda}\nemitters:\n  - {z: 0, gamma_wg: -1}\n",
     "emitters[0].gamma_wg", 3),
    ("units: {rate: gamma0, length: lambda}\nemitters:\n  - {z: 0, gamma_wg: 1}\n"
     "grid:\n  min: 0\n  max: 1\n  points: 1\n", "grid.points", 7),
    ("units: {rate: gamma0, length: lambda}\nemitters:\n  - {z: 0, gamma_wg: 1}\n"
     "  - {z: 0, gamma_wg: 1}\n", "emitters", 2),
    ("units: {rate: gamma0, length: lambda}\nwaveguide:\n  wavelength: abc\n"
     "emitters:\n  - {z: 0, gamma_wg: 1}\n", "waveguide.wavelength", 3),
])
def test_validation_names_field_and_line(text, field, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_malformed_yaml():
    with pytest.raises(ConfigError) as exc:
        parse_config("units: [gamma0\nemitters: 3\n")
    assert exc.value.line is not None


# ---------------------------------------------------------------- commands

def test_spectrum_dip_worked_value():
    table = run_command("spectrum", parse_config(PAIR % {"d": 0.05}))
    assert table.columns == SCHEMAS["spectrum"]
    R = np.array([r[3] for r in table.rows])
    grid = np.array([r[0] for r in table.rows])
    assert grid[np.argmin(R)] == pytest.approx(-0.162, abs=0.002)


def test_count_three_lossy_emitters():
    table = run_command("count", parse_config(LOSSY_CHAIN))
    assert table.rows == [("lossy", 3, table.rows[0][2], 3)]


def test_features_table_sorted():
    table = run_command("features", parse_config(PAIR % {"d": 0.05}))
    centers = [r[1] for r in table.rows]
    assert centers == sorted(centers)
    assert any(r[0] == "dip" for r in table.rows)


def test_invert_lossless_and_lossy():
    cfg = parse_config(PAIR % {"d": 0.05} + "inversion: {method: lossless}\n")
    (row,) = run_command("invert", cfg).rows
    assert row[2] == pytest.approx(0.05, rel=1e-5) and row[3] == 0
    cfg = parse_config(
        "units: {rate: gamma0, length: lambda}\nemitters:\n"
        "  - {z: 0.0, gamma_wg: 2.0, gamma_free: 1.0}\n"
        "  - {z: 0.05, gamma_wg: 2.0, gamma_free: 1.0}\n"
        "inversion: {method: lossy}\n"
    )
    (row,) = run_command("invert", cfg).rows
    assert row[2] == pytest.approx(0.0502, abs=5e-4)


def test_invert_branch_and_per_emitter():
    text = (
        "units: {rate: Gamma0, length: lambda}\nemitters:\n"
        "  - {z: 0.0, gamma_wg: 1.0}\n  - {z: 0.55, gamma_wg: 1.0}\n"
        "gradient: 2.0\ninversion: {method: branch}\n"
    )
    (row,) = run_command("invert", parse_config(text)).rows
    assert row[3] == 1 and row[2] == pytest.approx(0.55)
    text = (
        "units: {rate: Gamma0, length: lambda}\nemitters:\n"
        "  - {z: 0.0, gamma_wg: 1.0, gamma_free: 0.5}\n"
        "  - {z: 2.1, gamma_wg: 1.5, gamma_free: 0.9}\n"
        "gradient: 6.0\ninversion: {method: per-emitter}\n"
    )
    t = run_command("invert", parse_config(text))
    assert [r[1] for r in t.rows] == [1, 2]
    assert t.rows[0][4] == pytest.approx(0.97, abs=0.05)


def test_sense_rows():
    t = run_command("sense", parse_config(SENSE))
    assert t.columns == SCHEMAS["sense"]
    first, second = t.rows
    assert first[1] == pytest.approx(-1e-4, rel=0.03)
    assert first[4] is True and second[4] is False


# ---------------------------------------------------------------- output

def test_nine_significant_digits():
    t = ResultTable("spectrum", ("a", "b"), [(1 / 3, 2)], "abc")
    assert t.to_text().splitlines()[-1] == "0.333333333,2"


def test_emit_plot_data_empty_table(tmp_path):
    path = emit_plot_data(ResultTable("sense", SCHEMAS["sense"], [], "h"), tmp_path / "e.csv")
    lines = path.read_text().splitlines()
    assert [l for l in lines if not l.startswith("#")] == [",".join(SCHEMAS["sense"])]
    assert "# config-sha256: h" in lines


def test_emit_plot_data_bad_path(tmp_path):
    with pytest.raises(OSError, match="missing"):
        emit_plot_data(ResultTable("x", ("a",)), tmp_path / "missing" / "f.csv")


@pytest.mark.parametrize("d, dip", [(0.05, -0.162), (0.10, -0.363), (0.15, -0.688)])
def test_dip_figure_files(tmp_path, d, dip):
    cfg = parse_config(PAIR % {"d": d})
    path = emit_plot_data(run_command("spectrum", cfg), tmp_path / f"dip_{d}.csv")
    data = rows(path.read_text())
    R = np.array([float(r["R"]) for r in data])
    grid = np.array([float(r["detuning"]) for r in data])
    assert grid[np.argmin(R)] == pytest.approx(dip, abs=0.002)


def test_sensing_figure_shift():
    base = "units: {rate: gamma0, length: lambda}\nemitters:\n  - {z: 0.0, gamma_wg: 10, gamma_free: 1}\n"
    centers = []
    for d in (0.01, 0.01 - 1e-4):
        cfg = parse_config(base + f"  - {{z: {d}, gamma_wg: 10, gamma_free: 1}}\n")
        t = run_command("features", cfg)
        # the superradiant line is the tall peak above resonance
        peaks = [r for r in t.rows if r[0] == "peak" and r[1] > 0]
        centers.append(max(peaks, key=lambda r: r[2])[1])
    assert centers[1] - centers[0] == pytest.approx(92.0, abs=3.0)


# ---------------------------------------------------------------- main

def test_main_success_and_determinism(tmp_path, capsys):
    p = write(tmp_path, PAIR % {"d": 0.05})
    out = tmp_path / "o.csv"
    assert main(["spectrum", "--config", str(p), "--out", str(out)]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["spectrum", "--config", str(p)]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert out.read_text() == first
    assert first.startswith("# command: spectrum\n")


def test_main_grid_points_override(tmp_path, capsys):
    p = write(tmp_path, PAIR % {"d": 0.05})
    assert main(["spectrum", "--config", str(p), "--grid-points", "11", "--seed", "7"]) == EXIT_OK
    assert len(rows(capsys.readouterr().out)) == 11


@pytest.mark.parametrize("text, args", [
    ("units: {rate: gamma0, length: lambda}\nemitters: []\n", []),
    (PAIR % {"d": 0.05}, ["--grid-points", "1"]),
    (PAIR % {"d": 0.05} + "inversion: {method: magic}\n", []),
    ("units: {rate: gamma0, length: lambda}\nemitters:\n  - {z: 0, gamma_wg: 1}\n", ["--nope"]),
])
def test_main_invalid_exit_code(tmp_path, capsys, text, args):
    p = write(tmp_path, text)
    cmd = "invert" if "inversion" in text else "spectrum"
    assert main([cmd, "--config", str(p)] + args) == EXIT_INVALID
    assert capsys.readouterr().out == ""


def test_main_missing_config(tmp_path, capsys):
    assert main(["spectrum", "--config", str(tmp_path / "none.yaml")]) == EXIT_INVALID
    assert "cannot read" in capsys.readouterr().err


def test_main_numerical_exit_code(tmp_path, capsys):
    # the half-wavelength lossless pair is singular on resonance
    text = textwrap.dedent("""\
        units: {rate: Gamma0, length: lambda}
        emitters:
          - {z: 0.0, gamma_wg: 1.0}
          - {z: 0.5, gamma_wg: 1.0}
        grid: {min: -1, max: 1, points: 3}
        """)
    p = write(tmp_path, text)
    assert main(["spectrum", "--config", str(p)]) == EXIT_NUMERICAL
    err = capsys.readouterr().err
    assert "numerical error" in err


def test_console_entry_point(tmp_path):
    p = write(tmp_path, LOSSY_CHAIN)
    proc = subprocess.run(
        [sys.executable, "-m", "wgqed", "count", "--config", str(p)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert rows(proc.stdout)[0]["emitters"] == "3"
