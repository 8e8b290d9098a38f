import io
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from steklov_neumann.cli import EXIT_ASSERT, EXIT_DIAG, EXIT_OK, EXIT_PARSE, main, strictly_decreasing
from steklov_neumann.report import ResultTable, format_value, read_csv, svg_line_plot

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
COMMAND = {"solve_concentric": "solve", "solve_disk_steklov": "solve", "eccentricity": "sweep",
           "hole_shrink": "sweep", "hole_shrink_disk": "sweep"}


def _run(tmp_path, command, text, name="case.ini"):
    cfg = tmp_path / name
    cfg.write_text(text)
    out = tmp_path / "out"
    return main([command, "--config", str(cfg), "--out", str(out)]), out


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.ini")), ids=lambda p: p.stem)
def test_shipped_configs_pass(path, tmp_path, capsys):
    command = COMMAND.get(path.stem, path.stem)
    code = main([command, "--config", str(path), "--out", str(tmp_path)])
    text = capsys.readouterr().out
    assert code == EXIT_OK, text
    assert "FAIL" not in text and "BREACH" not in text
    (csv_path,) = tmp_path.glob("*.csv")
    header, rows = read_csv(csv_path)
    assert rows and all(len(r) == len(header) for r in rows)


def test_exact_csv_values(tmp_path, capsys):
    code, out = _run(tmp_path, "exact", "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n[exact]\nmax_l = 3\n")
    assert code == EXIT_OK
    header, rows = read_csv(out / "exact.csv")
    assert header == ("l", "mu", "multiplicity")
    assert rows[0] == (1.0, 0.3, 2.0)
    assert (out / "exact.svg").exists()


def test_assertion_failure_exit(tmp_path, capsys):
    code, out = _run(tmp_path, "dumbbell", "[grid]\nvalues = 0.1\n[dumbbell]\nnodes = 4\n")
    assert code == EXIT_ASSERT
    assert "FAIL quotient" in capsys.readouterr().out
    assert (out / "dumbbell.csv").exists()


def test_assertions_disabled(tmp_path, capsys):
    code, _ = _run(tmp_path, "dumbbell", "[grid]\nvalues = 0.1\n[dumbbell]\nnodes = 4\n[assertions]\nenabled = no\n")
    assert code == EXIT_OK
    assert "assertions passed: n/a" in capsys.readouterr().out


def test_breach_exit_writes_csv(tmp_path, capsys):
    text = "[domain]\nkind = star\nR1 = 0.1\nrho_coefficients = 1, 0, 0, 0.3, 0\n[solver]\nN = 8\n"
    code, out = _run(tmp_path, "solve", text)
    assert code == EXIT_DIAG
    assert "BREACH" in capsys.readouterr().out
    assert (out / "solve.csv").exists()


def test_parse_error_writes_nothing(tmp_path, capsys):
    code, out = _run(tmp_path, "solve", "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n[solver]\nN = x\n")
    assert code == EXIT_PARSE
    assert "config error" in capsys.readouterr().err
    assert not out.exists() or not any(out.iterdir())


def test_unused_section_rejected(tmp_path, capsys):
    code, _ = _run(tmp_path, "exact", "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n[solver]\nN = 24\n")
    assert code == EXIT_PARSE


def test_reruns_are_byte_identical(tmp_path, capsys):
    cfg = CONFIGS / "eccentricity.ini"
    outputs = []
    for i, threads in enumerate(("1", "1", "3")):
        out = tmp_path / f"run{i}"
        env = dict(os.environ, STEKLOV_NEUMANN_THREADS=threads)
        subprocess.run([sys.executable, "-m", "steklov_neumann", "sweep", "--config", str(cfg), "--out", str(out)],
                       env=env, check=True, capture_output=True)
        outputs.append(((out / "sweep.csv").read_bytes(), (out / "sweep.svg").read_bytes()))
    assert outputs[0] == outputs[1] == outputs[2]
    assert b"\r" not in outputs[0][0]


def test_output_name(tmp_path, capsys):
    code, out = _run(tmp_path, "exact", "[domain]\nkind = concentric\nR1 = 1\nR2 = 2\n[output]\nname = run7\nplot = no\n")
    assert code == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["run7.csv"]


# -- report helpers -----------------------------------------------------------------------

@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(format_value(x)) == x


def test_format_value_kinds():
    assert format_value(True) == "1" and format_value(np.int64(4)) == "4" and format_value("measure") == "measure"
    assert format_value(0.1) == "0.10000000000000001"
    with pytest.raises(ValueError):
        format_value(math.nan)


def test_table_rejects_mismatched_row():
    t = ResultTable(("a", "b"))
    t.add(a=1, b=2.5)
    with pytest.raises(KeyError):
        t.add(a=1)
    assert t.to_csv() == "a,b\n1,2.5\n"


def test_svg_is_deterministic():
    x = np.linspace(0, 1, 5)
    a = svg_line_plot(x, {"y": x**2}, "x", "y", title="t")
    assert a == svg_line_plot(x, {"y": x**2}, "x", "y", title="t")
    assert a.startswith("<svg") or a.startswith("<?xml")


def test_strictly_decreasing():
    assert strictly_decreasing([3, 2, 1])
    assert not strictly_decreasing([3, 3, 1])
    assert strictly_decreasing([1e-3, 1e-11, 1e-12], floor=1e-10)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "steklov_neumann", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "sweep" in r.stdout
