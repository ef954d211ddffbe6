import subprocess
import sys

import numpy as np
import pytest

from spinlattice.cli import bundled_scheme, main, parse_step


def test_parse_step():
    assert parse_step("2^-4") == 0.0625
    assert parse_step("1/64") == 1 / 64
    assert parse_step("0.01") == 0.01


def test_check_tableau_exit_codes(tmp_path, capsys):
    assert main(["check-tableau", str(bundled_scheme("production.scheme"))]) == 0
    assert "symplectic" in capsys.readouterr().out
    assert main(["check-tableau", "euler.scheme"]) == 1
    out = capsys.readouterr().out
    assert "condition (i) symplecticity of each tableau: FAIL" in out
    bad = tmp_path / "bad.scheme"
    bad.write_text("component x\na 1/2\nb 1\nwhat 3\n")
    assert main(["check-tableau", str(bad)]) == 2
    assert "line 4" in capsys.readouterr().err


def test_check_tableau_stage_mismatch(tmp_path, capsys):
    f = tmp_path / "mix.scheme"
    f.write_text("component s\na 1/2\nb 1\ncomponent l\na 0 0\na 1/2 1/2\nb 1/2 1/2\n"
                 "ahat 1/2 0\nahat 1/2 0\nbhat 1/2 1/2\n")
    assert main(["check-tableau", str(f)]) == 1
    assert "stage" in capsys.readouterr().err


def test_simulate_command(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 6\nL = 6\nh = 0.01\nt_end = 0.1\nstride = 2\noutput = out.dat\n")
    assert main(["simulate", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "max |H(t) - H(0)|" in out and "max fixed-point iterations" in out
    text = (tmp_path / "out.dat").read_text().splitlines()
    assert text[0] == "T Hmag Hpot Hkin"
    assert len(text) == 1 + 6
    final = np.loadtxt(tmp_path / "out.final.dat")
    assert final.shape == (6, 5)
    first = (tmp_path / "out.dat").read_bytes()
    assert main(["simulate", str(cfg)]) == 0
    assert (tmp_path / "out.dat").read_bytes() == first


def test_converge_command(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 6\nL = 6\nt_end = 0.25\n")
    out = tmp_path / "err.dat"
    assert main(["converge", str(cfg), "--h", "2^-3,2^-4,2^-5", "--ref", "2^-7", "-o", str(out)]) == 0
    assert "log-log slope" in capsys.readouterr().out
    lines = out.read_text().splitlines()
    assert lines[0] == "H Err"
    assert len(lines) == 4


def test_bad_config_and_usage(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 6\nnonsense = 1\n")
    assert main(["simulate", str(cfg)]) == 2
    assert main(["simulate", str(tmp_path / "missing.cfg")]) == 2
    assert main([]) == 2
    assert main(["converge", str(cfg), "--h", "x", "--ref", "1"]) == 2


def test_solver_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 6\nL = 6\nt_end = 0.1\nmax_iterations = 1\nfp_tolerance = 1e-15\n")
    assert main(["simulate", str(cfg)]) == 1
    assert "step 1" in capsys.readouterr().err


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "spinlattice.cli", "check-tableau", "production.scheme"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "symplectic" in proc.stdout
