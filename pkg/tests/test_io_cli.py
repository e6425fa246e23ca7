import json

import numpy as np
import pytest

from hilfer_fde.cli import main
from hilfer_fde.forcing import Exponential, Power, Sinusoid, Tabulated
from hilfer_fde.fracops import SampledFunction
from hilfer_fde.io import (ParseError, format_problem, parse_problem, read_csv, read_problem,
                           samples_to_csv)
from hilfer_fde.problem import FdeProblem, FractionalTerm

T = FractionalTerm


def test_parse_uses_left_hand_side_coefficients(problems_dir):
    p = read_problem(problems_dir / "caputo_relaxation.fde")
    assert p.leading == T(0.6, 1.0, 1.0)
    # "+ y" on the left is a_1 = -1 in D y - a_1 y = g
    assert p.lower == (T(0.0, 0.0, -1.0),)
    assert p.initial_values == {(0, 0): 1.0}


@pytest.mark.parametrize("forcing", [Power(2.0, 0.5), Exponential(1.5, -2.0), Sinusoid(0.5, 3.0, 0.25),
                                     Tabulated(SampledFunction(0.25, [0.0, 1.0, 0.5, 0.25, 0.0]), 0)])
def test_format_parse_roundtrip(forcing):
    p = FdeProblem(T(1.4, 0.3, 2.0), (T(0.7, 1.0, 0.5), T(0.0, 0.0, -1.0)), {(0, 0): 0.0, (0, 1): 1.25},
                   forcing, 1.0)
    q = parse_problem(format_problem(p))
    assert q.leading == p.leading and q.lower == p.lower
    assert q.initial_values == p.initial_values and q.interval_end == p.interval_end
    assert q.forcing.to_dict() == p.forcing.to_dict()


@pytest.mark.parametrize("text,key,line", [
    ("[equation]\nterm = 0.5, 0\n", "term", 2),
    ("[equation]\nterm = 0.5, 0, x\n", "term", 2),
    ("[equation]\nterm = 0.5, 0, 1\n[initial]\niv.0 = 1\n", "iv.0", 4),
    ("[equation]\nterm = 0.5, 0, 1\n[forcing]\nkind = cubic\n", "kind", 4),
    ("[equation]\nterm = 0.5, 0, 1\n[forcing]\nkind = power\nrate = 2\n", "rate", 5),
    ("[equation]\nterm = 0.5, 0, 1\n[domain]\nstart = 0\n", "start", 4),
    ("[equation]\nterm = 0.5, 2, 1\n", "term", 2),
])
def test_parse_errors_name_key_and_line(text, key, line):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert info.value.key == key and info.value.line == line
    assert f"'{key}'" in str(info.value) and f"line {line}" in str(info.value)


def test_parse_error_unknown_section():
    with pytest.raises(ParseError, match="line 1"):
        parse_problem("[solver]\n")


def test_parse_requires_terms():
    with pytest.raises(ParseError):
        parse_problem("[domain]\nend = 2\n")


def test_csv_roundtrip(tmp_path):
    s = SampledFunction(0.1, [np.inf, 1 / 3, 2.0, np.pi])
    path = tmp_path / "y.csv"
    path.write_text(samples_to_csv(s))
    back = read_csv(path)
    assert back.step == pytest.approx(0.1)
    assert np.array_equal(back.values, s.values)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_solve_unsolvable_writes_nothing(capsys, problems_dir, tmp_path):
    out = tmp_path / "y.csv"
    code, stdout, stderr = run(capsys, "solve", problems_dir / "intro_unsolvable.fde", "--out", out)
    assert code == 2
    assert not out.exists()
    assert "iv.1.0 = 0.5" in stderr
    report = json.loads(stdout)
    assert [(e["term"], e["k"]) for e in report["mandatory_zero"] if e["value"] != 0] == [(1, 0)]


def test_cli_solve_zero_problem(capsys, problems_dir, tmp_path):
    out = tmp_path / "y.csv"
    code, _, _ = run(capsys, "solve", problems_dir / "zero.fde", "--grid", 64, "--out", out)
    assert code == 0
    assert np.all(read_csv(out).values == 0)


def test_cli_solve_deterministic(capsys, problems_dir, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        run(capsys, "solve", problems_dir / "composite_relaxation.fde", "--grid", 128, "--out", path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_cli_oracle(capsys, problems_dir):
    code, stdout, _ = run(capsys, "oracle", problems_dir / "zero.fde", "--grid", 32)
    assert code == 0
    lines = stdout.strip().splitlines()
    assert "x,y" in lines
    assert all(line.endswith(",0") for line in lines[lines.index("x,y") + 1:])


def test_cli_oracle_refuses_unsolvable(capsys, problems_dir):
    code, _, _ = run(capsys, "oracle", problems_dir / "intro_unsolvable.fde")
    assert code == 2


def test_cli_check_zero(capsys, problems_dir):
    code, stdout, _ = run(capsys, "check", problems_dir / "zero.fde", "--grid", 128)
    assert code == 0
    assert json.loads(stdout) == {"max_residual": 0.0, "oracle_max_rel": 0.0}


def test_cli_check_coarse_grid(capsys, problems_dir):
    code, _, err = run(capsys, "check", problems_dir / "caputo_relaxation.fde", "--grid", 32)
    assert code != 0
    assert "grid" in err


def test_cli_ml(capsys):
    code, stdout, _ = run(capsys, "ml", "--weights", "1,1", "--b", 1, "--z", "1,2")
    assert code == 0
    assert json.loads(stdout)["value"] == pytest.approx(np.exp(3), abs=1e-9)
    code, stdout, _ = run(capsys, "ml", "--weights", "0.5", "--b", 2.5, "--z", "0")
    assert json.loads(stdout)["value"] == pytest.approx(1 / 1.329340388179137, rel=1e-15)


def test_cli_ml_dimension_mismatch(capsys):
    code, _, err = run(capsys, "ml", "--weights", "1,1", "--b", 1, "--z", "1")
    assert code == 1 and "arguments" in err


def test_cli_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.fde"
    bad.write_text("[equation]\nterm = 1, 1\n")
    code, _, err = run(capsys, "solve", bad)
    assert code == 1 and "line 2" in err
    code, _, _ = run(capsys, "solve", tmp_path / "missing.fde")
    assert code == 1


def test_cli_end_override(capsys, problems_dir, tmp_path):
    out = tmp_path / "y.csv"
    run(capsys, "solve", problems_dir / "caputo_relaxation.fde", "--grid", 64, "--end", 2.0, "--out", out)
    assert read_csv(out).x[-1] == pytest.approx(2.0)
