import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from conftest import DATA, SEVEN_AGENT_A
from projcons import GraphFormatError, parse_graph, read_graph
from projcons.cli import main
from projcons.graphio import (
    format_scalar,
    matrix_from_json,
    matrix_to_json,
    parse_vector,
)

SEVEN = str(DATA / "seven_agents.txt")
CYCLE = str(DATA / "two_cycle.json")


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_edge_list_matches_matrix():
    g = read_graph(SEVEN)
    assert (g.to_matrix() == np.array(SEVEN_AGENT_A)).all()


def test_json_and_edge_list_agree():
    doc = {"n": 3, "edges": [[1, 2, 1.5], [2, 3, "2/3"]]}
    g1 = parse_graph(json.dumps(doc))
    g2 = parse_graph("n 3\n1 2 3/2\n2 3 2/3  # comment\n")
    assert g1.arcs == g2.arcs
    assert g1.arcs[0][2] == Fraction(3, 2)


def test_trailing_isolated_vertex_needs_n_line():
    assert parse_graph("1 2 1\n").n == 2
    assert parse_graph("n 4\n1 2 1\n").n == 4


@pytest.mark.parametrize("text, lineno", [
    ("1 2 1\n1 2\n", 2),
    ("1 1 1\n", 1),
    ("1 2 1\n# c\n1 2 5\n", 3),
    ("1 2 -1\n", 1),
    ("0 2 1\n", 1),
    ("1 2 x\n", 1),
    ("n 2\n1 3 1\n", 2),
])
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(GraphFormatError) as exc:
        parse_graph(text)
    assert exc.value.lineno == lineno
    assert str(exc.value).startswith(f"line {lineno}:")


def test_json_errors():
    with pytest.raises(GraphFormatError):
        parse_graph('{"n": 2}')
    with pytest.raises(GraphFormatError):
        parse_graph('{"edges": [[1, 2]]}')
    with pytest.raises(GraphFormatError):
        parse_graph('{"edges": [[1, 2, 1]')


def test_matrix_json_round_trip():
    M = np.array([[Fraction(1, 3), Fraction(-2)], [Fraction(0), Fraction(5, 7)]], dtype=object)
    assert (matrix_from_json(matrix_to_json(M)) == M).all()
    F = np.array([[0.1, 2.5e-7], [1.0, -3.0]])
    np.testing.assert_array_equal(matrix_from_json(json.loads(json.dumps(matrix_to_json(F)))), F)


def test_format_scalar():
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(1 / 3) == 0.333333333333
    assert format_scalar(-0.0) == 0.0
    assert format_scalar(complex(1, -2)) == [1.0, -2.0]


def test_parse_vector():
    assert list(parse_vector("1, 1/2,0.25")) == [1, Fraction(1, 2), Fraction(1, 4)]
    with pytest.raises(ValueError):
        parse_vector("1,2", 3)


def test_analyze_json(capsys):
    code, out, _ = run(["analyze", SEVEN, "--json", "--matrices", "S,L"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["d"] == 2 and rep["tau_max"] == "1/7"
    assert rep["final_classes"] == [[1, 2, 3], [4, 5]]
    assert rep["has_spanning_in_tree"] is False
    assert rep["matrices"]["J"]["rows"][0] == ["2/5", "2/5", "1/5", "0", "0", "0", "0"]
    assert rep["matrices"]["S"]["rows"][0][0] == "9/11"
    assert [z[0] for z in rep["eigenvalues_L"][:3]] == [0.0, 0.0, 1.83772233983]


def test_analyze_is_deterministic(capsys):
    a = run(["analyze", SEVEN, "--x0", "1,2,3,4,5,6,7"], capsys)
    b = run(["analyze", SEVEN, "--x0", "1,2,3,4,5,6,7"], capsys)
    assert a == b


def test_project(capsys):
    code, out, _ = run(["project", SEVEN, "--x0", "1,2,3,4,5,6,7", "--json", "--chosen", "2,5"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["quasi_consensus"] == "162/55"
    assert rep["chosen"] == [2, 5]
    assert rep["in_consensus_domain"] is False
    assert rep["limits"]["projected"] == ["162/55"] * 7


def test_float_flag(capsys):
    code, out, _ = run(["project", SEVEN, "--x0", "1,2,3,4,5,6,7", "--json", "--float"], capsys)
    rep = json.loads(out)
    assert rep["backend"] == "float"
    assert rep["quasi_consensus"] == pytest.approx(162 / 55, abs=1e-10)


def test_simulate_csv(tmp_path, capsys):
    path = tmp_path / "trace.csv"
    code, out, _ = run(["simulate", CYCLE, "--protocol", "degroot", "--tau", "max",
                        "--x0", "1,3", "--k-max", "50", "--out", str(path)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["converged"] is False and summary["cesaro_converged"] is True
    assert summary["cesaro_limit"] == [2.0, 2.0] and summary["period"] == 2
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["t", "x1", "x2", "cesaro_x1", "cesaro_x2"]
    assert len(rows) == 52


def test_simulate_to_stdout_puts_summary_on_stderr(capsys):
    code, out, err = run(["simulate", SEVEN, "--protocol", "projected", "--x0", "1,2,3,4,5,6,7"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "t,x1,x2,x3,x4,x5,x6,x7"
    summary = json.loads(err)
    assert summary["consensus"] is True
    assert summary["limit"][0] == pytest.approx(162 / 55, abs=1e-9)


def test_verify_passes(capsys):
    code, out, _ = run(["verify", CYCLE, "--tau", "1/2"], capsys)
    assert code == 0
    assert "FAIL" not in out


@pytest.mark.parametrize("argv", [
    ["analyze"],
    ["nonsense", SEVEN],
    ["simulate", SEVEN, "--protocol", "bogus", "--x0", "1"],
    ["analyze", SEVEN, "--tau", "1"],
    ["analyze", SEVEN, "--tau", "abc"],
    ["project", SEVEN, "--x0", "1,2"],
    ["analyze", "/nonexistent/graph.txt"],
    ["analyze", SEVEN, "--matrices", "Q"],
])
def test_usage_errors_exit_1(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_large_graph_falls_back_to_float(tmp_path, capsys):
    n = 12
    path = tmp_path / "ring.txt"
    path.write_text("".join(f"{i} {i % n + 1} 1\n" for i in range(1, n + 1)))
    code, out, err = run(["analyze", str(path), "--json"], capsys)
    assert code == 0
    assert json.loads(out)["backend"] == "float"
    assert "falling back to float" in err


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "projcons", "analyze", CYCLE],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "tau_max: \"1\"" in res.stdout


def test_verify_failure_exits_2(capsys):
    # spectral gap too small for the fixed 1000 tau horizon
    code, out, _ = run(["verify", str(DATA / "slow_mixing.txt")], capsys)
    assert code == 2
    failed = [line for line in out.splitlines() if line.startswith("FAIL")]
    assert len(failed) == 1 and "1000 tau" in failed[0]
