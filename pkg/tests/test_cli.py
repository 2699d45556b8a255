import json
import math
import re
import subprocess
import sys

import pytest

from ebst.cli import read_points, run, sig
from ebst.topology import InputError


@pytest.fixture
def chain(tmp_path):
    p = tmp_path / "chain.txt"
    p.write_text("# two terminals\n0 0\n3 0\n", encoding="utf-8")
    return str(p)


@pytest.fixture
def triangle(tmp_path):
    p = tmp_path / "tri.txt"
    p.write_text(f"0 0\n2 0\n1 {math.sqrt(3)!r}\n", encoding="utf-8")
    return str(p)


def run_json(capsys, argv):
    code = run(argv)
    return code, json.loads(capsys.readouterr().out)


def test_read_points_skips_comments():
    assert read_points("# x\n\n1 2\n  3.5   -4\n") == [(1.0, 2.0), (3.5, -4.0)]


@pytest.mark.parametrize("text", ["1\n", "1 2 3\n", "a b\n"])
def test_read_points_rejects(text):
    with pytest.raises(InputError):
        read_points(text)


def test_sig():
    assert sig(1.0 / 3.0) == 0.333333333
    assert sig(2 / math.sqrt(3)) == 1.15470054


def test_solve_chain(capsys, chain):
    code, out = run_json(capsys, ["solve", chain, "--k", "1"])
    assert code == 0
    assert out["bottleneck"] == pytest.approx(1.5, abs=1e-6)
    assert out["deviation_note"] == "binary-search optimization"
    assert out["k_used"] == 1 and out["K"] == 2
    assert set(out) >= {"bottleneck", "steiner_points", "edges", "k_used", "K", "deviation_note", "counters"}
    assert all(v >= 0 for v in out["counters"].values())


def test_json_round_trip(capsys, chain):
    _, out = run_json(capsys, ["solve", chain, "--k", "1"])
    pts = [(0.0, 0.0), (3.0, 0.0)] + [tuple(p) for p in out["steiner_points"]]
    longest = max(math.dist(pts[i], pts[j]) for i, j in out["edges"])
    assert longest == pytest.approx(out["bottleneck"], rel=1e-6)
    assert len(out["edges"]) == len(pts) - 1


def test_decide_infeasible(capsys, chain):
    code, out = run_json(capsys, ["decide", chain, "--k", "1", "--lambda", "1.4"])
    assert code == 2 and out["feasible"] is False


def test_decide_feasible(capsys, chain):
    code, out = run_json(capsys, ["decide", chain, "--k", "1", "--lambda", "1.5"])
    assert code == 0 and out["feasible"] is True
    (s,) = out["steiner_points"]
    assert s[0] == pytest.approx(1.5, abs=0.01)


def test_check_triangle(capsys, triangle):
    code, out = run_json(capsys, ["check", triangle, "--k", "1", "--resolution", "0.005"])
    assert code == 0 and out["agree"] is True
    assert out["solver"] == pytest.approx(1.1547, abs=2e-3)
    assert out["oracle"] == pytest.approx(1.1547, abs=1e-2)


def test_oracle_command(capsys, chain):
    code, out = run_json(capsys, ["oracle", chain, "--k", "1", "--resolution", "0.05"])
    assert code == 0 and out["value"] == pytest.approx(1.5, abs=0.05)


def test_random_instance(capsys):
    code, out = run_json(capsys, ["solve", "--random", "4", "--seed", "3", "--k", "1", "--tol", "1e-4"])
    assert code == 0 and out["bottleneck"] > 0


def test_output_file(tmp_path, chain):
    dest = tmp_path / "out.json"
    assert run(["solve", chain, "--k", "1", "-o", str(dest)]) == 0
    assert json.loads(dest.read_text())["bottleneck"] == pytest.approx(1.5, abs=1e-6)


def test_svg_counts(tmp_path, capsys, chain):
    svg = tmp_path / "t.svg"
    rsvg = tmp_path / "r.svg"
    assert run(["solve", chain, "--k", "1", "--svg", str(svg), "--regions-svg", str(rsvg)]) == 0
    out = json.loads(capsys.readouterr().out)
    text = svg.read_text()
    assert len(re.findall(r'class="terminal"', text)) == 2
    assert len(re.findall(r'class="steiner"', text)) == out["k_used"] <= 1
    assert len(re.findall(r"<line ", text)) == len(out["edges"])
    assert "<path" in rsvg.read_text()


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--k", "1", "/nonexistent/file"],
        ["solve"],
        ["decide", "--k", "1"],
        ["solve", "--k", "1", "--lambda-pieces", "5", "--random", "3"],
        ["solve", "--k", "-1", "--random", "3"],
        ["solve", "--k", "1", "--tol", "0", "--random", "3"],
    ],
)
def test_errors_exit_one(argv, capsys):
    assert run(argv) == 1
    assert capsys.readouterr().err


def test_malformed_input(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("0 0\n1 x\n")
    assert run(["solve", str(p), "--k", "1"]) == 1
    assert "line 2" in capsys.readouterr().err


def test_epsilon_is_capped(capsys, caplog, chain):
    code, out = run_json(capsys, ["solve", chain, "--k", "1", "--epsilon", "0.5"])
    assert code == 0 and out["bottleneck"] == pytest.approx(1.5, abs=1e-6)
    assert "capped" in caplog.text


def test_stdin_and_module_entry(chain):
    with open(chain) as fh:
        proc = subprocess.run([sys.executable, "-m", "ebst.cli", "solve", "--k", "0"], stdin=fh, capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["bottleneck"] == 3.0
