from __future__ import annotations

import json
import math

import pytest

from cheeger.cli import main
from cheeger.fixtures import fixture_path

SQUARE = str(fixture_path("square"))
HEART = str(fixture_path("heart"))
K5 = str(fixture_path("k5"))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_square(capsys):
    code, out, _ = run(capsys, "solve", "--input", SQUARE)
    assert code == 0
    report = json.loads(out)
    assert report["h"] == pytest.approx(2.0 + math.sqrt(math.pi), abs=1e-8)
    assert report["method"] == "convex-exact"
    assert report["neck_check"]["verdict"] == "pass"


def test_solve_heart_exit_2(capsys):
    code, out, err = run(capsys, "solve", "--input", HEART, "--resolution", "256")
    assert code == 2
    assert "neck" in err.lower()
    assert "radius" in err.lower()


def test_solve_malformed_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nothing": true}')
    code, _, err = run(capsys, "solve", "--input", str(bad))
    assert code == 1
    assert err
    missing = tmp_path / "nope.json"
    code, _, _ = run(capsys, "solve", "--input", str(missing))
    assert code == 1


def test_usage_error_is_exit_1(capsys):
    code, _, _ = run(capsys, "solve")  # missing --input
    assert code == 1


def test_koch_n2(capsys):
    code, out, _ = run(capsys, "koch", "--n", "2")
    assert code == 0
    sol = json.loads(out)
    assert sol["h"] == pytest.approx(1.8912688715, abs=1e-9)


def test_koch_n5(capsys):
    code, out, _ = run(capsys, "koch", "--n", "5")
    assert code == 0
    sol = json.loads(out)
    assert sol["r"] == pytest.approx(0.528751827, abs=1e-9)
    assert sol["tail_bound"] <= 2.71e-6


def test_koch_cap_exit_1(capsys):
    code, _, err = run(capsys, "koch", "--n", "13")
    assert code == 1
    assert "step" in err


def test_koch_table_with_figure(capsys, tmp_path):
    fig = tmp_path / "convergence.png"
    code, out, err = run(capsys, "koch", "--n", "6", "--table", "--fig", str(fig))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,x,r,h,tail_bound,h_lo,h_hi"
    assert len(lines) == 7
    assert fig.exists() and fig.stat().st_size > 1000


def test_necks_k5(capsys):
    code, out, _ = run(capsys, "necks", "--input", K5, "--resolution", "256",
                       "--trusted-input")
    assert code == 0
    result = json.loads(out)
    assert result["verdict"] == "pass"
    assert len(result["radii"]) == 33


def test_necks_heart_exit_2(capsys):
    code, out, _ = run(capsys, "necks", "--input", HEART, "--resolution", "256")
    assert code == 2
    result = json.loads(out)
    assert result["verdict"] == "fail"
    counts = result["component_counts"]
    idx = result["radii"].index(result["failing_radius"])
    assert counts[0][idx] == 2 and counts[1][idx] == 2


def test_render_deterministic(capsys, tmp_path):
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    assert run(capsys, "render", "--input", SQUARE, "--out", str(out1))[0] == 0
    assert run(capsys, "render", "--input", SQUARE, "--out", str(out2))[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    for layer in ('id="domain"', 'id="retract"', 'id="cheeger-set"'):
        assert layer in text


def test_solve_json_deterministic(capsys):
    out1 = run(capsys, "solve", "--input", SQUARE)[1]
    out2 = run(capsys, "solve", "--input", SQUARE)[1]
    assert out1 == out2


def test_unsafe_skip_neck_check(capsys):
    code, out, _ = run(capsys, "solve", "--input", HEART, "--resolution", "256",
                       "--unsafe-skip-neck-check")
    assert code == 0
    report = json.loads(out)
    assert report["neck_check"]["verdict"] == "skipped"


def test_threads_env_accepted(capsys, monkeypatch):
    monkeypatch.setenv("CHEEGER_THREADS", "2")
    code, out, _ = run(capsys, "solve", "--input", SQUARE)
    assert code == 0
    assert json.loads(out)["config"]["threads"] == 2
