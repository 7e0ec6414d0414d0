from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from gcluster.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_verify_all_n4(runner):
    res = runner.invoke(main, ["verify", "all", "--n", "4", "--jobs", "2"])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["passed"] and all(c["status"] == "pass" for c in data["checks"])


def test_verify_text_format(runner):
    res = runner.invoke(main, ["verify", "negative_control", "--format", "text"])
    assert res.exit_code == 0
    assert res.output.startswith("PASS")


@pytest.mark.parametrize("n", ["3", "7"])
def test_out_of_range_n_is_rejected(runner, n):
    res = runner.invoke(main, ["verify", "maps", "--n", n])
    assert res.exit_code == 2
    assert "n" in res.output


def test_n3_message_points_elsewhere(runner):
    res = runner.invoke(main, ["build", "--n", "3"])
    assert "n = 3" in res.output


@pytest.mark.parametrize("fmt,ext", [("json", "json"), ("dot", "dot"), ("text", "txt")])
def test_build_writes_every_quiver(runner, tmp_path, fmt, ext):
    res = runner.invoke(main, ["build", "--n", "5", "--format", fmt, "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(f"{q}_5.{ext}" for q in ("dual", "toda", "Q", "Q_hat", "Q_zero", "Q_boomerang"))


def test_build_json_boomerang_counts(runner, tmp_path):
    runner.invoke(main, ["build", "--n", "5", "--out", str(tmp_path)])
    data = json.loads((tmp_path / "Q_boomerang_5.json").read_text())
    assert len(data["variables"]) == 18


@pytest.mark.parametrize("plan", ["W", "mu"])
def test_mutate(runner, plan):
    res = runner.invoke(main, ["mutate", plan, "--n", "4", "--format", "text"])
    assert res.exit_code == 0, res.output
    assert "MISMATCH" not in res.output


def test_mutate_json_trace(runner):
    res = runner.invoke(main, ["mutate", "W", "--n", "4"])
    data = json.loads(res.output)
    assert data["ok"] and data["trace"][0]["vertex"] == "0"


def test_roundtrip(runner, tmp_path):
    out = tmp_path / "rt.json"
    res = runner.invoke(main, ["roundtrip", "--n", "5", "--out", str(out)])
    assert res.exit_code == 0
    assert json.loads(out.read_text())["summary"] == "10/10 exact reconstructions"
