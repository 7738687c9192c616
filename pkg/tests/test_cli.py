"""Tests for the command line interface."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import pytest
from click.testing import CliRunner

from accomplice_da import verify
from accomplice_da.cli import main
from accomplice_da.json_types import MutableJSONObject
from accomplice_da.model_types import PreferenceProfile
from accomplice_da.profile_io import load_profile, parse_profile_json
from accomplice_da.verify import Claim
from .fixture_helpers import fixture_dir


def _fixture(name: str) -> str:
    return str(fixture_dir() / f"{name}.txt")


def _invoke(*args: str) -> tuple[int, str, str]:
    result = CliRunner().invoke(main, list(args))
    return result.exit_code, result.stdout, result.stderr


def _always_fails(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    del rng
    return {"n": profile.n}


def test_solve_prints_men_proposing_matching() -> None:
    """The intro profile matches m1-w3, m2-w1, m3-w4 and m4-w2."""
    code, out, _ = _invoke("solve", _fixture("intro"))

    assert code == 0
    assert out.splitlines() == ["m1 -- w3", "m2 -- w1", "m3 -- w4", "m4 -- w2"]


def test_solve_trace_and_json() -> None:
    """The trace lists proposals in order; JSON carries the same data."""
    code, out, _ = _invoke("solve", _fixture("intro"), "--trace")

    assert code == 0
    lines = out.splitlines()
    assert lines[4:] == ["Proposals:", "m1 -> w3", "m2 -> w1", "m3 -> w2", "m4 -> w2", "m3 -> w4"]

    code, out, _ = _invoke("solve", _fixture("intro"), "--women-proposing", "--format", "json")
    assert code == 0
    assert json.loads(out) == {
        "matching": [["m1", "w3"], ["m2", "w4"], ["m3", "w1"], ["m4", "w2"]]
    }


@pytest.mark.parametrize(
    "content",
    ["n=2\nm1: w1 w2\n", "m1: w1 w1\nw1: m1\n", "m1 w1\n"],
    ids=["incomplete", "duplicate", "malformed"],
)
def test_bad_profile_files_exit_two(tmp_path: Path, content: str) -> None:
    """Unparseable profile files are reported with exit code 2."""
    path = tmp_path / "bad.txt"
    path.write_text(content, encoding="utf-8")

    code, _, err = _invoke("solve", str(path))

    assert code == 2
    assert "bad.txt" in err


def test_missing_profile_exits_two(tmp_path: Path) -> None:
    """A missing profile file is an input error."""
    code, _, _ = _invoke("solve", str(tmp_path / "missing.txt"))

    assert code == 2


def test_audit_no_regret_accomplice() -> None:
    """m1 helps w1 trade m2 for m3 without changing his own partner."""
    code, out, _ = _invoke(
        "audit", _fixture("intro"), "--woman", "w1", "--strategy", "accomplice-nr",
        "--accomplice", "m1",
    )

    assert code == 0
    lines = out.splitlines()
    assert "Promoted: w1" in lines
    assert "Misreport: w1 w3 w2 w4" in lines
    assert "Partner: m3" in lines
    assert "Improvement: 2" in lines
    assert "Regret: 0" in lines
    assert "Stable: yes" in lines
    assert lines[-5:] == ["Outcome:", "  m1 -- w3", "  m2 -- w4", "  m3 -- w1", "  m4 -- w2"]


def test_audit_self_manipulation_json() -> None:
    """w1 promotes m4 to second place and ends up with m1."""
    code, out, _ = _invoke(
        "audit", _fixture("self_beats_accomplice"), "--woman", "w1", "--strategy", "self",
        "--format", "json",
    )

    assert code == 0
    summary = json.loads(out)
    assert summary["manipulator"] == "w1"
    assert summary["promoted"] == "m4"
    assert summary["misreport"] == "m1 m4 m2 m3"
    assert summary["partner"] == "m1"
    assert summary["improvement"] == 2


def test_audit_pool_and_usage_errors() -> None:
    """Pools are parsed by name; unknown agents exit 3 and conflicting flags exit 2."""
    code, out, _ = _invoke(
        "audit", _fixture("intro"), "--woman", "w1", "--strategy", "accomplice-wr",
        "--pool", "m1,m4",
    )
    assert code == 0
    assert "Manipulator: m4" in out.splitlines()
    assert "Partner: m4" in out.splitlines()

    code, _, _ = _invoke("audit", _fixture("intro"), "--woman", "w9", "--strategy", "self")
    assert code == 3
    code, _, _ = _invoke(
        "audit", _fixture("intro"), "--woman", "w1", "--strategy", "accomplice-nr",
        "--pool", "m1,m7",
    )
    assert code == 3
    code, _, _ = _invoke(
        "audit", _fixture("intro"), "--woman", "w1", "--strategy", "self", "--accomplice", "m1"
    )
    assert code == 2


def test_experiment_is_reproducible(tmp_path: Path) -> None:
    """Equal flags give identical reports and a per-n summary on stderr."""
    args = ("experiment", "fraction-women", "--n-range", "3..4", "--trials", "3", "--seed", "2")

    code, out, err = _invoke(*args)
    again = _invoke(*args)

    assert code == 0
    assert (code, out) == again[:2]
    assert out.splitlines()[0] == "experiment,n,metric,value"
    assert len(out.splitlines()) == 5
    assert err.splitlines()[0].startswith("FractionWomen n=3: accomplice_fraction=")

    report_path = tmp_path / "report.json"
    code, out, _ = _invoke(*args, "--format", "json", "--out", str(report_path))
    assert code == 0
    assert out == ""
    assert json.loads(report_path.read_text(encoding="utf-8"))["experiment"] == "FractionWomen"


def test_experiment_config_file(tmp_path: Path) -> None:
    """Flags override values from the YAML configuration."""
    config_path = tmp_path / "pool.yaml"
    config_path.write_text(
        "experiment: fraction-women\nn_values: [3]\ntrials: 500\nseed: 1\n", encoding="utf-8"
    )

    code, out, _ = _invoke(
        "experiment", "accomplice-pool", "--config", str(config_path), "--trials", "2",
        "--pool-sizes", "1,3",
    )

    assert code == 0
    metrics = [line.split(",")[2] for line in out.splitlines()[1:]]
    assert metrics == [
        "self_mean_improvement",
        "pool_1_no_regret_mean_improvement",
        "pool_1_with_regret_mean_improvement",
        "pool_3_no_regret_mean_improvement",
        "pool_3_with_regret_mean_improvement",
    ]


@pytest.mark.parametrize(
    ("args", "expected"),
    [
        (("experiment", "no-such-experiment", "--n-range", "3..4"), 4),
        (("experiment", "fraction-women"), 2),
        (("experiment", "fraction-women", "--n-range", "5..3"), 2),
        (("experiment", "accomplice-pool", "--n-range", "3..4", "--pool-sizes", "4"), 2),
        (("verify", "--claim", "no-such-claim"), 4),
        (("verify",), 2),
        (("verify", "--claim", "m-stability", "--exhaustive", "--n-range", "1..4"), 2),
        (("solve", _fixture("intro"), "--trace", "--women-proposing"), 2),
    ],
    ids=[
        "unknown-experiment",
        "missing-range",
        "empty-range",
        "pool-too-large",
        "unknown-claim",
        "missing-claim",
        "exhaustive-too-large",
        "trace-with-women-proposing",
    ],
)
def test_error_exit_codes(args: tuple[str, ...], expected: int) -> None:
    """Unknown names exit 4 and invalid arguments exit 2."""
    code, _, _ = _invoke(*args)

    assert code == expected


def test_verify_passing_claim(tmp_path: Path) -> None:
    """A claim that holds prints its summary and exits 0 without writing bundles."""
    code, out, _ = _invoke(
        "verify", "--claim", "m-stability", "--trials", "5", "--n-range", "2..3",
        "--out-dir", str(tmp_path / "bundles"),
    )

    assert code == 0
    assert "Claim: m-stability" in out
    assert "Failures: 0" in out
    assert not (tmp_path / "bundles").exists()


@pytest.mark.parametrize(
    ("alias", "expected"),
    [("thm-4-5", "no-regret-inconspicuous"), ("prop-c-1", "strict-push-up")],
)
def test_verify_accepts_short_claim_names(alias: str, expected: str) -> None:
    """Short result identifiers select the same claim, and both names are printed."""
    code, out, _ = _invoke(
        "verify", "--claim", alias, "--trials", "200", "--n-range", "3..5", "--seed", "7"
    )

    assert code == 0
    assert f"Claim: {expected} ({alias})" in out.splitlines()
    assert "Trials: 200" in out.splitlines()
    assert "Failures: 0" in out.splitlines()


def test_verify_failure_writes_bundle_and_replays(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    """A failing claim exits 1, writes both bundle files and replays as failing."""
    monkeypatch.setitem(verify._CHECKS, Claim.LATTICE_CLOSURE, _always_fails)
    bundles = tmp_path / "bundles"

    code, out, _ = _invoke(
        "verify", "--claim", "lattice-closure", "--trials", "2", "--n-range", "2..2",
        "--seed", "3", "--out-dir", str(bundles),
    )

    assert code == 1
    sidecar = bundles / "lattice-closure-seed3-trial0.json"
    assert f"Sidecar: {sidecar}" in out.splitlines()
    assert (bundles / "lattice-closure-seed3-trial0.txt").is_file()

    code, out, _ = _invoke("verify", "--replay", str(sidecar))
    assert code == 1
    assert "claim lattice-closure fails" in out

    monkeypatch.undo()
    code, out, _ = _invoke("verify", "--replay", str(sidecar))
    assert code == 0
    assert out.strip().endswith("claim holds")


def test_gen_is_seeded(tmp_path: Path) -> None:
    """Equal seeds give equal profiles in both formats."""
    code, out, _ = _invoke("gen", "--n", "4", "--seed", "7")

    assert code == 0
    assert out == _invoke("gen", "--n", "4", "--seed", "7")[1]
    assert out != _invoke("gen", "--n", "4", "--seed", "8")[1]

    text_path = tmp_path / "gen.txt"
    code, _, _ = _invoke("gen", "--n", "4", "--seed", "7", "--out", str(text_path))
    assert code == 0
    profile = load_profile(text_path)
    assert profile.n == 4

    code, out, _ = _invoke("gen", "--n", "4", "--seed", "7", "--format", "json")
    assert code == 0
    assert parse_profile_json(out) == profile


def test_cli_help_screen() -> None:
    """Running the module with --help succeeds and lists the commands."""
    result = subprocess.run(
        [sys.executable, "-m", "accomplice_da", "--help"],
        check=False,
        capture_output=True,
        text=True,
    )

    assert result.returncode == 0
    assert "usage:" in result.stdout.lower()
    for command in ("solve", "audit", "experiment", "verify", "gen"):
        assert command in result.stdout
