"""Tests for the accomplice and self manipulation solvers."""

from __future__ import annotations

import dataclasses
from pathlib import Path

import pytest
from hypothesis import given, settings

from accomplice_da.da_engine import da_with_misreport, run_da
from accomplice_da.manipulation import (
    EmptyPoolError,
    accomplice_candidates,
    best_accomplice,
    classify_outcome,
    optimal_accomplice,
    optimal_accomplice_no_regret,
    optimal_accomplice_with_regret,
    optimal_self,
)
from accomplice_da.model_types import (
    AccompliceMode,
    ManipulationResult,
    Matching,
    PreferenceProfile,
    Strategy,
)
from accomplice_da.naming import Side
from accomplice_da.oracle import Agent, OracleMode, exhaustive_best_manipulation
from accomplice_da.profile_io import load_profile
from accomplice_da.stability import blocking_pairs
from .fixture_helpers import load_fixture, parametrize_fixtures, profiles


def test_intro_no_regret_accomplice() -> None:
    """m1 promotes w1 above his partner and w1 moves from m2 to m3."""
    result = optimal_accomplice_no_regret(load_fixture("intro"), 0, 0)

    assert result.strategy is Strategy.ACCOMPLICE_NO_REGRET
    assert result.promoted_agent == 0
    assert result.misreport == (0, 2, 1, 3)
    assert result.outcome == Matching(man_to_woman=(2, 3, 0, 1))
    assert result.target_partner == 2
    assert result.improvement == 2
    assert result.regret == 0
    assert result.outcome_stable_wrt_truth


def test_intro_candidates() -> None:
    """Candidates cover the women below m1's partner; promoting w2 changes nothing."""
    profile = load_fixture("intro")
    truth, _ = run_da(profile)

    candidates = accomplice_candidates(profile, 0, truth=truth)

    assert [candidate.promoted for candidate in candidates] == [0, 1, 3]
    assert candidates[1].misreport == (1, 2, 0, 3)
    assert candidates[1].outcome == truth
    assert all(candidate.keeps_partner for candidate in candidates)


def test_intro_with_regret_and_self() -> None:
    """With-regret reaches the same partner; w1 cannot help herself."""
    profile = load_fixture("intro")

    assert optimal_accomplice_with_regret(profile, 0, 0).target_partner == 2
    result = optimal_self(profile, 0)
    assert result.promoted_agent is None
    assert result.improvement == 0
    assert result.misreport == profile.women_prefs[0]


def test_no_regret_placement_keeps_outcome_stable() -> None:
    """m3 helps w4 get her first choice and the result stays stable."""
    result = optimal_accomplice_no_regret(load_fixture("unstable_no_regret"), 2, 3)

    assert result.promoted_agent == 3
    assert result.misreport == (0, 3, 2, 1, 4)
    assert result.outcome.man_to_woman == (0, 1, 2, 4, 3)
    assert result.target_partner == 4
    assert result.improvement == 4
    assert result.outcome_stable_wrt_truth


@pytest.mark.parametrize(
    ("misreport", "expected", "stable"),
    [
        ((3, 2, 0, 1, 4), (1, 0, 2, 4, 3), False),
        ((3, 0, 2, 1, 4), (0, 1, 2, 4, 3), True),
    ],
    ids=["w4-above-everyone", "w4-above-w1"],
)
def test_push_up_placement_decides_stability(
    misreport: tuple[int, ...], expected: tuple[int, ...], stable: bool
) -> None:
    """Both placements of w4 keep m3 with w3 and give w4 m5, but only one stays stable."""
    profile = load_fixture("unstable_no_regret")
    outcome, _ = da_with_misreport(profile, 2, misreport)
    result = classify_outcome(
        profile,
        ManipulationResult(
            strategy=Strategy.ACCOMPLICE_NO_REGRET,
            manipulator=2,
            target_woman=3,
            misreport=misreport,
            promoted_agent=3,
            outcome=outcome,
        ),
    )

    assert outcome == Matching(man_to_woman=expected)
    assert result.target_partner == 4
    assert (result.improvement, result.regret) == (4, 0)
    assert result.outcome_stable_wrt_truth is stable
    assert result.outcome_m_stable_wrt_truth
    assert blocking_pairs(outcome, profile) == ([] if stable else [(2, 0)])


def test_with_regret_beats_no_regret() -> None:
    """Giving up w4 lets m1 bring w1 her first choice at a cost of one rank."""
    profile = load_fixture("with_regret")

    no_regret = optimal_accomplice(profile, 0, 0, AccompliceMode.NO_REGRET)
    with_regret = optimal_accomplice(profile, 0, 0, AccompliceMode.WITH_REGRET)

    assert no_regret.promoted_agent == 1
    assert no_regret.misreport == (1, 3, 0, 4, 2)
    assert no_regret.target_partner == 1
    assert (no_regret.improvement, no_regret.regret) == (1, 0)

    assert with_regret.strategy is Strategy.ACCOMPLICE_WITH_REGRET
    assert with_regret.promoted_agent == 0
    assert with_regret.misreport == (0, 3, 1, 4, 2)
    assert with_regret.outcome.man_to_woman == (0, 4, 1, 2, 3)
    assert (with_regret.improvement, with_regret.regret) == (2, 1)
    assert not with_regret.outcome_stable_wrt_truth
    assert with_regret.outcome_m_stable_wrt_truth


def test_self_manipulation_beats_every_accomplice() -> None:
    """w1 promotes m4 to second place and gets m1; no accomplice helps her."""
    profile = load_fixture("self_beats_accomplice")

    result = optimal_self(profile, 0)
    best = best_accomplice(profile, 0, range(profile.n), AccompliceMode.NO_REGRET)

    assert result.strategy is Strategy.SELF
    assert result.promoted_agent == 3
    assert result.misreport == (0, 3, 1, 2)
    assert result.target_partner == 0
    assert result.improvement == 2
    assert best.improvement == 0


def test_best_accomplice_pool() -> None:
    """The best accomplice is at least as good as any single man and pools must be non-empty."""
    profile = load_fixture("intro")

    best = best_accomplice(profile, 0, [3, 0, 1], AccompliceMode.NO_REGRET)

    assert best.improvement >= 2
    with pytest.raises(EmptyPoolError):
        best_accomplice(profile, 0, [], AccompliceMode.NO_REGRET)


@settings(max_examples=40, deadline=None)
@given(profile=profiles(min_n=2, max_n=4))
def test_accomplice_solvers_match_oracle(profile: PreferenceProfile) -> None:
    """Single-promotion search is as good as searching every list the accomplice could submit."""
    truth, _ = run_da(profile)
    for mode in AccompliceMode:
        for man in range(profile.n):
            agent = Agent(side=Side.MEN, index=man)
            for woman in range(profile.n):
                result = optimal_accomplice(profile, man, woman, mode, truth=truth)
                oracle = exhaustive_best_manipulation(profile, agent, woman, OracleMode(mode.value))
                ranks = profile.women_rank[woman]
                assert ranks[result.target_partner] == ranks[oracle.best_partner]
                assert result.improvement >= 0
                if mode is AccompliceMode.NO_REGRET:
                    assert result.regret == 0
                    assert result.outcome_stable_wrt_truth


@settings(max_examples=40, deadline=None)
@given(profile=profiles(min_n=2, max_n=4))
def test_self_solver_matches_oracle(profile: PreferenceProfile) -> None:
    """Promoting one proposer reaches the best partner over all of her lists."""
    for woman in range(profile.n):
        result = optimal_self(profile, woman)
        oracle = exhaustive_best_manipulation(
            profile, Agent(side=Side.WOMEN, index=woman), woman, OracleMode.SELF
        )
        assert result.improvement >= 0
        assert result.target_partner == oracle.best_partner


@parametrize_fixtures()
def test_fixture_solvers_match_oracle(fixture_path: Path) -> None:
    """On every fixture each solver reaches the oracle's best partner for every woman."""
    profile = load_profile(fixture_path)
    truth, _ = run_da(profile)
    for woman in range(profile.n):
        ranks = profile.women_rank[woman]
        for mode in AccompliceMode:
            best = best_accomplice(profile, woman, range(profile.n), mode, truth=truth)
            oracle_best = min(
                ranks[
                    exhaustive_best_manipulation(
                        profile, Agent(side=Side.MEN, index=man), woman, OracleMode(mode.value)
                    ).best_partner
                ]
                for man in range(profile.n)
            )
            assert ranks[best.target_partner] == oracle_best
        self_result = optimal_self(profile, woman)
        self_oracle = exhaustive_best_manipulation(
            profile, Agent(side=Side.WOMEN, index=woman), woman, OracleMode.SELF
        )
        assert self_result.target_partner == self_oracle.best_partner


def test_classify_outcome_recomputes_audit_fields() -> None:
    """Rank deltas and stability flags are derived from the outcome and the true lists."""
    profile = load_fixture("with_regret")
    result = optimal_accomplice_with_regret(profile, 0, 0)
    blank = dataclasses.replace(
        result,
        improvement=0,
        regret=0,
        outcome_stable_wrt_truth=True,
        outcome_m_stable_wrt_truth=False,
    )

    classified = classify_outcome(profile, blank)

    assert classified == result
    assert (classified.improvement, classified.regret) == (2, 1)
    assert not classified.outcome_stable_wrt_truth
    assert classified.outcome_m_stable_wrt_truth
