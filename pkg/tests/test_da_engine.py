"""Tests for deferred acceptance."""

from __future__ import annotations

import itertools
from typing import Optional

import pytest
from hypothesis import given, settings

from accomplice_da.da_engine import (
    InvalidMisreportError,
    da_with_misreport,
    da_with_woman_misreport,
    run_da,
    run_da_women_proposing,
)
from accomplice_da.model_types import Matching, PreferenceProfile
from accomplice_da.stability import is_stable
from .fixture_helpers import load_fixture, profiles


def test_intro_matching_and_trace() -> None:
    """Men-proposing DA on the intro profile, with proposals in round order."""
    matching, trace = run_da(load_fixture("intro"))

    assert matching.man_to_woman == (2, 0, 3, 1)
    assert trace.proposals == ((0, 2), (1, 0), (2, 1), (3, 1), (2, 3))
    assert trace.proposals_of(2) == (1, 3)
    assert len(trace) == 5


@pytest.mark.parametrize(
    ("fixture", "men_optimal", "women_optimal"),
    [
        ("intro", (2, 0, 3, 1), (2, 3, 0, 1)),
        ("unstable_no_regret", (0, 1, 2, 3, 4), None),
        ("with_regret", (3, 1, 0, 4, 2), (3, 0, 1, 4, 2)),
        ("self_beats_accomplice", (1, 2, 0, 3), (0, 1, 2, 3)),
        ("single_pair", (0,), (0,)),
    ],
)
def test_fixture_outcomes(
    fixture: str,
    men_optimal: tuple[int, ...],
    women_optimal: Optional[tuple[int, ...]],
) -> None:
    """Both sides of DA on the worked examples."""
    profile = load_fixture(fixture)

    assert run_da(profile)[0].man_to_woman == men_optimal
    if women_optimal is not None:
        assert run_da_women_proposing(profile).man_to_woman == women_optimal


def test_man_misreport_leaves_profile_untouched() -> None:
    """m1 ranking w1 first in the intro profile gives w1 to m3."""
    profile = load_fixture("intro")

    outcome, _ = da_with_misreport(profile, 0, (0, 2, 1, 3))

    assert outcome == Matching(man_to_woman=(2, 3, 0, 1))
    assert profile.men_prefs[0] == (2, 1, 0, 3)


def test_woman_misreport() -> None:
    """w1 promoting m4 to second place ends with m1 in the self-manipulation example."""
    outcome, _ = da_with_woman_misreport(load_fixture("self_beats_accomplice"), 0, (0, 3, 1, 2))

    assert outcome.man_to_woman == (0, 1, 2, 3)


def test_invalid_misreport() -> None:
    """Submitted lists must be permutations of the other side."""
    profile = load_fixture("intro")

    with pytest.raises(InvalidMisreportError):
        da_with_misreport(profile, 0, (0, 0, 1, 2))
    with pytest.raises(InvalidMisreportError):
        da_with_woman_misreport(profile, 0, (0, 1, 2))


@settings(max_examples=60, deadline=None)
@given(profile=profiles(max_n=6))
def test_da_outcomes_are_stable(profile: PreferenceProfile) -> None:
    """Both DA variants return stable matchings; each man proposes down his own list."""
    matching, trace = run_da(profile)

    assert is_stable(matching, profile)
    assert is_stable(run_da_women_proposing(profile), profile)
    for man in range(profile.n):
        made = trace.proposals_of(man)
        assert made == profile.men_prefs[man][: len(made)]
        assert made[-1] == matching.partner_of_man(man)


@settings(max_examples=25, deadline=None)
@given(profile=profiles(max_n=4))
def test_no_man_gains_by_misreporting(profile: PreferenceProfile) -> None:
    """No list a man submits gets him a partner he truly prefers."""
    truth, _ = run_da(profile)
    for man in range(profile.n):
        ranks = profile.men_rank[man]
        for misreport in itertools.permutations(range(profile.n)):
            outcome, _ = da_with_misreport(profile, man, misreport)
            assert ranks[outcome.partner_of_man(man)] >= ranks[truth.partner_of_man(man)]
