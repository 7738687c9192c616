"""Tests for preference-list surgery."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from accomplice_da.model_types import SplitPreference
from accomplice_da.preference_ops import (
    IndexOutOfRangeError,
    NotAbovePivotError,
    PivotInSetError,
    promote,
    push_down,
    push_up,
    split_at,
    split_list,
)
from .fixture_helpers import load_fixture


def test_split_list_parts() -> None:
    """The pivot separates the list into the part above and the part below."""
    split = split_list((3, 1, 0, 2), 0)

    assert split == SplitPreference(above=(3, 1), pivot=0, below=(2,), reference=(3, 1, 0, 2))
    assert split.as_list() == (3, 1, 0, 2)


def test_split_at_uses_true_list() -> None:
    """Splitting m3 of the intro profile at w4 leaves w2 above and w1, w3 below."""
    split = split_at(load_fixture("intro"), 2, 3)

    assert split.above == (1,)
    assert split.below == (0, 2)


def test_push_up_places_set_immediately_above_pivot() -> None:
    """Pushed women keep their true relative order and sit right above the pivot."""
    split = split_list((0, 1, 2, 3, 4), 1)

    assert push_up(split, {4, 2}) == (0, 2, 4, 1, 3)
    assert push_up(split, ()) == (0, 1, 2, 3, 4)


def test_push_up_with_reference_order() -> None:
    """Merging into the upper part follows the reference order, not the current one."""
    split = split_list((2, 0, 3, 1), 3, reference=(0, 1, 2, 3))

    assert push_up(split, {1}) == (0, 1, 2, 3)


def test_push_down_places_set_immediately_below_pivot() -> None:
    """Pushed-down women land right below the pivot in true order."""
    split = split_list((0, 1, 2, 3, 4), 3)

    assert push_down(split, {2, 0}) == (1, 3, 0, 2, 4)


def test_push_up_then_push_down_restores_list() -> None:
    """Resplitting with the true list as reference makes push down undo push up."""
    true_list = (4, 0, 3, 1, 2)
    pushed = push_up(split_list(true_list, 3), {1, 2})
    resplit = split_list(pushed, 3, reference=true_list)

    assert push_down(resplit, {1, 2}) == true_list


def test_push_errors() -> None:
    """The pivot, missing agents and agents below the pivot are rejected."""
    split = split_list((0, 1, 2), 1)

    with pytest.raises(PivotInSetError):
        push_up(split, {1})
    with pytest.raises(IndexOutOfRangeError):
        push_up(split, {3})
    with pytest.raises(NotAbovePivotError):
        push_down(split, {2})
    with pytest.raises(IndexOutOfRangeError):
        split_list((0, 1, 2), 5)


def test_promote_moves_one_agent() -> None:
    """Promotion shifts the agents in between down by one."""
    assert promote((0, 1, 2, 3), 3, 1) == (0, 3, 1, 2)
    assert promote((0, 1, 2, 3), 0, 2) == (1, 2, 0, 3)
    with pytest.raises(IndexOutOfRangeError):
        promote((0, 1, 2), 1, 3)


@settings(max_examples=75, deadline=None)
@given(data=st.data(), preference=st.permutations(list(range(6))))
def test_push_up_keeps_above_and_below_orders(
    data: st.DataObject, preference: list[int]
) -> None:
    """Push up only moves the pushed set and keeps every other relative order."""
    pivot = data.draw(st.sampled_from(preference))
    split = split_list(preference, pivot)
    pushed = data.draw(st.sets(st.sampled_from(split.below)) if split.below else st.just(set()))
    result = push_up(split, pushed)

    assert sorted(result) == sorted(preference)
    position = result.index(pivot)
    assert set(result[:position]) == set(split.above) | pushed
    assert list(result[position + 1 :]) == [a for a in split.below if a not in pushed]
    assert [a for a in result if a in split.above] == list(split.above)
