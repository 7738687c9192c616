"""Exhaustive ground truth over every misreport and every perfect matching.

Nothing here calls the manipulation solvers; results are only comparable to them
because both sides run the same DA engine.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator
from dataclasses import dataclass
from enum import StrEnum
from typing import Optional

from .da_engine import da_with_misreport, da_with_woman_misreport, run_da
from .model_types import Matching, PreferenceList, PreferenceProfile
from .naming import Side
from .stability import InstanceTooLargeError, StableSet, is_stable

DEFAULT_ORACLE_CAP = 7


class OracleModeError(RuntimeError):
    """Raised when an agent cannot act in the requested oracle mode."""


class NoAdmissibleMisreportError(RuntimeError):
    """Raised when a sweep holds no list the requested mode admits."""


class OracleMode(StrEnum):
    """Which misreports count as admissible."""

    NO_REGRET = "no-regret"
    WITH_REGRET = "with-regret"
    SELF = "self"


@dataclass(frozen=True)
class Agent:
    """An agent on a known side."""

    side: Side
    index: int


@dataclass(frozen=True)
class MisreportOutcome:
    """One submitted list and the DA matching it produces."""

    misreport: PreferenceList
    outcome: Matching


@dataclass(frozen=True)
class OracleOutcome:
    """Best outcome for the target woman over all admissible misreports."""

    best_partner: int
    witness: PreferenceList
    regret: int


def _check_cap(profile: PreferenceProfile, max_n: int) -> None:
    if profile.n > max_n:
        raise InstanceTooLargeError(f"exhaustive search is capped at n={max_n}, got n={profile.n}")


def iter_misreport_outcomes(
    profile: PreferenceProfile, agent: Agent, *, max_n: int = DEFAULT_ORACLE_CAP
) -> Iterator[MisreportOutcome]:
    """Run DA for every list the agent could submit, in lexicographic order.

    Args:
        profile (PreferenceProfile): True instance.
        agent (Agent): Misreporting agent.
        max_n (int): Largest instance accepted.

    Yields:
        MisreportOutcome: Each permutation with its DA outcome.
    """
    _check_cap(profile, max_n)
    for permutation in itertools.permutations(range(profile.n)):
        if agent.side is Side.MEN:
            outcome, _ = da_with_misreport(profile, agent.index, permutation)
        else:
            outcome, _ = da_with_woman_misreport(profile, agent.index, permutation)
        yield MisreportOutcome(misreport=permutation, outcome=outcome)


def exhaustive_outcomes(
    profile: PreferenceProfile, agent: Agent, *, max_n: int = DEFAULT_ORACLE_CAP
) -> tuple[MisreportOutcome, ...]:
    """Collect :func:`iter_misreport_outcomes` so several targets can share one sweep.

    Args:
        profile (PreferenceProfile): True instance.
        agent (Agent): Misreporting agent.
        max_n (int): Largest instance accepted.

    Returns:
        tuple[MisreportOutcome, ...]: Every permutation with its outcome.
    """
    return tuple(iter_misreport_outcomes(profile, agent, max_n=max_n))


def _mode_for(agent: Agent, target_w: int, mode: OracleMode) -> None:
    if mode is OracleMode.SELF:
        if agent.side is not Side.WOMEN or agent.index != target_w:
            raise OracleModeError("self manipulation requires the agent to be the target woman")
    elif agent.side is not Side.MEN:
        raise OracleModeError("accomplice modes require a man as the agent")


def _regret(profile: PreferenceProfile, agent: Agent, truth: Matching, outcome: Matching) -> int:
    if agent.side is Side.WOMEN:
        return 0
    ranks = profile.men_rank[agent.index]
    return ranks[outcome.partner_of_man(agent.index)] - ranks[truth.partner_of_man(agent.index)]


def best_from_outcomes(
    profile: PreferenceProfile,
    agent: Agent,
    target_w: int,
    mode: OracleMode,
    outcomes: tuple[MisreportOutcome, ...],
    *,
    truth: Optional[Matching] = None,
) -> OracleOutcome:
    """Pick the best admissible outcome for ``target_w`` from a finished sweep.

    Ties go to lower regret, then to the lexicographically first list.

    Args:
        profile (PreferenceProfile): True instance.
        agent (Agent): Misreporting agent the sweep was run for.
        target_w (int): Woman whose true preferences rank outcomes.
        mode (OracleMode): Admissibility rule.
        outcomes (tuple[MisreportOutcome, ...]): Sweep in lexicographic order.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        OracleOutcome: Best partner, a witness list and the accomplice regret.
    """
    _mode_for(agent, target_w, mode)
    truthful = truth if truth is not None else run_da(profile)[0]
    ranks = profile.women_rank[target_w]
    best: Optional[tuple[tuple[int, int], MisreportOutcome]] = None
    for item in outcomes:
        regret = _regret(profile, agent, truthful, item.outcome)
        if mode is OracleMode.NO_REGRET and regret != 0:
            continue
        key = (ranks[item.outcome.partner_of_woman(target_w)], regret)
        if best is None or key < best[0]:
            best = (key, item)
    if best is None:
        raise NoAdmissibleMisreportError("sweep contains no admissible misreport")
    (_, regret), item = best
    return OracleOutcome(
        best_partner=item.outcome.partner_of_woman(target_w),
        witness=item.misreport,
        regret=regret,
    )


def exhaustive_best_manipulation(
    profile: PreferenceProfile,
    agent: Agent,
    target_w: int,
    mode: OracleMode,
    *,
    max_n: int = DEFAULT_ORACLE_CAP,
) -> OracleOutcome:
    """Find the best partner ``target_w`` can get from any list the agent submits.

    Args:
        profile (PreferenceProfile): True instance.
        agent (Agent): The accomplice (a man) or, in self mode, the woman herself.
        target_w (int): Woman whose true preferences rank outcomes.
        mode (OracleMode): Admissibility rule; no-regret keeps only lists that leave the
            accomplice with his truthful partner.
        max_n (int): Largest instance accepted.

    Returns:
        OracleOutcome: Best partner, witness list and regret.
    """
    _mode_for(agent, target_w, mode)
    outcomes = exhaustive_outcomes(profile, agent, max_n=max_n)
    return best_from_outcomes(profile, agent, target_w, mode, outcomes)


def achievable_partners(
    profile: PreferenceProfile,
    agent: Agent,
    target_w: int,
    mode: OracleMode,
    outcomes: tuple[MisreportOutcome, ...],
    *,
    truth: Optional[Matching] = None,
) -> frozenset[int]:
    """Return every partner ``target_w`` gets under some admissible list of the sweep.

    Args:
        profile (PreferenceProfile): True instance.
        agent (Agent): Misreporting agent the sweep was run for.
        target_w (int): Woman of interest.
        mode (OracleMode): Admissibility rule.
        outcomes (tuple[MisreportOutcome, ...]): Sweep to read.
        truth (Optional[Matching]): Truthful DA outcome, computed when omitted.

    Returns:
        frozenset[int]: Reachable partners of ``target_w``.
    """
    _mode_for(agent, target_w, mode)
    truthful = truth if truth is not None else run_da(profile)[0]
    return frozenset(
        item.outcome.partner_of_woman(target_w)
        for item in outcomes
        if mode is not OracleMode.NO_REGRET
        or _regret(profile, agent, truthful, item.outcome) == 0
    )


def brute_force_stable(
    profile: PreferenceProfile, *, max_n: int = DEFAULT_ORACLE_CAP
) -> StableSet:
    """Filter all ``n!`` perfect matchings down to the stable ones.

    Args:
        profile (PreferenceProfile): Instance to enumerate.
        max_n (int): Largest instance accepted.

    Returns:
        StableSet: Every stable matching.
    """
    _check_cap(profile, max_n)
    stable = (
        Matching(man_to_woman=permutation)
        for permutation in itertools.permutations(range(profile.n))
    )
    return StableSet(matchings=frozenset(m for m in stable if is_stable(m, profile)))
