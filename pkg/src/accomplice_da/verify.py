"""Randomized and exhaustive verification of structural and solver claims."""

from __future__ import annotations

import itertools
import json
import logging
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, JsonValue, ValidationError

from .da_engine import da_with_misreport, run_da, run_da_women_proposing
from .experiments import random_profile
from .json_types import MutableJSONObject
from .manipulation import accomplice_candidates, optimal_accomplice
from .model_types import AccompliceMode, Matching, PreferenceList, PreferenceProfile, ProfileError
from .naming import Side, man_name, render_list, render_pairs, woman_name
from .oracle import (
    Agent,
    OracleMode,
    achievable_partners,
    best_from_outcomes,
    exhaustive_outcomes,
    iter_misreport_outcomes,
)
from .preference_ops import promote, push_down, push_up, split_at, split_list
from .profile_io import ProfileFormat, parse_profile_text, serialize_profile
from .stability import enumerate_stable, is_m_stable, is_stable, join, meet

logger = logging.getLogger(__name__)

EXHAUSTIVE_MAX_N = 3
STRATEGYPROOF_FULL_SWEEP_MAX_N = 5
STRATEGYPROOF_SAMPLES = 200

type ClaimCheck = Callable[[PreferenceProfile, np.random.Generator], Optional[MutableJSONObject]]


class UnknownClaimError(RuntimeError):
    """Raised when a claim name is not recognised."""


class VerificationConfigError(RuntimeError):
    """Raised when a verification run is configured with unusable bounds."""


class CounterexampleError(RuntimeError):
    """Raised when a counterexample bundle cannot be written or read back."""


class Claim(StrEnum):
    """Claims the verifier can check, named by what they assert."""

    STABLE_SET_CONTAINMENT = "stable-set-containment"
    NO_REGRET_MONOTONICITY = "no-regret-monotonicity"
    NO_REGRET_INCONSPICUOUS = "no-regret-inconspicuous"
    WITH_REGRET_INCONSPICUOUS = "with-regret-inconspicuous"
    BENEFICIAL_INCONSPICUOUS = "beneficial-inconspicuous"
    NO_REGRET_STABLE_OUTCOME = "no-regret-stable-outcome"
    STRICT_PUSH_UP = "strict-push-up"
    WEAK_PUSH_UP = "weak-push-up"
    REGRET_MATCH_IN_PUSHED_SET = "regret-match-in-pushed-set"
    PROPOSAL_UNION_CONTAINMENT = "proposal-union-containment"
    PUSH_UP_PROPOSAL_CONTAINMENT = "push-up-proposal-containment"
    LATTICE_CLOSURE = "lattice-closure"
    MEN_OPTIMALITY = "men-optimality"
    M_STABILITY = "m-stability"
    PERMUTATION_INVARIANCE = "permutation-invariance"
    PUSH_DOWN_MEN = "push-down-men"
    PUSH_DOWN_WOMEN = "push-down-women"
    COMBINING_PUSH_UP_PUSH_DOWN = "combining-push-up-push-down"
    MEN_STRATEGYPROOFNESS = "men-strategyproofness"

    @property
    def short_name(self) -> str:
        """Short result identifier accepted as an alias, such as ``thm-4-5``."""
        return CLAIM_ALIASES[self][0]

    @classmethod
    def from_name(cls, name: str) -> Claim:
        """Look up a claim by name or alias.

        Case and punctuation are ignored, so ``thm-4-5``, ``Thm4_5`` and
        ``no-regret-inconspicuous`` all name the same claim.

        Args:
            name (str): Claim name such as ``stable-set-containment`` or ``prop-c-1``.

        Returns:
            Claim: Matching claim.
        """
        key = _normalized(name)
        for claim in cls:
            if key == _normalized(claim.value) or key in (
                _normalized(alias) for alias in CLAIM_ALIASES[claim]
            ):
                return claim
        known = ", ".join(f"{claim.value} ({claim.short_name})" for claim in cls)
        raise UnknownClaimError(f"Unknown claim {name!r}; expected one of: {known}")


CLAIM_ALIASES: dict[Claim, tuple[str, ...]] = {
    Claim.STABLE_SET_CONTAINMENT: ("thm-4-1",),
    Claim.NO_REGRET_MONOTONICITY: ("cor-4-2",),
    Claim.NO_REGRET_INCONSPICUOUS: ("thm-4-5",),
    Claim.WITH_REGRET_INCONSPICUOUS: ("thm-4-9",),
    Claim.BENEFICIAL_INCONSPICUOUS: ("thm-d-3",),
    Claim.NO_REGRET_STABLE_OUTCOME: ("cor-4-7",),
    Claim.STRICT_PUSH_UP: ("prop-c-1",),
    Claim.WEAK_PUSH_UP: ("lemma-c-2",),
    Claim.REGRET_MATCH_IN_PUSHED_SET: ("lemma-b-2",),
    Claim.PROPOSAL_UNION_CONTAINMENT: ("lemma-b-3", "lemma-b-8"),
    Claim.PUSH_UP_PROPOSAL_CONTAINMENT: ("lemma-c-push-up-proposals",),
    Claim.LATTICE_CLOSURE: ("prop-a-1", "prop-a-1-lattice"),
    Claim.MEN_OPTIMALITY: ("prop-3-1",),
    Claim.M_STABILITY: ("prop-3-2",),
    Claim.PERMUTATION_INVARIANCE: ("prop-3-3",),
    Claim.PUSH_DOWN_MEN: ("prop-3-4",),
    Claim.PUSH_DOWN_WOMEN: ("lemma-3-5",),
    Claim.COMBINING_PUSH_UP_PUSH_DOWN: ("lemma-4-3", "lemma-d-2"),
    Claim.MEN_STRATEGYPROOFNESS: ("strategyproofness-men",),
}


def _normalized(name: str) -> str:
    return "".join(char for char in name.lower() if char.isalnum())


@dataclass(frozen=True)
class Counterexample:
    """A profile on which a claim failed, with enough context to replay it."""

    claim: Claim
    seed: int
    trial: int
    profile: PreferenceProfile
    details: MutableJSONObject


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one verification run."""

    claim: Claim
    trials: int
    failures: int
    n_range: tuple[int, int]
    seed: int
    exhaustive: bool
    first_counterexample: Optional[Counterexample] = None

    @property
    def passed(self) -> bool:
        """Whether no trial failed."""
        return self.failures == 0


class CounterexampleDocument(BaseModel):
    """JSON sidecar written next to a counterexample profile."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    claim: str
    seed: int
    trial: int
    n: int
    profile: str
    details: dict[str, JsonValue]


# Shared trial setup.


def _pick(rng: np.random.Generator, n: int) -> int:
    return int(rng.integers(n))


def _subset(rng: np.random.Generator, items: Sequence[int]) -> tuple[int, ...]:
    if not items:
        return ()
    mask = rng.random(len(items)) < 0.5
    chosen = [item for item, keep in zip(items, mask) if keep]
    if not chosen:
        chosen = [items[_pick(rng, len(items))]]
    return tuple(sorted(chosen))


def _women(indices: Sequence[int]) -> list[str]:
    return [woman_name(index) for index in indices]


@dataclass(frozen=True)
class _PushUpTrial:
    m: int
    truth: Matching
    pushed: tuple[int, ...]
    misreport: PreferenceList
    outcome: Matching
    regret: int

    def describe(self) -> MutableJSONObject:
        return {
            "accomplice": man_name(self.m),
            "pushed": _women(self.pushed),
            "misreport": render_list(Side.WOMEN, self.misreport),
            "truth": render_pairs(self.truth.man_to_woman),
            "outcome": render_pairs(self.outcome.man_to_woman),
            "regret": self.regret,
        }


def _push_up_trial(
    profile: PreferenceProfile,
    m: int,
    truth: Matching,
    pushed: tuple[int, ...],
) -> _PushUpTrial:
    partner = truth.partner_of_man(m)
    misreport = push_up(split_at(profile, m, partner), pushed)
    outcome, _ = da_with_misreport(profile, m, misreport)
    ranks = profile.men_rank[m]
    return _PushUpTrial(
        m=m,
        truth=truth,
        pushed=pushed,
        misreport=misreport,
        outcome=outcome,
        regret=ranks[outcome.partner_of_man(m)] - ranks[partner],
    )


def _random_push_up(profile: PreferenceProfile, rng: np.random.Generator) -> Optional[_PushUpTrial]:
    truth, _ = run_da(profile)
    m = _pick(rng, profile.n)
    below = split_at(profile, m, truth.partner_of_man(m)).below
    pushed = _subset(rng, below)
    if not pushed:
        return None
    return _push_up_trial(profile, m, truth, pushed)


def _any_subset(rng: np.random.Generator, items: Sequence[int]) -> tuple[int, ...]:
    mask = rng.random(len(items)) < 0.5
    return tuple(sorted(item for item, keep in zip(items, mask) if keep))


@dataclass(frozen=True)
class _CombinedTrial:
    m: int
    w: int
    pushed_up: tuple[int, ...]
    pushed_down: tuple[int, ...]
    up_only: PreferenceList
    combined: PreferenceList
    up_outcome: Matching
    combined_outcome: Matching

    def describe(self) -> MutableJSONObject:
        return {
            "accomplice": man_name(self.m),
            "woman": woman_name(self.w),
            "pushed_up": _women(self.pushed_up),
            "pushed_down": _women(self.pushed_down),
            "up_only": render_list(Side.WOMEN, self.up_only),
            "combined": render_list(Side.WOMEN, self.combined),
            "up_only_partner": man_name(self.up_outcome.partner_of_woman(self.w)),
            "combined_partner": man_name(self.combined_outcome.partner_of_woman(self.w)),
        }


def _random_combined_trial(
    profile: PreferenceProfile, truth: Matching, rng: np.random.Generator
) -> _CombinedTrial:
    m = _pick(rng, profile.n)
    w = _pick(rng, profile.n)
    split = split_at(profile, m, truth.partner_of_man(m))
    pushed_up = _any_subset(rng, split.below)
    pushed_down = _any_subset(rng, split.above)
    up_only = push_up(split, pushed_up)
    combined = push_down(
        split_list(up_only, split.pivot, reference=profile.men_prefs[m]), pushed_down
    )
    up_outcome, _ = da_with_misreport(profile, m, up_only)
    combined_outcome, _ = da_with_misreport(profile, m, combined)
    return _CombinedTrial(
        m=m,
        w=w,
        pushed_up=pushed_up,
        pushed_down=pushed_down,
        up_only=up_only,
        combined=combined,
        up_outcome=up_outcome,
        combined_outcome=combined_outcome,
    )


def _up_only_worse_for_woman(
    profile: PreferenceProfile, truth: Matching, trial: _CombinedTrial
) -> bool:
    # A combined misreport that helps w never beats pushing up alone.
    ranks = profile.women_rank[trial.w]
    combined_rank = ranks[trial.combined_outcome.partner_of_woman(trial.w)]
    if combined_rank >= ranks[truth.partner_of_woman(trial.w)]:
        return False
    return ranks[trial.up_outcome.partner_of_woman(trial.w)] > combined_rank


def _women_better(profile: PreferenceProfile, before: Matching, after: Matching) -> list[int]:
    ranks = profile.women_rank
    return [
        w
        for w in range(profile.n)
        if ranks[w][after.woman_to_man[w]] < ranks[w][before.woman_to_man[w]]
    ]


def _women_worse(profile: PreferenceProfile, before: Matching, after: Matching) -> list[int]:
    return _women_better(profile, after, before)


def _men_better(profile: PreferenceProfile, before: Matching, after: Matching) -> list[int]:
    ranks = profile.men_rank
    return [
        m
        for m in range(profile.n)
        if ranks[m][after.man_to_woman[m]] < ranks[m][before.man_to_woman[m]]
    ]


def _men_worse(profile: PreferenceProfile, before: Matching, after: Matching) -> list[int]:
    return _men_better(profile, after, before)


# Stable-set and welfare claims about pushing up.


def _check_stable_set_containment(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_up(profile, rng)
    if trial is None or trial.regret != 0:
        return None
    before = enumerate_stable(profile)
    after = enumerate_stable(profile.with_man_list(trial.m, trial.misreport))
    extra = [matching for matching in after if matching not in before]
    if not extra:
        return None
    details = trial.describe()
    details["unexpected_stable"] = [render_pairs(matching.man_to_woman) for matching in extra]
    return details


def _check_no_regret_monotonicity(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_up(profile, rng)
    if trial is None or trial.regret != 0:
        return None
    women = _women_worse(profile, trial.truth, trial.outcome)
    men = _men_better(profile, trial.truth, trial.outcome)
    if not women and not men:
        return None
    details = trial.describe()
    details["women_worse"] = _women(women)
    details["men_better"] = [man_name(m) for m in men]
    return details


def _check_no_regret_stable_outcome(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    truth, _ = run_da(profile)
    for m in range(profile.n):
        for candidate in accomplice_candidates(profile, m, truth=truth):
            if candidate.keeps_partner and not is_stable(candidate.outcome, profile):
                return {
                    "accomplice": man_name(m),
                    "promoted": woman_name(candidate.promoted),
                    "outcome": render_pairs(candidate.outcome.man_to_woman),
                }
    trial = _random_combined_trial(profile, truth, rng)
    keeps_partner = trial.up_outcome.partner_of_man(trial.m) == truth.partner_of_man(trial.m)
    if keeps_partner and _up_only_worse_for_woman(profile, truth, trial):
        return trial.describe()
    return None


def _check_strict_push_up(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_up(profile, rng)
    if trial is None or trial.regret != 0 or trial.outcome == trial.truth:
        return None
    women = _women_better(profile, trial.truth, trial.outcome)
    men = _men_worse(profile, trial.truth, trial.outcome)
    if len(women) >= 2 and len(men) >= 2:
        return None
    details = trial.describe()
    details["women_better"] = _women(women)
    details["men_worse"] = [man_name(m) for m in men]
    return details


def _check_weak_push_up(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    truth, _ = run_da(profile)
    m = _pick(rng, profile.n)
    below = split_at(profile, m, truth.partner_of_man(m)).below
    ranks = profile.women_rank
    # Only women who prefer their truthful partner to m.
    eligible = [x for x in below if ranks[x][truth.woman_to_man[x]] < ranks[x][m]]
    pushed = _subset(rng, eligible)
    if not pushed:
        return None
    trial = _push_up_trial(profile, m, truth, pushed)
    if trial.regret != 0 or trial.outcome == truth:
        return None
    return trial.describe()


def _check_regret_match_in_pushed_set(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_up(profile, rng)
    if trial is None or trial.regret <= 0:
        return None
    if trial.outcome.partner_of_man(trial.m) in trial.pushed:
        return None
    return trial.describe()


# Proposal-set claims.


def _check_proposal_union_containment(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_up(profile, rng)
    if trial is None:
        return None
    _, trace = da_with_misreport(profile, trial.m, trial.misreport)
    split = split_at(profile, trial.m, trial.truth.partner_of_man(trial.m))
    union: set[tuple[int, int]] = set()
    for woman in trial.pushed:
        _, single = da_with_misreport(profile, trial.m, push_up(split, {woman}))
        union |= single.as_set()
    missing = sorted(trace.as_set() - union)
    if not missing:
        return None
    details = trial.describe()
    details["missing_proposals"] = [f"{man_name(a)}->{woman_name(b)}" for a, b in missing]
    return details


def _check_push_up_proposal_containment(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_up(profile, rng)
    if trial is None or trial.regret != 0:
        return None
    _, truthful_trace = run_da(profile)
    _, trace = da_with_misreport(profile, trial.m, trial.misreport)
    missing = sorted(truthful_trace.as_set() - trace.as_set())
    if not missing:
        return None
    details = trial.describe()
    details["missing_proposals"] = [f"{man_name(a)}->{woman_name(b)}" for a, b in missing]
    return details


# Solver claims against the exhaustive oracle.


def _inconspicuous(
    profile: PreferenceProfile, mode: AccompliceMode
) -> Optional[MutableJSONObject]:
    truth, _ = run_da(profile)
    oracle_mode = OracleMode(mode.value)
    ranks = profile.women_rank
    for m in range(profile.n):
        agent = Agent(side=Side.MEN, index=m)
        outcomes = exhaustive_outcomes(profile, agent)
        candidates = accomplice_candidates(profile, m, truth=truth)
        for w in range(profile.n):
            solved = optimal_accomplice(profile, m, w, mode, truth=truth, candidates=candidates)
            best = best_from_outcomes(profile, agent, w, oracle_mode, outcomes, truth=truth)
            if ranks[w][solved.target_partner] != ranks[w][best.best_partner]:
                return {
                    "accomplice": man_name(m),
                    "woman": woman_name(w),
                    "solver_partner": man_name(solved.target_partner),
                    "oracle_partner": man_name(best.best_partner),
                    "oracle_witness": render_list(Side.WOMEN, best.witness),
                }
    return None


def _check_no_regret_inconspicuous(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    del rng
    return _inconspicuous(profile, AccompliceMode.NO_REGRET)


def _check_with_regret_inconspicuous(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    del rng
    return _inconspicuous(profile, AccompliceMode.WITH_REGRET)


def _single_promotion_partners(
    profile: PreferenceProfile, m: int, truth: Matching
) -> dict[bool, list[Matching]]:
    true_list = profile.men_prefs[m]
    ranks = profile.men_rank[m]
    partner = truth.partner_of_man(m)
    partner_rank = ranks[partner]
    outcomes: dict[bool, list[Matching]] = {True: [], False: []}
    for woman in true_list[partner_rank + 1 :]:
        for position in range(partner_rank + 1):
            outcome, _ = da_with_misreport(profile, m, promote(true_list, woman, position))
            outcomes[ranks[outcome.partner_of_man(m)] == partner_rank].append(outcome)
    return outcomes


def _check_beneficial_inconspicuous(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    del rng
    truth, _ = run_da(profile)
    ranks = profile.women_rank
    for m in range(profile.n):
        agent = Agent(side=Side.MEN, index=m)
        outcomes = exhaustive_outcomes(profile, agent)
        singles = _single_promotion_partners(profile, m, truth)
        for mode in (OracleMode.NO_REGRET, OracleMode.WITH_REGRET):
            pool = singles[True] + (singles[False] if mode is OracleMode.WITH_REGRET else [])
            for w in range(profile.n):
                before = ranks[w][truth.woman_to_man[w]]
                reachable = achievable_partners(profile, agent, w, mode, outcomes, truth=truth)
                beneficial = {man for man in reachable if ranks[w][man] < before}
                by_single = {outcome.woman_to_man[w] for outcome in pool}
                missing = sorted(beneficial - by_single)
                if missing:
                    return {
                        "accomplice": man_name(m),
                        "woman": woman_name(w),
                        "mode": mode.value,
                        "unreached_partners": [man_name(man) for man in missing],
                    }
    return None


# Lattice and DA claims.


def _check_lattice_closure(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    del rng
    stable = enumerate_stable(profile)
    for first, second in itertools.combinations(stable.sorted(), 2):
        for name, combined in (
            ("meet", meet(first, second, profile)),
            ("join", join(first, second, profile)),
        ):
            if combined not in stable:
                return {
                    "operation": name,
                    "first": render_pairs(first.man_to_woman),
                    "second": render_pairs(second.man_to_woman),
                    "result": render_pairs(combined.man_to_woman),
                }
    return None


def _check_men_optimality(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    del rng
    men_optimal, _ = run_da(profile)
    women_optimal = run_da_women_proposing(profile)
    stable = enumerate_stable(profile)
    lattice_ends = (stable.men_optimal(profile), stable.women_optimal(profile))
    if lattice_ends != (men_optimal, women_optimal):
        return {
            "men_proposing": render_pairs(men_optimal.man_to_woman),
            "women_proposing": render_pairs(women_optimal.man_to_woman),
            "join_of_stable_set": render_pairs(lattice_ends[0].man_to_woman),
            "meet_of_stable_set": render_pairs(lattice_ends[1].man_to_woman),
        }
    for matching in stable:
        men = _men_better(profile, men_optimal, matching)
        women = _women_better(profile, women_optimal, matching)
        if men or women:
            return {
                "stable": render_pairs(matching.man_to_woman),
                "men_proposing": render_pairs(men_optimal.man_to_woman),
                "women_proposing": render_pairs(women_optimal.man_to_woman),
                "men_better_than_men_proposing": [man_name(m) for m in men],
                "women_better_than_women_proposing": _women(women),
            }
    return None


def _check_m_stability(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    m = _pick(rng, profile.n)
    misreport = tuple(int(value) for value in rng.permutation(profile.n))
    for matching in enumerate_stable(profile.with_man_list(m, misreport)):
        if not is_m_stable(matching, profile, m):
            return {
                "man": man_name(m),
                "misreport": render_list(Side.WOMEN, misreport),
                "matching": render_pairs(matching.man_to_woman),
            }
    return None


def _check_permutation_invariance(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    m = _pick(rng, profile.n)
    for submitted in (
        profile.men_prefs[m],
        tuple(int(value) for value in rng.permutation(profile.n)),
    ):
        outcome, _ = da_with_misreport(profile, m, submitted)
        split = split_list(submitted, outcome.partner_of_man(m))
        shuffled = (
            *(int(value) for value in rng.permutation(np.array(split.above, dtype=int))),
            split.pivot,
            *(int(value) for value in rng.permutation(np.array(split.below, dtype=int))),
        )
        reshuffled, _ = da_with_misreport(profile, m, shuffled)
        if reshuffled != outcome:
            return {
                "man": man_name(m),
                "submitted": render_list(Side.WOMEN, submitted),
                "shuffled": render_list(Side.WOMEN, shuffled),
                "outcome": render_pairs(outcome.man_to_woman),
                "shuffled_outcome": render_pairs(reshuffled.man_to_woman),
            }
    return None


def _random_push_down(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[tuple[MutableJSONObject, Matching, Matching, int]]:
    truth, _ = run_da(profile)
    m = _pick(rng, profile.n)
    split = split_at(profile, m, truth.partner_of_man(m))
    pushed = _subset(rng, split.above)
    if not pushed:
        return None
    misreport = push_down(split, pushed)
    outcome, _ = da_with_misreport(profile, m, misreport)
    details: MutableJSONObject = {
        "man": man_name(m),
        "pushed_down": _women(pushed),
        "misreport": render_list(Side.WOMEN, misreport),
        "truth": render_pairs(truth.man_to_woman),
        "outcome": render_pairs(outcome.man_to_woman),
    }
    return details, truth, outcome, m


def _check_push_down_men(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_down(profile, rng)
    if trial is None:
        return None
    details, truth, outcome, m = trial
    men = _men_worse(profile, truth, outcome)
    if outcome.partner_of_man(m) == truth.partner_of_man(m) and not men:
        return None
    details["men_worse"] = [man_name(man) for man in men]
    return details


def _check_push_down_women(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    trial = _random_push_down(profile, rng)
    if trial is None:
        return None
    details, truth, outcome, _ = trial
    women = _women_better(profile, truth, outcome)
    if not women:
        return None
    details["women_better"] = _women(women)
    return details


def _check_combining_push_up_push_down(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    truth, _ = run_da(profile)
    trial = _random_combined_trial(profile, truth, rng)
    w = trial.w
    ranks = profile.women_rank[w]
    combined_partner = trial.combined_outcome.partner_of_woman(w)
    if ranks[combined_partner] >= ranks[truth.partner_of_woman(w)]:
        return None
    if combined_partner == trial.up_outcome.partner_of_woman(w):
        return None
    details = trial.describe()
    details["up_only_worse"] = _up_only_worse_for_woman(profile, truth, trial)
    return details


def _check_men_strategyproofness(
    profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    truth, _ = run_da(profile)
    for m in range(profile.n):
        ranks = profile.men_rank[m]
        truthful_rank = ranks[truth.partner_of_man(m)]
        if profile.n <= STRATEGYPROOF_FULL_SWEEP_MAX_N:
            agent = Agent(side=Side.MEN, index=m)
            sweep: Iterator[tuple[PreferenceList, Matching]] = (
                (item.misreport, item.outcome) for item in iter_misreport_outcomes(profile, agent)
            )
        else:
            sweep = _sampled_misreports(profile, m, rng)
        for misreport, outcome in sweep:
            if ranks[outcome.partner_of_man(m)] < truthful_rank:
                return {
                    "man": man_name(m),
                    "misreport": render_list(Side.WOMEN, misreport),
                    "truthful_partner": woman_name(truth.partner_of_man(m)),
                    "misreport_partner": woman_name(outcome.partner_of_man(m)),
                }
    return None


def _sampled_misreports(
    profile: PreferenceProfile, m: int, rng: np.random.Generator
) -> Iterator[tuple[PreferenceList, Matching]]:
    for _ in range(STRATEGYPROOF_SAMPLES):
        misreport = tuple(int(value) for value in rng.permutation(profile.n))
        outcome, _ = da_with_misreport(profile, m, misreport)
        yield misreport, outcome


_CHECKS: dict[Claim, ClaimCheck] = {
    Claim.STABLE_SET_CONTAINMENT: _check_stable_set_containment,
    Claim.NO_REGRET_MONOTONICITY: _check_no_regret_monotonicity,
    Claim.NO_REGRET_INCONSPICUOUS: _check_no_regret_inconspicuous,
    Claim.WITH_REGRET_INCONSPICUOUS: _check_with_regret_inconspicuous,
    Claim.BENEFICIAL_INCONSPICUOUS: _check_beneficial_inconspicuous,
    Claim.NO_REGRET_STABLE_OUTCOME: _check_no_regret_stable_outcome,
    Claim.STRICT_PUSH_UP: _check_strict_push_up,
    Claim.WEAK_PUSH_UP: _check_weak_push_up,
    Claim.REGRET_MATCH_IN_PUSHED_SET: _check_regret_match_in_pushed_set,
    Claim.PROPOSAL_UNION_CONTAINMENT: _check_proposal_union_containment,
    Claim.PUSH_UP_PROPOSAL_CONTAINMENT: _check_push_up_proposal_containment,
    Claim.LATTICE_CLOSURE: _check_lattice_closure,
    Claim.MEN_OPTIMALITY: _check_men_optimality,
    Claim.M_STABILITY: _check_m_stability,
    Claim.PERMUTATION_INVARIANCE: _check_permutation_invariance,
    Claim.PUSH_DOWN_MEN: _check_push_down_men,
    Claim.PUSH_DOWN_WOMEN: _check_push_down_women,
    Claim.COMBINING_PUSH_UP_PUSH_DOWN: _check_combining_push_up_push_down,
    Claim.MEN_STRATEGYPROOFNESS: _check_men_strategyproofness,
}


def check_claim(
    claim: Claim, profile: PreferenceProfile, rng: np.random.Generator
) -> Optional[MutableJSONObject]:
    """Run one claim check on one profile.

    Args:
        claim (Claim): Claim to check.
        profile (PreferenceProfile): Instance to check it on.
        rng (np.random.Generator): Source for the random choices the check makes.

    Returns:
        Optional[MutableJSONObject]: Failure details, or ``None`` when the claim holds.
    """
    return _CHECKS[claim](profile, rng)


def _check_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, trial, 1]))


def _sampled_profiles(
    *, trials: int, n_range: tuple[int, int], seed: int
) -> Iterator[PreferenceProfile]:
    low, high = n_range
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, trial, 0]))
        yield random_profile(int(rng.integers(low, high + 1)), rng)


def _all_profiles(n_range: tuple[int, int]) -> Iterator[PreferenceProfile]:
    low, high = n_range
    for n in range(low, high + 1):
        lists = list(itertools.permutations(range(n)))
        for men in itertools.product(lists, repeat=n):
            for women in itertools.product(lists, repeat=n):
                yield PreferenceProfile.from_lists(men, women)


def verify_claim(
    claim: Claim,
    *,
    trials: int,
    n_range: tuple[int, int],
    seed: int,
    exhaustive: bool = False,
) -> OracleReport:
    """Check a claim on many profiles and report failures.

    Sampled runs draw profile ``k`` from ``SeedSequence([seed, k, 0])`` and the check's
    own choices from ``SeedSequence([seed, k, 1])``. Exhaustive runs visit every profile
    with n in ``n_range`` and ignore ``trials``.

    Args:
        claim (Claim): Claim to check.
        trials (int): Number of sampled profiles.
        n_range (tuple[int, int]): Inclusive bounds on n.
        seed (int): Base seed.
        exhaustive (bool): Enumerate every profile instead of sampling.

    Returns:
        OracleReport: Failure count and the first counterexample, if any.
    """
    low, high = n_range
    if low < 1 or low > high:
        raise VerificationConfigError(f"invalid n range {low}..{high}")
    if trials < 1 and not exhaustive:
        raise VerificationConfigError(f"trials must be positive, got {trials}")
    if exhaustive and high > EXHAUSTIVE_MAX_N:
        raise VerificationConfigError(
            f"exhaustive verification is limited to n <= {EXHAUSTIVE_MAX_N}, got {high}"
        )

    profiles = (
        _all_profiles(n_range)
        if exhaustive
        else _sampled_profiles(trials=trials, n_range=n_range, seed=seed)
    )
    check = _CHECKS[claim]
    failures = 0
    visited = 0
    first: Optional[Counterexample] = None
    for trial, profile in enumerate(profiles):
        visited += 1
        details = check(profile, _check_rng(seed, trial))
        if details is None:
            continue
        failures += 1
        logger.debug("%s failed on trial %d: %s", claim.value, trial, details)
        if first is None:
            logger.warning("%s: first counterexample on trial %d", claim.value, trial)
            first = Counterexample(
                claim=claim, seed=seed, trial=trial, profile=profile, details=details
            )

    logger.info("%s: %d failures in %d trials", claim.value, failures, visited)
    return OracleReport(
        claim=claim,
        trials=visited,
        failures=failures,
        n_range=n_range,
        seed=seed,
        exhaustive=exhaustive,
        first_counterexample=first,
    )


def format_report(report: OracleReport) -> str:
    """Render a verification report as CLI output text.

    Args:
        report (OracleReport): Report to format.

    Returns:
        str: Human-readable multiline report text.
    """
    low, high = report.n_range
    mode = "exhaustive" if report.exhaustive else "sampled"
    lines = [
        f"Claim: {report.claim.value} ({report.claim.short_name})",
        f"Mode: {mode}, n in {low}..{high}, seed {report.seed}",
        f"Trials: {report.trials}",
        f"Failures: {report.failures}",
    ]
    example = report.first_counterexample
    if example is not None:
        lines.append(f"First counterexample: trial {example.trial}")
        lines.extend(f"  {key}: {json.dumps(value)}" for key, value in example.details.items())
        lines.extend(
            f"  | {line}"
            for line in serialize_profile(example.profile, fmt=ProfileFormat.TEXT).splitlines()
        )
    return "\n".join(lines)


def counterexample_stem(example: Counterexample) -> str:
    """Return the shared file name stem of a counterexample bundle.

    Args:
        example (Counterexample): Counterexample to name.

    Returns:
        str: ``<claim>-seed<seed>-trial<k>``.
    """
    return f"{example.claim.value}-seed{example.seed}-trial{example.trial}"


def write_counterexample(example: Counterexample, directory: Path) -> tuple[Path, Path]:
    """Write a counterexample profile and its JSON sidecar.

    Args:
        example (Counterexample): Counterexample to persist.
        directory (Path): Target directory, created if missing.

    Returns:
        tuple[Path, Path]: Profile path and sidecar path.
    """
    profile_text = serialize_profile(example.profile, fmt=ProfileFormat.TEXT)
    document = CounterexampleDocument(
        claim=example.claim.value,
        seed=example.seed,
        trial=example.trial,
        n=example.profile.n,
        profile=profile_text,
        details=example.details,
    )
    stem = counterexample_stem(example)
    profile_path = directory / f"{stem}.txt"
    sidecar_path = directory / f"{stem}.json"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        profile_path.write_text(profile_text, encoding="utf-8")
        sidecar_path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise CounterexampleError(f"Failed to write counterexample to {directory}: {exc}") from exc
    return profile_path, sidecar_path


def replay_counterexample(sidecar_path: Path) -> Optional[Counterexample]:
    """Re-run the check recorded in a sidecar on its stored profile.

    Args:
        sidecar_path (Path): JSON sidecar written by :func:`write_counterexample`.

    Returns:
        Optional[Counterexample]: Fresh failure, or ``None`` when the claim now holds.
    """
    try:
        document = CounterexampleDocument.model_validate_json(
            sidecar_path.read_text(encoding="utf-8")
        )
    except OSError as exc:
        raise CounterexampleError(f"Failed to read {sidecar_path}: {exc}") from exc
    except ValidationError as exc:
        raise CounterexampleError(f"Invalid counterexample sidecar {sidecar_path}: {exc}") from exc

    claim = Claim.from_name(document.claim)
    try:
        profile = parse_profile_text(document.profile)
    except ProfileError as exc:
        raise CounterexampleError(f"Stored profile in {sidecar_path} is invalid: {exc}") from exc

    details = check_claim(claim, profile, _check_rng(document.seed, document.trial))
    if details is None:
        return None
    return Counterexample(
        claim=claim, seed=document.seed, trial=document.trial, profile=profile, details=details
    )
