"""Seeded Monte Carlo experiments over uniformly random profiles."""

from __future__ import annotations

import logging
import time
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .da_engine import run_da
from .json_types import MutableJSONObject
from .manipulation import (
    accomplice_candidates,
    best_accomplice,
    optimal_accomplice,
    optimal_self,
)
from .model_types import AccompliceMode, Matching, PreferenceProfile

logger = logging.getLogger(__name__)

RNG_DESCRIPTION = "numpy PCG64 via SeedSequence([seed, n, trial])"
IMPROVEMENT_NOTE = (
    "improvement = rank of truthful partner minus rank of manipulated partner on the "
    "woman's true list; regret = the same difference on the accomplice's true list"
)
FIXED_WOMAN = 0

type MetricValue = Union[int, float]


class ConfigInvalidError(RuntimeError):
    """Raised when an experiment configuration fails validation."""


class UnknownExperimentError(RuntimeError):
    """Raised when an experiment name is not recognised."""


class ExperimentKind(StrEnum):
    """Available experiments, named by what they measure."""

    FREQ_VS_TRUTH = "freq-vs-truth"
    HEAD_TO_HEAD = "head-to-head"
    RANK_IMPROVEMENT = "rank-improvement"
    FRACTION_WOMEN = "fraction-women"
    ACCOMPLICE_POOL = "accomplice-pool"
    MANIPULABLE_INSTANCES = "manipulable-instances"
    REGRET_VS_IMPROVEMENT = "regret-vs-improvement"
    WOMEN_BENEFIT_TABLE = "women-benefit-table"

    @property
    def title(self) -> str:
        """CamelCase name used in report rows."""
        return "".join(part.capitalize() for part in self.value.split("-"))

    @classmethod
    def from_name(cls, name: str) -> ExperimentKind:
        """Look up an experiment by its CLI name or report title.

        Args:
            name (str): ``fraction-women`` or ``FractionWomen`` style name.

        Returns:
            ExperimentKind: Matching experiment.
        """
        for kind in cls:
            if name in (kind.value, kind.title):
                return kind
        known = ", ".join(kind.value for kind in cls)
        raise UnknownExperimentError(f"Unknown experiment {name!r}; expected one of: {known}")


class ExperimentConfig(BaseModel):
    """Validated experiment configuration.

    An empty ``pool_sizes`` means every pool size from 1 to n.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: ExperimentKind
    n_values: list[int] = Field(min_length=1)
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    pool_sizes: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_sizes(self) -> ExperimentConfig:
        if any(n < 2 for n in self.n_values):
            raise ValueError(f"every n must be at least 2, got {self.n_values}")
        smallest = min(self.n_values)
        if any(not 1 <= p <= smallest for p in self.pool_sizes):
            raise ValueError(f"pool sizes must lie in 1..{smallest}, got {self.pool_sizes}")
        return self


def build_config(payload: Mapping[str, object]) -> ExperimentConfig:
    """Validate a configuration mapping.

    Args:
        payload (Mapping[str, object]): Raw configuration values.

    Returns:
        ExperimentConfig: Validated configuration.
    """
    try:
        return ExperimentConfig.model_validate(dict(payload))
    except ValidationError as exc:
        raise ConfigInvalidError(f"Invalid experiment configuration: {exc}") from exc


def load_experiment_config(
    path: Path, *, overrides: Optional[Mapping[str, object]] = None
) -> ExperimentConfig:
    """Load a YAML configuration file, applying explicit overrides on top.

    Args:
        path (Path): YAML file with ``ExperimentConfig`` fields.
        overrides (Optional[Mapping[str, object]]): Values that replace file values.

    Returns:
        ExperimentConfig: Validated configuration.
    """
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigInvalidError(f"Failed to read experiment config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigInvalidError(f"Failed to parse YAML in {path}: {exc}") from exc

    if not isinstance(payload, dict):
        raise ConfigInvalidError(
            f"Experiment config {path} must be a mapping, got {type(payload).__name__}"
        )
    merged: dict[str, object] = {str(key): value for key, value in payload.items()}
    merged.update(overrides or {})
    return build_config(merged)


@dataclass(frozen=True)
class MetricRow:
    """One ``(experiment, n, metric, value)`` row."""

    experiment: str
    n: int
    metric: str
    value: MetricValue


@dataclass(frozen=True)
class SampleRow:
    """One raw per-trial sample for distribution plots."""

    experiment: str
    n: int
    sample_kind: str
    value: int


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated experiment output."""

    experiment: str
    config: MutableJSONObject
    rows: tuple[MetricRow, ...]
    samples: tuple[SampleRow, ...]
    rng: str = RNG_DESCRIPTION
    notes: tuple[str, ...] = ()
    wall_time_seconds: Optional[float] = field(default=None, compare=False)

    def rows_for(self, n: int) -> dict[str, MetricValue]:
        """Return the metrics reported for one market size.

        Args:
            n (int): Market size.

        Returns:
            dict[str, MetricValue]: Metric name to value.
        """
        return {row.metric: row.value for row in self.rows if row.n == n}

    def samples_for(self, n: int, sample_kind: str) -> list[int]:
        """Return raw samples of one kind for one market size.

        Args:
            n (int): Market size.
            sample_kind (str): Sample name.

        Returns:
            list[int]: Sample values in trial order.
        """
        return [row.value for row in self.samples if row.n == n and row.sample_kind == sample_kind]


def random_profile(n: int, rng: np.random.Generator) -> PreferenceProfile:
    """Draw a profile whose 2n lists are independent uniform permutations.

    Args:
        n (int): Agents per side.
        rng (np.random.Generator): Source of randomness.

    Returns:
        PreferenceProfile: Random profile.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    men = [[int(value) for value in rng.permutation(n)] for _ in range(n)]
    women = [[int(value) for value in rng.permutation(n)] for _ in range(n)]
    return PreferenceProfile.from_lists(men, women)


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    """Return the independent stream for one trial.

    Args:
        seed (int): Experiment seed.
        n (int): Market size.
        trial (int): Trial index.

    Returns:
        np.random.Generator: PCG64 generator seeded from ``(seed, n, trial)``.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, n, trial]))


@dataclass(frozen=True)
class _TrialTask:
    kind: ExperimentKind
    n: int
    trial: int
    seed: int
    pool_sizes: tuple[int, ...]


@dataclass(frozen=True)
class _TrialRecord:
    counts: dict[str, int]
    samples: tuple[tuple[str, int], ...] = ()


def _no_regret_beneficiaries(profile: PreferenceProfile, truth: Matching) -> set[int]:
    ranks = profile.women_rank
    women: set[int] = set()
    for man in range(profile.n):
        for candidate in accomplice_candidates(profile, man, truth=truth):
            if not candidate.keeps_partner or candidate.outcome == truth:
                continue
            for woman in range(profile.n):
                before = ranks[woman][truth.woman_to_man[woman]]
                if ranks[woman][candidate.outcome.woman_to_man[woman]] < before:
                    women.add(woman)
    return women


def _self_beneficiaries(profile: PreferenceProfile) -> set[int]:
    truth, trace = run_da(profile)
    return {
        woman
        for woman in range(profile.n)
        if optimal_self(profile, woman, truth=truth, trace=trace).improvement > 0
    }


def _run_trial(task: _TrialTask) -> _TrialRecord:
    profile = random_profile(task.n, trial_rng(task.seed, task.n, task.trial))
    truth, trace = run_da(profile)
    men = range(profile.n)
    w = FIXED_WOMAN

    if task.kind in (
        ExperimentKind.FRACTION_WOMEN,
        ExperimentKind.MANIPULABLE_INSTANCES,
        ExperimentKind.WOMEN_BENEFIT_TABLE,
    ):
        accomplice = len(_no_regret_beneficiaries(profile, truth))
        self_count = len(_self_beneficiaries(profile))
        if task.kind is ExperimentKind.FRACTION_WOMEN:
            return _TrialRecord(counts={"accomplice": accomplice, "self": self_count})
        if task.kind is ExperimentKind.MANIPULABLE_INSTANCES:
            return _TrialRecord(
                counts={"accomplice": int(accomplice > 0), "self": int(self_count > 0)}
            )
        return _TrialRecord(
            counts={f"accomplice_bin_{accomplice}": 1, f"self_bin_{self_count}": 1}
        )

    if task.kind is ExperimentKind.ACCOMPLICE_POOL:
        no_regret: list[int] = []
        with_regret: list[int] = []
        for man in men:
            candidates = accomplice_candidates(profile, man, truth=truth)
            for mode, sink in (
                (AccompliceMode.NO_REGRET, no_regret),
                (AccompliceMode.WITH_REGRET, with_regret),
            ):
                result = optimal_accomplice(
                    profile, man, w, mode, truth=truth, candidates=candidates
                )
                sink.append(result.improvement)
        counts = {"self": optimal_self(profile, w, truth=truth, trace=trace).improvement}
        for size in task.pool_sizes or tuple(range(1, task.n + 1)):
            counts[f"pool_{size}_no_regret"] = max(no_regret[:size])
            counts[f"pool_{size}_with_regret"] = max(with_regret[:size])
        return _TrialRecord(counts=counts)

    if task.kind is ExperimentKind.REGRET_VS_IMPROVEMENT:
        samples: list[tuple[str, int]] = []
        successes = improvement_total = regret_total = 0
        for man in men:
            result = optimal_accomplice(profile, man, w, AccompliceMode.WITH_REGRET, truth=truth)
            if result.improvement > 0:
                successes += 1
                improvement_total += result.improvement
                regret_total += result.regret
                samples.extend((("improvement", result.improvement), ("regret", result.regret)))
        return _TrialRecord(
            counts={
                "successes": successes,
                "improvement_total": improvement_total,
                "regret_total": regret_total,
            },
            samples=tuple(samples),
        )

    accomplice_result = best_accomplice(profile, w, men, AccompliceMode.NO_REGRET, truth=truth)
    self_result = optimal_self(profile, w, truth=truth, trace=trace)
    accomplice_gain = accomplice_result.improvement
    self_gain = self_result.improvement
    if task.kind is ExperimentKind.FREQ_VS_TRUTH:
        return _TrialRecord(
            counts={"accomplice": int(accomplice_gain > 0), "self": int(self_gain > 0)}
        )
    if task.kind is ExperimentKind.HEAD_TO_HEAD:
        return _TrialRecord(
            counts={
                "accomplice_beats_self": int(accomplice_gain > self_gain),
                "self_beats_accomplice": int(self_gain > accomplice_gain),
            }
        )
    samples = []
    if accomplice_gain > 0:
        samples.append(("accomplice_improvement", accomplice_gain))
    if self_gain > 0:
        samples.append(("self_improvement", self_gain))
    return _TrialRecord(counts={}, samples=tuple(samples))


def box_statistics(values: Sequence[int]) -> dict[str, MetricValue]:
    """Summarise samples the way a box plot draws them.

    Whiskers reach the most extreme samples within 1.5 IQR of the quartiles.

    Args:
        values (Sequence[int]): Samples; may be empty.

    Returns:
        dict[str, MetricValue]: ``count`` and, when samples exist, ``mean``, ``q1``,
        ``median``, ``q3``, ``whisker_low`` and ``whisker_high``.
    """
    if not values:
        return {"count": 0}
    data = np.asarray(values, dtype=float)
    q1, median, q3 = (float(value) for value in np.percentile(data, [25.0, 50.0, 75.0]))
    spread = 1.5 * (q3 - q1)
    inside = data[(data >= q1 - spread) & (data <= q3 + spread)]
    return {
        "count": len(values),
        "mean": float(data.mean()),
        "q1": q1,
        "median": median,
        "q3": q3,
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
    }


def _metrics_for(
    kind: ExperimentKind,
    n: int,
    trials: int,
    counts: Counter[str],
    samples: Mapping[str, list[int]],
    pool_sizes: Sequence[int],
) -> list[tuple[str, MetricValue]]:
    if kind in (ExperimentKind.FREQ_VS_TRUTH, ExperimentKind.MANIPULABLE_INSTANCES):
        return [
            ("accomplice_fraction", counts["accomplice"] / trials),
            ("self_fraction", counts["self"] / trials),
        ]
    if kind is ExperimentKind.FRACTION_WOMEN:
        return [
            ("accomplice_fraction", counts["accomplice"] / (trials * n)),
            ("self_fraction", counts["self"] / (trials * n)),
        ]
    if kind is ExperimentKind.HEAD_TO_HEAD:
        return [
            ("accomplice_beats_self_fraction", counts["accomplice_beats_self"] / trials),
            ("self_beats_accomplice_fraction", counts["self_beats_accomplice"] / trials),
        ]
    if kind is ExperimentKind.WOMEN_BENEFIT_TABLE:
        return [
            (f"{strategy}_bin_{k}", counts[f"{strategy}_bin_{k}"])
            for strategy in ("accomplice", "self")
            for k in range(n + 1)
        ]
    if kind is ExperimentKind.ACCOMPLICE_POOL:
        metrics: list[tuple[str, MetricValue]] = [
            ("self_mean_improvement", counts["self"] / trials)
        ]
        for size in pool_sizes or range(1, n + 1):
            for mode in ("no_regret", "with_regret"):
                total = counts[f"pool_{size}_{mode}"]
                metrics.append((f"pool_{size}_{mode}_mean_improvement", total / trials))
        return metrics
    if kind is ExperimentKind.REGRET_VS_IMPROVEMENT:
        successes = counts["successes"]
        metrics = [("success_fraction", successes / (trials * n))]
        if successes:
            metrics.append(("mean_improvement", counts["improvement_total"] / successes))
            metrics.append(("mean_regret", counts["regret_total"] / successes))
        for name in ("improvement", "regret"):
            metrics.extend(
                (f"{name}_{stat}", value) for stat, value in box_statistics(samples[name]).items()
            )
        return metrics
    metrics = []
    for name in ("accomplice", "self"):
        metrics.extend(
            (f"{name}_{stat}", value)
            for stat, value in box_statistics(samples[f"{name}_improvement"]).items()
        )
    return metrics


def _sample_kinds(kind: ExperimentKind) -> tuple[str, ...]:
    if kind is ExperimentKind.RANK_IMPROVEMENT:
        return ("accomplice_improvement", "self_improvement")
    if kind is ExperimentKind.REGRET_VS_IMPROVEMENT:
        return ("improvement", "regret")
    return ()


def _execute(tasks: list[_TrialTask], jobs: int) -> Iterable[_TrialRecord]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_trial(task) for task in tasks]
    chunksize = max(1, len(tasks) // (jobs * 4))
    logger.debug("dispatching %d trials to %d workers in chunks of %d", len(tasks), jobs, chunksize)
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(_run_trial, tasks, chunksize=chunksize))


def run_experiment(config: ExperimentConfig, *, jobs: int = 1) -> ExperimentReport:
    """Run every trial of an experiment and aggregate the metrics.

    Trials are independent; ``jobs > 1`` spreads them over worker processes without
    changing the report.

    Args:
        config (ExperimentConfig): Validated configuration.
        jobs (int): Worker processes.

    Returns:
        ExperimentReport: Metric rows per n, raw samples and the configuration echo.
    """
    kind = config.experiment
    started = time.perf_counter()
    rows: list[MetricRow] = []
    sample_rows: list[SampleRow] = []

    for n in sorted(set(config.n_values)):
        n_started = time.perf_counter()
        tasks = [
            _TrialTask(
                kind=kind,
                n=n,
                trial=trial,
                seed=config.seed,
                pool_sizes=tuple(config.pool_sizes),
            )
            for trial in range(config.trials)
        ]
        counts: Counter[str] = Counter()
        samples: dict[str, list[int]] = {name: [] for name in _sample_kinds(kind)}
        for record in _execute(tasks, jobs):
            counts.update(record.counts)
            for name, value in record.samples:
                samples[name].append(value)

        metrics = _metrics_for(kind, n, config.trials, counts, samples, config.pool_sizes)
        for metric, value in metrics:
            rows.append(MetricRow(experiment=kind.title, n=n, metric=metric, value=value))
        for name, values in samples.items():
            sample_rows.extend(
                SampleRow(experiment=kind.title, n=n, sample_kind=name, value=value)
                for value in values
            )
        logger.info(
            "%s n=%d: %d trials in %.2fs",
            kind.title,
            n,
            config.trials,
            time.perf_counter() - n_started,
        )

    return ExperimentReport(
        experiment=kind.title,
        config=_config_echo(config),
        rows=tuple(rows),
        samples=tuple(sample_rows),
        notes=(IMPROVEMENT_NOTE, f"fixed woman = w{FIXED_WOMAN + 1}; pools are m1..mp"),
        wall_time_seconds=time.perf_counter() - started,
    )


def _config_echo(config: ExperimentConfig) -> MutableJSONObject:
    return {
        "experiment": config.experiment.value,
        "n_values": list(config.n_values),
        "trials": config.trials,
        "seed": config.seed,
        "pool_sizes": list(config.pool_sizes),
    }
