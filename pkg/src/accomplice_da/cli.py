"""Command line interface for DA matching, manipulation audits, experiments and verification."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Optional

import click
import numpy as np

from .da_engine import run_da, run_da_women_proposing
from .experiments import (
    ConfigInvalidError,
    ExperimentKind,
    UnknownExperimentError,
    build_config,
    load_experiment_config,
    random_profile,
    run_experiment,
)
from .json_types import MutableJSONObject
from .manipulation import best_accomplice, optimal_accomplice, optimal_self
from .model_types import (
    AccompliceMode,
    ManipulationResult,
    Matching,
    PreferenceProfile,
    ProfileError,
    Strategy,
)
from .naming import (
    Side,
    UnknownAgentError,
    man_name,
    parse_agent_name,
    parse_agent_names,
    render_list,
    woman_name,
)
from .profile_io import (
    ProfileFormat,
    ProfileLoadError,
    load_profile,
    serialize_profile,
    write_profile,
)
from .report_io import ReportFormat, ReportWriteError, emit_report, format_value, write_report
from .verify import (
    Claim,
    CounterexampleError,
    UnknownClaimError,
    VerificationConfigError,
    format_report,
    replay_counterexample,
    verify_claim,
    write_counterexample,
)

logger = logging.getLogger(__name__)

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


class VerificationFailedError(click.ClickException):
    """Raised when a verified claim has counterexamples."""

    exit_code = 1


class InputFileError(click.ClickException):
    """Raised when an input file cannot be read, parsed or written."""

    exit_code = 2


class UnknownAgentNameError(click.ClickException):
    """Raised when an agent name does not exist in the instance."""

    exit_code = 3


class UnknownNameError(click.ClickException):
    """Raised when an experiment or claim name is not recognised."""

    exit_code = 4


def _configure_logging(verbose: int) -> None:
    """Configure stderr logging for the whole command.

    Args:
        verbose (int): Number of ``-v`` flags given.
    """
    logging.basicConfig(
        level=_LOG_LEVELS[min(verbose, len(_LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load(profile_path: Path) -> PreferenceProfile:
    try:
        return load_profile(profile_path)
    except (ProfileError, ProfileLoadError) as exc:
        raise InputFileError(f"{profile_path}: {exc}") from exc


def _parse_range(text: str) -> tuple[int, int]:
    low, sep, high = text.partition("..")
    try:
        bounds = (int(low), int(high if sep else low))
    except ValueError as exc:
        raise click.BadParameter(f"expected A..B, got {text!r}") from exc
    if bounds[0] > bounds[1]:
        raise click.BadParameter(f"empty range {text!r}")
    return bounds


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from exc


def _matching_lines(matching: Matching) -> list[str]:
    return [f"{man_name(man)} -- {woman_name(woman)}" for man, woman in matching.pairs()]


def _matching_json(matching: Matching) -> list[list[str]]:
    return [[man_name(man), woman_name(woman)] for man, woman in matching.pairs()]


def _solve(profile_path: Path, trace: bool, women_proposing: bool, output_format: str) -> None:
    if trace and women_proposing:
        raise click.UsageError("--trace applies to men-proposing DA only")
    profile = _load(profile_path)
    if women_proposing:
        matching = run_da_women_proposing(profile)
        proposals: Sequence[tuple[str, str]] = ()
    else:
        matching, proposal_trace = run_da(profile)
        proposals = [(man_name(m), woman_name(w)) for m, w in proposal_trace.proposals]

    if ProfileFormat(output_format) is ProfileFormat.JSON:
        payload: MutableJSONObject = {"matching": _matching_json(matching)}
        if trace:
            payload["proposals"] = [[m, w] for m, w in proposals]
        click.echo(json.dumps(payload))
        return

    for line in _matching_lines(matching):
        click.echo(line)
    if trace:
        click.echo("Proposals:")
        for m, w in proposals:
            click.echo(f"{m} -> {w}")


def _audit_result(
    profile: PreferenceProfile,
    w: int,
    strategy: Strategy,
    accomplice: Optional[str],
    pool: Optional[str],
) -> ManipulationResult:
    if strategy is Strategy.SELF:
        if accomplice is not None or pool is not None:
            raise click.UsageError("--accomplice and --pool do not apply to self manipulation")
        return optimal_self(profile, w)

    mode = (
        AccompliceMode.NO_REGRET
        if strategy is Strategy.ACCOMPLICE_NO_REGRET
        else AccompliceMode.WITH_REGRET
    )
    if accomplice is not None and pool is not None:
        raise click.UsageError("use either --accomplice or --pool, not both")
    try:
        if accomplice is not None:
            m = parse_agent_name(accomplice, side=Side.MEN, n=profile.n)
            return optimal_accomplice(profile, m, w, mode)
        members = (
            range(profile.n)
            if pool is None
            else parse_agent_names(pool.split(","), side=Side.MEN, n=profile.n)
        )
    except UnknownAgentError as exc:
        raise UnknownAgentNameError(str(exc)) from exc
    return best_accomplice(profile, w, members, mode)


def _audit(
    profile_path: Path,
    woman: str,
    strategy: str,
    accomplice: Optional[str],
    pool: Optional[str],
    output_format: str,
) -> None:
    profile = _load(profile_path)
    try:
        w = parse_agent_name(woman, side=Side.WOMEN, n=profile.n)
    except UnknownAgentError as exc:
        raise UnknownAgentNameError(str(exc)) from exc
    result = _audit_result(profile, w, Strategy(strategy), accomplice, pool)

    manipulator_side = Side.WOMEN if result.strategy is Strategy.SELF else Side.MEN
    promoted_side = manipulator_side.other
    promoted = (
        None
        if result.promoted_agent is None
        else render_list(promoted_side, (result.promoted_agent,))
    )
    summary: MutableJSONObject = {
        "strategy": result.strategy.value,
        "manipulator": render_list(manipulator_side, (result.manipulator,)),
        "woman": woman_name(result.target_woman),
        "promoted": promoted,
        "misreport": render_list(promoted_side, result.misreport),
        "partner": man_name(result.target_partner),
        "improvement": result.improvement,
        "regret": result.regret,
        "stable": result.outcome_stable_wrt_truth,
        "single_agent_stable": result.outcome_m_stable_wrt_truth,
    }
    if ProfileFormat(output_format) is ProfileFormat.JSON:
        summary["matching"] = _matching_json(result.outcome)
        click.echo(json.dumps(summary))
        return

    for key, value in summary.items():
        shown = "none" if value is None else value
        if isinstance(value, bool):
            shown = "yes" if value else "no"
        click.echo(f"{key.replace('_', ' ').capitalize()}: {shown}")
    click.echo("Outcome:")
    for line in _matching_lines(result.outcome):
        click.echo(f"  {line}")


def _experiment(
    name: str,
    config_path: Optional[Path],
    n_range: Optional[str],
    trials: Optional[int],
    seed: Optional[int],
    pool_sizes: Optional[str],
    out_path: Optional[Path],
    output_format: str,
    jobs: int,
) -> None:
    try:
        kind = ExperimentKind.from_name(name)
    except UnknownExperimentError as exc:
        raise UnknownNameError(str(exc)) from exc

    overrides: dict[str, object] = {"experiment": kind.value}
    if n_range is not None:
        low, high = _parse_range(n_range)
        overrides["n_values"] = list(range(low, high + 1))
    if trials is not None:
        overrides["trials"] = trials
    if seed is not None:
        overrides["seed"] = seed
    if pool_sizes is not None:
        overrides["pool_sizes"] = _parse_ints(pool_sizes)

    try:
        if config_path is not None:
            config = load_experiment_config(config_path, overrides=overrides)
        elif "n_values" not in overrides:
            raise click.UsageError("--n-range is required without --config")
        else:
            config = build_config(overrides)
    except ConfigInvalidError as exc:
        raise InputFileError(str(exc)) from exc

    report = run_experiment(config, jobs=jobs)
    text = emit_report(report, ReportFormat(output_format))
    if out_path is None:
        click.echo(text, nl=False)
    else:
        try:
            write_report(text, out_path)
        except ReportWriteError as exc:
            raise InputFileError(str(exc)) from exc

    for n in sorted(set(config.n_values)):
        metrics = " ".join(
            f"{metric}={format_value(value)}" for metric, value in report.rows_for(n).items()
        )
        click.echo(f"{report.experiment} n={n}: {metrics}", err=True)
    if report.wall_time_seconds is not None:
        logger.info("%s finished in %.2fs", report.experiment, report.wall_time_seconds)


def _verify(
    claim_name: Optional[str],
    trials: int,
    n_range: str,
    seed: int,
    exhaustive: bool,
    out_dir: Path,
    replay: Optional[Path],
) -> None:
    if replay is not None:
        _replay(replay)
        return
    if claim_name is None:
        raise click.UsageError("--claim is required unless --replay is given")
    try:
        claim = Claim.from_name(claim_name)
    except UnknownClaimError as exc:
        raise UnknownNameError(str(exc)) from exc

    try:
        report = verify_claim(
            claim, trials=trials, n_range=_parse_range(n_range), seed=seed, exhaustive=exhaustive
        )
    except VerificationConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(format_report(report))
    if report.first_counterexample is None:
        return
    try:
        profile_path, sidecar_path = write_counterexample(report.first_counterexample, out_dir)
    except CounterexampleError as exc:
        raise InputFileError(str(exc)) from exc
    click.echo(f"Counterexample: {profile_path}")
    click.echo(f"Sidecar: {sidecar_path}")
    raise VerificationFailedError(f"{claim.value} failed on {report.failures} of {report.trials}")


def _replay(sidecar_path: Path) -> None:
    try:
        example = replay_counterexample(sidecar_path)
    except CounterexampleError as exc:
        raise InputFileError(str(exc)) from exc
    except UnknownClaimError as exc:
        raise UnknownNameError(str(exc)) from exc
    if example is None:
        click.echo(f"Replay of {sidecar_path}: claim holds")
        return
    click.echo(f"Replay of {sidecar_path}: claim {example.claim.value} fails")
    for key, value in example.details.items():
        click.echo(f"  {key}: {json.dumps(value)}")
    raise VerificationFailedError(f"{example.claim.value} still fails on trial {example.trial}")


def _gen(n: int, seed: int, out_path: Optional[Path], output_format: str) -> None:
    profile = random_profile(n, np.random.default_rng(np.random.SeedSequence([seed, n])))
    fmt = ProfileFormat(output_format)
    if out_path is None:
        click.echo(serialize_profile(profile, fmt=fmt), nl=False)
        return
    try:
        write_profile(profile, out_path, fmt=fmt)
    except ProfileLoadError as exc:
        raise InputFileError(str(exc)) from exc


def _profile_argument() -> click.Argument:
    return click.Argument(["profile_path"], type=click.Path(path_type=Path, dir_okay=False))


def _format_option(choices: Sequence[str], default: str) -> click.Option:
    return click.Option(
        ["--format", "output_format"],
        type=click.Choice(list(choices)),
        default=default,
        show_default=True,
        help="Output format",
    )


solve = click.Command(
    name="solve",
    help="Run men-proposing DA on a profile file and print the matching",
    callback=_solve,
    params=[
        _profile_argument(),
        click.Option(
            ["--trace"], is_flag=True, help="Also print every proposal (men-proposing only)"
        ),
        click.Option(
            ["--women-proposing"], is_flag=True, help="Run women-proposing DA instead"
        ),
        _format_option([fmt.value for fmt in ProfileFormat], ProfileFormat.TEXT.value),
    ],
)

audit = click.Command(
    name="audit",
    help="Find the best manipulation for one woman and audit its outcome",
    callback=_audit,
    params=[
        _profile_argument(),
        click.Option(["--woman"], required=True, help="Woman to manipulate for, e.g. w1"),
        click.Option(
            ["--strategy"],
            required=True,
            type=click.Choice([strategy.value for strategy in Strategy]),
            help="Manipulation strategy",
        ),
        click.Option(["--accomplice"], default=None, help="Single accomplice, e.g. m1"),
        click.Option(
            ["--pool"], default=None, help="Comma-separated accomplice pool; all men by default"
        ),
        _format_option([fmt.value for fmt in ProfileFormat], ProfileFormat.TEXT.value),
    ],
)

experiment = click.Command(
    name="experiment",
    help="Run a seeded Monte Carlo experiment and write its report",
    callback=_experiment,
    params=[
        click.Argument(["name"]),
        click.Option(
            ["--config", "config_path"],
            type=click.Path(path_type=Path, dir_okay=False),
            default=None,
            help="YAML experiment configuration; flags override its values",
        ),
        click.Option(["--n-range"], default=None, help="Inclusive market sizes, e.g. 3..8"),
        click.Option(["--trials"], type=click.IntRange(min=1), default=None, help="Trials per n"),
        click.Option(["--seed"], type=click.IntRange(min=0), default=None, help="Base seed"),
        click.Option(["--pool-sizes"], default=None, help="Comma-separated pool sizes"),
        click.Option(
            ["--out", "out_path"],
            type=click.Path(path_type=Path, dir_okay=False),
            default=None,
            help="Report file; stdout when omitted",
        ),
        _format_option([fmt.value for fmt in ReportFormat], ReportFormat.CSV.value),
        click.Option(
            ["--jobs"],
            type=click.IntRange(min=1),
            default=1,
            show_default=True,
            help="Worker processes",
        ),
    ],
)

verify = click.Command(
    name="verify",
    help="Check a claim on random or exhaustive instances",
    callback=_verify,
    params=[
        click.Option(["--claim", "claim_name"], default=None, help="Claim name"),
        click.Option(["--trials"], type=click.IntRange(min=1), default=200, show_default=True),
        click.Option(["--n-range"], default="3..5", show_default=True, help="Inclusive n bounds"),
        click.Option(["--seed"], type=click.IntRange(min=0), default=0, show_default=True),
        click.Option(
            ["--exhaustive"], is_flag=True, help="Enumerate every profile instead of sampling"
        ),
        click.Option(
            ["--out-dir"],
            type=click.Path(path_type=Path, file_okay=False),
            default=Path("counterexamples"),
            show_default=True,
            help="Directory for counterexample bundles",
        ),
        click.Option(
            ["--replay"],
            type=click.Path(path_type=Path, dir_okay=False),
            default=None,
            help="Re-run the check stored in a counterexample sidecar",
        ),
    ],
)

gen = click.Command(
    name="gen",
    help="Generate a uniformly random profile",
    callback=_gen,
    params=[
        click.Option(["--n"], type=click.IntRange(min=1), required=True, help="Agents per side"),
        click.Option(["--seed"], type=click.IntRange(min=0), default=0, show_default=True),
        click.Option(
            ["--out", "out_path"],
            type=click.Path(path_type=Path, dir_okay=False),
            default=None,
            help="Profile file; stdout when omitted",
        ),
        _format_option([fmt.value for fmt in ProfileFormat], ProfileFormat.TEXT.value),
    ],
)

main = click.Group(
    name="accomplice-da",
    help="Deferred acceptance with accomplice and self manipulation",
    callback=_configure_logging,
    params=[
        click.Option(
            ["--verbose", "-v"], count=True, help="Log INFO with -v and DEBUG with -vv to stderr"
        ),
    ],
    commands=[solve, audit, experiment, verify, gen],
)
