"""Deferred acceptance with accomplice and self manipulation."""

from __future__ import annotations

from .cli import main
from .da_engine import run_da, run_da_women_proposing
from .experiments import ExperimentConfig, ExperimentReport, run_experiment
from .manipulation import (
    best_accomplice,
    optimal_accomplice,
    optimal_accomplice_no_regret,
    optimal_accomplice_with_regret,
    optimal_self,
)
from .model_types import (
    AccompliceMode,
    ManipulationResult,
    Matching,
    PreferenceProfile,
    Strategy,
)
from .profile_io import load_profile, parse_profile
from .verify import Claim, OracleReport, verify_claim

__all__ = [
    "AccompliceMode",
    "Claim",
    "ExperimentConfig",
    "ExperimentReport",
    "ManipulationResult",
    "Matching",
    "OracleReport",
    "PreferenceProfile",
    "Strategy",
    "best_accomplice",
    "load_profile",
    "main",
    "optimal_accomplice",
    "optimal_accomplice_no_regret",
    "optimal_accomplice_with_regret",
    "optimal_self",
    "parse_profile",
    "run_da",
    "run_da_women_proposing",
    "run_experiment",
    "verify_claim",
]
