"""Shared helpers for fixture-driven tests."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import ParamSpec, TypeVar

import pytest
from hypothesis import strategies as st

from accomplice_da.model_types import PreferenceProfile
from accomplice_da.profile_io import load_profile

_FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures" / "profiles"
_P = ParamSpec("_P")
_R = TypeVar("_R")


def fixture_dir() -> Path:
    """Return the profile fixtures directory."""
    return _FIXTURE_DIR


def iter_fixture_paths() -> list[Path]:
    """Return all profile fixture paths sorted by name."""
    return [path for path in sorted(_FIXTURE_DIR.glob("*.txt")) if path.is_file()]


def load_fixture(name: str) -> PreferenceProfile:
    """Load a named profile fixture such as ``intro``."""
    return load_profile(_FIXTURE_DIR / f"{name}.txt")


def parametrize_fixtures() -> Callable[[Callable[_P, _R]], Callable[_P, _R]]:
    """Parametrize a test over all fixture paths."""

    def _decorator(func: Callable[_P, _R]) -> Callable[_P, _R]:
        decorator: Callable[[Callable[_P, _R]], Callable[_P, _R]]
        decorator = pytest.mark.parametrize(
            "fixture_path",
            iter_fixture_paths(),
            ids=lambda path: path.name,
        )
        return decorator(func)

    return _decorator


@st.composite
def profiles(draw: st.DrawFn, *, min_n: int = 1, max_n: int = 5) -> PreferenceProfile:
    """Draw a profile whose lists are arbitrary permutations."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    agents = list(range(n))
    men = [draw(st.permutations(agents)) for _ in range(n)]
    women = [draw(st.permutations(agents)) for _ in range(n)]
    return PreferenceProfile.from_lists(men, women)
