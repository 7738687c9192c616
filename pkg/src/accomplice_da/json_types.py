"""JSON-compatible typing aliases for profile, report and bundle documents."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Union

type JSONScalar = Union[str, int, float, bool, None]
type JSONValue = Union[JSONScalar, list[JSONValue], Mapping[str, JSONValue]]
type JSONObject = Mapping[str, JSONValue]
type MutableJSONObject = dict[str, JSONValue]
