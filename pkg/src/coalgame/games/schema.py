"""Small validation helpers for game-spec documents.

Every helper raises :class:`~coalgame.errors.SpecError` with a dotted field
path, so CLI diagnostics can name exactly which part of a JSON document is
wrong. Unknown fields are always rejected.
"""

from __future__ import annotations

import math
from typing import Any, Mapping, Sequence

from ..errors import SpecError


def check_keys(obj: Any, path: str, required: Sequence[str], optional: Sequence[str] = ()) -> Mapping:
    if not isinstance(obj, Mapping):
        raise SpecError(path, f"expected an object, got {type(obj).__name__}")
    for key in required:
        if key not in obj:
            raise SpecError(f"{path}.{key}", "missing required field")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise SpecError(f"{path}.{key}", "unknown field")
    return obj


def as_list(value: Any, path: str, min_len: int = 0) -> list:
    if not isinstance(value, list):
        raise SpecError(path, f"expected a list, got {type(value).__name__}")
    if len(value) < min_len:
        raise SpecError(path, f"expected at least {min_len} entries, got {len(value)}")
    return value


def as_str(value: Any, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise SpecError(path, "expected a nonempty string")
    return value


def as_int(value: Any, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(path, f"expected an integer, got {type(value).__name__}")
    if minimum is not None and value < minimum:
        raise SpecError(path, f"expected an integer >= {minimum}, got {value}")
    return value


def as_number(value: Any, path: str, minimum: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(path, f"expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise SpecError(path, "expected a finite number")
    if minimum is not None and value < minimum:
        raise SpecError(path, f"expected a number >= {minimum}, got {value}")
    return value


def as_optional_cap(value: Any, path: str) -> float:
    """A nonnegative factor cap; null or "inf" means unbounded."""
    if value is None or value == "inf":
        return math.inf
    return as_number(value, path, minimum=0.0)


def unique_ids(items: Sequence[str], path: str) -> dict[str, int]:
    index: dict[str, int] = {}
    for pos, item in enumerate(items):
        if item in index:
            raise SpecError(f"{path}[{pos}]", f"duplicate id {item!r}")
        index[item] = pos
    return index
