"""Builders that reduce each game family to the core :class:`~coalgame.core.Game`.

A game-spec document is a JSON object ``{"kind": ..., "payload": {...}}``.
Supported kinds: ``normal_form``, ``cost_sharing``, ``network_contribution``,
``welfare_sharing``, ``utility_congestion``. Validation is strict (unknown
fields rejected) and failures carry the offending field path.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

from ..core import Game
from ..errors import SpecError
from .congestion import CongestionSpec, congestion_utility, rosenthal_potential
from .contribution import ContributionSpec, contribution_utility
from .cost_sharing import CostSharingSpec, cost_share_cost
from .normal_form import NormalFormSpec
from .welfare_sharing import WelfareSharingSpec, welfare_share_utility

_FAMILIES = {
    "normal_form": NormalFormSpec,
    "cost_sharing": CostSharingSpec,
    "network_contribution": ContributionSpec,
    "welfare_sharing": WelfareSharingSpec,
    "utility_congestion": CongestionSpec,
}


def parse_spec(document: Mapping):
    """Validate a spec document and return the typed family spec."""
    if not isinstance(document, Mapping):
        raise SpecError("$", "expected a JSON object")
    for key in document:
        if key not in ("kind", "payload"):
            raise SpecError(f"$.{key}", "unknown field")
    for key in ("kind", "payload"):
        if key not in document:
            raise SpecError(f"$.{key}", "missing required field")
    kind = document["kind"]
    if kind not in _FAMILIES:
        raise SpecError("$.kind", f"unknown game kind {kind!r}")
    return _FAMILIES[kind].parse(document["payload"], path="payload")


def load_game(document: Mapping) -> Game:
    """Build a :class:`Game` from a parsed spec document."""
    return parse_spec(document).build()


def load_game_file(path: str | Path) -> Game:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError("$", f"cannot read {path}: {exc}") from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("$", f"invalid JSON: {exc}") from exc
    return load_game(document)


__all__ = [
    "CongestionSpec",
    "ContributionSpec",
    "CostSharingSpec",
    "NormalFormSpec",
    "WelfareSharingSpec",
    "congestion_utility",
    "contribution_utility",
    "cost_share_cost",
    "load_game",
    "load_game_file",
    "parse_spec",
    "rosenthal_potential",
    "welfare_share_utility",
]
