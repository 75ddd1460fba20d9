"""Explicit normal-form games given by payoff tables.

Payoffs are listed per player as nested arrays indexed lexicographically
(player 0 outermost). An optional ``potential`` table of the same shape turns
the game into a potential game, and optional per-player ``out`` indices mark
one live strategy as the player's exit strategy (its payoff must be exactly 0
for that player), which is what structural checkers key on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from ..core import Direction, Game, Profile
from ..errors import SpecError
from . import schema


def _parse_tensor(value: Any, shape: tuple[int, ...], path: str) -> np.ndarray:
    def walk(node: Any, dims: tuple[int, ...], where: str):
        if not dims:
            return schema.as_number(node, where)
        rows = schema.as_list(node, where)
        if len(rows) != dims[0]:
            raise SpecError(where, f"expected {dims[0]} entries, got {len(rows)}")
        return [walk(row, dims[1:], f"{where}[{i}]") for i, row in enumerate(rows)]

    return np.array(walk(value, shape, path), dtype=np.float64).reshape(shape)


@dataclass(frozen=True, eq=False)
class NormalFormSpec:
    strategies: tuple[tuple[str, ...], ...]
    payoffs: np.ndarray  # shape (n_players, *strategy_counts)
    direction: Direction
    potential: np.ndarray | None
    out: tuple[int | None, ...] | None

    @property
    def n_players(self) -> int:
        return len(self.strategies)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.strategies)

    @classmethod
    def parse(cls, payload: Mapping, path: str = "payload") -> "NormalFormSpec":
        schema.check_keys(
            payload, path,
            required=["players", "strategies", "utilities", "direction"],
            optional=["potential", "out"],
        )
        n = schema.as_int(payload["players"], f"{path}.players", minimum=1)
        raw_strats = schema.as_list(payload["strategies"], f"{path}.strategies", min_len=1)
        if len(raw_strats) != n:
            raise SpecError(f"{path}.strategies", f"expected {n} per-player lists")
        strategies = []
        for i, names in enumerate(raw_strats):
            names = schema.as_list(names, f"{path}.strategies[{i}]", min_len=1)
            strategies.append(tuple(schema.as_str(x, f"{path}.strategies[{i}][{j}]") for j, x in enumerate(names)))
        counts = tuple(len(s) for s in strategies)

        direction = _parse_direction(payload["direction"], f"{path}.direction")

        raw_u = schema.as_list(payload["utilities"], f"{path}.utilities")
        if len(raw_u) != n:
            raise SpecError(f"{path}.utilities", f"expected {n} per-player tables")
        tables = [_parse_tensor(raw_u[i], counts, f"{path}.utilities[{i}]") for i in range(n)]
        payoffs = np.stack(tables, axis=0)
        if np.any(payoffs < 0):
            raise SpecError(f"{path}.utilities", "payoffs must be nonnegative")

        pot = None
        if payload.get("potential") is not None:
            pot = _parse_tensor(payload["potential"], counts, f"{path}.potential")

        out: tuple[int | None, ...] | None = None
        if payload.get("out") is not None:
            raw_out = schema.as_list(payload["out"], f"{path}.out")
            if len(raw_out) != n:
                raise SpecError(f"{path}.out", f"expected {n} entries")
            entries = []
            for i, o in enumerate(raw_out):
                if o is None:
                    entries.append(None)
                    continue
                o = schema.as_int(o, f"{path}.out[{i}]", minimum=0)
                if o >= counts[i]:
                    raise SpecError(f"{path}.out[{i}]", f"index {o} out of range for player {i}")
                # The exit strategy must pay its owner exactly zero everywhere.
                sl = [slice(None)] * n
                sl[i] = o
                if np.any(payoffs[(i, *sl)] != 0.0):
                    raise SpecError(f"{path}.out[{i}]", "exit strategy must yield payoff exactly 0")
                entries.append(o)
            out = tuple(entries)

        return cls(tuple(strategies), payoffs, direction, pot, out)

    def build(self) -> Game:
        payoffs = self.payoffs
        pot = self.potential

        def utility_fn(i: int, s: Profile) -> float:
            return float(payoffs[(i, *s)])

        potential_fn = None
        if pot is not None:
            def potential_fn(s: Profile) -> float:
                return float(pot[s])

        return Game(
            n_players=self.n_players,
            strategy_counts=self.strategy_counts,
            direction=self.direction,
            utility_fn=utility_fn,
            out_strategies=self.out,
            potential_fn=potential_fn,
            strategy_labels=self.strategies,
            kind="normal_form",
            payload=self,
        )


def _parse_direction(value: Any, path: str) -> Direction:
    value = schema.as_str(value, path)
    if value not in ("max", "min"):
        raise SpecError(path, f"expected 'max' or 'min', got {value!r}")
    return Direction.parse(value)
