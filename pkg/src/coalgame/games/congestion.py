"""Utility congestion games: per-resource payoffs that depend only on occupancy.

A player's strategy is a resource subset; each used resource pays the
occupancy-indexed value pi_r(n_r). The family admits the classic potential
that accumulates pi_r(1) + ... + pi_r(n_r) per resource. A resource is
specified either by an explicit occupancy table (one entry per player) or by
the fair-split tag where pi_r(k) = v_r / k. For occupancies beyond the table
length (reachable only in the multiset analysis used by the submodularity
checker) tables extend by their final entry, which preserves monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..core import Direction, Game, Profile
from ..errors import SpecError
from . import schema


@dataclass(frozen=True, eq=False)
class CongestionSpec:
    resource_ids: tuple[str, ...]
    values: tuple[tuple[str, tuple[float, ...] | float], ...]  # ("table", entries) | ("harmonic", v)
    strategies: tuple[tuple[frozenset[int], ...], ...]

    @property
    def n_players(self) -> int:
        return len(self.strategies)

    @classmethod
    def parse(cls, payload: Mapping, path: str = "payload") -> "CongestionSpec":
        schema.check_keys(payload, path, required=["resources", "players"])
        raw_players = schema.as_list(payload["players"], path + ".players", min_len=1)
        n = len(raw_players)

        raw_res = schema.as_list(payload["resources"], path + ".resources")
        ids, values = [], []
        for i, res in enumerate(raw_res):
            where = f"{path}.resources[{i}]"
            if not isinstance(res, Mapping):
                raise SpecError(where, "expected an object")
            if "pi" in res:
                schema.check_keys(res, where, required=["id", "pi"])
                table = schema.as_list(res["pi"], where + ".pi", min_len=1)
                if len(table) != n:
                    raise SpecError(where + ".pi", f"expected {n} entries (one per occupancy level)")
                entries = tuple(
                    schema.as_number(x, f"{where}.pi[{k}]", minimum=0.0) for k, x in enumerate(table)
                )
                values.append(("table", entries))
            elif "harmonic" in res:
                schema.check_keys(res, where, required=["id", "harmonic"])
                values.append(("harmonic", schema.as_number(res["harmonic"], where + ".harmonic", minimum=0.0)))
            else:
                raise SpecError(where, "expected either a 'pi' table or a 'harmonic' value")
            ids.append(schema.as_str(res["id"], where + ".id"))
        res_index = schema.unique_ids(ids, path + ".resources")

        strategies = []
        for p, player in enumerate(raw_players):
            where = f"{path}.players[{p}]"
            schema.check_keys(player, where, required=["strategies"])
            raw_strats = schema.as_list(player["strategies"], where + ".strategies", min_len=1)
            strats = []
            for k, subset in enumerate(raw_strats):
                sub_where = f"{where}.strategies[{k}]"
                subset = schema.as_list(subset, sub_where)
                members = []
                for m, rid in enumerate(subset):
                    rid = schema.as_str(rid, f"{sub_where}[{m}]")
                    if rid not in res_index:
                        raise SpecError(f"{sub_where}[{m}]", f"unknown resource {rid!r}")
                    members.append(res_index[rid])
                if len(set(members)) != len(members):
                    raise SpecError(sub_where, "duplicate resource in strategy")
                strats.append(frozenset(members))
            strategies.append(tuple(strats))
        return cls(tuple(ids), tuple(values), tuple(strategies))

    def pi(self, r: int, k: int) -> float:
        """Per-player payoff of resource r at occupancy k >= 1."""
        kind, data = self.values[r]
        if kind == "harmonic":
            return data / k
        table: tuple[float, ...] = data  # type: ignore[assignment]
        return table[min(k, len(table)) - 1]

    def cumulative_pi(self, r: int, k: int) -> float:
        return sum(self.pi(r, j) for j in range(1, k + 1))

    def occupancy(self, s: Sequence[int]) -> list[int]:
        counts = [0] * len(self.resource_ids)
        for i, choice in enumerate(s):
            if choice >= len(self.strategies[i]):
                continue
            for r in self.strategies[i][choice]:
                counts[r] += 1
        return counts

    def player_utility(self, i: int, s: Sequence[int]) -> float:
        return congestion_utility(self, i, s)

    def build(self) -> Game:
        cache: dict[Profile, tuple[float, ...]] = {}

        def all_utilities(s: Profile) -> tuple[float, ...]:
            got = cache.get(s)
            if got is None:
                occ = self.occupancy(s)
                got = tuple(
                    0.0
                    if s[i] >= len(self.strategies[i])
                    else sum(self.pi(r, occ[r]) for r in self.strategies[i][s[i]])
                    for i in range(self.n_players)
                )
                cache[s] = got
            return got

        labels = tuple(
            tuple("{" + ",".join(sorted(self.resource_ids[r] for r in subset)) + "}" for subset in strats)
            for strats in self.strategies
        )
        return Game(
            n_players=self.n_players,
            strategy_counts=tuple(len(s) for s in self.strategies),
            direction=Direction.UTILITY_MAX,
            utility_fn=lambda i, s: all_utilities(s)[i],
            out_strategies=tuple(len(s) for s in self.strategies),
            potential_fn=lambda s: rosenthal_potential(self, s),
            strategy_labels=labels,
            kind="utility_congestion",
            payload=self,
        )


def congestion_utility(spec: CongestionSpec, i: int, s: Sequence[int]) -> float:
    """Player i's payoff: sum of pi_r at current occupancy over their resources."""
    if s[i] >= len(spec.strategies[i]):
        return 0.0
    occ = spec.occupancy(s)
    return sum(spec.pi(r, occ[r]) for r in spec.strategies[i][s[i]])


def rosenthal_potential(spec: CongestionSpec, s: Sequence[int]) -> float:
    """Occupancy potential: per resource, the partial sums pi_r(1)+...+pi_r(n_r)."""
    occ = spec.occupancy(s)
    return sum(spec.cumulative_pi(r, n_r) for r, n_r in enumerate(occ))
