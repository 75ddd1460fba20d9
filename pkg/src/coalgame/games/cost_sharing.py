"""Fair cost-sharing games over discrete resources.

Each resource has a fixed cost that is split equally among the players using
it; a player's strategy is one of their allowed resource subsets and their
cost is the sum of their shares. The exit strategy is the (virtual) empty
subset. The family is an exact potential game: the potential adds, per
resource, the harmonic partial sums of its cost over current occupancy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..core import Direction, Game, Profile
from ..errors import SpecError
from . import schema


@dataclass(frozen=True, eq=False)
class CostSharingSpec:
    resource_ids: tuple[str, ...]
    costs: tuple[float, ...]
    strategies: tuple[tuple[frozenset[int], ...], ...]  # per player, sets of resource indices

    @property
    def n_players(self) -> int:
        return len(self.strategies)

    @classmethod
    def parse(cls, payload: Mapping, path: str = "payload") -> "CostSharingSpec":
        schema.check_keys(payload, path, required=["resources", "players"])
        raw_res = schema.as_list(payload["resources"], path + ".resources")
        ids, costs = [], []
        for i, res in enumerate(raw_res):
            where = f"{path}.resources[{i}]"
            schema.check_keys(res, where, required=["id", "cost"])
            ids.append(schema.as_str(res["id"], where + ".id"))
            costs.append(schema.as_number(res["cost"], where + ".cost", minimum=0.0))
        res_index = schema.unique_ids(ids, path + ".resources")

        raw_players = schema.as_list(payload["players"], path + ".players", min_len=1)
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
        return cls(tuple(ids), tuple(costs), tuple(strategies))

    def occupancy(self, s: Sequence[int]) -> list[int]:
        """Live users per resource; players at the virtual exit index use nothing."""
        counts = [0] * len(self.costs)
        for i, choice in enumerate(s):
            if choice >= len(self.strategies[i]):
                continue
            for r in self.strategies[i][choice]:
                counts[r] += 1
        return counts

    def player_cost(self, i: int, s: Sequence[int]) -> float:
        return cost_share_cost(self, i, s)

    def potential(self, s: Sequence[int]) -> float:
        occ = self.occupancy(s)
        return sum(
            self.costs[r] / k for r, n_r in enumerate(occ) for k in range(1, n_r + 1)
        )

    def build(self) -> Game:
        cache: dict[Profile, tuple[float, ...]] = {}

        def all_costs(s: Profile) -> tuple[float, ...]:
            got = cache.get(s)
            if got is None:
                occ = self.occupancy(s)
                got = tuple(
                    0.0
                    if s[i] >= len(self.strategies[i])
                    else sum(self.costs[r] / occ[r] for r in self.strategies[i][s[i]])
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
            direction=Direction.COST_MIN,
            utility_fn=lambda i, s: all_costs(s)[i],
            out_strategies=tuple(len(s) for s in self.strategies),
            potential_fn=lambda s: self.potential(s),
            strategy_labels=labels,
            kind="cost_sharing",
            payload=self,
        )


def cost_share_cost(spec: CostSharingSpec, i: int, s: Sequence[int]) -> float:
    """Player i's total cost share at ``s``: per used resource, cost over live users."""
    if s[i] >= len(spec.strategies[i]):
        return 0.0
    occ = spec.occupancy(s)
    return sum(spec.costs[r] / occ[r] for r in spec.strategies[i][s[i]])
