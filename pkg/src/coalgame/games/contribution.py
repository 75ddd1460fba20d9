"""Pairwise contribution games on a network of joint ventures.

Players are nodes with an effort budget; each edge produces a value from the
efforts its two endpoints invest in it, and that value is split equally
between them. Continuous effort is discretized: an allocation assigns each
incident edge a whole number of grid units (budget / grid per unit) and
spends the budget exactly. The potential is half the social welfare.

The exit strategy means leaving the network: every edge incident to an
absent player produces 0, so the player's own payoff at the exit is 0 even
when an edge tag (such as a constant value) ignores effort levels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from ..core import Direction, Game, Profile
from ..errors import SpecError
from . import schema

VALUE_TAGS = ("constant", "product", "min", "threshold", "sum")
_PARAM_KEY = {"constant": "c", "product": "c", "min": "c", "sum": "c", "threshold": "H"}


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative ints summing to ``total``, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


@dataclass(frozen=True, eq=False)
class ContributionSpec:
    node_ids: tuple[str, ...]
    budgets: tuple[float, ...]
    edges: tuple[tuple[int, int, str, float], ...]  # (a, b, tag, parameter)
    grid: int
    incident: tuple[tuple[int, ...], ...]  # edge indices per node, in listing order
    allocations: tuple[tuple[tuple[int, ...], ...], ...]  # unit vectors per node

    @property
    def n_players(self) -> int:
        return len(self.node_ids)

    @classmethod
    def parse(cls, payload: Mapping, path: str = "payload") -> "ContributionSpec":
        schema.check_keys(payload, path, required=["nodes", "edges", "grid"])
        raw_nodes = schema.as_list(payload["nodes"], path + ".nodes", min_len=1)
        ids, budgets = [], []
        for i, node in enumerate(raw_nodes):
            where = f"{path}.nodes[{i}]"
            schema.check_keys(node, where, required=["id", "budget"])
            ids.append(schema.as_str(node["id"], where + ".id"))
            budgets.append(schema.as_number(node["budget"], where + ".budget", minimum=0.0))
        node_index = schema.unique_ids(ids, path + ".nodes")

        grid = schema.as_int(payload["grid"], path + ".grid", minimum=1)

        raw_edges = schema.as_list(payload["edges"], path + ".edges")
        edges = []
        for k, edge in enumerate(raw_edges):
            where = f"{path}.edges[{k}]"
            schema.check_keys(edge, where, required=["a", "b", "fn", "params"])
            a = schema.as_str(edge["a"], where + ".a")
            b = schema.as_str(edge["b"], where + ".b")
            for label, val in (("a", a), ("b", b)):
                if val not in node_index:
                    raise SpecError(f"{where}.{label}", f"unknown node {val!r}")
            if a == b:
                raise SpecError(where, "an edge must connect two distinct nodes")
            tag = schema.as_str(edge["fn"], where + ".fn")
            if tag not in VALUE_TAGS:
                raise SpecError(where + ".fn", f"unknown value tag {tag!r}")
            key = _PARAM_KEY[tag]
            params = schema.check_keys(edge["params"], where + ".params", required=[key])
            param = schema.as_number(params[key], f"{where}.params.{key}", minimum=0.0)
            edges.append((node_index[a], node_index[b], tag, param))

        incident = tuple(
            tuple(k for k, e in enumerate(edges) if i in (e[0], e[1]))
            for i in range(len(ids))
        )
        allocations = tuple(
            tuple(compositions(grid, len(incident[i]))) for i in range(len(ids))
        )
        return cls(tuple(ids), tuple(budgets), tuple(edges), grid, incident, allocations)

    def effort(self, player: int, units: int) -> float:
        return units * self.budgets[player] / self.grid

    def edge_efforts(self, profile_units: Sequence[Sequence[int] | None]) -> list[tuple[float, float] | None]:
        """Per-edge endpoint efforts; None marks an edge with an absent endpoint."""
        out: list[tuple[float, float] | None] = []
        for k, (a, b, _tag, _param) in enumerate(self.edges):
            ua, ub = profile_units[a], profile_units[b]
            if ua is None or ub is None:
                out.append(None)
                continue
            xa = self.effort(a, ua[self.incident[a].index(k)])
            xb = self.effort(b, ub[self.incident[b].index(k)])
            out.append((xa, xb))
        return out

    def edge_value(self, k: int, efforts: tuple[float, float] | None) -> float:
        if efforts is None:
            return 0.0
        a, b, tag, param = self.edges[k]
        xa, xb = efforts
        if tag == "constant":
            return param
        if tag == "product":
            return param * xa * xb
        if tag == "min":
            return param * min(xa, xb)
        if tag == "sum":
            return param * (xa + xb)
        # threshold: full payoff only when both endpoints commit their whole budget
        full = abs(xa - self.budgets[a]) <= 1e-12 and abs(xb - self.budgets[b]) <= 1e-12
        return param if full else 0.0

    def _units_of(self, s: Sequence[int]) -> list[tuple[int, ...] | None]:
        return [
            None if s[i] >= len(self.allocations[i]) else self.allocations[i][s[i]]
            for i in range(self.n_players)
        ]

    def edge_values(self, s: Sequence[int]) -> list[float]:
        efforts = self.edge_efforts(self._units_of(s))
        return [self.edge_value(k, eff) for k, eff in enumerate(efforts)]

    def player_utility(self, i: int, s: Sequence[int]) -> float:
        if s[i] >= len(self.allocations[i]):
            return 0.0
        values = self.edge_values(s)
        return sum(values[k] / 2.0 for k in self.incident[i])

    def build(self) -> Game:
        cache: dict[Profile, tuple[float, ...]] = {}

        def all_utilities(s: Profile) -> tuple[float, ...]:
            got = cache.get(s)
            if got is None:
                values = self.edge_values(s)
                got = tuple(
                    0.0
                    if s[i] >= len(self.allocations[i])
                    else sum(values[k] / 2.0 for k in self.incident[i])
                    for i in range(self.n_players)
                )
                cache[s] = got
            return got

        def potential_fn(s: Profile) -> float:
            return sum(self.edge_values(s)) / 2.0

        labels = tuple(
            tuple(
                ",".join(
                    f"{self._edge_label(k)}={u}" for k, u in zip(self.incident[i], units)
                ) or "-"
                for units in self.allocations[i]
            )
            for i in range(self.n_players)
        )
        return Game(
            n_players=self.n_players,
            strategy_counts=tuple(len(a) for a in self.allocations),
            direction=Direction.UTILITY_MAX,
            utility_fn=lambda i, s: all_utilities(s)[i],
            out_strategies=tuple(len(a) for a in self.allocations),
            potential_fn=potential_fn,
            strategy_labels=labels,
            kind="network_contribution",
            payload=self,
        )

    def _edge_label(self, k: int) -> str:
        a, b, _, _ = self.edges[k]
        return f"{self.node_ids[a]}-{self.node_ids[b]}"


def contribution_utility(
    spec: ContributionSpec, i: int, allocation_units: Sequence[Sequence[int]]
) -> float:
    """Player i's utility from explicit per-player unit allocations.

    Each allocation must sit on the grid and spend the budget exactly.
    """
    if len(allocation_units) != spec.n_players:
        raise SpecError("allocations", f"expected {spec.n_players} allocations")
    units = []
    for p, alloc in enumerate(allocation_units):
        alloc = tuple(alloc)
        if len(alloc) != len(spec.incident[p]):
            raise SpecError(f"allocations[{p}]", "one entry per incident edge required")
        if any(not isinstance(u, int) or u < 0 for u in alloc):
            raise SpecError(f"allocations[{p}]", "units must be nonnegative integers")
        if sum(alloc) != spec.grid:
            raise SpecError(f"allocations[{p}]", "allocation must spend the budget exactly")
        units.append(alloc)
    efforts = spec.edge_efforts(units)
    values = [spec.edge_value(k, eff) for k, eff in enumerate(efforts)]
    return sum(values[k] / 2.0 for k in spec.incident[i])
