"""Project games where value is shared in proportion to marginal contribution.

Players split an effort budget across the projects they participate in (a
grid allocation; effort may also be withheld, so the all-zero allocation is a
live strategy). A project's value is a product of per-skill-group factors,
each a capped linear function of the group's total effort on the project.
Each participant receives the project value scaled by their marginal
contribution over the sum of all participants' marginal contributions; when
that sum is zero the project pays nobody.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from ..core import Direction, Game, Profile
from ..errors import SpecError
from . import schema


def sub_budget_allocations(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative ints summing to at most ``total``, lexicographic."""
    if parts == 0:
        yield ()
        return
    for head in range(total + 1):
        for rest in sub_budget_allocations(total - head, parts - 1):
            yield (head,) + rest


@dataclass(frozen=True, eq=False)
class WelfareSharingSpec:
    project_ids: tuple[str, ...]
    group_ids: tuple[str, ...]
    factors: tuple[Mapping[int, tuple[float, float]], ...]  # per project: group -> (a, cap)
    budgets: tuple[float, ...]
    groups: tuple[int, ...]  # per player, skill-group index
    participation: tuple[tuple[int, ...], ...]  # per player, project indices
    grid: int
    participants: tuple[tuple[int, ...], ...]  # per project (derived)
    project_groups: tuple[tuple[int, ...], ...]  # groups with >= 1 participant (derived)
    allocations: tuple[tuple[tuple[int, ...], ...], ...]  # unit vectors per player

    @property
    def n_players(self) -> int:
        return len(self.budgets)

    @property
    def max_group_count(self) -> int:
        """Largest number of distinct skill groups contributing to one project."""
        return max((len(g) for g in self.project_groups), default=0)

    @classmethod
    def parse(cls, payload: Mapping, path: str = "payload") -> "WelfareSharingSpec":
        schema.check_keys(payload, path, required=["projects", "players", "grid"])
        grid = schema.as_int(payload["grid"], path + ".grid", minimum=1)

        raw_projects = schema.as_list(payload["projects"], path + ".projects", min_len=1)
        project_ids, raw_factors = [], []
        for j, project in enumerate(raw_projects):
            where = f"{path}.projects[{j}]"
            schema.check_keys(project, where, required=["id", "factors"])
            project_ids.append(schema.as_str(project["id"], where + ".id"))
            factors = project["factors"]
            if not isinstance(factors, Mapping) or not factors:
                raise SpecError(where + ".factors", "expected a nonempty object keyed by group")
            raw_factors.append(factors)
        project_index = schema.unique_ids(project_ids, path + ".projects")

        raw_players = schema.as_list(payload["players"], path + ".players", min_len=1)
        budgets, group_names, participation = [], [], []
        for p, player in enumerate(raw_players):
            where = f"{path}.players[{p}]"
            schema.check_keys(player, where, required=["budget", "group", "projects"])
            budgets.append(schema.as_number(player["budget"], where + ".budget", minimum=0.0))
            group_names.append(schema.as_str(player["group"], where + ".group"))
            raw_part = schema.as_list(player["projects"], where + ".projects", min_len=1)
            part = []
            for m, pid in enumerate(raw_part):
                pid = schema.as_str(pid, f"{where}.projects[{m}]")
                if pid not in project_index:
                    raise SpecError(f"{where}.projects[{m}]", f"unknown project {pid!r}")
                part.append(project_index[pid])
            if len(set(part)) != len(part):
                raise SpecError(where + ".projects", "duplicate project")
            participation.append(tuple(part))

        group_ids = tuple(sorted(set(group_names)))
        group_index = {g: k for k, g in enumerate(group_ids)}
        groups = tuple(group_index[g] for g in group_names)

        n_projects = len(project_ids)
        participants = tuple(
            tuple(p for p in range(len(budgets)) if j in participation[p])
            for j in range(n_projects)
        )
        project_groups = tuple(
            tuple(sorted({groups[p] for p in participants[j]})) for j in range(n_projects)
        )

        factors: list[dict[int, tuple[float, float]]] = []
        for j in range(n_projects):
            where = f"{path}.projects[{j}].factors"
            table: dict[int, tuple[float, float]] = {}
            for gname, spec in raw_factors[j].items():
                if gname not in group_index:
                    raise SpecError(f"{where}.{gname}", "factor for a group with no players")
                fwhere = f"{where}.{gname}"
                schema.check_keys(spec, fwhere, required=["a"], optional=["cap"])
                a = schema.as_number(spec["a"], fwhere + ".a", minimum=0.0)
                cap = schema.as_optional_cap(spec.get("cap"), fwhere + ".cap")
                table[group_index[gname]] = (a, cap)
            for g in project_groups[j]:
                if g not in table:
                    raise SpecError(where, f"missing factor for group {group_ids[g]!r}")
            for g in table:
                if g not in project_groups[j]:
                    raise SpecError(where, f"factor for group {group_ids[g]!r} with no participant")
            factors.append(table)

        allocations = tuple(
            tuple(sub_budget_allocations(grid, len(participation[p])))
            for p in range(len(budgets))
        )
        return cls(
            tuple(project_ids), group_ids, tuple(factors), tuple(budgets), groups,
            tuple(participation), grid, participants, project_groups, allocations,
        )

    def effort(self, player: int, units: int) -> float:
        return units * self.budgets[player] / self.grid

    def _efforts_on(self, j: int, units_by_player: Sequence[Sequence[int] | None]) -> dict[int, float]:
        """Effort each participant puts on project j (absent or exited players give 0)."""
        efforts: dict[int, float] = {}
        for p in self.participants[j]:
            units = units_by_player[p]
            if units is None:
                efforts[p] = 0.0
            else:
                efforts[p] = self.effort(p, units[self.participation[p].index(j)])
        return efforts

    def project_value(self, j: int, efforts: Mapping[int, float]) -> float:
        value = 1.0
        for g in self.project_groups[j]:
            a, cap = self.factors[j][g]
            total = sum(x for p, x in efforts.items() if self.groups[p] == g)
            value *= min(cap, a * total)
        return value

    def utilities(self, s: Sequence[int]) -> tuple[float, ...]:
        units_by_player = [
            None if s[p] >= len(self.allocations[p]) else self.allocations[p][s[p]]
            for p in range(self.n_players)
        ]
        out = [0.0] * self.n_players
        for j in range(len(self.project_ids)):
            efforts = self._efforts_on(j, units_by_player)
            value = self.project_value(j, efforts)
            marginals = {}
            for p in self.participants[j]:
                dropped = dict(efforts)
                dropped[p] = 0.0
                marginals[p] = value - self.project_value(j, dropped)
            denom = sum(marginals.values())
            if denom <= 0.0:
                continue  # zero-denominator rule: the project pays nobody
            for p in self.participants[j]:
                if units_by_player[p] is not None:
                    out[p] += value * marginals[p] / denom
        return tuple(out)

    def build(self) -> Game:
        cache: dict[Profile, tuple[float, ...]] = {}

        def all_utilities(s: Profile) -> tuple[float, ...]:
            got = cache.get(s)
            if got is None:
                got = self.utilities(s)
                cache[s] = got
            return got

        labels = tuple(
            tuple(
                ",".join(
                    f"{self.project_ids[j]}={u}"
                    for j, u in zip(self.participation[p], units)
                )
                for units in self.allocations[p]
            )
            for p in range(self.n_players)
        )
        return Game(
            n_players=self.n_players,
            strategy_counts=tuple(len(a) for a in self.allocations),
            direction=Direction.UTILITY_MAX,
            utility_fn=lambda i, s: all_utilities(s)[i],
            out_strategies=tuple(len(a) for a in self.allocations),
            potential_fn=None,
            strategy_labels=labels,
            kind="welfare_sharing",
            payload=self,
        )


def welfare_share_utility(
    spec: WelfareSharingSpec, i: int, allocation_units: Sequence[Sequence[int]]
) -> float:
    """Player i's utility from explicit unit allocations (grid-valid, within budget)."""
    if len(allocation_units) != spec.n_players:
        raise SpecError("allocations", f"expected {spec.n_players} allocations")
    units = []
    for p, alloc in enumerate(allocation_units):
        alloc = tuple(alloc)
        if len(alloc) != len(spec.participation[p]):
            raise SpecError(f"allocations[{p}]", "one entry per participated project required")
        if any(not isinstance(u, int) or u < 0 for u in alloc):
            raise SpecError(f"allocations[{p}]", "units must be nonnegative integers")
        if sum(alloc) > spec.grid:
            raise SpecError(f"allocations[{p}]", "allocation exceeds the budget")
        units.append(alloc)
    indices = tuple(spec.allocations[p].index(units[p]) for p in range(spec.n_players))
    return spec.utilities(indices)[i]
