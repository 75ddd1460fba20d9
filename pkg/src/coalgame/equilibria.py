"""Exhaustive equilibrium enumeration and efficiency ratios.

A profile is a (pure) Nash equilibrium when no single player can strictly
improve by more than the tolerance; it is a strong Nash equilibrium when no
coalition has a joint deviation strictly improving *every* member. Ties never
block. Mass enumeration is vectorized over the payoff table; the per-profile
predicates walk coalitions in canonical order (size ascending, then
lexicographic) so reported witnesses are the smallest and first.

``verify_scce`` checks a distribution over profiles against all pure joint
coalition deviations in expectation, the pure-deviation form of a strong
coarse correlated equilibrium.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import (
    PROFILE_CAP,
    Coalition,
    Direction,
    Game,
    Profile,
    apply_deviation,
    enumerate_profiles,
    profile_at,
    utilities_matrix,
    validate_profile,
)
from .errors import InvalidDistribution, StateSpaceTooLarge

#: Strict-improvement threshold for every blocking test.
IMPROVE_TOL = 1e-9

StrongWitness = tuple[Coalition, tuple[int, ...]]


def _improves(direction: Direction, new: float, old: float, tol: float = IMPROVE_TOL) -> bool:
    if direction is Direction.COST_MIN:
        return new < old - tol
    return new > old + tol


def iter_coalitions(n: int):
    """Nonempty coalitions by size ascending, lexicographic within a size."""
    for size in range(1, n + 1):
        for members in itertools.combinations(range(n), size):
            yield Coalition(members)


def is_nash(game: Game, s: Sequence[int]) -> tuple[bool, tuple[int, int] | None]:
    """Whether ``s`` is a pure Nash equilibrium; witness is (player, better strategy)."""
    validate_profile(game, s)
    s = tuple(s)
    for i in range(game.n_players):
        base = game.utility_fn(i, s)
        for alt in range(game.strategy_counts[i]):
            if alt == s[i]:
                continue
            dev = s[:i] + (alt,) + s[i + 1:]
            if _improves(game.direction, game.utility_fn(i, dev), base):
                return False, (i, alt)
    return True, None


def is_strong_nash(
    game: Game, s: Sequence[int], cap: int = PROFILE_CAP
) -> tuple[bool, StrongWitness | None]:
    """Whether ``s`` resists every coalition; witness deviation improves all members."""
    validate_profile(game, s)
    s = tuple(s)
    total = sum(
        math.prod(game.strategy_counts[i] for i in coalition)
        for coalition in iter_coalitions(game.n_players)
    )
    if total > cap:
        raise StateSpaceTooLarge(total, cap, what="coalition deviations")
    for coalition in iter_coalitions(game.n_players):
        members = coalition.members
        base = [game.utility_fn(i, s) for i in members]
        for joint in itertools.product(*[range(game.strategy_counts[i]) for i in members]):
            dev = apply_deviation(s, coalition, joint)
            if dev == s:
                continue
            if all(
                _improves(game.direction, game.utility_fn(i, dev), base[k])
                for k, i in enumerate(members)
            ):
                return False, (coalition, joint)
    return True, None


def _blocking_masks(
    game: Game, profiles: np.ndarray, payoffs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(nash_mask, strong_mask) over the enumeration, computed per coalition group."""
    n = game.n_players
    p_count = payoffs.shape[0]
    singleton_blocked = np.zeros(p_count, dtype=bool)
    any_blocked = np.zeros(p_count, dtype=bool)
    cost = game.direction is Direction.COST_MIN

    for coalition in iter_coalitions(n):
        members = np.array(coalition.members)
        others = np.array([i for i in range(n) if i not in set(coalition.members)], dtype=np.int64)
        if others.size:
            keys = profiles[:, others]
            radix = np.ones(others.size, dtype=np.int64)
            counts = np.array(game.strategy_counts, dtype=np.int64)[others]
            for k in range(others.size - 2, -1, -1):
                radix[k] = radix[k + 1] * counts[k + 1]
            flat = keys @ radix
        else:
            flat = np.zeros(p_count, dtype=np.int64)
        order = np.argsort(flat, kind="stable")
        boundaries = np.flatnonzero(np.diff(flat[order])) + 1
        blocked_here = np.zeros(p_count, dtype=bool)
        for group in np.split(order, boundaries):
            u = payoffs[np.ix_(group, members)]
            if cost:
                better = u[None, :, :] < u[:, None, :] - IMPROVE_TOL
            else:
                better = u[None, :, :] > u[:, None, :] + IMPROVE_TOL
            blocked_here[group] = better.all(axis=2).any(axis=1)
        any_blocked |= blocked_here
        if len(coalition) == 1:
            singleton_blocked |= blocked_here
    return ~singleton_blocked, ~any_blocked


def equilibrium_masks(game: Game, cap: int = PROFILE_CAP) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(payoff matrix, nash mask, strong mask) over the lexicographic enumeration."""
    from .core import profile_array

    payoffs = utilities_matrix(game, cap)
    profiles = profile_array(game, cap)
    nash_mask, strong_mask = _blocking_masks(game, profiles, payoffs)
    return payoffs, nash_mask, strong_mask


def enumerate_equilibria(game: Game, kind: str, cap: int = PROFILE_CAP) -> list[Profile]:
    """All profiles of the requested kind ('nash' or 'strong_nash'), lexicographic."""
    if kind not in ("nash", "strong_nash"):
        raise ValueError(f"unknown equilibrium kind {kind!r}")
    _, nash_mask, strong_mask = equilibrium_masks(game, cap)
    mask = nash_mask if kind == "nash" else strong_mask
    return [profile_at(game, int(i)) for i in np.flatnonzero(mask)]


@dataclass
class EquilibriumReport:
    """Full enumeration report: equilibrium sets, optimum, and efficiency ratios."""

    direction: Direction
    opt_profile: Profile
    opt_value: float
    nash: list[Profile]
    strong_nash: list[Profile]
    poa: float | None
    pos: float | None
    spoa: float | None
    reasons: dict[str, str] = field(default_factory=dict)
    witnesses: dict[Profile, StrongWitness] = field(default_factory=dict)
    profiles: list[Profile] = field(default_factory=list)
    welfare: list[float] = field(default_factory=list)
    nash_mask: list[bool] = field(default_factory=list)
    strong_mask: list[bool] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        def num(x):
            if x is None:
                return None
            return "inf" if math.isinf(x) else x

        doc = {
            "direction": self.direction.value,
            "opt": {"profile": list(self.opt_profile), "value": self.opt_value},
            "nash": [list(p) for p in self.nash],
            "strong_nash": [list(p) for p in self.strong_nash],
            "poa": num(self.poa),
            "pos": num(self.pos),
            "spoa": num(self.spoa),
            "reasons": dict(self.reasons),
        }
        if self.witnesses:
            doc["witnesses"] = [
                {
                    "profile": list(p),
                    "coalition": list(w[0].members),
                    "deviation": list(w[1]),
                }
                for p, w in self.witnesses.items()
            ]
        return doc

    def csv_rows(self) -> list[tuple[str, float, bool, bool]]:
        return [
            ("-".join(map(str, p)), w, bool(nm), bool(sm))
            for p, w, nm, sm in zip(self.profiles, self.welfare, self.nash_mask, self.strong_mask)
        ]


def _ratio(direction: Direction, opt_value: float, equilibrium_value: float) -> float:
    """Optimal-over-equilibrium quality loss; by convention >= 1, inf when unbounded."""
    if direction is Direction.COST_MIN:
        worse, better = equilibrium_value, opt_value
    else:
        worse, better = opt_value, equilibrium_value
    if better <= 0.0:
        return 1.0 if worse <= 0.0 else math.inf
    return worse / better


def efficiency_ratios(
    game: Game, cap: int = PROFILE_CAP, include_witnesses: bool = False
) -> EquilibriumReport:
    """Enumerate equilibria and compute the anarchy/stability/strong-anarchy ratios."""
    payoffs, nash_mask, strong_mask = equilibrium_masks(game, cap)
    welfare = payoffs.sum(axis=1)
    profiles = enumerate_profiles(game, cap)
    cost = game.direction is Direction.COST_MIN
    best = int(np.argmin(welfare)) if cost else int(np.argmax(welfare))
    opt_profile, opt_value = profiles[best], float(welfare[best])

    nash = [profiles[int(i)] for i in np.flatnonzero(nash_mask)]
    strong = [profiles[int(i)] for i in np.flatnonzero(strong_mask)]

    reasons: dict[str, str] = {}
    poa = pos = spoa = None
    if nash:
        values = welfare[nash_mask]
        worst = float(values.max()) if cost else float(values.min())
        best_eq = float(values.min()) if cost else float(values.max())
        poa = _ratio(game.direction, opt_value, worst)
        pos = _ratio(game.direction, opt_value, best_eq)
    else:
        reasons["poa"] = reasons["pos"] = "no equilibrium of this kind"
    if strong:
        values = welfare[strong_mask]
        worst = float(values.max()) if cost else float(values.min())
        spoa = _ratio(game.direction, opt_value, worst)
    else:
        reasons["spoa"] = "no equilibrium of this kind"

    witnesses: dict[Profile, StrongWitness] = {}
    if include_witnesses:
        for idx in np.flatnonzero(~strong_mask):
            prof = profiles[int(idx)]
            ok, witness = is_strong_nash(game, prof, cap)
            if not ok and witness is not None:
                witnesses[prof] = witness

    return EquilibriumReport(
        direction=game.direction,
        opt_profile=opt_profile,
        opt_value=opt_value,
        nash=nash,
        strong_nash=strong,
        poa=poa,
        pos=pos,
        spoa=spoa,
        reasons=reasons,
        witnesses=witnesses,
        profiles=profiles,
        welfare=[float(w) for w in welfare],
        nash_mask=[bool(b) for b in nash_mask],
        strong_mask=[bool(b) for b in strong_mask],
    )


def _normalize_distribution(game: Game, dist) -> list[tuple[Profile, float]]:
    if isinstance(dist, Mapping):
        items = list(dist.items())
    else:
        items = list(dist)
    support: list[tuple[Profile, float]] = []
    total = 0.0
    for prof, prob in items:
        prof = tuple(prof)
        try:
            validate_profile(game, prof)
        except Exception as exc:
            raise InvalidDistribution(f"bad support profile {prof}: {exc}") from exc
        if any(prof[i] >= game.strategy_counts[i] for i in range(game.n_players)):
            raise InvalidDistribution(f"support profile {prof} uses a virtual exit index")
        prob = float(prob)
        if prob < 0.0:
            raise InvalidDistribution(f"negative probability {prob} on {prof}")
        total += prob
        support.append((prof, prob))
    if abs(total - 1.0) > IMPROVE_TOL:
        raise InvalidDistribution(f"probabilities sum to {total}, expected 1")
    if not support:
        raise InvalidDistribution("empty distribution")
    return support


def verify_scce(game: Game, dist) -> tuple[bool, StrongWitness | None]:
    """Check a profile distribution against all pure coalition deviations in expectation.

    Returns False with the first blocking (coalition, joint deviation) in
    canonical order when some coalition's fixed pure deviation strictly
    improves every member's expected payoff.
    """
    support = _normalize_distribution(game, dist)
    n = game.n_players
    base = [
        sum(prob * game.utility_fn(i, prof) for prof, prob in support) for i in range(n)
    ]
    for coalition in iter_coalitions(n):
        members = coalition.members
        for joint in itertools.product(*[range(game.strategy_counts[i]) for i in members]):
            expected = [0.0] * len(members)
            for prof, prob in support:
                dev = apply_deviation(prof, coalition, joint)
                for k, i in enumerate(members):
                    expected[k] += prob * game.utility_fn(i, dev)
            if all(
                _improves(game.direction, expected[k], base[i])
                for k, i in enumerate(members)
            ):
                return False, (coalition, joint)
    return True, None
