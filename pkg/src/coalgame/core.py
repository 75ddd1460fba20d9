"""Finite strategic games: profiles, coalitions, deviations, enumeration.

A game couples per-player finite strategy sets with a pure utility oracle
(utilities in maximization games, costs in minimization games). Everything
downstream -- equilibrium enumeration, smoothness certificates, best-response
dynamics -- works through the profile arithmetic defined here, so the ordering
conventions are fixed once and for all: profiles enumerate lexicographically
with player 0 as the slowest digit, and every tie is broken
lexicographically-first. Exit ("out") strategies may be virtual: they are
usable in evaluation but excluded from enumeration and play.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    InvalidArgument,
    InvalidPlayer,
    InvalidProfile,
    MissingOutStrategy,
    StateSpaceTooLarge,
)

Profile = tuple[int, ...]

#: Default cap on exhaustive profile enumeration.
PROFILE_CAP = 10_000_000
#: Largest player count for which all n! orderings are enumerated exactly.
PERMUTATION_CAP = 8


class Direction(enum.Enum):
    """Objective sense of a game: utilities are maximized, costs minimized."""

    UTILITY_MAX = "max"
    COST_MIN = "min"

    @classmethod
    def parse(cls, value: str) -> "Direction":
        for member in cls:
            if value == member.value:
                return member
        raise InvalidArgument(f"unknown direction {value!r} (expected 'max' or 'min')")


@dataclass(frozen=True, eq=False)
class Game:
    """A finite n-player game backed by a pure per-player payoff oracle.

    ``out_strategies[i]``, when present, is player i's exit strategy index.
    An index equal to ``strategy_counts[i]`` is *virtual*: valid in
    evaluation (the player's payoff there is exactly 0) but never enumerated
    as a live choice. A smaller index marks one of the live strategies as
    the exit.
    """

    n_players: int
    strategy_counts: tuple[int, ...]
    direction: Direction
    utility_fn: Callable[[int, Profile], float]
    out_strategies: tuple[int | None, ...] | None = None
    potential_fn: Callable[[Profile], float] | None = None
    strategy_labels: tuple[tuple[str, ...], ...] | None = None
    kind: str = "custom"
    payload: object | None = None

    def __post_init__(self):
        if self.n_players < 1:
            raise InvalidArgument("a game needs at least one player")
        if len(self.strategy_counts) != self.n_players:
            raise InvalidArgument("strategy_counts length must equal n_players")
        if any(c < 1 for c in self.strategy_counts):
            raise InvalidArgument("every player needs at least one strategy")
        if self.out_strategies is not None:
            if len(self.out_strategies) != self.n_players:
                raise InvalidArgument("out_strategies length must equal n_players")
            for i, o in enumerate(self.out_strategies):
                if o is not None and not 0 <= o <= self.strategy_counts[i]:
                    raise InvalidArgument(f"out strategy {o} invalid for player {i}")

    def out_index(self, i: int) -> int | None:
        """Player i's exit strategy index, or None if the player has none."""
        if self.out_strategies is None:
            return None
        return self.out_strategies[i]

    def has_out(self, i: int) -> bool:
        return self.out_index(i) is not None

    def is_virtual_out(self, i: int, idx: int) -> bool:
        """True when ``idx`` is an exit index outside player i's live range."""
        return idx == self.strategy_counts[i] and self.out_index(i) == idx

    def require_outs(self) -> tuple[int, ...]:
        """All players' exit indices; raises if any player lacks one."""
        outs = tuple(self.out_index(i) for i in range(self.n_players))
        if any(o is None for o in outs):
            raise MissingOutStrategy("every player needs an out strategy for this analysis")
        return outs  # type: ignore[return-value]


@dataclass(frozen=True)
class Coalition:
    """A nonempty set of player indices, stored in ascending order."""

    members: tuple[int, ...]

    def __init__(self, members: Sequence[int]):
        ordered = tuple(sorted(members))
        if not ordered:
            raise InvalidArgument("a coalition must be nonempty")
        if len(set(ordered)) != len(ordered):
            raise InvalidArgument("a coalition cannot repeat players")
        if ordered[0] < 0:
            raise InvalidArgument("player indices must be nonnegative")
        object.__setattr__(self, "members", ordered)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def validate_for(self, game: Game) -> None:
        if self.members[-1] >= game.n_players:
            raise InvalidPlayer(f"coalition member {self.members[-1]} out of range")


@dataclass(frozen=True)
class PlayerOrdering:
    """A permutation of the players stored as ranks: ranks[i] is player i's position (1-based)."""

    ranks: tuple[int, ...]

    def __post_init__(self):
        n = len(self.ranks)
        if sorted(self.ranks) != list(range(1, n + 1)):
            raise InvalidArgument("ranks must be a permutation of 1..n")

    @classmethod
    def identity(cls, n: int) -> "PlayerOrdering":
        return cls(tuple(range(1, n + 1)))

    @property
    def order(self) -> tuple[int, ...]:
        """Players listed from rank 1 to rank n."""
        n = len(self.ranks)
        out = [0] * n
        for player, rank in enumerate(self.ranks):
            out[rank - 1] = player
        return tuple(out)


def iter_orderings(n: int) -> Iterator[PlayerOrdering]:
    """All player orderings, lexicographic over rank vectors."""
    for ranks in itertools.permutations(range(1, n + 1)):
        yield PlayerOrdering(ranks)


def validate_player(game: Game, i: int) -> None:
    if not 0 <= i < game.n_players:
        raise InvalidPlayer(f"player index {i} out of range for {game.n_players} players")


def validate_profile(game: Game, s: Sequence[int]) -> None:
    """Check that ``s`` assigns every player a live or exit strategy index."""
    if len(s) != game.n_players:
        raise InvalidProfile(f"profile length {len(s)} != {game.n_players} players")
    for i, idx in enumerate(s):
        if 0 <= idx < game.strategy_counts[i]:
            continue
        if game.is_virtual_out(i, idx):
            continue
        raise InvalidProfile(f"strategy index {idx} invalid for player {i}")


def utility(game: Game, i: int, s: Sequence[int]) -> float:
    """Player i's utility (or cost, in minimization games) at profile ``s``."""
    validate_player(game, i)
    validate_profile(game, s)
    return float(game.utility_fn(i, tuple(s)))


def social_welfare(game: Game, s: Sequence[int]) -> float:
    """Sum of all player utilities at ``s`` (the social cost in minimization games)."""
    validate_profile(game, s)
    t = tuple(s)
    return float(sum(game.utility_fn(i, t) for i in range(game.n_players)))


def potential(game: Game, s: Sequence[int]) -> float:
    """Value of the game's potential oracle at ``s``."""
    from .errors import MissingPotential

    if game.potential_fn is None:
        raise MissingPotential("this game exposes no potential oracle")
    validate_profile(game, s)
    return float(game.potential_fn(tuple(s)))


def apply_deviation(s: Sequence[int], coalition: Coalition, joint: Sequence[int]) -> Profile:
    """The profile where coalition members play ``joint`` and everyone else keeps ``s``."""
    if len(joint) != len(coalition.members):
        raise ArityMismatch(
            f"joint deviation has {len(joint)} entries for {len(coalition.members)} members"
        )
    out = list(s)
    for member, choice in zip(coalition.members, joint):
        if member >= len(out):
            raise InvalidPlayer(f"coalition member {member} out of range")
        out[member] = choice
    return tuple(out)


def suffix_deviation_profile(
    s: Sequence[int], s_star: Sequence[int], ordering: PlayerOrdering, i: int
) -> Profile:
    """Every player ranked at or after player i switches to ``s_star``; the rest keep ``s``.

    This is the deviation profile the coalitional smoothness inequality sums
    over: the deviating set contains player i and all players ranked after it.
    """
    if len(s) != len(s_star) or len(s) != len(ordering.ranks):
        raise InvalidProfile("profile / ordering lengths disagree")
    if not 0 <= i < len(s):
        raise InvalidPlayer(f"player index {i} out of range")
    threshold = ordering.ranks[i]
    return tuple(
        s_star[j] if ordering.ranks[j] >= threshold else s[j] for j in range(len(s))
    )


def profile_count(game: Game) -> int:
    """Number of live profiles (exit-only virtual indices excluded)."""
    return math.prod(game.strategy_counts)


def enumerate_profiles(game: Game, cap: int = PROFILE_CAP) -> list[Profile]:
    """All live profiles in lexicographic order (player 0 slowest)."""
    total = profile_count(game)
    if total > cap:
        raise StateSpaceTooLarge(total, cap)
    ranges = [range(c) for c in game.strategy_counts]
    return [tuple(p) for p in itertools.product(*ranges)]


def profile_index(game: Game, s: Sequence[int]) -> int:
    """Position of a live profile in the lexicographic enumeration."""
    validate_profile(game, s)
    idx = 0
    for i, choice in enumerate(s):
        if choice >= game.strategy_counts[i]:
            raise InvalidProfile(f"virtual exit index for player {i} has no enumeration slot")
        idx = idx * game.strategy_counts[i] + choice
    return idx


def profile_at(game: Game, index: int) -> Profile:
    """Inverse of :func:`profile_index`."""
    total = profile_count(game)
    if not 0 <= index < total:
        raise InvalidArgument(f"profile index {index} out of range (0..{total - 1})")
    digits = []
    for count in reversed(game.strategy_counts):
        digits.append(index % count)
        index //= count
    return tuple(reversed(digits))


def profile_array(game: Game, cap: int = PROFILE_CAP) -> np.ndarray:
    """All live profiles as an (P, n) integer array in enumeration order."""
    total = profile_count(game)
    if total > cap:
        raise StateSpaceTooLarge(total, cap)
    grids = np.meshgrid(*[np.arange(c) for c in game.strategy_counts], indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1).astype(np.int64)


def index_radix(game: Game) -> np.ndarray:
    """Mixed-radix weights so that ``profiles @ radix`` recovers enumeration indices."""
    radix = np.ones(game.n_players, dtype=np.int64)
    for i in range(game.n_players - 2, -1, -1):
        radix[i] = radix[i + 1] * game.strategy_counts[i + 1]
    return radix


def utilities_matrix(game: Game, cap: int = PROFILE_CAP) -> np.ndarray:
    """Per-player payoffs over all live profiles: shape (P, n_players)."""
    profiles = enumerate_profiles(game, cap)
    fn = game.utility_fn
    n = game.n_players
    out = np.empty((len(profiles), n), dtype=np.float64)
    for row, prof in enumerate(profiles):
        for i in range(n):
            out[row, i] = fn(i, prof)
    return out


def optimum(game: Game, cap: int = PROFILE_CAP) -> tuple[Profile, float]:
    """The welfare-optimal live profile (cost-minimal in minimization games).

    Ties break to the lexicographically-first profile.
    """
    u = utilities_matrix(game, cap)
    welfare = u.sum(axis=1)
    if game.direction is Direction.COST_MIN:
        best = int(np.argmin(welfare))
    else:
        best = int(np.argmax(welfare))
    return profile_at(game, best), float(welfare[best])


def all_out_profile(game: Game) -> Profile:
    """The profile with every player at their exit strategy."""
    return tuple(game.require_outs())


def harmonic(n: int) -> float:
    """The n-th harmonic number sum(1/k for k = 1..n)."""
    if n < 1:
        raise InvalidArgument(f"harmonic number needs n >= 1, got {n}")
    return float(sum(1.0 / k for k in range(1, n + 1)))
