"""Coalitional and unilateral smoothness certificates, checks, and exact fitting.

The coalitional smoothness inequality bounds, for an anchor profile s* and
every (profile s, player ordering pi) pair, the sum over players of their
payoff after the suffix deviation at their rank:

* maximization:  sum_i u_i(suffix_i) >= lambda * OPT - mu * SW(s)
* minimization:  sum_i c_i(suffix_i) <= lambda * SC(s*) + mu * SC(s)

A verified certificate pins the strong price of anarchy to lambda/(1+mu)
(maximization) or lambda/(1-mu) (minimization, mu < 1). The unilateral
variant replaces the suffix sum with sum_i u_i(s*_i, s_{-i}).

Fitting is exact: every profile contributes one linear constraint in
(lambda, mu), the binding boundary is the piecewise-linear envelope of those
lines, and the best ratio is found by evaluating it at mu = 0 and at every
envelope vertex. This module also houses the structural hypotheses that
feed the certificate theorems: marginal-contribution fraction, participation
monotonicity, potential verification and closeness, positive externalities,
and multiset submodularity of occupancy potentials.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    PERMUTATION_CAP,
    PROFILE_CAP,
    Direction,
    Game,
    PlayerOrdering,
    Profile,
    enumerate_profiles,
    harmonic,
    index_radix,
    iter_orderings,
    profile_array,
    profile_index,
    suffix_deviation_profile,
    utilities_matrix,
    validate_profile,
)
from .errors import (
    DegenerateGame,
    Incomparable,
    InvalidArgument,
    MissingOutStrategy,
    MissingPotential,
    NotMultisetExtendable,
    StateSpaceTooLarge,
    UnsupportedProperty,
)

#: Slack allowed when verifying any smoothness or structural inequality.
CHECK_TOL = 1e-9


@dataclass(frozen=True)
class SmoothnessViolation:
    """A (profile, ordering) pair at which the smoothness inequality fails."""

    profile: Profile
    ranks: tuple[int, ...] | None  # None for unilateral certificates
    lhs: float
    rhs: float


@dataclass
class SmoothnessCertificate:
    """A (lambda, mu) pair with its verification status and fitted boundary."""

    kind: str  # "coalitional" | "unilateral"
    direction: Direction
    s_star: Profile
    lam: float
    mu: float
    verified: bool
    exact: bool = True
    witness: SmoothnessViolation | None = None
    frontier: list[tuple[float, float]] = field(default_factory=list)
    best_ratio: float | None = None

    def ratio(self) -> float:
        """The efficiency bound this certificate implies."""
        if self.direction is Direction.COST_MIN:
            if self.mu >= 1.0:
                return math.inf
            return self.lam / (1.0 - self.mu)
        return self.lam / (1.0 + self.mu)

    def to_json_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "direction": self.direction.value,
            "s_star": list(self.s_star),
            "lambda": self.lam,
            "mu": self.mu,
            "verified": self.verified,
            "exact": self.exact,
            "frontier": [[l, m] for l, m in self.frontier],
            "best_ratio": self.best_ratio,
        }
        if self.witness is not None:
            doc["witness"] = {
                "profile": list(self.witness.profile),
                "ranks": None if self.witness.ranks is None else list(self.witness.ranks),
                "lhs": self.witness.lhs,
                "rhs": self.witness.rhs,
            }
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SmoothnessCertificate":
        witness = None
        if doc.get("witness") is not None:
            w = doc["witness"]
            ranks = w.get("ranks")
            witness = SmoothnessViolation(
                tuple(w["profile"]),
                None if ranks is None else tuple(ranks),
                float(w["lhs"]),
                float(w["rhs"]),
            )
        return cls(
            kind=doc["kind"],
            direction=Direction.parse(doc["direction"]),
            s_star=tuple(doc["s_star"]),
            lam=float(doc["lambda"]),
            mu=float(doc["mu"]),
            verified=bool(doc["verified"]),
            exact=bool(doc.get("exact", True)),
            witness=witness,
            frontier=[(float(l), float(m)) for l, m in doc.get("frontier", [])],
            best_ratio=None if doc.get("best_ratio") is None else float(doc["best_ratio"]),
        )


def deviation_sum(
    game: Game, s_star: Sequence[int], s: Sequence[int], ordering: PlayerOrdering
) -> float:
    """Sum over players of their payoff at the suffix deviation profile of their rank."""
    validate_profile(game, s)
    validate_profile(game, s_star)
    total = 0.0
    for i in range(game.n_players):
        prof = suffix_deviation_profile(s, s_star, ordering, i)
        total += game.utility_fn(i, prof)
    return float(total)


def _make_orders(
    n: int, perm_cap: int, sample_perms: int | None, seed: int | None
) -> tuple[list[tuple[int, ...]], bool]:
    """Player orders (rank 1 first) to examine: all n! when small, else a seeded sample."""
    if n <= perm_cap:
        return [tuple(p) for p in itertools.permutations(range(n))], True
    if sample_perms is None:
        raise StateSpaceTooLarge(
            math.factorial(n), math.factorial(perm_cap), what="player orderings"
        )
    if seed is None:
        raise InvalidArgument("sampled ordering mode needs a seed")
    rng = np.random.Generator(np.random.PCG64(seed))
    return [tuple(int(x) for x in rng.permutation(n)) for _ in range(sample_perms)], False


def _ranks_of_order(order: tuple[int, ...]) -> tuple[int, ...]:
    ranks = [0] * len(order)
    for position, player in enumerate(order):
        ranks[player] = position + 1
    return tuple(ranks)


def _devsum_extreme(
    game: Game,
    s_star: Profile,
    profiles: np.ndarray,
    payoffs: np.ndarray,
    *,
    maximize: bool,
    perm_cap: int = PERMUTATION_CAP,
    sample_perms: int | None = None,
    seed: int | None = None,
) -> tuple[np.ndarray, bool]:
    """Per-profile extreme (min or max) of the suffix-deviation sum over orderings.

    Exact mode walks all n! player orders with an incremental index update:
    processing an order from last rank to first flips one player to s* per
    step, so each order costs n vector operations over all profiles.
    """
    n = game.n_players
    radix = index_radix(game)
    base = profiles @ radix
    delta = [(int(s_star[j]) - profiles[:, j]) * radix[j] for j in range(n)]

    orders, exact = _make_orders(n, perm_cap, sample_perms, seed)
    extreme: np.ndarray | None = None
    acc = np.empty(profiles.shape[0], dtype=np.float64)
    for order in orders:
        idx = base.copy()
        acc[:] = 0.0
        for k in range(n - 1, -1, -1):
            j = order[k]
            idx += delta[j]
            acc += payoffs[idx, j]
        if extreme is None:
            extreme = acc.copy()
        elif maximize:
            np.maximum(extreme, acc, out=extreme)
        else:
            np.minimum(extreme, acc, out=extreme)
    assert extreme is not None
    return extreme, exact


def _unilateral_sum(
    game: Game, s_star: Profile, profiles: np.ndarray, payoffs: np.ndarray
) -> np.ndarray:
    """Per-profile sum of payoffs after each player's lone switch to s*."""
    radix = index_radix(game)
    base = profiles @ radix
    total = np.zeros(profiles.shape[0], dtype=np.float64)
    for j in range(game.n_players):
        idx = base + (int(s_star[j]) - profiles[:, j]) * radix[j]
        total += payoffs[idx, j]
    return total


def _anchor_value(game: Game, s_star: Profile, welfare: np.ndarray) -> float:
    """OPT for maximization games; the anchor's social cost for minimization games."""
    if game.direction is Direction.COST_MIN:
        return float(welfare[profile_index(game, s_star)])
    return float(welfare.max())


def _violations(
    direction: Direction,
    dev: np.ndarray,
    welfare: np.ndarray,
    anchor_value: float,
    lam: float,
    mu: float,
) -> np.ndarray:
    if direction is Direction.COST_MIN:
        rhs = lam * anchor_value + mu * welfare
        return dev > rhs + CHECK_TOL
    rhs = lam * anchor_value - mu * welfare
    return dev < rhs - CHECK_TOL


def check_coalitional_smoothness(
    game: Game,
    s_star: Sequence[int] | None,
    lam: float,
    mu: float,
    *,
    cap: int = PROFILE_CAP,
    perm_cap: int = PERMUTATION_CAP,
    sample_perms: int | None = None,
    seed: int | None = None,
) -> SmoothnessCertificate:
    """Verify a candidate (lambda, mu) over every profile and player ordering.

    Returns the first violating (profile, ordering) witness in lexicographic
    order when the inequality fails anywhere.
    """
    if lam < 0 or mu < 0:
        raise InvalidArgument("lambda and mu must be nonnegative")
    from .core import optimum

    if s_star is None:
        s_star = optimum(game, cap)[0]
    s_star = tuple(s_star)
    validate_profile(game, s_star)
    profiles = profile_array(game, cap)
    payoffs = utilities_matrix(game, cap)
    welfare = payoffs.sum(axis=1)
    anchor_value = _anchor_value(game, s_star, welfare)
    cost = game.direction is Direction.COST_MIN
    dev, exact = _devsum_extreme(
        game, s_star, profiles, payoffs,
        maximize=cost, perm_cap=perm_cap, sample_perms=sample_perms, seed=seed,
    )
    bad = _violations(game.direction, dev, welfare, anchor_value, lam, mu)
    witness = None
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        prof = tuple(int(x) for x in profiles[row])
        witness = _first_ordering_violation(
            game, s_star, prof, lam, mu, anchor_value,
            perm_cap=perm_cap, sample_perms=sample_perms, seed=seed,
        )
    return SmoothnessCertificate(
        kind="coalitional",
        direction=game.direction,
        s_star=s_star,
        lam=float(lam),
        mu=float(mu),
        verified=witness is None,
        exact=exact,
        witness=witness,
    )


def _first_ordering_violation(
    game: Game,
    s_star: Profile,
    prof: Profile,
    lam: float,
    mu: float,
    anchor_value: float,
    *,
    perm_cap: int,
    sample_perms: int | None,
    seed: int | None,
) -> SmoothnessViolation:
    welfare_s = sum(game.utility_fn(i, prof) for i in range(game.n_players))
    if game.direction is Direction.COST_MIN:
        rhs = lam * anchor_value + mu * welfare_s
    else:
        rhs = lam * anchor_value - mu * welfare_s
    if game.n_players <= perm_cap:
        orderings = iter_orderings(game.n_players)  # lexicographic over rank vectors
    else:
        orders, _ = _make_orders(game.n_players, perm_cap, sample_perms, seed)
        orderings = (PlayerOrdering(_ranks_of_order(o)) for o in orders)
    for ordering in orderings:
        lhs = deviation_sum(game, s_star, prof, ordering)
        if game.direction is Direction.COST_MIN:
            if lhs > rhs + CHECK_TOL:
                return SmoothnessViolation(prof, ordering.ranks, lhs, rhs)
        elif lhs < rhs - CHECK_TOL:
            return SmoothnessViolation(prof, ordering.ranks, lhs, rhs)
    raise AssertionError("vectorized scan found a violation but the ordered scan did not")


def check_unilateral_smoothness(
    game: Game,
    s_star: Sequence[int] | None,
    lam: float,
    mu: float,
    *,
    cap: int = PROFILE_CAP,
) -> SmoothnessCertificate:
    """Verify the one-player-at-a-time smoothness inequality over every profile."""
    if lam < 0 or mu < 0:
        raise InvalidArgument("lambda and mu must be nonnegative")
    from .core import optimum

    if s_star is None:
        s_star = optimum(game, cap)[0]
    s_star = tuple(s_star)
    validate_profile(game, s_star)
    profiles = profile_array(game, cap)
    payoffs = utilities_matrix(game, cap)
    welfare = payoffs.sum(axis=1)
    anchor_value = _anchor_value(game, s_star, welfare)
    dev = _unilateral_sum(game, s_star, profiles, payoffs)
    bad = _violations(game.direction, dev, welfare, anchor_value, lam, mu)
    witness = None
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        prof = tuple(int(x) for x in profiles[row])
        if game.direction is Direction.COST_MIN:
            rhs = lam * anchor_value + mu * float(welfare[row])
        else:
            rhs = lam * anchor_value - mu * float(welfare[row])
        witness = SmoothnessViolation(prof, None, float(dev[row]), rhs)
    return SmoothnessCertificate(
        kind="unilateral",
        direction=game.direction,
        s_star=s_star,
        lam=float(lam),
        mu=float(mu),
        verified=witness is None,
        witness=witness,
    )


# --- exact envelope fitting ------------------------------------------------


#: Vertices beyond this mu cannot be verified at CHECK_TOL in double precision.
_VERTEX_MU_CAP = 1e9
#: Lines whose slopes differ by less than this (relative) are treated as parallel.
_SLOPE_MERGE_TOL = 1e-9


def _min_envelope(lines: list[tuple[float, float]]) -> list[tuple[float, float, float]]:
    """Lower envelope of lines value = a + b*mu, as (a, b, start_mu) segments.

    Segments are returned in order of increasing mu; the first starts at
    -inf. Near-parallel lines are merged keeping the lowest intercept, which
    drops crossings so distant that they are pure rounding artifacts.
    """
    merged: list[tuple[float, float]] = []
    for b, a in sorted((b, a) for a, b in lines):
        if merged and b - merged[-1][0] <= _SLOPE_MERGE_TOL * max(1.0, abs(b)):
            if a < merged[-1][1]:
                merged[-1] = (merged[-1][0], a)
            continue
        merged.append((b, a))
    ordered = sorted(((a, b) for b, a in merged), key=lambda ab: -ab[1])

    def cross(l1, l2):
        # l1 has the larger slope; the min switches from l1 to l2 here
        return (l2[0] - l1[0]) / (l1[1] - l2[1])

    hull: list[tuple[float, float]] = []
    for line in ordered:
        while len(hull) >= 2 and cross(hull[-2], line) <= cross(hull[-2], hull[-1]):
            hull.pop()
        hull.append(line)
    segments = []
    for k, (a, b) in enumerate(hull):
        start = -math.inf if k == 0 else cross(hull[k - 1], (a, b))
        segments.append((a, b, start))
    return segments


def _envelope_vertices(segments: list[tuple[float, float, float]]) -> list[tuple[float, float]]:
    """Positive-mu envelope vertices as (mu, value) pairs."""
    out = []
    for a, b, start in segments:
        if 0 < start <= _VERTEX_MU_CAP:
            out.append((start, a + b * start))
    return out


def _envelope_value(segments: list[tuple[float, float, float]], mu: float) -> float:
    active = segments[0]
    for seg in segments[1:]:
        if seg[2] <= mu:
            active = seg
        else:
            break
    a, b, _ = active
    return a + b * mu


def _fit_utility(dev: np.ndarray, welfare: np.ndarray, opt: float):
    if opt <= 0.0:
        raise DegenerateGame("optimal welfare is zero; no ratio is defined")
    lines = sorted({(float(l) / opt, float(w) / opt) for l, w in zip(dev, welfare)})
    segments = _min_envelope(list(lines))
    candidates = [(0.0, max(0.0, _envelope_value(segments, 0.0)))]
    for mu, value in _envelope_vertices(segments):
        candidates.append((mu, max(0.0, value)))
    candidates.sort()
    best = None
    for mu, lam in candidates:
        ratio = lam / (1.0 + mu)
        if best is None or ratio > best[0]:
            best = (ratio, lam, mu)
    frontier = [(lam, mu) for mu, lam in candidates]
    assert best is not None
    return best, frontier


def _fit_cost(dev: np.ndarray, welfare: np.ndarray, anchor_cost: float):
    if anchor_cost <= 0.0:
        raise DegenerateGame("anchor social cost is zero; no ratio is defined")
    # constraints: lambda >= (U - mu * W) / SC(s*); feasible boundary is the
    # max of decreasing lines, handled through the min-envelope of negations.
    lines = sorted({(-float(u) / anchor_cost, float(w) / anchor_cost) for u, w in zip(dev, welfare)})
    segments = _min_envelope(list(lines))
    mus = {0.0}
    for mu, _ in _envelope_vertices(segments):
        if mu < 1.0:
            mus.add(mu)
    # where the boundary hits lambda = 0 within a segment, the implied ratio is 0
    for k, (a, b, start) in enumerate(segments):
        if b <= 0:
            continue
        zero = -a / b  # the negated active line a + b*mu crosses 0 here
        end = segments[k + 1][2] if k + 1 < len(segments) else math.inf
        if 0.0 < zero < 1.0 and start <= zero <= end:
            mus.add(zero)
    best = None
    candidates = []
    for mu in sorted(mus):
        lam = max(0.0, -_envelope_value(segments, mu))
        ratio = lam / (1.0 - mu)
        candidates.append((mu, lam))
        if best is None or ratio < best[0]:
            best = (ratio, lam, mu)
    frontier = [(lam, mu) for mu, lam in candidates]
    assert best is not None
    return best, frontier


def fit_coalitional_smoothness(
    game: Game,
    s_star: Sequence[int] | None = None,
    *,
    anchor_search: bool = False,
    cap: int = PROFILE_CAP,
    perm_cap: int = PERMUTATION_CAP,
    sample_perms: int | None = None,
    seed: int | None = None,
) -> SmoothnessCertificate:
    """Fit the best coalitional certificate by exact envelope-vertex enumeration.

    The default anchor is the welfare optimum. With ``anchor_search`` every
    live profile is tried as the anchor and the best implied ratio wins.
    """
    profiles = profile_array(game, cap)
    payoffs = utilities_matrix(game, cap)
    welfare = payoffs.sum(axis=1)
    cost = game.direction is Direction.COST_MIN

    if anchor_search:
        anchors = [tuple(int(x) for x in row) for row in profiles]
    else:
        if s_star is None:
            best_row = int(np.argmin(welfare)) if cost else int(np.argmax(welfare))
            s_star = tuple(int(x) for x in profiles[best_row])
        anchors = [tuple(s_star)]

    chosen = None
    for anchor in anchors:
        validate_profile(game, anchor)
        dev, exact = _devsum_extreme(
            game, anchor, profiles, payoffs,
            maximize=cost, perm_cap=perm_cap, sample_perms=sample_perms, seed=seed,
        )
        anchor_value = _anchor_value(game, anchor, welfare)
        if cost:
            (ratio, lam, mu), frontier = _fit_cost(dev, welfare, anchor_value)
            better = chosen is None or ratio < chosen[0]
        else:
            (ratio, lam, mu), frontier = _fit_utility(dev, welfare, anchor_value)
            better = chosen is None or ratio > chosen[0]
        if better:
            bad = _violations(game.direction, dev, welfare, anchor_value, lam, mu)
            chosen = (ratio, lam, mu, frontier, anchor, exact, not bad.any())
    assert chosen is not None
    ratio, lam, mu, frontier, anchor, exact, verified = chosen
    return SmoothnessCertificate(
        kind="coalitional",
        direction=game.direction,
        s_star=anchor,
        lam=lam,
        mu=mu,
        verified=verified,
        exact=exact,
        frontier=frontier,
        best_ratio=ratio,
    )


def fit_unilateral_smoothness(
    game: Game,
    s_star: Sequence[int] | None = None,
    *,
    anchor_search: bool = False,
    cap: int = PROFILE_CAP,
) -> SmoothnessCertificate:
    """Fit the best unilateral certificate; same envelope method, no orderings."""
    profiles = profile_array(game, cap)
    payoffs = utilities_matrix(game, cap)
    welfare = payoffs.sum(axis=1)
    cost = game.direction is Direction.COST_MIN

    if anchor_search:
        anchors = [tuple(int(x) for x in row) for row in profiles]
    else:
        if s_star is None:
            best_row = int(np.argmin(welfare)) if cost else int(np.argmax(welfare))
            s_star = tuple(int(x) for x in profiles[best_row])
        anchors = [tuple(s_star)]

    chosen = None
    for anchor in anchors:
        validate_profile(game, anchor)
        dev = _unilateral_sum(game, anchor, profiles, payoffs)
        anchor_value = _anchor_value(game, anchor, welfare)
        if cost:
            (ratio, lam, mu), frontier = _fit_cost(dev, welfare, anchor_value)
            better = chosen is None or ratio < chosen[0]
        else:
            (ratio, lam, mu), frontier = _fit_utility(dev, welfare, anchor_value)
            better = chosen is None or ratio > chosen[0]
        if better:
            bad = _violations(game.direction, dev, welfare, anchor_value, lam, mu)
            chosen = (ratio, lam, mu, frontier, anchor, not bad.any())
    assert chosen is not None
    ratio, lam, mu, frontier, anchor, verified = chosen
    return SmoothnessCertificate(
        kind="unilateral",
        direction=game.direction,
        s_star=anchor,
        lam=lam,
        mu=mu,
        verified=verified,
        frontier=frontier,
        best_ratio=ratio,
    )


# --- structural hypotheses ---------------------------------------------------


def _exiting_players(game: Game) -> list[tuple[int, int]]:
    """(player, exit index) for every player that has one; at least one required."""
    pairs = [
        (i, game.out_index(i)) for i in range(game.n_players) if game.has_out(i)
    ]
    if not pairs:
        raise MissingOutStrategy("no player has an out strategy")
    return pairs  # type: ignore[return-value]


def _exit_welfare(game: Game, prof: Profile, i: int, out: int) -> float:
    left = prof[:i] + (out,) + prof[i + 1:]
    return sum(game.utility_fn(j, left) for j in range(game.n_players))


def marginal_contribution_gamma(game: Game, cap: int = PROFILE_CAP) -> float:
    """Largest gamma with u_i(s) >= gamma * (SW(s) - SW at i's exit) everywhere.

    Pairs whose welfare drop is nonpositive impose no constraint, as do
    players without an exit strategy; the result is +inf when nothing
    constrains gamma and 0 when a player with positive marginal contribution
    earns nothing.
    """
    if game.direction is Direction.COST_MIN:
        raise UnsupportedProperty("marginal-contribution fraction is defined for maximization games")
    exits = _exiting_players(game)
    gamma = math.inf
    for prof in enumerate_profiles(game, cap):
        welfare = sum(game.utility_fn(j, prof) for j in range(game.n_players))
        for i, out in exits:
            marginal = welfare - _exit_welfare(game, prof, i, out)
            if marginal <= CHECK_TOL:
                continue
            gamma = min(gamma, game.utility_fn(i, prof) / marginal)
    return gamma


def check_monotone_participation(
    game: Game, cap: int = PROFILE_CAP
) -> tuple[bool, tuple[Profile, int] | None]:
    """Whether no player's entry can lower welfare: SW(s) >= SW at their exit."""
    if game.direction is Direction.COST_MIN:
        raise UnsupportedProperty("participation monotonicity is defined for maximization games")
    exits = _exiting_players(game)
    for prof in enumerate_profiles(game, cap):
        welfare = sum(game.utility_fn(j, prof) for j in range(game.n_players))
        for i, out in exits:
            if welfare < _exit_welfare(game, prof, i, out) - CHECK_TOL:
                return False, (prof, i)
    return True, None


def check_positive_externalities(
    game: Game, cap: int = PROFILE_CAP
) -> tuple[bool, tuple[Profile, int, int] | None]:
    """Whether any player's exit can only hurt the others (help, for costs).

    Witness is (profile, observer i, leaver j).
    """
    exits = _exiting_players(game)
    cost = game.direction is Direction.COST_MIN
    for prof in enumerate_profiles(game, cap):
        for j, out in exits:
            left = prof[:j] + (out,) + prof[j + 1:]
            for i in range(game.n_players):
                if i == j:
                    continue
                here = game.utility_fn(i, prof)
                gone = game.utility_fn(i, left)
                if cost:
                    if here > gone + CHECK_TOL:
                        return False, (prof, i, j)
                elif here < gone - CHECK_TOL:
                    return False, (prof, i, j)
    return True, None


def _augmented_ranges(game: Game) -> list[list[int]]:
    ranges = []
    for i in range(game.n_players):
        r = list(range(game.strategy_counts[i]))
        o = game.out_index(i)
        if o is not None and o == game.strategy_counts[i]:
            r.append(o)
        ranges.append(r)
    return ranges


def verify_potential(
    game: Game, cap: int = PROFILE_CAP
) -> tuple[bool, tuple[Profile, int, int, float, float] | None]:
    """Check the exact-potential identity over every unilateral deviation.

    Virtual exit strategies join the deviation space, so the identity is also
    verified for moves into and out of the game. Witness is
    (profile, player, target strategy, payoff delta, potential delta).
    """
    if game.potential_fn is None:
        raise MissingPotential("this game exposes no potential oracle")
    ranges = _augmented_ranges(game)
    total = math.prod(len(r) for r in ranges)
    if total > cap:
        raise StateSpaceTooLarge(total, cap)
    for prof in itertools.product(*ranges):
        phi = game.potential_fn(prof)
        for i in range(game.n_players):
            base = game.utility_fn(i, prof)
            for target in ranges[i]:
                if target == prof[i]:
                    continue
                moved = prof[:i] + (target,) + prof[i + 1:]
                du = game.utility_fn(i, moved) - base
                dphi = game.potential_fn(moved) - phi
                if abs(du - dphi) > CHECK_TOL:
                    return False, (prof, i, target, du, dphi)
    return True, None


def potential_closeness(game: Game, cap: int = PROFILE_CAP) -> tuple[float, float]:
    """Tightest (lambda, mu) with lambda * SW(s) <= potential(s) <= mu * SW(s).

    Zero-welfare profiles must carry (numerically) zero potential, otherwise
    the potential cannot be bracketed and the game is flagged incomparable.
    """
    if game.potential_fn is None:
        raise MissingPotential("this game exposes no potential oracle")
    lam, mu = math.inf, -math.inf
    saw_positive = False
    for prof in enumerate_profiles(game, cap):
        welfare = sum(game.utility_fn(j, prof) for j in range(game.n_players))
        phi = game.potential_fn(prof)
        if welfare <= 1e-12:
            if abs(phi) > CHECK_TOL:
                raise Incomparable(
                    f"profile {prof} has zero welfare but potential {phi}"
                )
            continue
        saw_positive = True
        ratio = phi / welfare
        lam = min(lam, ratio)
        mu = max(mu, ratio)
    if not saw_positive:
        raise Incomparable("every profile has zero welfare")
    return float(lam), float(mu)


# --- multiset submodularity of occupancy potentials --------------------------


@dataclass(frozen=True)
class MultisetWitness:
    """A violation of monotonicity or submodularity over strategy multisets."""

    condition: str  # "monotonicity" | "submodularity"
    s_counts: tuple[int, ...]
    t_counts: tuple[int, ...]
    atom: tuple[str, ...] | None
    gap: float


def _occupancy_model(game: Game):
    """(atom resource-index tuples, resource ids, cumulative value fn) for occupancy games."""
    kind = game.kind
    spec = game.payload
    if kind == "utility_congestion":
        cum = spec.cumulative_pi
        ids = spec.resource_ids
        strategies = spec.strategies
    elif kind == "cost_sharing":
        ids = spec.resource_ids

        def cum(r: int, k: int) -> float:
            return sum(spec.costs[r] / j for j in range(1, k + 1))

        strategies = spec.strategies
    else:
        raise NotMultisetExtendable(
            f"game family {kind!r} has no occupancy semantics for its potential"
        )
    atoms = sorted({tuple(sorted(subset)) for strats in strategies for subset in strats})
    return atoms, ids, cum


def check_potential_submodularity(
    game: Game, multiplicity_cap: int = 1, max_multisets: int = 512
) -> tuple[bool, MultisetWitness | None]:
    """Exhaustively check the occupancy potential over strategy multisets.

    Strategies are treated as atoms that can appear up to ``multiplicity_cap``
    times in a multiset; the potential of a multiset sums, per resource, the
    cumulative occupancy values. Checks both monotonicity under multiset sum
    and the diminishing-increment property for adding any single strategy.
    """
    if multiplicity_cap < 1:
        raise InvalidArgument("multiplicity cap must be >= 1")
    atoms, ids, cum = _occupancy_model(game)
    n_atoms = len(atoms)
    n_res = len(ids)
    n_multisets = (multiplicity_cap + 1) ** n_atoms
    if n_multisets > max_multisets:
        raise StateSpaceTooLarge(n_multisets, max_multisets, what="strategy multisets")

    incidence = np.zeros((n_atoms, n_res), dtype=np.int64)
    for a, atom in enumerate(atoms):
        for r in atom:
            incidence[a, r] = 1

    counts = np.array(
        list(itertools.product(range(multiplicity_cap + 1), repeat=n_atoms)), dtype=np.int64
    )
    occ = counts @ incidence
    max_occ = int(occ.max() + incidence.sum(axis=0).max() * (multiplicity_cap + 1))
    cum_tables = [
        np.array([0.0] + [cum(r, k) for k in range(1, max_occ + 1)]) for r in range(n_res)
    ]

    def phi_of(occupancy: np.ndarray) -> np.ndarray:
        total = np.zeros(occupancy.shape[0], dtype=np.float64)
        for r in range(n_res):
            total += cum_tables[r][occupancy[:, r]]
        return total

    phi = phi_of(occ)
    deltas = np.stack([phi_of(occ + incidence[a]) - phi for a in range(n_atoms)], axis=1)
    subset = (counts[:, None, :] <= counts[None, :, :]).all(axis=2)

    # monotonicity: the potential cannot drop when another multiset is added
    for s in range(counts.shape[0]):
        joint = phi_of(occ[s] + occ)
        bad = np.flatnonzero(joint < phi[s] - CHECK_TOL)
        if bad.size:
            t = int(bad[0])
            return False, MultisetWitness(
                "monotonicity",
                tuple(int(x) for x in counts[s]),
                tuple(int(x) for x in counts[t]),
                None,
                float(phi[s] - joint[t]),
            )

    # submodularity: adding a strategy helps a sub-multiset at least as much
    for s in range(counts.shape[0]):
        mask = subset[s]
        for a in range(n_atoms):
            bad = np.flatnonzero(mask & (deltas[s, a] < deltas[:, a] - CHECK_TOL))
            if bad.size:
                t = int(bad[0])
                atom_ids = tuple(ids[r] for r in atoms[a])
                return False, MultisetWitness(
                    "submodularity",
                    tuple(int(x) for x in counts[s]),
                    tuple(int(x) for x in counts[t]),
                    atom_ids,
                    float(deltas[t, a] - deltas[s, a]),
                )
    return True, None


def thm_ratio_threshold(game: Game, cert: SmoothnessCertificate) -> float:
    """The sink-equilibrium welfare floor implied by a verified certificate."""
    return (1.0 / harmonic(game.n_players)) * cert.ratio() * _opt_value(game)


def _opt_value(game: Game) -> float:
    from .core import optimum

    return optimum(game)[1]
