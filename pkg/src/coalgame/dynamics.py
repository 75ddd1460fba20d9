"""Coalitional best-response dynamics, its exact Markov chain, and sink analysis.

Each step samples a coalition size k with probability (1/k)/H_n, then a
uniform coalition of that size, and the coalition jointly moves to the
strategy tuple maximizing its total payoff given everyone else (total cost is
minimized in cost games). Ties keep the coalition's current joint strategy
when it attains the optimum, then break lexicographically-first; keeping the
current strategy makes strongly stable profiles absorbing states.

The same step law, enumerated instead of sampled, yields an exact
row-stochastic transition matrix. Coalitional sink equilibria are its
terminal strongly connected components; each carries a stationary
distribution and an expected welfare. Randomness comes from a single 64-bit
seed driving a PCG64 stream, recorded in every trace.

The unilateral variant picks one player uniformly per step and applies the
same best-response rule to them alone, recording the potential alongside the
welfare when the game has one.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .core import (
    PROFILE_CAP,
    Coalition,
    Direction,
    Game,
    Profile,
    enumerate_profiles,
    harmonic,
    index_radix,
    profile_array,
    profile_at,
    profile_index,
    utilities_matrix,
    validate_profile,
)
from .errors import InvalidArgument, RejectedCertificate, StateSpaceTooLarge
from .smoothness import SmoothnessCertificate

GENERATOR_ID = "numpy-pcg64"
#: Default cap on the number of chain states.
CHAIN_STATE_CAP = 20_000
#: Largest sink solved by a dense linear system; larger sinks use power iteration.
DENSE_SOLVE_CAP = 2_000
#: Ties within this slack keep the current strategy.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class TraceStep:
    t: int
    coalition: tuple[int, ...]  # players that moved this step (may be a singleton)
    profile: Profile
    welfare: float
    potential: float | None = None


@dataclass
class DynamicsTrace:
    seed: int
    mode: str  # "coalitional" | "unilateral"
    generator: str
    n_players: int
    initial: Profile
    initial_welfare: float
    initial_potential: float | None
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def empirical_mean_welfare(self) -> float:
        """Average welfare over recorded steps 1..T (the initial state excluded)."""
        if not self.steps:
            return self.initial_welfare
        return float(sum(s.welfare for s in self.steps) / len(self.steps))

    @property
    def final_welfare(self) -> float:
        return self.steps[-1].welfare if self.steps else self.initial_welfare

    def to_csv(self) -> str:
        """Trace file: comment header with replay metadata, then one row per step."""
        buf = io.StringIO()
        buf.write(f"# seed={self.seed}\n")
        buf.write(f"# generator={self.generator}\n")
        buf.write(f"# mode={self.mode}\n")
        has_phi = self.initial_potential is not None
        columns = "t,coalition,profile,welfare" + (",potential" if has_phi else "")
        buf.write(columns + "\n")

        def row(t, coalition, profile, welfare, potential):
            cells = [
                str(t),
                "-".join(map(str, coalition)),
                "-".join(map(str, profile)),
                repr(welfare),
            ]
            if has_phi:
                cells.append(repr(potential))
            buf.write(",".join(cells) + "\n")

        row(0, (), self.initial, self.initial_welfare, self.initial_potential)
        for step in self.steps:
            row(step.t, step.coalition, step.profile, step.welfare, step.potential)
        return buf.getvalue()


def coalition_size_weights(n: int) -> np.ndarray:
    """P(size = k) = (1/k) / H_n for k = 1..n."""
    h = harmonic(n)
    return np.array([1.0 / (k * h) for k in range(1, n + 1)])


def unrank_combination(n: int, k: int, rank: int) -> tuple[int, ...]:
    """The rank-th k-subset of range(n) in lexicographic order."""
    members = []
    start = 0
    for slot in range(k, 0, -1):
        for candidate in range(start, n - slot + 1):
            block = math.comb(n - candidate - 1, slot - 1)
            if rank < block:
                members.append(candidate)
                start = candidate + 1
                break
            rank -= block
    return tuple(members)


def joint_best_response(
    game: Game,
    coalition: Coalition,
    s: Sequence[int],
    cap: int = PROFILE_CAP,
) -> tuple[int, ...]:
    """The joint strategy maximizing the coalition's total payoff given the rest.

    The coalition's current joint strategy wins ties; otherwise the
    lexicographically-first maximizer is returned.
    """
    coalition.validate_for(game)
    validate_profile(game, s)
    s = tuple(s)
    members = coalition.members
    space = math.prod(game.strategy_counts[i] for i in members)
    if space > cap:
        raise StateSpaceTooLarge(space, cap, what="joint deviations")
    cost = game.direction is Direction.COST_MIN
    sign = -1.0 if cost else 1.0

    current = tuple(s[i] for i in members)
    best_joint: tuple[int, ...] | None = None
    best_total = -math.inf
    prof = list(s)
    for joint in itertools.product(*[range(game.strategy_counts[i]) for i in members]):
        for i, choice in zip(members, joint):
            prof[i] = choice
        t = tuple(prof)
        total = sign * sum(game.utility_fn(i, t) for i in members)
        if total > best_total:
            best_total = total
            best_joint = joint
    assert best_joint is not None
    prof = list(s)
    for i, choice in zip(members, current):
        prof[i] = choice
    current_total = sign * sum(game.utility_fn(i, tuple(s)) for i in members)
    if current_total >= best_total - TIE_TOL:
        return current
    return best_joint


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def coalitional_step(
    game: Game, s: Sequence[int], rng: np.random.Generator, cap: int = PROFILE_CAP
) -> tuple[Coalition, Profile]:
    """One sampled move: size inversely proportional, uniform coalition, joint best response."""
    n = game.n_players
    k = int(rng.choice(np.arange(1, n + 1), p=coalition_size_weights(n)))
    rank = int(rng.integers(math.comb(n, k)))
    coalition = Coalition(unrank_combination(n, k, rank))
    joint = joint_best_response(game, coalition, s, cap)
    from .core import apply_deviation

    return coalition, apply_deviation(s, coalition, joint)


def _initial_profile(game: Game, initial: Sequence[int] | None) -> Profile:
    if initial is None:
        return tuple(0 for _ in range(game.n_players))
    initial = tuple(initial)
    validate_profile(game, initial)
    return initial


def run_coalitional(
    game: Game,
    steps: int,
    seed: int,
    initial: Sequence[int] | None = None,
    cap: int = PROFILE_CAP,
) -> DynamicsTrace:
    """Simulate the coalitional dynamic for ``steps`` moves; replays bit-identically."""
    if steps < 0:
        raise InvalidArgument("step count must be nonnegative")
    rng = make_rng(seed)
    s = _initial_profile(game, initial)
    has_phi = game.potential_fn is not None
    trace = DynamicsTrace(
        seed=seed,
        mode="coalitional",
        generator=GENERATOR_ID,
        n_players=game.n_players,
        initial=s,
        initial_welfare=_welfare(game, s),
        initial_potential=game.potential_fn(s) if has_phi else None,
    )
    for t in range(1, steps + 1):
        coalition, s = coalitional_step(game, s, rng, cap)
        trace.steps.append(
            TraceStep(
                t,
                coalition.members,
                s,
                _welfare(game, s),
                game.potential_fn(s) if has_phi else None,
            )
        )
    return trace


def run_unilateral(
    game: Game,
    steps: int,
    seed: int,
    initial: Sequence[int] | None = None,
    cap: int = PROFILE_CAP,
) -> DynamicsTrace:
    """Simulate uniformly-random single-player best responses, recording the potential."""
    if steps < 0:
        raise InvalidArgument("step count must be nonnegative")
    rng = make_rng(seed)
    s = _initial_profile(game, initial)
    has_phi = game.potential_fn is not None
    trace = DynamicsTrace(
        seed=seed,
        mode="unilateral",
        generator=GENERATOR_ID,
        n_players=game.n_players,
        initial=s,
        initial_welfare=_welfare(game, s),
        initial_potential=game.potential_fn(s) if has_phi else None,
    )
    from .core import apply_deviation

    for t in range(1, steps + 1):
        player = int(rng.integers(game.n_players))
        coalition = Coalition((player,))
        joint = joint_best_response(game, coalition, s, cap)
        s = apply_deviation(s, coalition, joint)
        trace.steps.append(
            TraceStep(
                t,
                (player,),
                s,
                _welfare(game, s),
                game.potential_fn(s) if has_phi else None,
            )
        )
    return trace


def _welfare(game: Game, s: Profile) -> float:
    return float(sum(game.utility_fn(i, s) for i in range(game.n_players)))


@dataclass
class ChainAnalysis:
    """The exact transition structure of the coalitional dynamic."""

    states: list[Profile]
    welfare: np.ndarray
    transition: sp.csr_matrix
    sinks: list[list[int]] | None = None
    stationary: list[np.ndarray] | None = None
    expected_welfare: list[float] | None = None
    threshold: float | None = None
    sink_meets_threshold: list[bool] | None = None

    def one_step_expected_welfare(self) -> np.ndarray:
        """E[welfare after one move | current state], per state."""
        return self.transition @ self.welfare

    def to_json_dict(self) -> dict:
        coo = self.transition.tocoo()
        doc = {
            "states": ["-".join(map(str, s)) for s in self.states],
            "welfare": [float(w) for w in self.welfare],
            "transitions": [
                [int(i), int(j), float(p)] for i, j, p in zip(coo.row, coo.col, coo.data)
            ],
        }
        if self.sinks is not None:
            doc["sinks"] = [list(map(int, sink)) for sink in self.sinks]
        if self.stationary is not None:
            doc["stationary"] = [[float(p) for p in dist] for dist in self.stationary]
        if self.expected_welfare is not None:
            doc["expected_welfare"] = [float(v) for v in self.expected_welfare]
        if self.threshold is not None:
            doc["threshold"] = self.threshold
            doc["sink_meets_threshold"] = list(self.sink_meets_threshold or [])
        return doc


def build_chain(game: Game, state_cap: int = CHAIN_STATE_CAP) -> ChainAnalysis:
    """Enumerate every state's coalition moves into an exact transition matrix.

    P[s -> s'] sums (1/H_n) * (1/k) * (1 / C(n, k)) over the coalitions whose
    joint best response maps s to s'.
    """
    n_states = math.prod(game.strategy_counts)
    if n_states > state_cap:
        raise StateSpaceTooLarge(n_states, state_cap, what="chain states")
    states = enumerate_profiles(game, state_cap)
    profiles = profile_array(game, state_cap)
    payoffs = utilities_matrix(game, state_cap)
    welfare = payoffs.sum(axis=1)
    n = game.n_players
    h = harmonic(n)
    cost = game.direction is Direction.COST_MIN
    radix = index_radix(game)
    base = profiles @ radix

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for k in range(1, n + 1):
        weight = 1.0 / (h * k * math.comb(n, k))
        for members in itertools.combinations(range(n), k):
            others = [i for i in range(n) if i not in members]
            # group states sharing the non-members' strategies; within a group the
            # coalition's best response is a single target column
            if others:
                key = profiles[:, others] @ _sub_radix(game, others)
            else:
                key = np.zeros(n_states, dtype=np.int64)
            order = np.argsort(key, kind="stable")
            boundaries = np.flatnonzero(np.diff(key[order])) + 1
            targets = np.empty(n_states, dtype=np.int64)
            for group in np.split(order, boundaries):
                totals = payoffs[np.ix_(group, np.array(members))].sum(axis=1)
                if cost:
                    best_pos = int(np.argmin(totals))
                    best_val = totals[best_pos]
                    keep = totals <= best_val + TIE_TOL
                else:
                    best_pos = int(np.argmax(totals))
                    best_val = totals[best_pos]
                    keep = totals >= best_val - TIE_TOL
                target = group[best_pos]
                # states already attaining the optimum stay put
                targets[group] = np.where(keep, group, target)
            rows.append(np.arange(n_states, dtype=np.int64))
            cols.append(targets)
            vals.append(np.full(n_states, weight))

    matrix = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_states, n_states),
    )
    matrix.sum_duplicates()
    return ChainAnalysis(states=states, welfare=welfare, transition=matrix)


def _sub_radix(game: Game, players: Sequence[int]) -> np.ndarray:
    counts = [game.strategy_counts[i] for i in players]
    radix = np.ones(len(players), dtype=np.int64)
    for i in range(len(players) - 2, -1, -1):
        radix[i] = radix[i + 1] * counts[i + 1]
    return radix


def _stationary_distribution(P: sp.csr_matrix) -> np.ndarray:
    """Stationary row vector of an irreducible row-stochastic matrix.

    Small systems are solved densely; larger ones by power iteration on the
    lazy chain (P + I) / 2, which has the same stationary vector and is
    aperiodic.
    """
    m = P.shape[0]
    if m == 1:
        return np.ones(1)
    if m <= DENSE_SOLVE_CAP:
        dense = P.toarray()
        A = np.vstack([dense.T - np.eye(m), np.ones((1, m))])
        b = np.zeros(m + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
        pi = np.clip(pi, 0.0, None)
        return pi / pi.sum()
    pi = np.full(m, 1.0 / m)
    for _ in range(1_000_000):
        nxt = 0.5 * (pi @ P) + 0.5 * pi
        if np.abs(nxt - pi).max() <= 1e-12:
            pi = nxt
            break
        pi = nxt
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def sink_equilibria(
    game: Game,
    certificate: SmoothnessCertificate | None = None,
    state_cap: int = CHAIN_STATE_CAP,
    chain: ChainAnalysis | None = None,
) -> ChainAnalysis:
    """Terminal recurrent classes of the chain with stationary welfare per sink.

    With a verified certificate the analysis also reports the welfare floor
    (1/H_n) * ratio * OPT and flags each sink against it.
    """
    if chain is None:
        chain = build_chain(game, state_cap)
    adjacency = (chain.transition > 0).astype(np.int8)
    n_comp, labels = connected_components(adjacency, directed=True, connection="strong")
    coo = chain.transition.tocoo()
    leaves = np.zeros(n_comp, dtype=bool)
    for i, j in zip(coo.row, coo.col):
        if labels[i] != labels[j]:
            leaves[labels[i]] = True
    sinks = []
    for comp in range(n_comp):
        if not leaves[comp]:
            sinks.append(sorted(int(x) for x in np.flatnonzero(labels == comp)))
    sinks.sort(key=lambda sink: sink[0])

    stationary, expected = [], []
    for sink in sinks:
        idx = np.array(sink)
        # rows restricted to a terminal class keep all their mass
        sub = chain.transition[idx][:, idx].tocsr()
        pi = _stationary_distribution(sub)
        residual = np.abs(pi @ sub - pi).max()
        if residual > 1e-10:
            raise ArithmeticError(f"stationary solve residual {residual} above 1e-10")
        stationary.append(pi)
        expected.append(float(pi @ chain.welfare[idx]))

    chain.sinks = sinks
    chain.stationary = stationary
    chain.expected_welfare = expected
    if certificate is not None:
        if not certificate.verified:
            raise RejectedCertificate("the supplied certificate failed verification")
        from .core import optimum

        opt_value = optimum(game)[1]
        threshold = certificate.ratio() * opt_value / harmonic(game.n_players)
        chain.threshold = float(threshold)
        chain.sink_meets_threshold = [v >= threshold - 1e-6 for v in expected]
    return chain


@dataclass
class BoundReport:
    """Empirical welfare of a trace against the any-horizon certificate bound."""

    steps: int
    empirical_mean: float
    threshold: float
    margin: float
    passed: bool
    statistical: bool = True

    def to_json_dict(self) -> dict:
        return {
            "steps": self.steps,
            "empirical_mean": self.empirical_mean,
            "threshold": self.threshold,
            "margin": self.margin,
            "passed": self.passed,
            "statistical": self.statistical,
        }


def empirical_bound_check(
    trace: DynamicsTrace, certificate: SmoothnessCertificate, opt_value: float
) -> BoundReport:
    """Compare a trace's mean welfare with ((T-1)/2T) * lambda/(H_n+mu) * OPT."""
    if not certificate.verified:
        raise RejectedCertificate("the supplied certificate failed verification")
    if certificate.direction is Direction.COST_MIN:
        from .errors import UnsupportedProperty

        raise UnsupportedProperty("the any-horizon welfare bound is defined for maximization games")
    steps = len(trace.steps)
    if steps == 0:
        threshold = 0.0
    else:
        h = harmonic(trace.n_players)
        threshold = (
            (steps - 1)
            / (2.0 * steps)
            * certificate.lam
            / (h + certificate.mu)
            * opt_value
        )
    mean = trace.empirical_mean_welfare
    return BoundReport(
        steps=steps,
        empirical_mean=mean,
        threshold=float(threshold),
        margin=float(mean - threshold),
        passed=mean >= threshold,
    )
