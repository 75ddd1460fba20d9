"""Canonical game-spec fixtures and seeded random spec generators.

The named fixtures g1..g5 are the small reference games used throughout the
test suite and reproducible from the CLI:

* g1 -- two-player cost sharing: one shared resource (cost 1.0) versus a
  private resource per player (cost 0.9 each).
* g2 -- prisoner's dilemma as a utility-maximization table.
* g3 -- contribution game on a line of four nodes: constant-value outer
  edges and a threshold middle edge worth H when both endpoints commit.
* g4 -- two-player congestion game over two fair-split resources with
  values 2 and 1.
* g5 -- one-project welfare sharing game with two players in distinct
  skill groups and product-form value x1 * x2.

Random generators emit JSON-ready spec documents deterministically from a
64-bit seed; all draws come from a single seeded PCG64 stream.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def g1() -> dict:
    return {
        "kind": "cost_sharing",
        "payload": {
            "resources": [
                {"id": "shared", "cost": 1.0},
                {"id": "own1", "cost": 0.9},
                {"id": "own2", "cost": 0.9},
            ],
            "players": [
                {"strategies": [["shared"], ["own1"]]},
                {"strategies": [["shared"], ["own2"]]},
            ],
        },
    }


def g2() -> dict:
    return {
        "kind": "normal_form",
        "payload": {
            "players": 2,
            "strategies": [["C", "D"], ["C", "D"]],
            "utilities": [
                [[3.0, 0.0], [4.0, 1.0]],
                [[3.0, 4.0], [0.0, 1.0]],
            ],
            "direction": "max",
        },
    }


def g3(H: float = 10.0) -> dict:
    return {
        "kind": "network_contribution",
        "payload": {
            "nodes": [
                {"id": "A", "budget": 1.0},
                {"id": "B", "budget": 1.0},
                {"id": "C", "budget": 1.0},
                {"id": "D", "budget": 1.0},
            ],
            "edges": [
                {"a": "A", "b": "B", "fn": "constant", "params": {"c": 1.0}},
                {"a": "B", "b": "C", "fn": "threshold", "params": {"H": float(H)}},
                {"a": "C", "b": "D", "fn": "constant", "params": {"c": 1.0}},
            ],
            "grid": 1,
        },
    }


def g4() -> dict:
    return {
        "kind": "utility_congestion",
        "payload": {
            "resources": [
                {"id": "r1", "harmonic": 2.0},
                {"id": "r2", "harmonic": 1.0},
            ],
            "players": [
                {"strategies": [["r1"], ["r2"]]},
                {"strategies": [["r1"], ["r2"]]},
            ],
        },
    }


def g5() -> dict:
    return {
        "kind": "welfare_sharing",
        "payload": {
            "projects": [
                {"id": "p0", "factors": {"g0": {"a": 1.0, "cap": None}, "g1": {"a": 1.0, "cap": None}}}
            ],
            "players": [
                {"budget": 1.0, "group": "g0", "projects": ["p0"]},
                {"budget": 1.0, "group": "g1", "projects": ["p0"]},
            ],
            "grid": 1,
        },
    }


NAMED_FIXTURES = ("g1", "g2", "g3", "g4", "g5")


def named_fixture(name: str, H: float = 10.0) -> dict:
    if name == "g3":
        return g3(H)
    builders = {"g1": g1, "g2": g2, "g4": g4, "g5": g5}
    if name not in builders:
        raise KeyError(name)
    return builders[name]()


def harmonic_singleton_congestion(values: Sequence[float] = (4.0, 3.0, 2.0, 1.0)) -> dict:
    """n players, n fair-split resources, singleton strategies over every resource."""
    n = len(values)
    resources = [{"id": f"r{k}", "harmonic": float(v)} for k, v in enumerate(values)]
    strategies = [[f"r{k}"] for k in range(n)]
    return {
        "kind": "utility_congestion",
        "payload": {
            "resources": resources,
            "players": [{"strategies": list(strategies)} for _ in range(n)],
        },
    }


def increasing_congestion() -> dict:
    """Two players on two resources whose occupancy payoff grows with crowding."""
    return {
        "kind": "utility_congestion",
        "payload": {
            "resources": [
                {"id": "r1", "pi": [1.0, 2.0]},
                {"id": "r2", "pi": [1.0, 2.0]},
            ],
            "players": [
                {"strategies": [["r1"], ["r2"]]},
                {"strategies": [["r1"], ["r2"]]},
            ],
        },
    }


def nonmonotone_normal_form() -> dict:
    """A two-player table where player 1's entry hurts welfare more than it earns.

    Player 1's second strategy is the exit; entering pays 0.5 but drops
    player 0 from 1.0 to 0.1, so total welfare falls from 1.0 to 0.6.
    """
    return {
        "kind": "normal_form",
        "payload": {
            "players": 2,
            "strategies": [["only"], ["in", "out"]],
            "utilities": [
                [[0.1, 1.0]],
                [[0.5, 0.0]],
            ],
            "direction": "max",
            "out": [None, 1],
        },
    }


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _round(x: float) -> float:
    return round(float(x), 6)


def _subsets(rng: np.random.Generator, n_resources: int, count: int, ids: list[str]) -> list[list[str]]:
    seen, out = set(), []
    for _ in range(count):
        size = int(rng.integers(1, min(n_resources, 2) + 1))
        picks = sorted(rng.choice(n_resources, size=size, replace=False).tolist())
        key = tuple(picks)
        if key in seen:
            continue
        seen.add(key)
        out.append([ids[r] for r in picks])
    return out


def random_cost_sharing(n: int, r: int, seed: int) -> dict:
    rng = _rng(seed)
    ids = [f"r{k}" for k in range(r)]
    resources = [{"id": rid, "cost": _round(rng.uniform(0.1, 2.0))} for rid in ids]
    players = []
    for _ in range(n):
        count = int(rng.integers(2, 4))
        players.append({"strategies": _subsets(rng, r, count, ids)})
    return {"kind": "cost_sharing", "payload": {"resources": resources, "players": players}}


def random_congestion(n: int, r: int, seed: int, harmonic: bool | None = None) -> dict:
    rng = _rng(seed)
    ids = [f"r{k}" for k in range(r)]
    resources = []
    for rid in ids:
        use_harmonic = harmonic if harmonic is not None else bool(rng.integers(2))
        if use_harmonic:
            resources.append({"id": rid, "harmonic": _round(rng.uniform(0.5, 3.0))})
        else:
            table = sorted((_round(rng.uniform(0.1, 3.0)) for _ in range(n)), reverse=True)
            resources.append({"id": rid, "pi": table})
    players = []
    for _ in range(n):
        count = int(rng.integers(2, 4))
        players.append({"strategies": _subsets(rng, r, count, ids)})
    return {"kind": "utility_congestion", "payload": {"resources": resources, "players": players}}


def random_normal_form(n: int, seed: int) -> dict:
    rng = _rng(seed)
    counts = [int(rng.integers(2, 4)) for _ in range(n)]
    direction = "max" if seed % 2 == 0 else "min"

    def table(shape):
        return np.round(rng.uniform(0.0, 5.0, size=shape), 6).tolist()

    return {
        "kind": "normal_form",
        "payload": {
            "players": n,
            "strategies": [[f"s{k}" for k in range(c)] for c in counts],
            "utilities": [table(tuple(counts)) for _ in range(n)],
            "direction": direction,
        },
    }


def random_contribution(n: int, seed: int) -> dict:
    rng = _rng(seed)
    nodes = [{"id": f"n{k}", "budget": float(int(rng.integers(1, 3)))} for k in range(n)]
    tags = ["constant", "product", "min", "sum", "threshold"]
    edges = []
    pairs = [(a, a + 1) for a in range(n - 1)]  # a path keeps strategy spaces small
    if n >= 3 and rng.integers(2):
        pairs.append((0, n - 1))
    for a, b in pairs:
        tag = tags[int(rng.integers(len(tags)))]
        key = "H" if tag == "threshold" else "c"
        value = _round(rng.uniform(0.5, 4.0))
        edges.append({"a": f"n{a}", "b": f"n{b}", "fn": tag, "params": {key: value}})
    return {
        "kind": "network_contribution",
        "payload": {"nodes": nodes, "edges": edges, "grid": 1},
    }


def random_welfare_sharing(n: int, seed: int) -> dict:
    rng = _rng(seed)
    n_projects = int(rng.integers(1, 3))
    project_ids = [f"p{j}" for j in range(n_projects)]
    group_of = ["g0" if k % 2 == 0 else "g1" for k in range(n)]
    players = []
    for k in range(n):
        count = int(rng.integers(1, n_projects + 1))
        picks = sorted(rng.choice(n_projects, size=count, replace=False).tolist())
        players.append({
            "budget": 1.0,
            "group": group_of[k],
            "projects": [project_ids[j] for j in picks],
        })
    projects = []
    for j, pid in enumerate(project_ids):
        groups = sorted({group_of[k] for k in range(n) if pid in players[k]["projects"]})
        factors = {}
        for g in groups:
            cap = None if rng.integers(2) else _round(rng.uniform(1.0, 3.0))
            factors[g] = {"a": _round(rng.uniform(0.5, 2.0)), "cap": cap}
        projects.append({"id": pid, "factors": factors})
    # every project needs at least one participant; re-point orphans at p0
    used = {pid for p in players for pid in p["projects"]}
    projects = [p for p in projects if p["id"] in used]
    return {
        "kind": "welfare_sharing",
        "payload": {"projects": projects, "players": players, "grid": 1},
    }


RANDOM_FAMILIES = {
    "normal_form": lambda n, seed: random_normal_form(n, seed),
    "cost_sharing": lambda n, seed: random_cost_sharing(n, max(2, n), seed),
    "network_contribution": lambda n, seed: random_contribution(n, seed),
    "welfare_sharing": lambda n, seed: random_welfare_sharing(n, seed),
    "utility_congestion": lambda n, seed: random_congestion(n, max(2, n), seed),
}
