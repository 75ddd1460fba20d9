"""Family builders: utilities, potentials, schema validation, and invariants.

Expected values are frozen from hand enumeration of the small fixtures; the
structural invariants (budget balance, share partition, potential identity)
are re-derived here from the raw spec payloads, independently of the builders.
"""

import copy
import itertools
import math

import pytest

import coalgame as cg
from coalgame import fixtures
from coalgame.core import Direction, enumerate_profiles
from coalgame.errors import SpecError
from coalgame.games import (
    congestion_utility,
    contribution_utility,
    cost_share_cost,
    load_game,
    parse_spec,
    rosenthal_potential,
    welfare_share_utility,
)


class TestLoader:
    def test_g1_shape(self, g1):
        assert g1.strategy_counts == (2, 2)
        assert g1.direction is Direction.COST_MIN
        assert g1.kind == "cost_sharing"

    def test_g3_shape(self, g3):
        # line of four nodes: the inner nodes each split one unit between two edges
        assert g3.strategy_counts == (1, 2, 2, 1)
        assert g3.direction is Direction.UTILITY_MAX

    def test_empty_players_rejected(self):
        spec = fixtures.g1()
        spec["payload"]["players"] = []
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "players" in str(err.value)

    def test_unknown_top_level_field(self):
        spec = fixtures.g2()
        spec["extra"] = 1
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "$.extra" in str(err.value)

    def test_unknown_kind(self):
        with pytest.raises(SpecError) as err:
            load_game({"kind": "bingo", "payload": {}})
        assert "$.kind" in str(err.value)

    def test_unknown_payload_field_names_path(self):
        spec = fixtures.g4()
        spec["payload"]["bogus"] = True
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "payload.bogus" in str(err.value)

    def test_unknown_resource_reference(self):
        spec = fixtures.g1()
        spec["payload"]["players"][0]["strategies"][0] = ["nope"]
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "players[0].strategies[0][0]" in str(err.value)

    def test_duplicate_resource_id(self):
        spec = fixtures.g1()
        spec["payload"]["resources"][1]["id"] = "shared"
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "duplicate" in str(err.value)

    def test_negative_cost_rejected(self):
        spec = fixtures.g1()
        spec["payload"]["resources"][0]["cost"] = -1.0
        with pytest.raises(SpecError):
            load_game(spec)

    def test_negative_utility_rejected(self):
        spec = fixtures.g2()
        spec["payload"]["utilities"][0][0][0] = -1.0
        with pytest.raises(SpecError):
            load_game(spec)

    def test_bad_table_shape(self):
        spec = fixtures.g2()
        spec["payload"]["utilities"][0] = [[3.0, 0.0]]
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "utilities[0]" in str(err.value)

    def test_congestion_table_length(self):
        spec = fixtures.increasing_congestion()
        spec["payload"]["resources"][0]["pi"] = [1.0]
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "pi" in str(err.value)

    def test_normal_form_out_must_pay_zero(self):
        spec = fixtures.nonmonotone_normal_form()
        spec["payload"]["utilities"][1][0][1] = 0.25  # exit index no longer pays zero
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "out" in str(err.value)

    def test_edge_to_unknown_node(self):
        spec = fixtures.g3()
        spec["payload"]["edges"][0]["a"] = "Z"
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "edges[0].a" in str(err.value)

    def test_self_loop_edge_rejected(self):
        spec = fixtures.g3()
        spec["payload"]["edges"][0]["b"] = "A"
        with pytest.raises(SpecError):
            load_game(spec)

    def test_welfare_missing_group_factor(self):
        spec = fixtures.g5()
        del spec["payload"]["projects"][0]["factors"]["g1"]
        with pytest.raises(SpecError) as err:
            load_game(spec)
        assert "factors" in str(err.value)


class TestCostSharing:
    def test_equal_split(self, g1):
        spec = parse_spec(fixtures.g1())
        assert cost_share_cost(spec, 0, (0, 0)) == pytest.approx(0.5, abs=1e-9)

    def test_sole_user(self):
        spec = parse_spec(fixtures.g1())
        assert cost_share_cost(spec, 0, (0, 1)) == pytest.approx(1.0, abs=1e-9)

    def test_private_resource(self):
        spec = parse_spec(fixtures.g1())
        assert cost_share_cost(spec, 1, (1, 1)) == pytest.approx(0.9, abs=1e-9)

    def test_budget_balance(self, g1):
        # total cost equals the summed cost of resources in use, recomputed
        # here straight from the payload
        payload = fixtures.g1()["payload"]
        costs = {r["id"]: r["cost"] for r in payload["resources"]}
        strategies = [p["strategies"] for p in payload["players"]]
        for s in enumerate_profiles(g1):
            used = set().union(*(strategies[i][s[i]] for i in range(g1.n_players)))
            assert cg.social_welfare(g1, s) == pytest.approx(
                sum(costs[r] for r in used), abs=1e-9
            )

    def test_budget_balance_random(self):
        for seed in range(25):
            doc = fixtures.random_cost_sharing(2 + seed % 3, 4, seed)
            game = load_game(doc)
            costs = {r["id"]: r["cost"] for r in doc["payload"]["resources"]}
            strategies = [p["strategies"] for p in doc["payload"]["players"]]
            for s in enumerate_profiles(game):
                used = set().union(*(strategies[i][s[i]] for i in range(game.n_players)))
                assert cg.social_welfare(game, s) == pytest.approx(
                    sum(costs[r] for r in used), abs=1e-9
                )

    def test_potential_at_all_out_is_zero(self, g1):
        assert g1.potential_fn(cg.core.all_out_profile(g1)) == 0.0


class TestContribution:
    def test_full_effort_on_middle_edge(self):
        spec = parse_spec(fixtures.g3(10.0))
        # A and D have a single allocation; B/C put their whole unit on the middle edge
        allocations = [(1,), (0, 1), (1, 0), (1,)]
        assert contribution_utility(spec, 1, allocations) == pytest.approx(5.5, abs=1e-9)

    def test_outer_edges_only(self):
        spec = parse_spec(fixtures.g3(10.0))
        allocations = [(1,), (1, 0), (0, 1), (1,)]
        assert contribution_utility(spec, 1, allocations) == pytest.approx(0.5, abs=1e-9)

    def test_product_edge_with_zero_effort(self):
        doc = {
            "kind": "network_contribution",
            "payload": {
                "nodes": [
                    {"id": "a", "budget": 1.0},
                    {"id": "b", "budget": 1.0},
                    {"id": "c", "budget": 1.0},
                ],
                "edges": [
                    {"a": "a", "b": "b", "fn": "product", "params": {"c": 2.0}},
                    {"a": "b", "b": "c", "fn": "product", "params": {"c": 2.0}},
                ],
                "grid": 1,
            },
        }
        spec = parse_spec(doc)
        # b puts everything on the bc edge, so the ab edge has a zero factor
        allocations = [(1,), (0, 1), (1,)]
        assert contribution_utility(spec, 0, allocations) == 0.0

    def test_off_grid_allocation_rejected(self):
        spec = parse_spec(fixtures.g3(10.0))
        with pytest.raises(SpecError):
            contribution_utility(spec, 1, [(1,), (1, 1), (1, 0), (1,)])

    def test_welfare_equals_edge_values_and_potential_is_half(self, g3):
        spec = parse_spec(fixtures.g3(10.0))
        for s in enumerate_profiles(g3):
            total_value = sum(spec.edge_values(s))
            assert cg.social_welfare(g3, s) == pytest.approx(total_value, abs=1e-9)
            assert g3.potential_fn(s) == pytest.approx(total_value / 2.0, abs=1e-9)

    def test_unilateral_move_matches_potential_difference(self, g3):
        for s in enumerate_profiles(g3):
            for i in range(g3.n_players):
                for alt in range(g3.strategy_counts[i]):
                    moved = s[:i] + (alt,) + s[i + 1:]
                    du = cg.utility(g3, i, moved) - cg.utility(g3, i, s)
                    dphi = g3.potential_fn(moved) - g3.potential_fn(s)
                    assert du == pytest.approx(dphi, abs=1e-9)

    def test_absent_player_kills_incident_edges(self, g3):
        # with B absent, even the constant-value edge to A pays nothing
        out_b = (0, g3.out_index(1), 0, 0)
        assert cg.utility(g3, 0, out_b) == 0.0
        assert cg.utility(g3, 1, out_b) == 0.0
        assert cg.utility(g3, 3, out_b) == pytest.approx(0.5, abs=1e-9)


class TestWelfareSharing:
    def test_even_split_at_unit_effort(self):
        spec = parse_spec(fixtures.g5())
        assert welfare_share_utility(spec, 0, [(1,), (1,)]) == pytest.approx(0.5, abs=1e-9)

    def test_asymmetric_budgets(self):
        doc = fixtures.g5()
        doc["payload"]["players"][0]["budget"] = 2.0
        doc["payload"]["players"][1]["budget"] = 3.0
        spec = parse_spec(doc)
        # value 2*3 = 6, both marginals 6, each share (6/12)*6 = 3
        assert welfare_share_utility(spec, 0, [(1,), (1,)]) == pytest.approx(3.0, abs=1e-9)
        assert welfare_share_utility(spec, 1, [(1,), (1,)]) == pytest.approx(3.0, abs=1e-9)

    def test_zero_value_project_pays_nothing(self):
        spec = parse_spec(fixtures.g5())
        assert welfare_share_utility(spec, 0, [(0,), (0,)]) == 0.0
        assert welfare_share_utility(spec, 1, [(0,), (0,)]) == 0.0

    def test_over_budget_rejected(self):
        spec = parse_spec(fixtures.g5())
        with pytest.raises(SpecError):
            welfare_share_utility(spec, 0, [(2,), (1,)])

    def test_withholding_is_a_live_strategy(self, g5):
        assert g5.strategy_counts == (2, 2)
        assert cg.social_welfare(g5, (0, 0)) == 0.0

    def test_factor_cap_binds(self):
        doc = fixtures.g5()
        doc["payload"]["projects"][0]["factors"]["g0"]["cap"] = 0.25
        game = load_game(doc)
        # capped group factor 0.25 times the other group's factor 1.0
        assert cg.social_welfare(game, (1, 1)) == pytest.approx(0.25, abs=1e-9)

    def test_shares_partition_project_value(self):
        # independently recompute each project's value from the payload and
        # compare with the summed shares whenever some marginal is positive
        for seed in range(25):
            doc = fixtures.random_welfare_sharing(2 + seed % 3, seed)
            game = load_game(doc)
            spec = parse_spec(doc)
            for s in enumerate_profiles(game):
                per_project = _project_values_and_marginals(doc["payload"], spec, s)
                expected = sum(v for v, denom in per_project if denom > 0)
                assert cg.social_welfare(game, s) == pytest.approx(expected, abs=1e-9)


def _project_values_and_marginals(payload, spec, profile):
    """(value, marginal mass) per project, recomputed from the raw payload."""
    grid = payload["grid"]
    players = payload["players"]
    result = []
    for j, project in enumerate(payload["projects"]):
        efforts = {}
        for p, player in enumerate(players):
            if project["id"] in player["projects"]:
                units = spec.allocations[p][profile[p]]
                slot = player["projects"].index(project["id"])
                efforts[p] = units[slot] * player["budget"] / grid

        def value(eff):
            total = 1.0
            for gname, factor in project["factors"].items():
                group_sum = sum(
                    x for p, x in eff.items() if players[p]["group"] == gname
                )
                cap = factor.get("cap")
                cap = math.inf if cap in (None, "inf") else cap
                total *= min(cap, factor["a"] * group_sum)
            return total

        v = value(efforts)
        denom = 0.0
        for p in efforts:
            dropped = dict(efforts)
            dropped[p] = 0.0
            denom += v - value(dropped)
        result.append((v, denom))
    return result


class TestCongestion:
    def test_both_on_first_resource(self):
        spec = parse_spec(fixtures.g4())
        assert congestion_utility(spec, 0, (0, 0)) == pytest.approx(1.0, abs=1e-9)
        assert rosenthal_potential(spec, (0, 0)) == pytest.approx(3.0, abs=1e-9)

    def test_split_profile(self, g4):
        spec = parse_spec(fixtures.g4())
        assert cg.social_welfare(g4, (0, 1)) == pytest.approx(3.0, abs=1e-9)
        assert rosenthal_potential(spec, (0, 1)) == pytest.approx(3.0, abs=1e-9)

    def test_all_out_potential_zero(self, g4):
        spec = parse_spec(fixtures.g4())
        assert rosenthal_potential(spec, cg.core.all_out_profile(g4)) == 0.0

    def test_decreasing_tables_dominate_welfare(self):
        # with nonincreasing per-resource values the potential upper-bounds welfare
        for seed in range(20):
            doc = fixtures.random_congestion(2 + seed % 3, 3, seed)
            game = load_game(doc)
            for s in enumerate_profiles(game):
                assert game.potential_fn(s) >= cg.social_welfare(game, s) - 1e-9

    def test_harmonic_bracket(self, g4):
        h = cg.harmonic(g4.n_players)
        for s in enumerate_profiles(g4):
            welfare = cg.social_welfare(g4, s)
            phi = g4.potential_fn(s)
            assert welfare - 1e-9 <= phi <= h * welfare + 1e-9


class TestGeneratorDeterminism:
    def test_random_specs_replay(self):
        for family, gen in fixtures.RANDOM_FAMILIES.items():
            assert gen(3, 11) == gen(3, 11), family

    def test_named_fixtures_are_valid(self):
        for name in fixtures.NAMED_FIXTURES:
            game = load_game(fixtures.named_fixture(name))
            assert game.n_players >= 1

    def test_random_specs_are_valid(self):
        for family, gen in fixtures.RANDOM_FAMILIES.items():
            for seed in range(10):
                game = load_game(gen(2 + seed % 3, seed))
                assert game.n_players >= 2, family
