"""Nash / strong Nash enumeration, efficiency ratios, and distribution checks."""

import math

import pytest

import coalgame as cg
from coalgame import fixtures
from coalgame.core import Coalition, Direction, Game, enumerate_profiles
from coalgame.equilibria import equilibrium_masks
from coalgame.errors import InvalidDistribution


def single_player_game():
    return cg.load_game(
        {
            "kind": "normal_form",
            "payload": {
                "players": 1,
                "strategies": [["a", "b", "c"]],
                "utilities": [[1.0, 5.0, 2.0]],
                "direction": "max",
            },
        }
    )


class TestIsNash:
    def test_mutual_defection(self, g2):
        assert cg.is_nash(g2, (1, 1)) == (True, None)

    def test_mutual_cooperation_has_witness(self, g2):
        ok, witness = cg.is_nash(g2, (0, 0))
        assert not ok
        assert witness == (0, 1)  # player 0 defects: 3 -> 4

    def test_single_player_nash_iff_argmax(self):
        game = single_player_game()
        assert cg.is_nash(game, (1,))[0]
        assert not cg.is_nash(game, (0,))[0]
        assert not cg.is_nash(game, (2,))[0]


class TestIsStrongNash:
    def test_g1_shared_profile(self, g1):
        assert cg.is_strong_nash(g1, (0, 0)) == (True, None)

    def test_g1_private_profile_blocked_by_grand_coalition(self, g1):
        ok, witness = cg.is_strong_nash(g1, (1, 1))
        assert not ok
        coalition, joint = witness
        assert coalition.members == (0, 1)
        assert joint == (0, 0)  # both move to the shared resource: 0.9 -> 0.5

    def test_g2_defection_blocked(self, g2):
        ok, witness = cg.is_strong_nash(g2, (1, 1))
        assert not ok
        assert witness == (Coalition([0, 1]), (0, 0))  # both improve 1 -> 3


class TestEnumerate:
    def test_g2_has_no_strong_equilibrium(self, g2):
        assert cg.enumerate_equilibria(g2, "strong_nash") == []

    def test_g1_nash_set(self, g1):
        assert cg.enumerate_equilibria(g1, "nash") == [(0, 0), (1, 1)]

    def test_g3_sets(self, g3, g3_profiles):
        nash = cg.enumerate_equilibria(g3, "nash")
        assert g3_profiles["outer_outer"] in nash
        assert g3_profiles["mid_mid"] in nash
        assert cg.enumerate_equilibria(g3, "strong_nash") == [g3_profiles["mid_mid"]]

    def test_strong_subset_of_nash_on_fixtures(self, g1, g2, g3, g4, g5):
        for game in (g1, g2, g3, g4, g5):
            nash = set(cg.enumerate_equilibria(game, "nash"))
            strong = set(cg.enumerate_equilibria(game, "strong_nash"))
            assert strong <= nash

    def test_unknown_kind(self, g1):
        with pytest.raises(ValueError):
            cg.enumerate_equilibria(g1, "correlated")


class TestVectorizedAgainstNaive:
    def test_masks_match_predicates_on_random_fixtures(self):
        # the grouped vectorised scan and the witness-producing loop are
        # independent routes to the same predicates
        for family, gen in fixtures.RANDOM_FAMILIES.items():
            for seed in range(6):
                game = cg.load_game(gen(2 + seed % 3, seed))
                _, nash_mask, strong_mask = equilibrium_masks(game)
                for row, prof in enumerate(enumerate_profiles(game)):
                    assert nash_mask[row] == cg.is_nash(game, prof)[0], (family, seed)
                    assert strong_mask[row] == cg.is_strong_nash(game, prof)[0], (family, seed)


class TestEfficiencyRatios:
    def test_g1(self, g1):
        report = cg.efficiency_ratios(g1)
        assert report.poa == pytest.approx(1.8, abs=1e-9)
        assert report.pos == pytest.approx(1.0, abs=1e-9)
        assert report.spoa == pytest.approx(1.0, abs=1e-9)

    def test_g2_spoa_absent(self, g2):
        report = cg.efficiency_ratios(g2)
        assert report.spoa is None
        assert report.reasons["spoa"] == "no equilibrium of this kind"

    def test_g3(self, g3):
        report = cg.efficiency_ratios(g3)
        assert report.poa == pytest.approx(6.0, abs=1e-9)
        assert report.spoa == pytest.approx(1.0, abs=1e-9)

    def test_g5_unbounded_anarchy(self, g5):
        report = cg.efficiency_ratios(g5)
        assert math.isinf(report.poa)
        assert report.spoa == pytest.approx(1.0, abs=1e-9)

    def test_ratios_at_least_one(self):
        for family, gen in fixtures.RANDOM_FAMILIES.items():
            for seed in range(10):
                report = cg.efficiency_ratios(cg.load_game(gen(2 + seed % 3, seed)))
                for value in (report.poa, report.pos, report.spoa):
                    if value is not None:
                        assert value >= 1.0 - 1e-9

    def test_witnesses_on_request(self, g2):
        report = cg.efficiency_ratios(g2, include_witnesses=True)
        assert report.witnesses[(1, 1)] == (Coalition([0, 1]), (0, 0))
        # every profile outside the strong set carries a witness
        rejected = {p for p, keep in zip(report.profiles, report.strong_mask) if not keep}
        assert set(report.witnesses) == rejected

    def test_json_round_trip(self, g5):
        import json

        doc = cg.efficiency_ratios(g5).to_json_dict()
        parsed = json.loads(json.dumps(doc))
        assert parsed["poa"] == "inf"
        assert parsed["spoa"] == pytest.approx(1.0)
        assert parsed["strong_nash"] == [[1, 1]]


class TestVerifySCCE:
    def test_point_mass_on_strong_nash(self, g1, g3, g3_profiles):
        assert cg.verify_scce(g1, {(0, 0): 1.0}) == (True, None)
        assert cg.verify_scce(g3, {g3_profiles["mid_mid"]: 1.0}) == (True, None)

    def test_g2_point_mass_on_defection(self, g2):
        ok, witness = cg.verify_scce(g2, {(1, 1): 1.0})
        assert not ok
        assert witness == (Coalition([0, 1]), (0, 0))

    def test_g2_uniform_blocked_by_singleton(self, g2):
        # E[u_0] = 2 under uniform play; defecting always yields 2.5
        dist = {s: 0.25 for s in enumerate_profiles(g2)}
        ok, witness = cg.verify_scce(g2, dist)
        assert not ok
        assert witness == (Coalition([0]), (1,))

    def test_point_mass_agrees_with_strong_predicate(self):
        for family, gen in fixtures.RANDOM_FAMILIES.items():
            for seed in range(4):
                game = cg.load_game(gen(2 + seed % 2, seed))
                for prof in enumerate_profiles(game):
                    point = cg.verify_scce(game, {prof: 1.0})[0]
                    strong = cg.is_strong_nash(game, prof)[0]
                    assert point == strong, (family, seed, prof)

    def test_scce_welfare_bound_on_verified_distributions(self, g1, g3, g3_profiles):
        # a verified certificate bounds every accepted distribution's welfare
        cert = cg.fit_coalitional_smoothness(g3)
        dist = {g3_profiles["mid_mid"]: 1.0}
        assert cg.verify_scce(g3, dist)[0]
        expected = sum(p * cg.social_welfare(g3, s) for s, p in dist.items())
        assert expected >= cert.ratio() * cg.optimum(g3)[1] - 1e-9

        cost_cert = cg.fit_coalitional_smoothness(g1)
        dist = {(0, 0): 1.0}
        assert cg.verify_scce(g1, dist)[0]
        expected = sum(p * cg.social_welfare(g1, s) for s, p in dist.items())
        assert expected <= cost_cert.ratio() * cg.optimum(g1)[1] + 1e-9

    def test_malformed_distributions(self, g2):
        with pytest.raises(InvalidDistribution):
            cg.verify_scce(g2, {(0, 0): 0.5})
        with pytest.raises(InvalidDistribution):
            cg.verify_scce(g2, {(0, 0): 1.5, (1, 1): -0.5})
        with pytest.raises(InvalidDistribution):
            cg.verify_scce(g2, {(0, 7): 1.0})
        with pytest.raises(InvalidDistribution):
            cg.verify_scce(g2, {})


class TestStrongNashEfficiencyBound:
    def test_fitted_certificates_bound_strong_welfare(self):
        for family, gen in fixtures.RANDOM_FAMILIES.items():
            for seed in range(8):
                game = cg.load_game(gen(2 + seed % 3, seed))
                report = cg.efficiency_ratios(game)
                if not report.strong_nash:
                    continue
                cert = cg.fit_coalitional_smoothness(game)
                assert cert.verified
                values = [
                    cg.social_welfare(game, s) for s in report.strong_nash
                ]
                if game.direction is Direction.COST_MIN:
                    assert cert.mu < 1.0
                    assert max(values) <= cert.ratio() * report.opt_value + 1e-9
                else:
                    assert min(values) >= cert.ratio() * report.opt_value - 1e-9
