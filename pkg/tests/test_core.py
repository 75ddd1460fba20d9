"""Profile arithmetic, enumeration, and the welfare primitives."""

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import coalgame as cg
from coalgame.core import (
    Coalition,
    Direction,
    Game,
    PlayerOrdering,
    all_out_profile,
    enumerate_profiles,
    harmonic,
    index_radix,
    iter_orderings,
    optimum,
    profile_array,
    profile_at,
    profile_count,
    profile_index,
    utilities_matrix,
)
from coalgame.errors import (
    ArityMismatch,
    InvalidArgument,
    InvalidPlayer,
    InvalidProfile,
    StateSpaceTooLarge,
)


def toy_game(counts, fn=None, direction=Direction.UTILITY_MAX):
    fn = fn or (lambda i, s: float((i + 1) * (sum(s) + 1)))
    return Game(
        n_players=len(counts),
        strategy_counts=tuple(counts),
        direction=direction,
        utility_fn=fn,
    )


class TestSocialWelfare:
    def test_g1_shared_shared(self, g1):
        # hand enumeration: the shared resource's cost 1.0 split two ways
        assert cg.social_welfare(g1, (0, 0)) == pytest.approx(1.0, abs=1e-9)

    def test_all_out_profile_is_zero(self, g1, g3, g4, g5):
        for game in (g1, g3, g4, g5):
            assert cg.social_welfare(game, all_out_profile(game)) == 0.0

    def test_g2_cooperate_cooperate(self, g2):
        assert cg.social_welfare(g2, (0, 0)) == pytest.approx(6.0, abs=1e-9)

    def test_matches_sum_of_utilities(self, g1, g2, g3, g4, g5):
        for game in (g1, g2, g3, g4, g5):
            for s in enumerate_profiles(game):
                total = sum(cg.utility(game, i, s) for i in range(game.n_players))
                assert cg.social_welfare(game, s) == total

    def test_invalid_profile(self, g1):
        with pytest.raises(InvalidProfile):
            cg.social_welfare(g1, (0, 5))
        with pytest.raises(InvalidProfile):
            cg.social_welfare(g1, (0,))


class TestUtility:
    def test_g2_defect_against_cooperate(self, g2):
        assert cg.utility(g2, 0, (1, 0)) == pytest.approx(4.0, abs=1e-9)

    def test_out_strategy_pays_zero(self, g1, g3, g4, g5):
        for game in (g1, g3, g4, g5):
            for i in range(game.n_players):
                prof = tuple(
                    game.out_index(i) if j == i else 0 for j in range(game.n_players)
                )
                assert cg.utility(game, i, prof) == 0.0

    def test_g1_sole_user_pays_full_cost(self, g1):
        assert cg.utility(g1, 0, (0, 1)) == pytest.approx(1.0, abs=1e-9)

    def test_invalid_player(self, g1):
        with pytest.raises(InvalidPlayer):
            cg.utility(g1, 2, (0, 0))

    def test_oracle_is_pure(self, g1, g3, g5):
        for game in (g1, g3, g5):
            for s in enumerate_profiles(game):
                first = [cg.utility(game, i, s) for i in range(game.n_players)]
                second = [cg.utility(game, i, s) for i in range(game.n_players)]
                assert first == second  # bit-identical repeat evaluation


class TestApplyDeviation:
    def test_single_substitution(self):
        assert cg.apply_deviation((0, 1, 2), Coalition([1]), (9,)) == (0, 9, 2)

    def test_full_replacement(self):
        assert cg.apply_deviation((0, 1, 2), Coalition([0, 1, 2]), (5, 6, 7)) == (5, 6, 7)

    def test_two_member_substitution(self):
        assert cg.apply_deviation((0, 1, 2), Coalition([0, 2]), (8, 9)) == (8, 1, 9)

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            cg.apply_deviation((0, 1, 2), Coalition([0, 2]), (8,))

    def test_input_unmodified(self):
        s = (0, 1, 2)
        cg.apply_deviation(s, Coalition([1]), (9,))
        assert s == (0, 1, 2)

    @given(st.data())
    def test_idempotent_on_current_strategies(self, data):
        n = data.draw(st.integers(1, 5))
        s = tuple(data.draw(st.integers(0, 3)) for _ in range(n))
        members = data.draw(
            st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True)
        )
        coalition = Coalition(members)
        joint = tuple(s[i] for i in coalition.members)
        assert cg.apply_deviation(s, coalition, joint) == s


class TestSuffixDeviation:
    def test_first_rank_returns_anchor(self):
        pi = PlayerOrdering((1, 2, 3))
        assert cg.suffix_deviation_profile((0, 0, 0), (1, 1, 1), pi, 0) == (1, 1, 1)

    def test_last_rank_switches_only_that_player(self):
        pi = PlayerOrdering((1, 2, 3))
        assert cg.suffix_deviation_profile((0, 0, 0), (1, 1, 1), pi, 2) == (0, 0, 1)

    def test_middle_rank(self):
        pi = PlayerOrdering((1, 2, 3))
        s, s_star = (0, 0, 0), (1, 2, 3)
        assert cg.suffix_deviation_profile(s, s_star, pi, 1) == (0, 2, 3)

    @given(st.data())
    def test_anchor_profile_is_fixed_point(self, data):
        n = data.draw(st.integers(1, 5))
        ranks = data.draw(st.permutations(list(range(1, n + 1))))
        pi = PlayerOrdering(tuple(ranks))
        s_star = tuple(data.draw(st.integers(0, 3)) for _ in range(n))
        for i in range(n):
            assert cg.suffix_deviation_profile(s_star, s_star, pi, i) == s_star

    @given(st.data())
    def test_matches_rank_set_definition(self, data):
        n = data.draw(st.integers(1, 5))
        ranks = tuple(data.draw(st.permutations(list(range(1, n + 1)))))
        pi = PlayerOrdering(ranks)
        s = tuple(data.draw(st.integers(0, 3)) for _ in range(n))
        s_star = tuple(data.draw(st.integers(0, 3)) for _ in range(n))
        i = data.draw(st.integers(0, n - 1))
        got = cg.suffix_deviation_profile(s, s_star, pi, i)
        deviators = {j for j in range(n) if ranks[j] >= ranks[i]}
        assert got == tuple(s_star[j] if j in deviators else s[j] for j in range(n))


class TestEnumeration:
    def test_two_by_two(self):
        game = toy_game([2, 2])
        assert enumerate_profiles(game) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_single_player(self):
        assert enumerate_profiles(toy_game([3])) == [(0,), (1,), (2,)]

    def test_mixed_counts(self):
        profs = enumerate_profiles(toy_game([2, 3, 2]))
        assert len(profs) == 12
        assert profs[0] == (0, 0, 0)
        assert profs[-1] == (1, 2, 1)

    def test_excludes_virtual_out_indices(self, g1):
        for prof in enumerate_profiles(g1):
            assert all(prof[i] < g1.strategy_counts[i] for i in range(g1.n_players))

    def test_counts_and_distinctness(self):
        game = toy_game([2, 3, 4])
        profs = enumerate_profiles(game)
        assert len(profs) == profile_count(game) == 24
        assert len(set(profs)) == 24

    def test_cap_exceeded(self):
        game = toy_game([10, 10, 10])
        with pytest.raises(StateSpaceTooLarge) as err:
            enumerate_profiles(game, cap=999)
        assert err.value.size == 1000

    @given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
    def test_index_round_trip(self, counts):
        game = toy_game(counts)
        for idx, prof in enumerate(enumerate_profiles(game)):
            assert profile_index(game, prof) == idx
            assert profile_at(game, idx) == prof

    def test_profile_array_matches(self):
        game = toy_game([2, 3])
        arr = profile_array(game)
        assert [tuple(int(x) for x in row) for row in arr] == enumerate_profiles(game)
        radix = index_radix(game)
        assert list(arr @ radix) == list(range(6))


class TestOptimum:
    def test_g1(self, g1):
        assert optimum(g1) == ((0, 0), pytest.approx(1.0, abs=1e-9))

    def test_g2(self, g2):
        assert optimum(g2) == ((0, 0), pytest.approx(6.0, abs=1e-9))

    def test_g3_middle_edge(self, g3, g3_profiles):
        prof, value = optimum(g3)
        assert prof == g3_profiles["mid_mid"]
        assert value == pytest.approx(12.0, abs=1e-9)

    def test_bounds_all_profiles(self, g1, g2, g3, g4, g5):
        for game in (g1, g2, g3, g4, g5):
            _, best = optimum(game)
            for s in enumerate_profiles(game):
                welfare = cg.social_welfare(game, s)
                if game.direction is Direction.COST_MIN:
                    assert best <= welfare + 1e-9
                else:
                    assert best >= welfare - 1e-9

    def test_tie_breaks_lexicographically_first(self):
        game = toy_game([2, 2], fn=lambda i, s: 1.0)
        assert optimum(game)[0] == (0, 0)


class TestHarmonic:
    def test_values(self):
        assert harmonic(1) == 1.0
        assert harmonic(2) == 1.5
        assert harmonic(4) == pytest.approx(25.0 / 12.0, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidArgument):
            harmonic(0)


class TestOrderings:
    def test_identity(self):
        pi = PlayerOrdering.identity(3)
        assert pi.ranks == (1, 2, 3)
        assert pi.order == (0, 1, 2)

    def test_order_inverts_ranks(self):
        pi = PlayerOrdering((2, 3, 1))
        assert pi.order == (2, 0, 1)

    def test_iteration_covers_all_permutations(self):
        seen = {pi.ranks for pi in iter_orderings(3)}
        assert seen == set(itertools.permutations((1, 2, 3)))

    def test_invalid_ranks(self):
        with pytest.raises(InvalidArgument):
            PlayerOrdering((1, 1, 2))


class TestCoalition:
    def test_canonical_order(self):
        assert Coalition([2, 0]).members == (0, 2)

    def test_rejects_empty_and_duplicates(self):
        with pytest.raises(InvalidArgument):
            Coalition([])
        with pytest.raises(InvalidArgument):
            Coalition([1, 1])

    def test_range_validation(self, g1):
        with pytest.raises(InvalidPlayer):
            Coalition([0, 5]).validate_for(g1)


class TestUtilitiesMatrix:
    def test_matches_oracle(self, g4):
        table = utilities_matrix(g4)
        for row, prof in enumerate(enumerate_profiles(g4)):
            for i in range(g4.n_players):
                assert table[row, i] == cg.utility(g4, i, prof)

    def test_nonnegative_and_finite(self, g1, g2, g3, g4, g5):
        for game in (g1, g2, g3, g4, g5):
            table = utilities_matrix(game)
            assert (table >= 0).all()
            assert math.isfinite(table.sum())
