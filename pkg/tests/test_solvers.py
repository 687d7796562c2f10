from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from brouwer_nash.games import BimatrixGame, MixedProfile, is_nash, random_game
from brouwer_nash.solvers import SolverLimit, lemke_howson, lemke_howson_solve, support_enumeration_solve

PENNIES = BimatrixGame([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
SEXES = BimatrixGame([[2, 0], [0, 1]], [[1, 0], [0, 2]])


class TestSupportEnumeration:
    def test_pennies(self):
        assert support_enumeration_solve(PENNIES) == [MixedProfile([F(1, 2)] * 2, [F(1, 2)] * 2)]

    def test_battle_of_sexes(self):
        got = support_enumeration_solve(SEXES)
        assert set((p.x, p.y) for p in got) == {
            ((1, 0), (1, 0)),
            ((0, 1), (0, 1)),
            ((F(2, 3), F(1, 3)), (F(1, 3), F(2, 3))),
        }

    def test_dominance_solvable(self):
        # prisoner's dilemma: defecting is strictly dominant
        g = BimatrixGame([[3, 0], [5, 1]], [[3, 5], [0, 1]])
        assert support_enumeration_solve(g) == [MixedProfile([0, 1], [0, 1])]

    def test_one_by_one(self):
        assert support_enumeration_solve(BimatrixGame([[7]], [[-2]])) == [MixedProfile([1], [1])]

    def test_rectangular(self):
        g = BimatrixGame([[1, 0, 0], [0, 1, 0]], [[0, 1, 0], [1, 0, 0]])
        for p in support_enumeration_solve(g):
            assert is_nash(g, p)

    def test_limit(self):
        g = BimatrixGame([[0] * 11], [[0] * 11])
        with pytest.raises(SolverLimit):
            support_enumeration_solve(g)

    def test_stats_counts_systems(self):
        stats = {}
        support_enumeration_solve(SEXES, stats=stats)
        assert stats["systems"] > 0

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32), st.integers(1, 4), st.integers(1, 4))
    def test_matches_textbook_enumeration(self, seed, m, n):
        g = random_game(m, n, np.random.default_rng(seed), denom=10 ** 9)
        ours = [(p.x, p.y) for p in support_enumeration_solve(g)]
        assert ours == oracles.textbook_support_enumeration(g.A, g.B)
        assert all(is_nash(g, MixedProfile(x, y)) for x, y in ours)

    def test_degenerate_game_gives_component_vertices(self):
        g = BimatrixGame([[1, 1], [1, 1]], [[1, 1], [1, 1]])
        got = support_enumeration_solve(g)
        assert len(got) == 4 and all(is_nash(g, p) for p in got)


class TestLemkeHowson:
    def test_pennies(self):
        for label in range(1, 5):
            assert lemke_howson_solve(PENNIES, label) == MixedProfile([F(1, 2)] * 2, [F(1, 2)] * 2)

    def test_battle_of_sexes_labels(self):
        eqs = support_enumeration_solve(SEXES)
        for label in range(1, 5):
            assert lemke_howson_solve(SEXES, label) in eqs

    def test_bad_label(self):
        with pytest.raises(ValueError):
            lemke_howson(PENNIES, 5)

    def test_pivot_budget(self):
        res = lemke_howson(PENNIES, 1)
        assert res.pivots >= 2
        with pytest.raises(SolverLimit):
            lemke_howson(PENNIES, 1, max_pivots=res.pivots - 1)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32), st.integers(1, 5), st.integers(1, 5), st.data())
    def test_lands_on_an_enumerated_equilibrium(self, seed, m, n, data):
        g = random_game(m, n, np.random.default_rng(seed), lo=-1, denom=10 ** 9)
        label = data.draw(st.integers(1, m + n))
        assert lemke_howson_solve(g, label) in support_enumeration_solve(g)
