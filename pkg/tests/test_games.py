from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brouwer_nash.games import (
    BimatrixGame,
    MixedProfile,
    ProfileError,
    approx_to_wsne,
    col_payoffs,
    dumps_game,
    dumps_profile,
    is_nash,
    loads_game,
    loads_profile,
    normalize_positive,
    random_game,
    row_payoffs,
    transform_payoffs,
    verify_approx_ne,
    verify_wsne,
)

PENNIES = BimatrixGame([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
# battle of the sexes with entries already in [0, 1]
SEXES = BimatrixGame([[1, 0], [0, F(1, 2)]], [[F(1, 2), 0], [0, 1]])
HALF = MixedProfile([F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)])


class TestBasics:
    def test_payoffs(self):
        assert row_payoffs(PENNIES, (1, 0)) == [1, -1]
        assert col_payoffs(PENNIES, (F(1, 2), F(1, 2))) == [0, 0]

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            BimatrixGame([[1, 2]], [[1], [2]])

    def test_profile_checks(self):
        with pytest.raises(ProfileError):
            MixedProfile([F(9, 10), 0], [1, 0]).check()
        with pytest.raises(ProfileError):
            MixedProfile([F(3, 2), F(-1, 2)], [1, 0]).check()
        with pytest.raises(ProfileError):
            MixedProfile([1], [1, 0]).check(PENNIES)

    def test_transpose(self):
        t = SEXES.transpose()
        assert t.A == ((F(1, 2), 0), (0, 1)) and t.B == ((1, 0), (0, F(1, 2)))


class TestVerification:
    def test_pennies_equilibrium(self):
        assert is_nash(PENNIES, HALF)
        assert verify_approx_ne(PENNIES, HALF, 0)

    def test_pure_profile_witness(self):
        prof = MixedProfile([1, 0], [1, 0])
        w = verify_wsne(PENNIES, prof, 1)
        assert not w and (w.player, w.better, w.worse, w.margin) == (2, 1, 0, 2)
        assert verify_wsne(PENNIES, prof, 2)

    def test_approx_examples(self):
        prof = MixedProfile([1, 0], [1, 0])
        w = verify_approx_ne(PENNIES, prof, F(1, 2))
        assert not w and w.player == 2 and w.margin == 2
        assert verify_approx_ne(PENNIES, prof, 2)
        assert verify_approx_ne(SEXES, MixedProfile([1, 0], [1, 0]), 0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32), st.integers(1, 4), st.integers(1, 4))
    def test_wsne_implies_approx(self, seed, m, n):
        rng = np.random.default_rng(seed)
        g = random_game(m, n, rng, denom=8)
        wx = [int(v) + 1 for v in rng.integers(0, 4, m) * rng.integers(0, 2, m)]
        wy = [int(v) + 1 for v in rng.integers(0, 4, n) * rng.integers(0, 2, n)]
        prof = MixedProfile([F(v, sum(wx)) for v in wx], [F(v, sum(wy)) for v in wy])
        for eps in (F(1, 8), F(1, 2), F(1)):
            if verify_wsne(g, prof, eps):
                assert verify_approx_ne(g, prof, eps)


class TestApproxToWellSupported:
    def test_exact_equilibrium_unchanged(self):
        prof = MixedProfile([F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)])
        assert is_nash(SEXES, prof)
        assert approx_to_wsne(SEXES, prof, F(1, 4)) == prof

    def test_prunes_dominated_mass(self):
        eps = F(1, 4)
        delta = eps * eps / 32
        prof = MixedProfile([1 - delta, delta], [1, 0])
        assert verify_approx_ne(SEXES, prof, eps * eps / 16)
        out = approx_to_wsne(SEXES, prof, eps)
        assert out == MixedProfile([1, 0], [1, 0])
        assert verify_wsne(SEXES, out, eps)

    def test_precondition(self):
        with pytest.raises(ProfileError):
            approx_to_wsne(SEXES, MixedProfile([0, 1], [1, 0]), F(1, 4))
        with pytest.raises(ProfileError):
            approx_to_wsne(SEXES, MixedProfile([F(9, 10), 0], [1, 0]), F(1, 4))

    def test_requires_unit_payoffs(self):
        with pytest.raises(ValueError):
            approx_to_wsne(PENNIES, HALF, F(1, 4))


class TestPayoffMaps:
    def test_normalize(self):
        g = normalize_positive(BimatrixGame([[0, 8]], [[-8, 4]]), 8)
        assert g.A == ((F(1, 2), 1),) and g.B == ((0, F(3, 4)),)
        with pytest.raises(ValueError):
            normalize_positive(BimatrixGame([[9]], [[0]]), 8)

    def test_normalize_keeps_equilibria(self):
        assert is_nash(normalize_positive(PENNIES), HALF)

    def test_transform(self):
        assert transform_payoffs(PENNIES, 1, 0) == PENNIES
        g = transform_payoffs(PENNIES, 3, 1)
        assert g.A[0] == (4, -2)
        with pytest.raises(ValueError):
            transform_payoffs(PENNIES, 0, 1)


class TestText:
    def test_game_round_trip(self):
        text = dumps_game(SEXES)
        assert text.splitlines()[0] == "bimatrix 2 2"
        assert loads_game(text) == SEXES and dumps_game(loads_game(text)) == text

    def test_game_file_errors(self):
        with pytest.raises(ValueError):
            loads_game("bimatrix 2 2\n1 2 3\n")
        with pytest.raises(ValueError):
            loads_game("matrix 1 1\n0 0\n")

    def test_profile_round_trip(self):
        prof = MixedProfile([F(2, 3), F(1, 3)], [0, 1])
        assert dumps_profile(prof) == "2/3 1/3\n0 1\n"
        assert loads_profile(dumps_profile(prof)) == prof
