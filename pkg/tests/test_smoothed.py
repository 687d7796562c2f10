import statistics
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brouwer_nash.games import BimatrixGame, MixedProfile, is_nash, random_game
from brouwer_nash.smoothed import (
    Perturbation,
    PerturbationModel,
    bilinear,
    perturb,
    perturbation_bound_check,
    perturbed_game,
    smoothed_bench,
    smoothed_for_approximation,
)

ZERO = BimatrixGame([[0] * 4] * 4, [[0] * 4] * 4)
PENNIES = BimatrixGame([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])


def entries(p: Perturbation):
    return [v for M in (p.S, p.T) for row in M for v in row]


class TestPerturbation:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 63))
    def test_uniform_stays_in_range(self, seed):
        p = perturb(ZERO, PerturbationModel("uniform", F(1, 10)), seed)
        assert all(abs(v) <= F(1, 10) for v in entries(p))
        assert all((v * 10 * 2 ** 64).denominator == 1 for v in entries(p))

    def test_gaussian_variance(self):
        big = BimatrixGame([[0] * 250] * 200, [[0] * 250] * 200)
        p = perturb(big, PerturbationModel("gaussian", 1), 7)
        vals = [float(v) for v in entries(p)]
        assert len(vals) == 10 ** 5
        assert abs(statistics.pvariance(vals) - 1) < 0.05

    def test_gaussian_rejection(self):
        p = perturb(ZERO, PerturbationModel("gaussian", F(1, 6), F(1, 6)), 3)
        assert all(abs(v) <= F(1, 6) for v in entries(p))
        # about a third of unit-sigma draws fall outside one sigma
        assert p.rejections > 0

    def test_reproducible(self):
        pm = PerturbationModel("uniform", F(1, 4))
        assert entries(perturb(PENNIES, pm, 11)) == entries(perturb(PENNIES, pm, 11))
        assert entries(perturb(PENNIES, pm, 11)) != entries(perturb(PENNIES, pm, 12))

    def test_tiny_sigma(self):
        p = perturb(PENNIES, PerturbationModel("uniform", F(1, 2 ** 40)), 1)
        pg = perturbed_game(PENNIES, p)
        assert max(abs(a - b) for r1, r2 in zip(pg.A, PENNIES.A) for a, b in zip(r1, r2)) <= F(1, 2 ** 40)

    def test_model_checks(self):
        with pytest.raises(ValueError):
            PerturbationModel("laplace", 1)
        with pytest.raises(ValueError):
            PerturbationModel("uniform", -1)
        with pytest.raises(ValueError):
            perturb(BimatrixGame([[2]], [[0]]), PerturbationModel("uniform", 1), 0)


class TestBoundCheck:
    def test_constant_perturbation(self):
        S = [[F(1, 4)] * 2] * 2
        p = Perturbation(S, S)
        prof = MixedProfile([F(1, 2)] * 2, [1, 0])
        assert bilinear(prof.x, S, prof.y) == F(1, 4)
        assert perturbation_bound_check(prof, p, F(1, 2))
        assert not perturbation_bound_check(prof, p, F(1, 4))


class TestApproximation:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32), st.sampled_from(["lh", "support"]), st.sampled_from(["uniform", "gaussian"]))
    def test_result_is_approximate_equilibrium(self, seed, solver, model):
        g = random_game(3, 3, np.random.default_rng(seed), lo=-1, denom=16)
        res = smoothed_for_approximation(g, F(1, 8), solver=solver, seed=seed, model=model)
        assert res.bound_ok and res.approx_ok
        assert is_nash(perturbed_game(g, res.perturbation), res.profile)

    def test_large_eps(self):
        res = smoothed_for_approximation(PENNIES, 2, seed=5)
        assert res.approx_ok and res.bound_ok

    def test_eps_positive(self):
        with pytest.raises(ValueError):
            smoothed_for_approximation(PENNIES, 0)


class TestBench:
    def test_zero_trials(self):
        rep = smoothed_bench([PENNIES], F(1, 8), 0)
        assert rep.records == [] and rep.per_instance() == {} and rep.all_verified

    def test_records(self):
        rep = smoothed_bench([PENNIES, ZERO], F(1, 8), 3, seed=4)
        assert [r.instance for r in rep.records] == [0, 0, 0, 1, 1, 1]
        assert rep.all_verified
        assert rep.per_instance()[0]["trials"] == 3
        assert rep.lines()[0].endswith(" ok")

    def test_unknown_solver(self):
        with pytest.raises(ValueError):
            smoothed_bench([PENNIES], F(1, 8), 1, solver="simplex")

    def test_parallel_matches_serial(self):
        games = [random_game(3, 3, np.random.default_rng(s), lo=-1, denom=16) for s in range(3)]
        serial = smoothed_bench(games, F(1, 16), 4, seed=9, jobs=1)
        parallel = smoothed_bench(games, F(1, 16), 4, seed=9, jobs=2)
        assert serial.records == parallel.records
