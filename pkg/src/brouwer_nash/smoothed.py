"""Perturbed-game experiments: exact solving of randomly perturbed games
and the approximation guarantee they give for the unperturbed game."""
from __future__ import annotations

import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .games import BimatrixGame, MixedProfile, is_nash, to_fraction, verify_approx_ne
from .solvers import lemke_howson, support_enumeration_solve

FRAC_BITS = 64


@dataclass(frozen=True)
class PerturbationModel:
    """'uniform' draws from [-sigma, sigma]; 'gaussian' has standard deviation
    sigma, optionally rejected outside [-bound, bound]."""

    kind: str
    sigma: Fraction
    bound: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown perturbation model {self.kind!r}")
        object.__setattr__(self, "sigma", to_fraction(self.sigma))
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.bound is not None:
            object.__setattr__(self, "bound", to_fraction(self.bound))


@dataclass
class Perturbation:
    S: list[list[Fraction]]
    T: list[list[Fraction]]
    rejections: int = 0


def _draw(model: PerturbationModel, rng: random.Random) -> tuple[Fraction, int]:
    scale = 1 << FRAC_BITS
    if model.kind == "uniform":
        # dyadic point in [-1, 1] on a 2^-64 grid, endpoints included
        k = rng.randrange(2 * scale + 1) - scale
        return model.sigma * Fraction(k, scale), 0
    rejected = 0
    while True:
        s = Fraction(round(rng.gauss(0.0, 1.0) * scale), scale) * model.sigma
        if model.bound is None or abs(s) <= model.bound:
            return s, rejected
        rejected += 1


def perturb(game: BimatrixGame, model: PerturbationModel, seed: int) -> Perturbation:
    lo, hi = game.entry_range()
    if lo < -1 or hi > 1:
        raise ValueError("base game entries must lie in [-1, 1]")
    rng = random.Random(seed)
    m, n = game.shape
    rej = 0

    def mat() -> list[list[Fraction]]:
        nonlocal rej
        out = []
        for _ in range(m):
            row = []
            for _ in range(n):
                s, r = _draw(model, rng)
                rej += r
                row.append(s)
            out.append(row)
        return out

    S = mat()
    T = mat()
    return Perturbation(S, T, rej)


def perturbed_game(game: BimatrixGame, p: Perturbation) -> BimatrixGame:
    add = lambda M, D: [[a + s for a, s in zip(r1, r2)] for r1, r2 in zip(M, D)]
    return BimatrixGame(add(game.A, p.S), add(game.B, p.T))


def bilinear(x: Sequence[Fraction], M: Sequence[Sequence[Fraction]], y: Sequence[Fraction]) -> Fraction:
    return sum((xi * sum((a * yj for a, yj in zip(row, y) if yj), Fraction(0)) for xi, row in zip(x, M) if xi), Fraction(0))


def perturbation_bound_check(prof: MixedProfile, p: Perturbation, eps) -> bool:
    """|x^T S y| <= eps/2 and |x^T T y| <= eps/2."""
    half = to_fraction(eps) / 2
    return abs(bilinear(prof.x, p.S, prof.y)) <= half and abs(bilinear(prof.x, p.T, prof.y)) <= half


# solvers with a cost measure ----------------------------------------------------------

def solve_lh(game: BimatrixGame) -> tuple[MixedProfile, int]:
    res = lemke_howson(game, 1)
    return res.profile, res.pivots


def solve_support(game: BimatrixGame) -> tuple[MixedProfile, int]:
    stats: dict[str, int] = {}
    eqs = support_enumeration_solve(game, stats=stats)
    if not eqs:
        raise RuntimeError("support enumeration found no equilibrium")
    return eqs[0], stats["systems"]


SOLVERS: dict[str, Callable[[BimatrixGame], tuple[MixedProfile, int]]] = {
    "lh": solve_lh,
    "support": solve_support,
}


@dataclass
class SmoothedResult:
    profile: MixedProfile
    perturbation: Perturbation
    cost: int
    approx_ok: bool
    bound_ok: bool


def smoothed_for_approximation(
    game: BimatrixGame,
    eps,
    solver: str = "lh",
    seed: int = 0,
    model: str = "uniform",
) -> SmoothedResult:
    """Solve a perturbation of size eps/2 exactly; the result is an
    eps-approximate equilibrium of the original game.

    The Gaussian model uses sigma = eps/6 and rejects draws beyond eps/2.
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    half = eps / 2
    pm = PerturbationModel("uniform", half) if model == "uniform" else PerturbationModel("gaussian", eps / 6, half)
    p = perturb(game, pm, seed)
    prof, cost = SOLVERS[solver](perturbed_game(game, p))
    return SmoothedResult(
        prof, p, cost,
        verify_approx_ne(game, prof, eps).ok,
        perturbation_bound_check(prof, p, eps),
    )


@dataclass
class BenchRecord:
    instance: int
    seed: int
    cost: int
    verified: bool


@dataclass
class BenchReport:
    records: list[BenchRecord] = field(default_factory=list)

    def per_instance(self) -> dict[int, dict[str, float]]:
        out: dict[int, dict[str, float]] = {}
        for inst in sorted({r.instance for r in self.records}):
            costs = [r.cost for r in self.records if r.instance == inst]
            out[inst] = {"mean": statistics.fmean(costs), "max": max(costs), "trials": len(costs)}
        return out

    @property
    def all_verified(self) -> bool:
        return all(r.verified for r in self.records)

    def lines(self) -> list[str]:
        return [f"{r.instance} {r.seed} {r.cost} {'ok' if r.verified else 'FAIL'}" for r in self.records]


def _bench_one(args) -> BenchRecord:
    idx, g, pm, s, solver = args
    pg = perturbed_game(g, perturb(g, pm, s))
    prof, cost = SOLVERS[solver](pg)
    return BenchRecord(idx, s, cost, is_nash(pg, prof))


def smoothed_bench(
    instances: Sequence[BimatrixGame],
    sigma,
    trials: int,
    solver: str = "lh",
    seed: int = 0,
    model: str = "uniform",
    jobs: int = 1,
) -> BenchReport:
    """Cost of exact solving under random perturbation, per base instance.

    Trial seeds are drawn up front from the master seed, so records are
    reproducible and independent of the number of worker processes.
    """
    pm = PerturbationModel(model, sigma)
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}")
    master = random.Random(seed)
    tasks = [(idx, g, pm, master.randrange(1 << 63), solver) for idx, g in enumerate(instances) for _ in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            records = list(ex.map(_bench_one, tasks, chunksize=8))
    else:
        records = [_bench_one(t) for t in tasks]
    return BenchReport(records)
