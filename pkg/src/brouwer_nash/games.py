"""Exact bimatrix games, mixed profiles and equilibrium checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


class ProfileError(ValueError):
    pass


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v).limit_denominator(1 << 62) if v != int(v) else Fraction(int(v))
    return Fraction(v)


def format_rational(v: Fraction) -> str:
    return str(Fraction(v))


def _matrix(rows) -> Matrix:
    return tuple(tuple(to_fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class BimatrixGame:
    """Row player payoffs A, column player payoffs B, both m x n."""

    A: Matrix
    B: Matrix

    def __post_init__(self) -> None:
        A, B = _matrix(self.A), _matrix(self.B)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if not A or not A[0]:
            raise ValueError("empty game")
        n = len(A[0])
        if any(len(row) != n for row in A) or len(B) != len(A) or any(len(row) != n for row in B):
            raise ValueError("payoff matrices must both be m x n")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.A), len(self.A[0])

    def entry_range(self) -> tuple[Fraction, Fraction]:
        vals = [x for M in (self.A, self.B) for row in M for x in row]
        return min(vals), max(vals)

    def transpose(self) -> "BimatrixGame":
        """Swap the players' roles."""
        return BimatrixGame(tuple(zip(*self.B)), tuple(zip(*self.A)))


@dataclass(frozen=True)
class MixedProfile:
    x: Vector
    y: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(to_fraction(v) for v in self.x))
        object.__setattr__(self, "y", tuple(to_fraction(v) for v in self.y))

    def check(self, game: BimatrixGame | None = None) -> None:
        for name, vec in (("x", self.x), ("y", self.y)):
            if any(v < 0 for v in vec):
                raise ProfileError(f"{name} has a negative entry")
            if sum(vec) != 1:
                raise ProfileError(f"{name} sums to {sum(vec)}, not 1")
        if game is not None and (len(self.x), len(self.y)) != game.shape:
            raise ProfileError(f"profile shape {(len(self.x), len(self.y))} != game shape {game.shape}")


def row_payoffs(game: BimatrixGame, y: Sequence[Fraction]) -> list[Fraction]:
    """<a_i | y> for every row i."""
    return [sum((a * v for a, v in zip(row, y) if v), Fraction(0)) for row in game.A]


def col_payoffs(game: BimatrixGame, x: Sequence[Fraction]) -> list[Fraction]:
    """<b_j | x> for every column j, b_j the j-th column of B."""
    m, n = game.shape
    out = [Fraction(0)] * n
    for i, xi in enumerate(x):
        if xi:
            row = game.B[i]
            for j in range(n):
                out[j] += row[j] * xi
    return out


def payoff_vectors(game: BimatrixGame, prof: MixedProfile) -> tuple[list[Fraction], list[Fraction]]:
    return row_payoffs(game, prof.y), col_payoffs(game, prof.x)


@dataclass(frozen=True)
class Witness:
    """Verdict of an equilibrium check; on failure names the worst violation.

    player is 1 (rows) or 2 (columns); better and worse are 0-based
    strategy indices; margin is the payoff gap that breaks the condition.
    """

    ok: bool
    player: int | None = None
    better: int | None = None
    worse: int | None = None
    margin: Fraction | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_wsne(game: BimatrixGame, prof: MixedProfile, eps) -> Witness:
    """Every played strategy is within eps of a best response."""
    eps = to_fraction(eps)
    prof.check(game)
    worst = Witness(True)
    for player, pay, mix in ((1, row_payoffs(game, prof.y), prof.x), (2, col_payoffs(game, prof.x), prof.y)):
        best = max(range(len(pay)), key=lambda i: pay[i])
        for j, w in enumerate(mix):
            gap = pay[best] - pay[j]
            if w > 0 and gap > eps and (worst.ok or gap > worst.margin):
                worst = Witness(False, player, best, j, gap)
    return worst


def verify_approx_ne(game: BimatrixGame, prof: MixedProfile, eps) -> Witness:
    """No pure deviation gains more than eps."""
    eps = to_fraction(eps)
    prof.check(game)
    worst = Witness(True)
    for player, pay, mix in ((1, row_payoffs(game, prof.y), prof.x), (2, col_payoffs(game, prof.x), prof.y)):
        value = sum((p * w for p, w in zip(pay, mix)), Fraction(0))
        best = max(range(len(pay)), key=lambda i: pay[i])
        gain = pay[best] - value
        if gain > eps and (worst.ok or gain > worst.margin):
            worst = Witness(False, player, best, None, gain)
    return worst


def is_nash(game: BimatrixGame, prof: MixedProfile) -> bool:
    return verify_wsne(game, prof, 0).ok


def approx_to_wsne(game: BimatrixGame, prof: MixedProfile, eps, check_precondition: bool = True) -> MixedProfile:
    """Turn an (eps^2/8n)-approximate equilibrium into an eps-well-supported one.

    Strategies beaten by at least eps/2 are dropped and the remaining mass
    is rescaled.  Payoffs must lie in [0, 1].
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo, hi = game.entry_range()
    if lo < 0 or hi > 1:
        raise ValueError("payoff entries must lie in [0, 1]")
    prof.check(game)
    n = max(game.shape)
    if check_precondition:
        w = verify_approx_ne(game, prof, eps * eps / (8 * n))
        if not w.ok:
            raise ProfileError(f"input is not an eps^2/(8n)-approximate equilibrium (gain {w.margin})")
    half = eps / 2

    def prune(pay: list[Fraction], mix: Vector) -> Vector:
        top = max(pay)
        kept = [w if top - p < half else Fraction(0) for p, w in zip(pay, mix)]
        total = sum(kept)
        if total == 0:
            raise ProfileError("every played strategy was removed")
        return tuple(w / total for w in kept)

    rp, cp = payoff_vectors(game, prof)
    return MixedProfile(prune(rp, prof.x), prune(cp, prof.y))


def normalize_positive(game: BimatrixGame, bound=1) -> BimatrixGame:
    """Map entries from [-bound, bound] to [0, 1] by a -> (a + bound) / (2 bound)."""
    bound = to_fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    lo, hi = game.entry_range()
    if lo < -bound or hi > bound:
        raise ValueError(f"entries outside [-{bound}, {bound}]")
    f = lambda M: tuple(tuple((a + bound) / (2 * bound) for a in row) for row in M)
    return BimatrixGame(f(game.A), f(game.B))


def transform_payoffs(game: BimatrixGame, scale, shift) -> BimatrixGame:
    """Apply a -> scale * a + shift to every entry; scale must be positive."""
    scale, shift = to_fraction(scale), to_fraction(shift)
    if scale <= 0:
        raise ValueError("scale must be positive")
    f = lambda M: tuple(tuple(scale * a + shift for a in row) for row in M)
    return BimatrixGame(f(game.A), f(game.B))


# text formats ----------------------------------------------------------------

def dumps_game(game: BimatrixGame) -> str:
    m, n = game.shape
    lines = [f"bimatrix {m} {n}"]
    for M in (game.A, game.B):
        lines.extend(" ".join(format_rational(v) for v in row) for row in M)
    return "\n".join(lines) + "\n"


def loads_game(text: str) -> BimatrixGame:
    tok = text.split()
    if len(tok) < 3 or tok[0] != "bimatrix":
        raise ValueError("game file must start with 'bimatrix m n'")
    m, n = int(tok[1]), int(tok[2])
    vals = [Fraction(t) for t in tok[3:]]
    if len(vals) != 2 * m * n:
        raise ValueError(f"expected {2 * m * n} payoffs, found {len(vals)}")
    A = [vals[i * n:(i + 1) * n] for i in range(m)]
    B = [vals[m * n + i * n:m * n + (i + 1) * n] for i in range(m)]
    return BimatrixGame(A, B)


def dumps_profile(prof: MixedProfile) -> str:
    return " ".join(map(format_rational, prof.x)) + "\n" + " ".join(map(format_rational, prof.y)) + "\n"


def loads_profile(text: str) -> MixedProfile:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if len(rows) != 2:
        raise ValueError("profile file needs exactly two lines")
    return MixedProfile([Fraction(t) for t in rows[0]], [Fraction(t) for t in rows[1]])


def random_game(m: int, n: int, rng, lo: int = 0, hi: int = 1, denom: int = 1000) -> BimatrixGame:
    """Entries uniform on the grid {lo + k/denom} within [lo, hi]."""
    span = (hi - lo) * denom

    def mat() -> list[list[Fraction]]:
        return [[Fraction(lo) + Fraction(int(rng.integers(0, span + 1)), denom) for _ in range(n)] for _ in range(m)]

    return BimatrixGame(mat(), mat())


def profiles_equal(p: MixedProfile, q: MixedProfile) -> bool:
    return p.x == q.x and p.y == q.y


def unique_profiles(profs: Iterable[MixedProfile]) -> list[MixedProfile]:
    seen, out = set(), []
    for p in profs:
        key = (p.x, p.y)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out
