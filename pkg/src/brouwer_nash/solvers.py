"""Exact equilibrium solvers: support enumeration and Lemke-Howson."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

from .games import BimatrixGame, MixedProfile

SUPPORT_ENUM_LIMIT = 10


class SolverLimit(RuntimeError):
    pass


@dataclass(frozen=True)
class _Vertex:
    mix: tuple[Fraction, ...]
    support: int  # bitmask of positive entries
    best: int  # bitmask of opponent's best responses against mix


def _integer_matrix(P: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Positive rescaling to integers; solutions of the indifference systems are unchanged."""
    lcm = 1
    for row in P:
        for v in row:
            lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    return [[int(v * lcm) for v in row] for row in P]


def _solve_int(a: list[list[int]]) -> int:
    """Fraction-free Gauss-Jordan on an augmented integer system, in place.

    Returns the determinant; afterwards row i reads det * x_i in the last
    column and det on the diagonal.  Zero means singular.
    """
    n = len(a)
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    break
            else:
                return 0
        pk = a[k]
        p = pk[k]
        for i in range(n):
            if i == k:
                continue
            ai = a[i]
            f = ai[k]
            a[i] = [(p * x - f * y) // prev for x, y in zip(ai, pk)]
        prev = p
    return prev


def _vertices(P: Sequence[Sequence[Fraction]], stats: dict[str, int] | None = None) -> list[_Vertex]:
    """Basic solutions: support I, tight set J with |I| = |J|.

    P is the opponent's payoff matrix indexed [own strategy][opponent strategy].
    """
    m, n = len(P), len(P[0])
    Pi = _integer_matrix(P)
    cols = list(zip(*Pi))
    found: dict[tuple[Fraction, ...], _Vertex] = {}
    for k in range(1, min(m, n) + 1):
        for I in combinations(range(m), k):
            for J in combinations(range(n), k):
                a = [[Pi[i][j] for i in I] + [-1, 0] for j in J]
                a.append([1] * k + [0, 1])
                det = _solve_int(a)
                if det == 0:
                    continue
                if stats is not None:
                    stats["systems"] = stats.get("systems", 0) + 1
                sign = 1 if det > 0 else -1
                nums = [a[r][-1] * sign for r in range(k + 1)]
                if any(v < 0 for v in nums[:k]):
                    continue
                top = nums[k]
                num_mix = [0] * m
                for i, v in zip(I, nums):
                    num_mix[i] = v
                pay = [sum(c[i] * num_mix[i] for i in I) for c in cols]
                if max(pay) != top:
                    continue
                D = abs(det)
                key = tuple(Fraction(v, D) for v in num_mix)
                if key in found:
                    continue
                supp = sum(1 << i for i, v in enumerate(num_mix) if v > 0)
                best = sum(1 << j for j, v in enumerate(pay) if v == top)
                found[key] = _Vertex(key, supp, best)
    return list(found.values())


def support_enumeration_solve(
    game: BimatrixGame, limit: int = SUPPORT_ENUM_LIMIT, stats: dict[str, int] | None = None
) -> list[MixedProfile]:
    """All extreme Nash equilibria, exactly.

    For every support/tight-set pair the indifference system is solved; a
    nondegenerate game yields its full equilibrium list this way, a
    degenerate one yields the vertices of its equilibrium components.
    stats, if given, receives the number of nonsingular systems solved.
    """
    m, n = game.shape
    if max(m, n) > limit:
        raise SolverLimit(f"support enumeration is capped at {limit} strategies per player")
    Bt = [list(row) for row in game.B]  # [row strategy][column strategy]
    At = [list(col) for col in zip(*game.A)]  # [column strategy][row strategy]
    xs = _vertices(Bt, stats)
    ys = _vertices(At, stats)
    out = []
    for vx in xs:
        for vy in ys:
            if vx.support & ~vy.best == 0 and vy.support & ~vx.best == 0:
                out.append(MixedProfile(vx.mix, vy.mix))
    out.sort(key=lambda p: (p.x, p.y))
    return out


# Lemke-Howson ------------------------------------------------------------------

@dataclass(frozen=True)
class LHResult:
    profile: MixedProfile
    pivots: int


class _Tableau:
    """Rows: basic variables.  Columns: all variables, then the right-hand side.

    Variables 0..m-1 are x (or the slacks r), m..m+n-1 are s (or y); the
    variable index doubles as its label.
    """

    def __init__(self, coef: list[list[Fraction]], basis: list[int], slack_cols: list[int]):
        self.T = coef
        self.basis = basis
        self.slack_cols = slack_cols

    def ratio_row(self, col: int) -> int:
        """Lexicographic minimum ratio test."""
        best, best_key = None, None
        for i, row in enumerate(self.T):
            piv = row[col]
            if piv <= 0:
                continue
            key = [row[-1] / piv] + [row[c] / piv for c in self.slack_cols]
            if best is None or key < best_key:
                best, best_key = i, key
        if best is None:
            raise RuntimeError("unbounded pivot column")
        return best

    def pivot(self, row: int, col: int) -> int:
        T = self.T
        pr = T[row]
        inv = 1 / pr[col]
        pr[:] = [v * inv for v in pr]
        for i, r in enumerate(T):
            if i != row and r[col]:
                f = r[col]
                r[:] = [a - f * b for a, b in zip(r, pr)]
        leaving = self.basis[row]
        self.basis[row] = col
        return leaving

    def values(self, nvars: int) -> list[Fraction]:
        out = [Fraction(0)] * nvars
        for i, var in enumerate(self.basis):
            out[var] = self.T[i][-1]
        return out


def lemke_howson(game: BimatrixGame, initial_label: int = 1, max_pivots: int | None = None) -> LHResult:
    """Complementary pivoting from the artificial equilibrium, dropping a
    1-based label (1..m for rows, m+1..m+n for columns)."""
    m, n = game.shape
    if not 1 <= initial_label <= m + n:
        raise ValueError(f"label must lie in 1..{m + n}")
    lo = min(game.entry_range()[0], Fraction(0))
    shift = 1 - lo
    A = [[a + shift for a in row] for row in game.A]
    B = [[b + shift for b in row] for row in game.B]
    one, zero = Fraction(1), Fraction(0)
    # P: B^T x + s = 1, variables x (labels 0..m-1) and s (labels m..m+n-1)
    tp = [[B[i][j] for i in range(m)] + [one if k == j else zero for k in range(n)] + [one] for j in range(n)]
    P = _Tableau(tp, [m + j for j in range(n)], list(range(m, m + n)))
    # Q: r + A y = 1, variables r (labels 0..m-1) and y (labels m..m+n-1)
    tq = [[one if k == i else zero for k in range(m)] + [A[i][j] for j in range(n)] + [one] for i in range(m)]
    Q = _Tableau(tq, list(range(m)), list(range(m)))
    k0 = initial_label - 1
    # entering x_k or y_k raises it off zero; find the tableau owning that variable
    tab = P if k0 < m else Q
    entering = k0
    pivots = 0
    limit = max_pivots if max_pivots is not None else 10 * (m + n) ** 3 + 1000
    while True:
        row = tab.ratio_row(entering)
        leaving = tab.pivot(row, entering)
        pivots += 1
        if leaving == k0:
            break
        if pivots >= limit:
            raise SolverLimit(f"no equilibrium within {limit} pivots")
        # the complement of the leaving label enters in the other tableau
        entering = leaving
        tab = Q if tab is P else P
    xv = P.values(m + n)[:m]
    yv = Q.values(m + n)[m:]
    sx, sy = sum(xv), sum(yv)
    return LHResult(MixedProfile([v / sx for v in xv], [v / sy for v in yv]), pivots)


def lemke_howson_solve(game: BimatrixGame, initial_label: int = 1, max_pivots: int | None = None) -> MixedProfile:
    return lemke_howson(game, initial_label, max_pivots).profile
