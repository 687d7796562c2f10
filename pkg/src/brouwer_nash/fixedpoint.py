"""Panchromatic simplex search: exhaustive scan and path following on the
Freudenthal triangulation of the hypergrid."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import BrouwerCircuit
from .coloring import TABLE_LIMIT, ColorOracle, color_table
from .grid import INVALID, RED, GridBounds, Point


class SolverError(RuntimeError):
    pass


def brute_force_panchromatic(c: BrouwerCircuit, cap: int = TABLE_LIMIT) -> list[tuple[Point, ...]]:
    """Every panchromatic (d+1)-set inside some unit cube, sorted and deduplicated."""
    bounds = c.bounds
    if bounds.n_points > cap:
        raise ValueError(f"grid has {bounds.n_points} points, above the cap {cap}")
    if any(x < 2 for x in bounds.r):
        return []
    d = bounds.d
    tab = np.asarray(color_table(c)).reshape(bounds.r)
    if (tab == INVALID).any():
        raise SolverError("circuit has illegal output patterns")
    offsets = list(itertools.product((0, 1), repeat=d))
    views = [tab[tuple(slice(o, x - 1 + o) for o, x in zip(off, bounds.r))] for off in offsets]
    present = np.ones(views[0].shape, dtype=bool)
    for col in range(d + 1):
        has = np.zeros(views[0].shape, dtype=bool)
        for v in views:
            has |= v == col
        present &= has
    found: set[tuple[Point, ...]] = set()
    for base in zip(*np.nonzero(present)):
        base = tuple(int(x) for x in base)
        by_color: list[list[Point]] = [[] for _ in range(d + 1)]
        for off, v in zip(offsets, views):
            by_color[int(v[base])].append(tuple(b + o for b, o in zip(base, off)))
        for choice in itertools.product(*by_color):
            found.add(tuple(sorted(choice)))
    return sorted(found)


# Freudenthal triangulation -----------------------------------------------------

@dataclass(frozen=True)
class SimplexId:
    """Base point p (0 <= p_i <= r_i - 2) and a permutation of 1..d."""

    base: Point
    perm: tuple[int, ...]


BOUNDARY = None


def simplex_vertices(s: SimplexId) -> list[Point]:
    verts = [tuple(s.base)]
    cur = list(s.base)
    for i in s.perm:
        cur[i - 1] += 1
        verts.append(tuple(cur))
    return verts


def start_simplex(d: int) -> SimplexId:
    return SimplexId((0,) * d, tuple(range(d, 0, -1)))


def facet_neighbor(bounds: GridBounds, s: SimplexId, k: int) -> SimplexId | None:
    """Simplex across the facet opposite vertex k, or BOUNDARY."""
    d = bounds.d
    p, perm = list(s.base), list(s.perm)
    if k == 0:
        i = perm[0]
        p[i - 1] += 1
        if p[i - 1] > bounds.r[i - 1] - 2:
            return BOUNDARY
        return SimplexId(tuple(p), tuple(perm[1:] + perm[:1]))
    if k == d:
        i = perm[-1]
        p[i - 1] -= 1
        if p[i - 1] < 0:
            return BOUNDARY
        return SimplexId(tuple(p), tuple(perm[-1:] + perm[:-1]))
    if not 0 < k < d:
        raise ValueError(f"facet index {k} out of range")
    perm[k - 1], perm[k] = perm[k], perm[k - 1]
    return SimplexId(tuple(p), tuple(perm))


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [list(row) for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


def facet_orientation(verts: Sequence[Point], colors: Sequence[int], k: int) -> int:
    """+1 (counter-clockwise) or -1 for the panchromatic facet opposite vertex k.

    Sign of det[q - p^1, ..., q - p^d], q the off-facet vertex and p^i the
    facet vertex of color i.
    """
    d = len(verts) - 1
    facet = {colors[j]: verts[j] for j in range(d + 1) if j != k}
    if sorted(facet) != list(range(1, d + 1)):
        raise ValueError("facet is not panchromatic")
    q = verts[k]
    cols = [[q[row] - facet[i][row] for i in range(1, d + 1)] for row in range(d)]
    det = int_det(cols)
    if det == 0:
        raise SolverError("degenerate simplex")
    return 1 if det > 0 else -1


def panchromatic_facets(colors: Sequence[int]) -> list[int]:
    """Vertex indices whose opposite facet carries colors 1..d exactly."""
    d = len(colors) - 1
    full = set(range(1, d + 1))
    return [k for k in range(d + 1) if {colors[j] for j in range(d + 1) if j != k} == full
            and len([c for j, c in enumerate(colors) if j != k]) == d]


@dataclass(frozen=True)
class PathResult:
    points: tuple[Point, ...]
    steps: int
    simplex: SimplexId


def path_follow(
    c: BrouwerCircuit,
    max_steps: int | None = None,
    check_orientation: bool = True,
    trace: list[SimplexId] | None = None,
) -> PathResult:
    """Walk from the boundary start facet to a panchromatic simplex.

    Each step leaves the current simplex through its clockwise panchromatic
    facet; it enters the neighbour through the same facet, counter-clockwise.
    Visited simplices are appended to trace when one is given.
    """
    bounds = c.bounds
    d = bounds.d
    if any(x < 2 for x in bounds.r):
        raise ValueError("path following needs r_i >= 2")
    if max_steps is None:
        max_steps = d * bounds.n_points * max(1, _factorial(d)) + 1
    oracle = ColorOracle(c)
    cur = start_simplex(d)
    entered = d
    verts = simplex_vertices(cur)
    cols = oracle.many(verts)
    if check_orientation:
        if facet_orientation(verts, cols, entered) != 1:
            raise SolverError("start facet is not counter-clockwise")
    seen = {cur}
    if trace is not None:
        trace.append(cur)
    for step in range(max_steps + 1):
        if RED in cols and sorted(cols) == list(range(d + 1)):
            return PathResult(tuple(sorted(verts)), step, cur)
        facets = panchromatic_facets(cols)
        if len(facets) != 2 or entered not in facets:
            raise SolverError(f"simplex {cur} has panchromatic facets {facets}")
        out = facets[0] if facets[1] == entered else facets[1]
        if check_orientation:
            o_in = facet_orientation(verts, cols, entered)
            o_out = facet_orientation(verts, cols, out)
            if o_in != 1 or o_out != -1:
                raise SolverError(f"orientation invariant broken at {cur}")
        shared = [v for j, v in enumerate(verts) if j != out]
        nxt = facet_neighbor(bounds, cur, out)
        if nxt is BOUNDARY:
            raise SolverError("walk reached the boundary; circuit is not valid")
        if nxt in seen:
            raise SolverError("walk revisited a simplex")
        seen.add(nxt)
        if trace is not None:
            trace.append(nxt)
        cur = nxt
        verts = simplex_vertices(cur)
        cols = oracle.many(verts)
        entered = next(j for j, v in enumerate(verts) if v not in shared)
    raise SolverError(f"no panchromatic simplex within {max_steps} steps")


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def all_simplices(bounds: GridBounds):
    d = bounds.d
    for base in itertools.product(*(range(x - 1) for x in bounds.r)):
        for perm in itertools.permutations(range(1, d + 1)):
            yield SimplexId(base, perm)
