"""Colors, validity, panchromatic sets and instance families over circuits."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .circuit import (
    BrouwerCircuit,
    CircuitBuilder,
    ColorLogic,
    boundary_wires,
    compile_truth_table,
)
from .grid import (
    INVALID,
    RED,
    GridBounds,
    Point,
    accommodating_corner,
    boundary_colors_array,
    boundary_mask,
)

TABLE_LIMIT = 1 << 16
CORNER_SAMPLE_LIMIT = 4096


class InvalidPattern(ValueError):
    pass


def color_at(c: BrouwerCircuit, p: Sequence[int]) -> int:
    if not c.bounds.contains(p):
        raise ValueError(f"point {tuple(p)} outside grid {c.bounds.r}")
    col = int(c.colors(np.asarray([p]))[0])
    if col == INVALID:
        raise InvalidPattern(f"illegal output pattern at {tuple(p)}")
    return col


def color_table(c: BrouwerCircuit) -> np.ndarray:
    """Colors of every point in lexicographic order (cached on the circuit)."""
    tab = c._meta.get("table")
    if tab is None:
        if c.bounds.n_points > TABLE_LIMIT:
            raise ValueError(f"grid has {c.bounds.n_points} points, too many to tabulate")
        tab = c.colors(c.bounds.point_array())
        tab.setflags(write=False)
        c._meta["table"] = tab
    return tab


class ColorOracle:
    """Point -> color lookups backed by a full table when the grid is small."""

    def __init__(self, c: BrouwerCircuit):
        self.circuit = c
        self.bounds = c.bounds
        self._table = color_table(c) if c.bounds.n_points <= TABLE_LIMIT else None
        self._cache: dict[Point, int] = {}

    def __call__(self, p: Sequence[int]) -> int:
        if self._table is not None:
            col = int(self._table[self.bounds.index_of(p)])
            if col == INVALID:
                raise InvalidPattern(f"illegal output pattern at {tuple(p)}")
            return col
        p = tuple(p)
        col = self._cache.get(p)
        if col is None:
            col = color_at(self.circuit, p)
            self._cache[p] = col
        return col

    def many(self, pts: Sequence[Sequence[int]]) -> list[int]:
        if self._table is not None:
            return [self(p) for p in pts]
        todo = [tuple(p) for p in pts if tuple(p) not in self._cache]
        if todo:
            cols = self.circuit.colors(np.asarray(todo))
            for p, col in zip(todo, cols):
                self._cache[p] = int(col)
        out = [self._cache[tuple(p)] for p in pts]
        if INVALID in out:
            raise InvalidPattern("illegal output pattern")
        return out


@dataclass(frozen=True)
class Violation:
    point: Point
    reason: str


def _sample_points(bounds: GridBounds, count: int, rng: np.random.Generator) -> np.ndarray:
    d = bounds.d
    r = np.asarray(bounds.r)
    n_corner = 1 << d
    if n_corner <= CORNER_SAMPLE_LIMIT:
        bits = (np.arange(n_corner)[:, None] >> np.arange(d)[None, :]) & 1
    else:
        bits = rng.integers(0, 2, size=(CORNER_SAMPLE_LIMIT, d))
    corners = bits * (r - 1)
    uniform = rng.integers(0, r, size=(count, d))
    # points pinned to a random boundary face
    face = rng.integers(0, r, size=(count, d))
    axis = rng.integers(0, d, size=count)
    side = rng.integers(0, 2, size=count)
    face[np.arange(count), axis] = side * (r[axis] - 1)
    return np.concatenate([corners, face, uniform]).astype(np.int64)


def check_validity(
    c: BrouwerCircuit,
    mode: str = "auto",
    samples: int = 512,
    seed: int = 0,
    limit: int | None = None,
) -> list[Violation]:
    """Legal pattern everywhere checked and boundary rule on the boundary.

    mode 'exhaustive' checks every point, 'sampled' checks all grid corners
    (or a random subset in high dimension), points on random boundary faces
    and uniform points.  'auto' is exhaustive up to TABLE_LIMIT points.
    """
    bounds = c.bounds
    if mode == "auto":
        mode = "exhaustive" if bounds.n_points <= TABLE_LIMIT else "sampled"
    if mode == "exhaustive":
        if bounds.n_points > TABLE_LIMIT:
            raise ValueError("grid too large for exhaustive validity check")
        pts = bounds.point_array()
        cols = color_table(c)
    elif mode == "sampled":
        pts = _sample_points(bounds, samples, np.random.default_rng(seed))
        cols = c.colors(pts)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    bad: list[Violation] = []
    for k in np.flatnonzero(cols == INVALID):
        bad.append(Violation(tuple(int(x) for x in pts[k]), "illegal output pattern"))
    on_b = boundary_mask(bounds, pts)
    want = boundary_colors_array(bounds, pts)
    for k in np.flatnonzero(on_b & (cols != want) & (cols != INVALID)):
        bad.append(Violation(tuple(int(x) for x in pts[k]), f"boundary color {int(cols[k])}, expected {int(want[k])}"))
    bad.sort(key=lambda v: v.point)
    if limit is not None:
        bad = bad[:limit]
    return bad


def is_valid(c: BrouwerCircuit, **kw) -> bool:
    return not check_validity(c, limit=1, **kw)


def is_panchromatic(c: BrouwerCircuit | ColorOracle, pts: Iterable[Sequence[int]]) -> bool:
    oracle = c if isinstance(c, ColorOracle) else ColorOracle(c)
    bounds = oracle.bounds
    pts = [tuple(int(x) for x in p) for p in pts]
    if len(pts) != bounds.d + 1 or len(set(pts)) != len(pts):
        return False
    if not all(bounds.contains(p) for p in pts):
        return False
    if accommodating_corner(pts) is None:
        return False
    try:
        cols = oracle.many(pts)
    except InvalidPattern:
        return False
    return sorted(cols) == list(range(bounds.d + 1))


# instance families ------------------------------------------------------------

def corner_color(p: Sequence[int]) -> int:
    for i in range(len(p), 0, -1):
        if p[i - 1] == 0:
            return i
    return RED


def make_corner_circuit(bounds: GridBounds, mode: str = "auto") -> BrouwerCircuit:
    """Color max{i : p_i = 0}, red when no coordinate is zero.

    'table' compiles the truth table, 'comparator' uses zero tests per
    coordinate, 'auto' picks the table when the grid is small enough.
    """
    if any(x < 2 for x in bounds.r):
        raise ValueError("corner circuit needs r_i >= 2")
    if mode == "auto":
        mode = "table" if bounds.n_points <= TABLE_LIMIT else "comparator"
    if mode == "table":
        if bounds.n_points > TABLE_LIMIT:
            raise ValueError("grid too large for truth-table mode; use comparator mode")
        pts = bounds.point_array()
        return compile_truth_table(bounds, boundary_colors_array(bounds, pts))
    if mode != "comparator":
        raise ValueError(f"unknown mode {mode!r}")
    cb = CircuitBuilder(bounds)
    zeros = [cb.eq_const(cb.coord_bits(i), 0) for i in range(bounds.d)]
    cl = ColorLogic(cb, bounds.d)
    return cb.build(cl.to_outputs(cl.boundary(zeros)))


def random_valid_circuit(bounds: GridBounds, seed: int, red_weight: float | None = None) -> BrouwerCircuit:
    """Truth-table circuit: boundary rule on the boundary, random colors inside."""
    if bounds.n_points > TABLE_LIMIT:
        raise ValueError("grid too large for truth-table synthesis")
    rng = np.random.default_rng(seed)
    pts = bounds.point_array()
    d = bounds.d
    if red_weight is None:
        probs = None
    else:
        probs = np.full(d + 1, (1 - red_weight) / d)
        probs[0] = red_weight
    inner = rng.choice(d + 1, size=len(pts), p=probs)
    cols = np.where(boundary_mask(bounds, pts), boundary_colors_array(bounds, pts), inner)
    return compile_truth_table(bounds, cols)


def wrap_with_standard(c: BrouwerCircuit, std: BrouwerCircuit) -> BrouwerCircuit:
    """Use c where its output is a legal pattern that respects the boundary
    rule, and the standard circuit elsewhere."""
    if c.bounds != std.bounds:
        raise ValueError("circuits are over different grids")
    cb = CircuitBuilder(c.bounds)
    d = c.d
    ins = list(range(c.n_inputs))
    co = cb.embed(c, ins)
    so = cb.embed(std, ins)
    plus, minus = co[0::2], co[1::2]
    any_minus = cb.or_all(minus)
    cases = []
    for i in range(d):
        others = cb.or_all([plus[j] for j in range(d) if j != i])
        cases.append(cb.and_all([plus[i], cb.NOT(others), cb.NOT(any_minus)]))
    cases.append(cb.AND(cb.NOT(cb.or_all(plus)), cb.and_all(minus)))
    legal = cb.or_all(cases)
    zeros, _, on_b = boundary_wires(cb)
    cl = ColorLogic(cb, d)
    want = cl.boundary(zeros)
    got = cl.from_pattern(co, d)
    agree = cb.or_all([cb.AND(x, y) for x, y in zip(want, got)])
    use_c = cb.AND(legal, cb.OR(cb.NOT(on_b), agree))
    return cb.build([cb.mux(use_c, x, y) for x, y in zip(co, so)])


# well-behaved size functions ---------------------------------------------------

@dataclass(frozen=True)
class WellBehaved:
    name: str
    fn: Callable[[int], int] = field(compare=False)

    def __call__(self, n: int) -> int:
        return int(self.fn(n))

    def check(self, n: int) -> None:
        v = self(n)
        if not 3 <= v <= n / 2:
            raise ValueError(f"f({n}) = {v} violates 3 <= f(n) <= n/2")

    @classmethod
    def from_table(cls, table: Mapping[int, int], name: str = "table") -> "WellBehaved":
        tab = dict(table)

        def fn(n: int) -> int:
            if n not in tab:
                raise ValueError(f"table has no entry for n = {n}")
            return tab[n]

        return cls(name, fn)


BUILTIN_F: dict[str, WellBehaved] = {
    "const3": WellBehaved("const3", lambda n: 3),
    "halve": WellBehaved("halve", lambda n: n // 2),
    "third": WellBehaved("third", lambda n: n // 3),
    "log": WellBehaved("log", lambda n: max(n, 1).bit_length() - 1),
}


def get_f(name: str) -> WellBehaved:
    try:
        return BUILTIN_F[name]
    except KeyError:
        raise ValueError(f"unknown size function {name!r}; choose from {sorted(BUILTIN_F)}") from None


def instance_shape(n: int, f: WellBehaved) -> GridBounds:
    f.check(n)
    m = f(n)
    return GridBounds((1 << m,) * math.ceil(n / m))


@dataclass
class InstanceReport:
    ok: bool
    problems: list[str]
    expected: GridBounds | None = None


def validate_instance(c: BrouwerCircuit, n: int, f: WellBehaved, samples: int = 256, seed: int = 0) -> InstanceReport:
    problems: list[str] = []
    try:
        want = instance_shape(n, f)
    except ValueError as e:
        return InstanceReport(False, [str(e)])
    if c.bounds != want:
        problems.append(f"grid {c.bounds.r} differs from expected {want.r}")
    if len(c.outputs) != 2 * want.d:
        problems.append("wrong output arity")
    viol = check_validity(c, samples=samples, seed=seed, limit=5)
    problems.extend(f"{v.point}: {v.reason}" for v in viol)
    return InstanceReport(not problems, problems, want)
