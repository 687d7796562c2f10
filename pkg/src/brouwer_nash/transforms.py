"""Coloring transforms (padding, adding a dimension, snake embedding) and
their panchromatic-set decoders.

Each transform returns a genuine circuit: coordinate comparators and, for
the snake, the arithmetic of the embedding map feed one embedded copy of
the input circuit.  The gates added depend only on (d, r) and the
parameters, never on the input circuit's gates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import BrouwerCircuit, CircuitBuilder, ColorLogic, boundary_wires
from .coloring import ColorOracle, check_validity, is_panchromatic
from .grid import GridBounds, Point, accommodating_corner


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class ColoringTriple:
    circuit: BrouwerCircuit
    # set only by the snake with a = 1, whose folded coordinate has 6 values
    relaxed: bool = False

    def __post_init__(self) -> None:
        if any(x < (6 if self.relaxed else 7) for x in self.circuit.bounds.r):
            raise ValueError(f"coloring triples need every r_i >= 7, got {self.r}")

    @property
    def bounds(self) -> GridBounds:
        return self.circuit.bounds

    @property
    def d(self) -> int:
        return self.circuit.d

    @property
    def r(self) -> tuple[int, ...]:
        return self.circuit.bounds.r

    def check(self, **kw) -> None:
        bad = check_validity(self.circuit, limit=3, **kw)
        if bad:
            raise ValueError(f"circuit is not valid: {bad}")


def make_triple(c: BrouwerCircuit, validate: bool = True, **kw) -> ColoringTriple:
    T = ColoringTriple(c)
    if validate:
        T.check(**kw)
    return T


# padding one coordinate -----------------------------------------------------

def l1_pad(T: ColoringTriple, t: int, u: int, *, allow_equal: bool = False) -> ColoringTriple:
    """Extend coordinate t (1-based) from r_t to u values; the new slab is red.

    allow_equal accepts u == r_t, which reproduces the input coloring.
    """
    d, r = T.d, T.r
    if not 1 <= t <= d:
        raise ValueError(f"coordinate {t} out of range 1..{d}")
    if u < r[t - 1] or (u == r[t - 1] and not allow_equal):
        raise ValueError(f"padding needs u > r_t ({u} <= {r[t - 1]})")
    new_r = list(r)
    new_r[t - 1] = u
    cb = CircuitBuilder(GridBounds(new_r))
    zeros, _, on_b = boundary_wires(cb)
    bits_t = cb.coord_bits(t - 1)
    inside = cb.le_const(bits_t, r[t - 1] - 1)
    w = T.bounds.widths[t - 1]
    ins: list[int] = []
    for i in range(d):
        bits = cb.coord_bits(i)
        ins.extend(bits[len(bits) - w:] if i == t - 1 else bits)
    inner = cb.embed(T.circuit, ins)
    cl = ColorLogic(cb, d)
    sig = cl.select(
        [(on_b, cl.boundary(zeros)), (inside, cl.from_pattern(inner, d))],
        cl.constant(0),
    )
    return ColoringTriple(cb.build(cl.to_outputs(sig)))


def l1_decode(T: ColoringTriple, t: int, u: int, pts: Sequence[Sequence[int]],
              target: ColoringTriple | None = None) -> list[Point]:
    target = target or l1_pad(T, t, u, allow_equal=u == T.r[t - 1])
    pts = _check_input(target, pts)
    corner = accommodating_corner(pts)
    if corner[t - 1] > T.r[t - 1] - 1:
        raise DecodeError("accommodating corner lies in the padded slab")
    if not all(T.bounds.contains(p) for p in pts):
        raise DecodeError("panchromatic set leaves the original grid")
    return pts


# adding a dimension -----------------------------------------------------------

def l2_add(T: ColoringTriple, u: int) -> ColoringTriple:
    """Append coordinate d+1 of size u; layer p_{d+1} = 1 copies the input."""
    if u < 7:
        raise ValueError(f"new coordinate needs u >= 7, got {u}")
    d = T.d
    cb = CircuitBuilder(GridBounds(T.r + (u,)))
    zeros, _, on_b = boundary_wires(cb)
    layer = cb.eq_const(cb.coord_bits(d), 1)
    ins = [w for i in range(d) for w in cb.coord_bits(i)]
    inner = cb.embed(T.circuit, ins)
    cl = ColorLogic(cb, d + 1)
    sig = cl.select(
        [(on_b, cl.boundary(zeros)), (layer, cl.from_pattern(inner, d))],
        cl.constant(0),
    )
    return ColoringTriple(cb.build(cl.to_outputs(sig)))


def l2_decode(T: ColoringTriple, u: int, pts: Sequence[Sequence[int]],
              target: ColoringTriple | None = None) -> list[Point]:
    target = target or l2_add(T, u)
    pts = _check_input(target, pts)
    d = T.d
    if accommodating_corner(pts)[d] != 0:
        raise DecodeError("accommodating corner is not on the bottom layer")
    oracle = ColorOracle(target.circuit)
    out = []
    for p in pts:
        if oracle(p) == d + 1:
            continue
        if p[d] != 1:
            raise DecodeError(f"point {p} is off the copied layer")
        out.append(p[:d])
    return sorted(out)


# snake embedding -------------------------------------------------------------

def snake_size(a: int, b: int) -> int:
    return a * (2 * b + 1) + 5


def in_snake(p: Sequence[int], t: int, a: int, b: int) -> bool:
    """Membership of a (d+1)-point in the snake region."""
    h, x = p[-1], p[t - 1]
    if not 1 <= h <= 4 * b + 1:
        return False
    if h == 1:
        return 2 <= x <= a + 4
    if h == 4 * b + 1:
        return 0 <= x <= a + 2
    s = h % 4
    if s in (1, 3):
        return 2 <= x <= a + 2
    if s == 2:
        return x == 2
    return x == a + 2


def snake_value(x: int, h: int, a: int, b: int) -> int:
    """Coordinate t of the embedded point for row h and column x."""
    q, s = divmod(h, 4)
    base = 2 * (b - q) * a
    if s == 1:
        return base + x
    if s == 3:
        return base + 4 - x
    if s == 2:
        return base + 2
    return base + a + 2


def snake_map(p: Sequence[int], t: int, a: int, b: int) -> Point:
    """Map a snake point of the (d+1)-grid to the original d-grid."""
    if not in_snake(p, t, a, b):
        raise ValueError(f"{tuple(p)} is not in the snake region")
    q = list(p[:-1])
    q[t - 1] = snake_value(p[t - 1], p[-1], a, b)
    return tuple(q)


def _check_snake_params(T: ColoringTriple, t: int, a: int, b: int) -> None:
    if not 1 <= t <= T.d:
        raise ValueError(f"coordinate {t} out of range 1..{T.d}")
    if a < 1 or b < 1:
        raise ValueError("snake needs a, b >= 1")
    if T.r[t - 1] != snake_size(a, b):
        raise ValueError(f"r_t = {T.r[t - 1]} but a(2b+1)+5 = {snake_size(a, b)}")


def snake_bounds(T: ColoringTriple, t: int, a: int, b: int) -> GridBounds:
    r = list(T.r)
    r[t - 1] = a + 5
    return GridBounds(tuple(r) + (4 * b + 3,))


def l3_snake(T: ColoringTriple, t: int, a: int, b: int) -> ColoringTriple:
    """Fold coordinate t (of size a(2b+1)+5) into a snake over a new coordinate."""
    _check_snake_params(T, t, a, b)
    d = T.d
    bounds = snake_bounds(T, t, a, b)
    cb = CircuitBuilder(bounds)
    zeros, _, on_b = boundary_wires(cb)
    xb = cb.coord_bits(t - 1)
    hb = cb.coord_bits(d)
    s_hi, s_lo = hb[-2], hb[-1]
    qb = hb[:-2]
    n_s_hi, n_s_lo = cb.NOT(s_hi), cb.NOT(s_lo)
    s0 = cb.AND(n_s_hi, n_s_lo)
    s1 = cb.AND(n_s_hi, s_lo)
    s2 = cb.AND(s_hi, n_s_lo)
    s3 = cb.AND(s_hi, s_lo)

    h_nonzero = cb.NOT(cb.eq_const(hb, 0))
    h_is1 = cb.eq_const(hb, 1)
    h_top = cb.eq_const(hb, 4 * b + 1)
    h_le_top = cb.le_const(hb, 4 * b + 1)
    h_le_4bm1 = cb.le_const(hb, 4 * b - 1)
    x_ge2 = cb.NOT(cb.le_const(xb, 1))
    x_le_a1 = cb.le_const(xb, a + 1)
    x_le_a2 = cb.le_const(xb, a + 2)
    x_le_a4 = cb.le_const(xb, a + 4)
    x_is0 = cb.eq_const(xb, 0)
    x_is1 = cb.eq_const(xb, 1)
    x_is2 = cb.eq_const(xb, 2)
    x_is_a2 = cb.eq_const(xb, a + 2)
    mid = cb.AND(x_ge2, x_le_a2)
    rows = cb.or_all([
        cb.and_all([h_is1, x_ge2, x_le_a4]),
        cb.AND(h_top, x_le_a2),
        cb.AND(s3, mid),
        cb.and_all([s1, cb.NOT(h_is1), cb.NOT(h_top), mid]),
        cb.AND(s2, x_is2),
        cb.AND(s0, x_is_a2),
    ])
    in_w = cb.and_all([h_nonzero, h_le_top, rows])

    # embedded coordinate: 2(b - q)a plus a row-class dependent term
    W = max((2 * a * b + a + 8).bit_length(), T.r[t - 1].bit_length()) + 1
    mask = (1 << W) - 1
    partials = []
    nq = len(qb)
    for j, qw in enumerate(qb):
        c = (2 * a << (nq - 1 - j)) & mask
        partials.append([qw if (c >> (W - 1 - k)) & 1 else cb.const0 for k in range(W)])
    prod = cb.const_bits(0, W)
    for term in partials:
        prod = cb.add(prod, term)
    base = cb.sub(cb.const_bits(2 * a * b, W), prod)
    xe = cb.zext(xb, W)
    v1 = cb.add(base, xe)
    v3 = cb.sub(cb.add(base, cb.const_bits(4, W)), xe)
    v2 = cb.add(base, cb.const_bits(2, W))
    v0 = cb.add(base, cb.const_bits(a + 2, W))
    val = cb.mux_bits(s_hi, cb.mux_bits(s_lo, v3, v2), cb.mux_bits(s_lo, v1, v0))
    wt = T.bounds.widths[t - 1]
    ins: list[int] = []
    for i in range(d):
        ins.extend(val[W - wt:] if i == t - 1 else cb.coord_bits(i))
    inner = cb.embed(T.circuit, ins)

    walls = cb.and_all([s0, h_nonzero, cb.NOT(x_is0), x_le_a1])
    gaps = cb.and_all([cb.NOT(s0), h_le_4bm1, x_is1])
    cl = ColorLogic(cb, d + 1)
    sig = cl.select(
        [
            (in_w, cl.from_pattern(inner, d)),
            (on_b, cl.boundary(zeros)),
            (cb.OR(walls, gaps), cl.constant(d + 1)),
        ],
        cl.constant(0),
    )
    return ColoringTriple(cb.build(cl.to_outputs(sig)), relaxed=a + 5 < 7)


def _snake_row_map(corner: Point, t: int, a: int, b: int):
    """Replacement (column, row) for each point, chosen by the corner's row."""
    d = len(corner) - 1
    ct, ch = corner[t - 1], corner[d]
    if ch == 4 * b + 1:
        raise DecodeError("accommodating corner on the top snake row")
    if ch == 0:
        if not 1 <= ct <= a + 3:
            raise DecodeError(f"corner column {ct} outside 1..a+3 on the bottom row")
        return lambda x, h: (max(x, 2), 1)
    if ch == 4 * b:
        if ct > a + 2:
            raise DecodeError(f"corner column {ct} beyond a+2 below the top row")
        return lambda x, h: (x, 4 * b + 1)
    s = ch % 4
    if s in (1, 2):
        if ct != 1:
            raise DecodeError(f"corner column {ct} is not 1 inside a turn")
        return lambda x, h: (2, h)
    row = ch + 1 if s == 0 else ch
    if not 1 <= ct <= a + 1:
        raise DecodeError(f"corner column {ct} outside 1..a+1")
    return lambda x, h: (max(x, 2), row)


def l3_decode(T: ColoringTriple, t: int, a: int, b: int, pts: Sequence[Sequence[int]],
              target: ColoringTriple | None = None) -> list[Point]:
    _check_snake_params(T, t, a, b)
    target = target or l3_snake(T, t, a, b)
    pts = _check_input(target, pts)
    d = T.d
    corner = accommodating_corner(pts)
    remap = _snake_row_map(corner, t, a, b)
    oracle = ColorOracle(target.circuit)
    out = []
    for p in pts:
        if oracle(p) == d + 1:
            continue
        x, h = remap(p[t - 1], p[d])
        q = list(p)
        q[t - 1], q[d] = x, h
        if not in_snake(q, t, a, b):
            raise DecodeError(f"remapped point {tuple(q)} is outside the snake")
        out.append(snake_map(q, t, a, b))
    if len(set(out)) != len(out):
        raise DecodeError("decoded points collide")
    return sorted(out)


def _check_input(target: ColoringTriple, pts: Sequence[Sequence[int]]) -> list[Point]:
    pts = sorted(tuple(int(x) for x in p) for p in pts)
    if not is_panchromatic(target.circuit, pts):
        raise DecodeError("input set is not panchromatic for the transformed triple")
    return pts
