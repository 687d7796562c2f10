"""Hypergrid geometry: bounds, points, boundary colors and bit encodings."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

# Color tags. Regular colors are 1..d; red is dimension independent.
RED = 0
INVALID = -1

Point = tuple[int, ...]


def bit_width(r: int) -> int:
    """Bits needed to address 0..r-1 (zero for a single-valued coordinate)."""
    if r < 1:
        raise ValueError(f"bound must be positive, got {r}")
    return (r - 1).bit_length()


@dataclass(frozen=True)
class GridBounds:
    """The hypergrid {p : 0 <= p_i <= r_i - 1} in dimension d = len(r)."""

    r: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", tuple(int(x) for x in self.r))
        if not self.r:
            raise ValueError("dimension must be at least 1")
        if any(x < 1 for x in self.r):
            raise ValueError(f"bounds must be positive: {self.r}")

    @property
    def d(self) -> int:
        return len(self.r)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(bit_width(x) for x in self.r)

    @property
    def n_inputs(self) -> int:
        return sum(self.widths)

    @property
    def size_metadata(self) -> int:
        """Sum of ceil(log2(r_i + 1)); informational only."""
        return sum(x.bit_length() for x in self.r)

    @property
    def n_points(self) -> int:
        out = 1
        for x in self.r:
            out *= x
        return out

    def contains(self, p: Sequence[int]) -> bool:
        return len(p) == self.d and all(0 <= c < x for c, x in zip(p, self.r))

    def on_boundary(self, p: Sequence[int]) -> bool:
        return any(c == 0 or c == x - 1 for c, x in zip(p, self.r))

    def boundary_color(self, p: Sequence[int]) -> int:
        """Color forced on the boundary: the largest zero coordinate, else red."""
        for i in range(self.d, 0, -1):
            if p[i - 1] == 0:
                return i
        return RED

    def points(self) -> Iterator[Point]:
        return itertools.product(*(range(x) for x in self.r))

    def point_array(self) -> np.ndarray:
        """All points as an (n_points, d) array in lexicographic order."""
        grids = np.meshgrid(*(np.arange(x, dtype=np.int64) for x in self.r), indexing="ij")
        return np.stack([g.reshape(-1) for g in grids], axis=1)

    def index_of(self, p: Sequence[int]) -> int:
        idx = 0
        for c, x in zip(p, self.r):
            idx = idx * x + c
        return idx

    def encode(self, p: Sequence[int]) -> tuple[int, ...]:
        """Big-endian fixed-width bits of each coordinate, coordinates in order."""
        if not self.contains(p):
            raise ValueError(f"point {tuple(p)} outside grid {self.r}")
        bits: list[int] = []
        for c, w in zip(p, self.widths):
            bits.extend((c >> (w - 1 - k)) & 1 for k in range(w))
        return tuple(bits)

    def decode(self, bits: Sequence[int]) -> Point:
        if len(bits) != self.n_inputs:
            raise ValueError("bit vector has wrong length")
        out = []
        pos = 0
        for w in self.widths:
            v = 0
            for b in bits[pos:pos + w]:
                v = (v << 1) | int(b)
            out.append(v)
            pos += w
        return tuple(out)

    def cube_corners(self, p: Sequence[int]) -> list[Point]:
        """Vertices of the unit cube K_p (requires p_i <= r_i - 2)."""
        if any(c < 0 or c > x - 2 for c, x in zip(p, self.r)):
            raise ValueError(f"cube base {tuple(p)} outside grid {self.r}")
        return [tuple(c + s for c, s in zip(p, off)) for off in itertools.product((0, 1), repeat=self.d)]


def accommodating_corner(points: Iterable[Sequence[int]]) -> Point | None:
    """Coordinatewise minimum if every coordinate spans at most one unit."""
    pts = [tuple(p) for p in points]
    if not pts:
        return None
    lo = tuple(min(c) for c in zip(*pts))
    hi = tuple(max(c) for c in zip(*pts))
    if any(h - l > 1 for l, h in zip(lo, hi)):
        return None
    return lo


def boundary_colors_array(bounds: GridBounds, pts: np.ndarray) -> np.ndarray:
    """Vectorised boundary_color for an (N, d) array."""
    out = np.full(len(pts), RED, dtype=np.int64)
    for i in range(1, bounds.d + 1):
        out = np.where(pts[:, i - 1] == 0, i, out)
    return out


def boundary_mask(bounds: GridBounds, pts: np.ndarray) -> np.ndarray:
    r = np.asarray(bounds.r)
    return np.any((pts == 0) | (pts == r - 1), axis=1)
