"""Boolean circuits with AND/OR/NOT gates that color hypergrid points.

A circuit over grid bounds r has one input wire per coordinate bit
(big-endian, coordinates in order) and 2d output wires ordered
D1+, D1-, ..., Dd+, Dd-.  Evaluation is bit-parallel: every wire holds a
Python int whose k-th bit is the wire's value at the k-th queried point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import INVALID, RED, GridBounds

AND, OR, NOT = 0, 1, 2
_OPNAMES = {AND: "AND", OR: "OR", NOT: "NOT"}
_OPCODES = {v: k for k, v in _OPNAMES.items()}

Gate = tuple[int, int, int]

_CHUNK = 4096


@dataclass(frozen=True)
class BrouwerCircuit:
    bounds: GridBounds
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    _meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        n_in = self.bounds.n_inputs
        if len(self.outputs) != 2 * self.bounds.d:
            raise ValueError(f"expected {2 * self.bounds.d} outputs, got {len(self.outputs)}")
        for k, (op, a, b) in enumerate(self.gates):
            w = n_in + k
            if op not in _OPNAMES:
                raise ValueError(f"unknown gate op {op}")
            if not 0 <= a < w or (op != NOT and not 0 <= b < w):
                raise ValueError(f"gate w{w} references a later or unknown wire")
        n_wires = n_in + len(self.gates)
        if any(not 0 <= o < n_wires for o in self.outputs):
            raise ValueError("output references an unknown wire")

    @property
    def d(self) -> int:
        return self.bounds.d

    @property
    def n_inputs(self) -> int:
        return self.bounds.n_inputs

    @property
    def size(self) -> int:
        """Gates plus inputs plus outputs."""
        return len(self.gates) + self.n_inputs + len(self.outputs)

    # evaluation ---------------------------------------------------------

    def evaluate_packed(self, inputs: Sequence[int], mask: int) -> list[int]:
        vals = list(inputs)
        if len(vals) != self.n_inputs:
            raise ValueError("wrong number of packed inputs")
        append = vals.append
        for op, a, b in self.gates:
            if op == AND:
                append(vals[a] & vals[b])
            elif op == OR:
                append(vals[a] | vals[b])
            else:
                append(mask ^ vals[a])
        return [vals[o] for o in self.outputs]

    def output_bits(self, pts: np.ndarray) -> np.ndarray:
        """Boolean (N, 2d) array of output wires at each row of pts."""
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.d)
        out = np.zeros((len(pts), 2 * self.d), dtype=bool)
        for start in range(0, len(pts), _CHUNK):
            chunk = pts[start:start + _CHUNK]
            n = len(chunk)
            mask = (1 << n) - 1
            packed = [_pack(col) for col in _input_columns(self.bounds, chunk)]
            res = self.evaluate_packed(packed, mask)
            for j, v in enumerate(res):
                out[start:start + n, j] = _unpack(v, n)
        return out

    def evaluate(self, p: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(b) for b in self.output_bits(np.asarray([p]))[0])

    def colors(self, pts: np.ndarray) -> np.ndarray:
        """Color tag per point; INVALID where the output pattern is illegal."""
        return classify_patterns(self.output_bits(pts))


def _input_columns(bounds: GridBounds, pts: np.ndarray) -> list[np.ndarray]:
    cols = []
    for i, w in enumerate(bounds.widths):
        for k in range(w):
            cols.append(((pts[:, i] >> (w - 1 - k)) & 1).astype(bool))
    return cols


def _pack(col: np.ndarray) -> int:
    return int.from_bytes(np.packbits(col, bitorder="little").tobytes(), "little")


def _unpack(v: int, n: int) -> np.ndarray:
    raw = v.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def classify_pattern(bits: Sequence[int]) -> int:
    """Color encoded by a 2d-bit output pattern, or INVALID."""
    return int(classify_patterns(np.asarray([bits], dtype=bool))[0])


def classify_patterns(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=bool)
    d = bits.shape[1] // 2
    plus = bits[:, 0::2]
    minus = bits[:, 1::2]
    n_plus = plus.sum(axis=1)
    out = np.full(len(bits), INVALID, dtype=np.int64)
    single = (n_plus == 1) & ~minus.any(axis=1)
    out[single] = np.argmax(plus[single], axis=1) + 1
    red = (n_plus == 0) & minus.all(axis=1)
    out[red] = RED
    return out


def pattern_of(color: int, d: int) -> tuple[int, ...]:
    bits = [0] * (2 * d)
    if color == RED:
        bits[1::2] = [1] * d
    elif 1 <= color <= d:
        bits[2 * (color - 1)] = 1
    else:
        raise ValueError(f"no pattern for color {color} in dimension {d}")
    return tuple(bits)


class CircuitBuilder:
    """Incremental gate-level construction with small arithmetic helpers.

    Multi-bit values are lists of wires, most significant bit first.
    """

    def __init__(self, bounds: GridBounds):
        if bounds.n_inputs == 0:
            raise ValueError("grid has no input bits")
        self.bounds = bounds
        self.gates: list[Gate] = []
        self._c0: int | None = None
        self._c1: int | None = None

    # primitive gates
    def _add(self, op: int, a: int, b: int = 0) -> int:
        self.gates.append((op, a, b))
        return self.bounds.n_inputs + len(self.gates) - 1

    def AND(self, a: int, b: int) -> int:
        return self._add(AND, a, b)

    def OR(self, a: int, b: int) -> int:
        return self._add(OR, a, b)

    def NOT(self, a: int) -> int:
        return self._add(NOT, a)

    @property
    def const0(self) -> int:
        if self._c0 is None:
            self._c0 = self.AND(0, self.NOT(0))
        return self._c0

    @property
    def const1(self) -> int:
        if self._c1 is None:
            self._c1 = self.NOT(self.const0)
        return self._c1

    def coord_bits(self, i: int) -> list[int]:
        """Input wires of coordinate i (0-based)."""
        start = sum(self.bounds.widths[:i])
        return list(range(start, start + self.bounds.widths[i]))

    # composite logic
    def and_all(self, ws: Sequence[int]) -> int:
        if not ws:
            return self.const1
        acc = ws[0]
        for w in ws[1:]:
            acc = self.AND(acc, w)
        return acc

    def or_all(self, ws: Sequence[int]) -> int:
        if not ws:
            return self.const0
        acc = ws[0]
        for w in ws[1:]:
            acc = self.OR(acc, w)
        return acc

    def xor(self, a: int, b: int) -> int:
        return self.AND(self.OR(a, b), self.NOT(self.AND(a, b)))

    def mux(self, sel: int, a: int, b: int) -> int:
        """sel ? a : b"""
        return self.OR(self.AND(sel, a), self.AND(self.NOT(sel), b))

    def mux_bits(self, sel: int, a: Sequence[int], b: Sequence[int]) -> list[int]:
        return [self.mux(sel, x, y) for x, y in zip(a, b)]

    def const_bits(self, value: int, width: int) -> list[int]:
        if value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return [self.const1 if (value >> (width - 1 - k)) & 1 else self.const0 for k in range(width)]

    def eq_const(self, bits: Sequence[int], value: int) -> int:
        if value < 0 or value >> len(bits):
            return self.const0
        w = len(bits)
        lits = [b if (value >> (w - 1 - k)) & 1 else self.NOT(b) for k, b in enumerate(bits)]
        return self.and_all(lits)

    def le_const(self, bits: Sequence[int], value: int) -> int:
        """Unsigned bits <= value."""
        if value < 0:
            return self.const0
        if value >= (1 << len(bits)) - 1:
            return self.const1
        w = len(bits)
        acc = self.const1
        for k in range(w - 1, -1, -1):
            b = bits[k]
            if (value >> (w - 1 - k)) & 1:
                acc = self.OR(self.NOT(b), acc)
            else:
                acc = self.AND(self.NOT(b), acc)
        return acc

    def zext(self, bits: Sequence[int], width: int) -> list[int]:
        if len(bits) > width:
            raise ValueError("cannot narrow with zext")
        return [self.const0] * (width - len(bits)) + list(bits)

    def add(self, a: Sequence[int], b: Sequence[int], carry: int | None = None) -> list[int]:
        """a + b (+ carry) modulo 2^width; operands must have equal width."""
        if len(a) != len(b):
            raise ValueError("operand widths differ")
        c = self.const0 if carry is None else carry
        out = [0] * len(a)
        for k in range(len(a) - 1, -1, -1):
            x = self.xor(a[k], b[k])
            out[k] = self.xor(x, c)
            c = self.OR(self.AND(a[k], b[k]), self.AND(c, x))
        return out

    def sub(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        """a - b modulo 2^width."""
        return self.add(a, [self.NOT(x) for x in b], carry=self.const1)

    def embed(self, circuit: BrouwerCircuit, inputs: Sequence[int]) -> list[int]:
        """Append a copy of circuit with its inputs wired to the given wires."""
        n_in = circuit.n_inputs
        if len(inputs) != n_in:
            raise ValueError("embedding needs one wire per input")
        offset = self.bounds.n_inputs + len(self.gates) - n_in
        ins = list(inputs)

        def m(w: int) -> int:
            return ins[w] if w < n_in else w + offset

        self.gates.extend((op, m(a), m(b) if op != NOT else 0) for op, a, b in circuit.gates)
        return [m(o) for o in circuit.outputs]

    def build(self, outputs: Sequence[int]) -> BrouwerCircuit:
        return BrouwerCircuit(self.bounds, tuple(self.gates), tuple(outputs))


class ColorLogic:
    """One-hot color signals on top of a builder, for a target dimension D.

    A color signal is a list of D + 1 wires: index 0 is red, index i is
    color i.  Exactly one wire of a well-formed signal is set.
    """

    def __init__(self, cb: CircuitBuilder, D: int):
        self.cb = cb
        self.D = D

    def constant(self, color: int) -> list[int]:
        cb = self.cb
        return [cb.const1 if c == color else cb.const0 for c in range(self.D + 1)]

    def from_pattern(self, outs: Sequence[int], d: int) -> list[int]:
        """Signal from a d-dimensional circuit's output wires (colors <= d)."""
        cb = self.cb
        plus = [outs[2 * i] for i in range(d)]
        sig = [cb.NOT(cb.or_all(plus))] + plus
        return sig + [cb.const0] * (self.D - d)

    def boundary(self, zeros: Sequence[int]) -> list[int]:
        """Largest index with a zero coordinate, red when none is zero."""
        cb = self.cb
        sig = [0] * (self.D + 1)
        later = cb.const0
        for i in range(self.D, 0, -1):
            z = zeros[i - 1]
            sig[i] = cb.AND(z, cb.NOT(later))
            later = cb.OR(later, z)
        sig[0] = cb.NOT(later)
        return sig

    def select(self, cases: Sequence[tuple[int, list[int]]], default: list[int]) -> list[int]:
        """First case whose condition holds, else default."""
        cb = self.cb
        rem = cb.const1
        acc: list[list[int]] = [[] for _ in range(self.D + 1)]
        for cond, sig in cases:
            take = cb.AND(rem, cond)
            rem = cb.AND(rem, cb.NOT(cond))
            for c in range(self.D + 1):
                acc[c].append(cb.AND(take, sig[c]))
        for c in range(self.D + 1):
            acc[c].append(cb.AND(rem, default[c]))
        return [cb.or_all(ws) for ws in acc]

    def to_outputs(self, sig: Sequence[int]) -> list[int]:
        outs = []
        for i in range(1, self.D + 1):
            outs.extend([sig[i], sig[0]])
        return outs


def boundary_wires(cb: CircuitBuilder) -> tuple[list[int], list[int], int]:
    """Per-coordinate zero tests, top tests and the on-boundary flag."""
    zeros, tops = [], []
    for i, r in enumerate(cb.bounds.r):
        bits = cb.coord_bits(i)
        zeros.append(cb.eq_const(bits, 0))
        tops.append(cb.eq_const(bits, r - 1))
    return zeros, tops, cb.or_all(zeros + tops)


def compile_truth_table(bounds: GridBounds, colors: np.ndarray) -> BrouwerCircuit:
    """Sum-of-products circuit realising a color table given in point order.

    Minterms share prefixes through a decoder tree; no minimisation.
    """
    colors = np.asarray(colors, dtype=np.int64)
    if colors.shape != (bounds.n_points,):
        raise ValueError("color table has wrong length")
    cb = CircuitBuilder(bounds)
    n_in = bounds.n_inputs
    pts = bounds.point_array()
    codes = np.zeros(len(pts), dtype=object)
    for i, w in enumerate(bounds.widths):
        codes = codes * (1 << w) + pts[:, i].astype(object)
    prefix: dict[tuple[int, int], int] = {}
    neg = [cb.NOT(k) for k in range(n_in)]

    def minterm(code: int) -> int:
        # prefix (length, value) -> wire
        node = -1
        for k in range(1, n_in + 1):
            key = (k, code >> (n_in - k))
            w = prefix.get(key)
            if w is None:
                lit = k - 1 if (code >> (n_in - k)) & 1 else neg[k - 1]
                w = lit if node < 0 else cb.AND(node, lit)
                prefix[key] = w
            node = w
        return node

    d = bounds.d
    groups: list[list[int]] = [[] for _ in range(d + 1)]
    for code, c in zip(codes, colors):
        c = int(c)
        if c != RED and not 1 <= c <= d:
            raise ValueError(f"color {c} out of range")
        groups[c].append(minterm(int(code)))
    sigs = [cb.or_all(g) for g in groups]
    outs = []
    for i in range(1, d + 1):
        outs.extend([sigs[i], sigs[0]])
    return cb.build(outs)


def circuit_from_function(bounds: GridBounds, fn: Callable[[tuple[int, ...]], int]) -> BrouwerCircuit:
    return compile_truth_table(bounds, np.array([fn(p) for p in bounds.points()], dtype=np.int64))


# file format ----------------------------------------------------------------

def dumps_circuit(c: BrouwerCircuit) -> str:
    n_in = c.n_inputs
    lines = [f"bmc d={c.d} r={','.join(map(str, c.bounds.r))}", f"inputs {n_in}"]
    for k, (op, a, b) in enumerate(c.gates):
        w = n_in + k
        if op == NOT:
            lines.append(f"w{w} = NOT w{a}")
        else:
            lines.append(f"w{w} = {_OPNAMES[op]} w{a} w{b}")
    lines.append("outputs " + " ".join(f"w{o}" for o in c.outputs))
    return "\n".join(lines) + "\n"


def _wire(tok: str) -> int:
    if not tok.startswith("w"):
        raise ValueError(f"bad wire token {tok!r}")
    return int(tok[1:])


def loads_circuit(text: str) -> BrouwerCircuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) < 3:
        raise ValueError("truncated circuit file")
    head = lines[0].split()
    if head[0] != "bmc" or len(head) != 3:
        raise ValueError("missing 'bmc d=.. r=..' header")
    fields = dict(tok.split("=", 1) for tok in head[1:])
    r = tuple(int(x) for x in fields["r"].split(","))
    bounds = GridBounds(r)
    if int(fields["d"]) != bounds.d:
        raise ValueError("header dimension disagrees with bounds")
    tok = lines[1].split()
    if tok[0] != "inputs" or int(tok[1]) != bounds.n_inputs:
        raise ValueError(f"expected 'inputs {bounds.n_inputs}'")
    gates: list[Gate] = []
    n_in = bounds.n_inputs
    for ln in lines[2:-1]:
        tok = ln.split()
        if len(tok) < 4 or tok[1] != "=":
            raise ValueError(f"bad gate line {ln!r}")
        if _wire(tok[0]) != n_in + len(gates):
            raise ValueError(f"gate {tok[0]} out of order")
        op = _OPCODES.get(tok[2])
        if op is None:
            raise ValueError(f"unknown gate {tok[2]!r}")
        if op == NOT:
            if len(tok) != 4:
                raise ValueError(f"bad NOT line {ln!r}")
            gates.append((NOT, _wire(tok[3]), 0))
        else:
            if len(tok) != 5:
                raise ValueError(f"bad gate line {ln!r}")
            gates.append((op, _wire(tok[3]), _wire(tok[4])))
    tok = lines[-1].split()
    if tok[0] != "outputs":
        raise ValueError("missing outputs line")
    return BrouwerCircuit(bounds, tuple(gates), tuple(_wire(t) for t in tok[1:]))
