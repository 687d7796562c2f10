"""Reduction from a Brouwer circuit over {0..7}^n to a gadget game, and
the decoder that reads a panchromatic set off an equilibrium."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .circuit import AND, NOT, OR, BrouwerCircuit, dumps_circuit, loads_circuit
from .coloring import TABLE_LIMIT, ColorOracle, is_panchromatic
from .gadgets import (
    GadgetError,
    GadgetInstance,
    PrototypeParams,
    SparseGame,
    dumps_sparse,
    forward_eval,
    insert_gadget,
    loads_sparse,
    prototype_entry,
    registry_mismatches,
    value,
)
from .grid import RED, GridBounds, Point, accommodating_corner

SIDE = 8  # coordinate values 0..7, three bits each
BITS = 3


def pi_floor(a: Fraction) -> int:
    """Largest integer in 0..7 strictly below a (0 when a <= 0)."""
    if a <= 0:
        return 0
    t = -(-a.numerator // a.denominator) - 1  # ceil(a) - 1
    return max(0, min(SIDE - 1, t))


def is_poorly_positioned(a: Fraction, K: int) -> bool:
    """Within 80/K^2 of an integer."""
    a = Fraction(a)
    return abs(a - round(a)) <= Fraction(80, K * K)


def is_well_positioned(a: Fraction, K: int) -> bool:
    return not is_poorly_positioned(a, K)


def size_exponent(c: BrouwerCircuit) -> int:
    """Smallest m with 2^m >= Size[C]."""
    return max(0, (c.size - 1).bit_length())


@dataclass(frozen=True)
class ReductionConfig:
    n: int
    m: int
    params: PrototypeParams

    @classmethod
    def for_circuit(cls, c: BrouwerCircuit, params: PrototypeParams | None = None) -> "ReductionConfig":
        n = c.d
        if c.bounds != GridBounds((SIDE,) * n):
            raise ValueError(f"reduction needs a circuit over {{0..7}}^n, got bounds {c.bounds.r}")
        m = size_exponent(c)
        return cls(n, m, params or PrototypeParams.full(m))


class _Net:
    """Node allocation on top of a sparse game."""

    def __init__(self, params: PrototypeParams):
        self.game = SparseGame(params)
        self.next_arith = 1
        self.next_internal = 1

    def node(self) -> int:
        v = self.next_arith
        if v > self.game.params.K:
            raise GadgetError(f"node budget K = {self.game.params.K} exhausted")
        self.next_arith += 1
        return v

    def add(self, kind: str, inputs: Sequence[int], out: int | None = None, zeta=None) -> int:
        out = self.node() if out is None else out
        w = self.next_internal
        self.next_internal += 1
        insert_gadget(self.game, GadgetInstance(kind, tuple(inputs), out, w, zeta))
        return out


@dataclass
class ReductionOutput:
    config: ReductionConfig
    circuit: BrouwerCircuit
    game: SparseGame
    nodes: dict[str, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def samples(self) -> int:
        return self.n ** 3

    def sample_node(self, i: int, k: int) -> int:
        return self.nodes[f"v_{i}^{k}"]


def build_sampling_network(net: _Net, inputs: Sequence[int], c: BrouwerCircuit) -> tuple[list[int], list[int]]:
    """Bit extraction per coordinate, then one logic gadget per gate.

    Returns the nodes carrying D_i^+ and D_i^- for i = 1..n.
    """
    K = net.game.params.K
    wire_node: list[int] = []
    for v in inputs:
        cur = net.add("copy", [v])
        for j in range(1, BITS + 1):
            ref = net.add("const", [], zeta=Fraction(1, K << j))
            bit = net.add("less", [ref, cur])
            part = net.add("scale", [bit], zeta=Fraction(1, 1 << j))
            cur = net.add("minus", [cur, part])
            wire_node.append(bit)
    n_in = len(wire_node)
    gate_out: set[int] = set()
    for op, a, b in c.gates:
        na = wire_node[a]
        if op == NOT:
            out = net.add("not", [na])
        else:
            nb = wire_node[b]
            if na == nb:
                wire_node.append(na)
                continue
            out = net.add("and" if op == AND else "or", [na, nb])
        gate_out.add(out)
        wire_node.append(out)
    claimed: set[int] = set()
    outs = []
    for w in c.outputs:
        node = wire_node[w]
        if node in gate_out and node not in claimed:
            claimed.add(node)
            outs.append(node)
        else:
            # exact boolean copy through two negations
            outs.append(net.add("not", [net.add("not", [node])]))
    assert n_in == BITS * len(inputs)
    return outs[0::2], outs[1::2]


def build_reduction(c: BrouwerCircuit, params: PrototypeParams | None = None) -> ReductionOutput:
    cfg = ReductionConfig.for_circuit(c, params)
    n, K = cfg.n, cfg.params.K
    n3 = n ** 3
    if K < 8 * n3:
        raise ValueError(f"K = {K} too small for {n3} samples")
    net = _Net(cfg.params)
    out = ReductionOutput(cfg, c, net.game)
    names = out.nodes
    base = []
    for i in range(1, n + 1):
        v0 = net.node()
        names[f"v_{i}^0"] = v0
        base.append(v0)
    # samples shifted along the diagonal by k/K^2
    for k in range(1, n3):
        for i in range(1, n + 1):
            shift = net.add("const", [], zeta=Fraction(k, K * K))
            names[f"v_{i}^{k}"] = net.add("plus", [base[i - 1], shift])
    plus_nodes: list[list[int]] = []
    minus_nodes: list[list[int]] = []
    for k in range(n3):
        pk, mk = build_sampling_network(net, [names[f"v_{i}^{k}"] for i in range(1, n + 1)], c)
        plus_nodes.append(pk)
        minus_nodes.append(mk)
        for i in range(1, n + 1):
            names[f"v_{i}^{k}+"] = pk[i - 1]
            names[f"v_{i}^{k}-"] = mk[i - 1]
    for i in range(1, n + 1):
        sums = []
        for group in (plus_nodes, minus_nodes):
            terms = [net.add("scale", [group[k][i - 1]], zeta=Fraction(1, K)) for k in range(n3)]
            acc = terms[0]
            for t in terms[1:]:
                acc = net.add("plus", [acc, t])
            sums.append(acc)
        names[f"v_{i}^+"], names[f"v_{i}^-"] = sums
        up = net.add("plus", [base[i - 1], sums[0]])
        down = net.add("minus", [up, sums[1]])
        net.add("copy", [down], out=base[i - 1])
    names["nodes_used"] = net.next_arith - 1
    return out


# structure validation -------------------------------------------------------------

@dataclass
class StructureReport:
    ok: bool
    problems: list[str]
    gadgets: int
    nodes_used: int
    internals_used: int


def validate_structure(out: ReductionOutput, spot_checks: int = 200, seed: int = 0) -> StructureReport:
    game = out.game
    p = game.params
    problems = list(registry_mismatches(game))
    for name, d in (("A", game.dA), ("B", game.dB)):
        for cell, v in d.items():
            if not 0 <= v <= 1:
                problems.append(f"{name} delta {cell} = {v} outside [0, 1]")
            if not all(1 <= x <= p.N for x in cell):
                problems.append(f"{name} cell {cell} outside the {p.N} x {p.N} game")
    for col, v in game.dB_col.items():
        if not 0 <= v <= 1:
            problems.append(f"B column delta {col} = {v} outside [0, 1]")
    used = {v for g in game.gadgets for v in (*g.inputs, g.output)}
    internals = {g.internal for g in game.gadgets}
    if used and max(used) > p.K:
        problems.append(f"arithmetic node {max(used)} exceeds K = {p.K}")
    if internals and max(internals) > p.K:
        problems.append(f"internal node {max(internals)} exceeds K = {p.K}")
    driven = {g.output for g in game.gadgets}
    for g in game.gadgets:
        for v in g.inputs:
            if v not in driven:
                problems.append(f"node {v} feeds {g.kind} but has no driver")
    n = out.n
    for i in range(1, n + 1):
        for k in range(n ** 3):
            if f"v_{i}^{k}" not in out.nodes:
                problems.append(f"missing distinguished node v_{i}^{k}")
    rng = random.Random(seed)
    for _ in range(min(spot_checks, len(game.gadgets))):
        g = rng.choice(game.gadgets)
        cells = [(2 * g.output - 1, 2 * g.internal - 1), (2 * g.output, 2 * g.internal)]
        for i, j in cells:
            if game.A(i, j) != prototype_entry(p, i, j)[0] + game.dA.get((i, j), 0):
                problems.append(f"A({i},{j}) disagrees with its delta")
    for _ in range(spot_checks):
        i, j = rng.randint(1, p.N), rng.randint(1, p.N)
        if (i, j) not in game.dA and game.A(i, j) != prototype_entry(p, i, j)[0]:
            problems.append(f"untouched A({i},{j}) differs from the prototype")
        if (i, j) not in game.dB and j not in game.dB_col and game.B(i, j) != prototype_entry(p, i, j)[1]:
            problems.append(f"untouched B({i},{j}) differs from the prototype")
    return StructureReport(not problems, problems, len(game.gadgets), len(used), len(internals))


# decoding ------------------------------------------------------------------------

@dataclass
class DecodeResult:
    points: list[tuple[Fraction, ...]]
    good: list[int]
    bad: list[int]
    Q: list[Point]
    tally: list[int]  # T_1..T_n, then T_{n+1} for red
    panchromatic: bool
    witness: list[Point] | None


def decode_equilibrium(out: ReductionOutput, x: Mapping[int, Fraction] | Sequence[Fraction]) -> DecodeResult:
    """Read the sampled points 8K x[v_i^k] and classify them.

    x is the row player's strategy, as a dense vector or a sparse map from
    1-based strategy index to probability.
    """
    n, K = out.n, out.config.params.K
    oracle = ColorOracle(out.circuit)
    pts, good, bad = [], [], []
    for k in range(n ** 3):
        p = tuple(8 * K * value(x, out.sample_node(i, k)) for i in range(1, n + 1))
        pts.append(p)
        (bad if any(is_poorly_positioned(a, K) for a in p) else good).append(k)
    tally = [0] * (n + 1)
    qs: dict[Point, int] = {}
    for k in good:
        q = tuple(pi_floor(a) for a in pts[k])
        col = qs.get(q)
        if col is None:
            col = oracle(q)
            qs[q] = col
        tally[n if col == RED else col - 1] += 1
    Q = sorted(qs)
    witness = None
    if Q and accommodating_corner(Q) is not None:
        pick: dict[int, Point] = {}
        for q in Q:
            pick.setdefault(qs[q], q)
        if len(pick) == n + 1:
            witness = sorted(pick.values())
    ok = witness is not None and is_panchromatic(oracle, witness)
    return DecodeResult(pts, good, bad, Q, tally, ok, witness)


def color_gap_norm(tally: Sequence[int], K: int) -> Fraction:
    """Infinity norm of sum_i T_i z^i with z^i = e_i / K and z^{n+1} = -(1,..,1) / K."""
    red = tally[-1]
    return max(Fraction(abs(t - red), K) for t in tally[:-1])


@dataclass(frozen=True)
class BoundaryViolation:
    point: Point
    clause: int
    detail: str


def check_boundary_conditions(c: BrouwerCircuit, samples: int = 4096, seed: int = 0) -> list[BoundaryViolation]:
    """Color constraints near the faces of {0..7}^n.

    1. q_k = 0 forbids red.  2. q_k = 0 and q_l > 0 forbid color l.
    3. q_k = 7 forbids color k.  4. q_k = 7 and color l != k force q_l = 0.
    Exhaustive when the grid is small, else sampled over boundary points.
    """
    n = c.d
    if c.bounds != GridBounds((SIDE,) * n):
        raise ValueError("boundary conditions apply to circuits over {0..7}^n")
    oracle = ColorOracle(c)
    if SIDE ** n <= TABLE_LIMIT:
        pts = [q for q in itertools.product(range(SIDE), repeat=n) if c.bounds.on_boundary(q)]
    else:
        rng = random.Random(seed)
        pts = []
        for _ in range(samples):
            q = [rng.randrange(SIDE) for _ in range(n)]
            q[rng.randrange(n)] = rng.choice((0, SIDE - 1))
            pts.append(tuple(q))
    out = []
    for q in pts:
        col = oracle(q)
        zeros = [k for k in range(1, n + 1) if q[k - 1] == 0]
        tops = [k for k in range(1, n + 1) if q[k - 1] == SIDE - 1]
        if zeros and col == RED:
            out.append(BoundaryViolation(q, 1, "red on a zero face"))
        if zeros and col != RED and q[col - 1] > 0:
            out.append(BoundaryViolation(q, 2, f"color {col} with q_{col} > 0 on a zero face"))
        if col in tops:
            out.append(BoundaryViolation(q, 3, f"color {col} on its own top face"))
        if tops and col != RED and col not in tops and q[col - 1] != 0:
            out.append(BoundaryViolation(q, 4, f"color {col} with q_{col} != 0 on a top face"))
    return out


# synthetic profiles ---------------------------------------------------------------

def synthetic_profile(out: ReductionOutput, start: Sequence[Fraction]) -> tuple[dict[int, Fraction], set[int]]:
    """Row strategy from forward evaluation with 8K x[v_i^0] = start[i].

    Only the rows of nodes in the network are filled; brittle nodes get 0.
    Returns the sparse row map and the brittle node set.
    """
    K = out.config.params.K
    n = out.n
    if len(start) != n:
        raise ValueError(f"need {n} start coordinates")
    sources = {out.sample_node(i, 0): Fraction(start[i - 1]) / (8 * K) for i in range(1, n + 1)}
    res = forward_eval(out.game.gadgets, sources, K)
    cap = Fraction(1, K)
    x: dict[int, Fraction] = {}
    for v in range(1, out.nodes["nodes_used"] + 1):
        val = res.values.get(v, Fraction(0))
        x[2 * v - 1] = val
        x[2 * v] = cap - val
    return x, res.brittle


# bundle ---------------------------------------------------------------------------

def write_bundle(out: ReductionOutput, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / "game.sparse").write_text(dumps_sparse(out.game))
    (d / "circuit.bmc").write_text(dumps_circuit(out.circuit))
    lines = []
    for name, node in out.nodes.items():
        if name != "nodes_used":
            lines.append(f"node {name} -> arith {node}")
    (d / "nodes.map").write_text("\n".join(lines) + "\n")
    p = out.config.params
    (d / "config.txt").write_text(
        f"n={out.n}\nm={out.config.m}\nK={p.K}\nM={p.M}\neps={p.eps}\nmode={p.mode}\n"
        f"nodes_used={out.nodes['nodes_used']}\n"
    )


def read_bundle(directory: str | Path) -> ReductionOutput:
    d = Path(directory)
    game = loads_sparse((d / "game.sparse").read_text())
    circuit = loads_circuit((d / "circuit.bmc").read_text())
    cfg = dict(ln.split("=", 1) for ln in (d / "config.txt").read_text().split())
    config = ReductionConfig(int(cfg["n"]), int(cfg["m"]), game.params)
    nodes: dict[str, int] = {}
    for ln in (d / "nodes.map").read_text().splitlines():
        tok = ln.split()
        if tok:
            nodes[tok[1]] = int(tok[4])
    nodes["nodes_used"] = int(cfg["nodes_used"])
    return ReductionOutput(config, circuit, game, nodes)
