"""Gadget games: a 2K x 2K prototype whose equilibria spread mass evenly
over K node pairs, plus small payoff modifications that make the value
of one arithmetic node track a function of others.

Indices in this module are 1-based, matching the node-pair layout: node v
owns strategies 2v-1 (its value) and 2v.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .games import BimatrixGame, MixedProfile, format_rational, to_fraction

KINDS = {
    # kind: (number of inputs, needs zeta)
    "plus": (2, False),
    "const": (0, True),
    "scale": (1, True),
    "copy": (1, False),
    "minus": (2, False),
    "less": (2, False),
    "or": (2, False),
    "and": (2, False),
    "not": (1, False),
}
LOGIC_KINDS = {"or", "and", "not"}


class GadgetError(ValueError):
    pass


@dataclass(frozen=True)
class PrototypeParams:
    K: int
    M: Fraction
    eps: Fraction
    mode: str = "test"

    def __post_init__(self) -> None:
        object.__setattr__(self, "M", to_fraction(self.M))
        object.__setattr__(self, "eps", to_fraction(self.eps))
        if self.K < 1:
            raise GadgetError("K must be positive")
        if not 0 < self.eps:
            raise GadgetError("eps must be positive")
        if self.M * self.eps < 2:
            raise GadgetError(f"need M >= 2/eps (M = {self.M}, eps = {self.eps})")
        if self.M <= 2 * self.K:
            raise GadgetError(f"need M/K > 2 (M = {self.M}, K = {self.K})")

    @classmethod
    def full(cls, m: int) -> "PrototypeParams":
        """K = 2^(6m), eps = 1/K^3, M = 2K^3."""
        K = 1 << (6 * m)
        return cls(K, Fraction(2 * K ** 3), Fraction(1, K ** 3), "full")

    @classmethod
    def test(cls, K: int, eps=None, M=None) -> "PrototypeParams":
        eps = Fraction(1, K ** 3) if eps is None else to_fraction(eps)
        M = max(Fraction(2) / eps, Fraction(2 * K + 1)) if M is None else to_fraction(M)
        return cls(K, M, eps, "test")

    @property
    def N(self) -> int:
        return 2 * self.K

    @property
    def capacity(self) -> Fraction:
        return Fraction(1, self.K)


def prototype_entry(params: PrototypeParams, i: int, j: int) -> tuple[Fraction, Fraction]:
    """(A*, B*) at 1-based (i, j): +-M on the 2x2 diagonal blocks, else 0."""
    if (i + 1) // 2 == (j + 1) // 2:
        return params.M, -params.M
    return Fraction(0), Fraction(0)


@dataclass(frozen=True)
class GadgetInstance:
    kind: str
    inputs: tuple[int, ...]
    output: int
    internal: int
    zeta: Fraction | None = None

    def __post_init__(self) -> None:
        arity = KINDS.get(self.kind)
        if arity is None:
            raise GadgetError(f"unknown gadget kind {self.kind!r}")
        object.__setattr__(self, "inputs", tuple(int(v) for v in self.inputs))
        if len(self.inputs) != arity[0]:
            raise GadgetError(f"{self.kind} takes {arity[0]} inputs")
        if arity[1]:
            if self.zeta is None:
                raise GadgetError(f"{self.kind} needs a constant")
            object.__setattr__(self, "zeta", to_fraction(self.zeta))
        elif self.zeta is not None:
            raise GadgetError(f"{self.kind} takes no constant")
        if self.output in self.inputs:
            raise GadgetError("output node also used as input")
        if len(set(self.inputs)) != len(self.inputs):
            raise GadgetError("repeated input node")

    def dumps(self) -> str:
        out = f"gadget {self.kind} in={','.join(map(str, self.inputs))} out={self.output} internal={self.internal}"
        if self.zeta is not None:
            out += f" zeta={format_rational(self.zeta)}"
        return out


Cell = tuple[int, int]


@dataclass
class Deltas:
    A: dict[Cell, Fraction] = field(default_factory=dict)
    B: dict[Cell, Fraction] = field(default_factory=dict)
    B_col: dict[int, Fraction] = field(default_factory=dict)


def gadget_deltas(g: GadgetInstance, params: PrototypeParams) -> Deltas:
    """Payoff additions made by one gadget."""
    K = params.K
    w = g.internal
    c1, c2 = 2 * w - 1, 2 * w
    dl = Deltas()
    one = Fraction(1)
    o = g.output
    ins = g.inputs
    if g.kind == "plus":
        dl.B[(2 * ins[0] - 1, c1)] = one
        dl.B[(2 * ins[1] - 1, c1)] = one
        dl.B[(2 * o - 1, c2)] = one
        dl.A[(2 * o - 1, c1)] = one
        dl.A[(2 * o, c2)] = one
    elif g.kind == "const":
        dl.B[(2 * o - 1, c1)] = one
        dl.B_col[c2] = g.zeta
        dl.A[(2 * o - 1, c2)] = one
        dl.A[(2 * o, c1)] = one
    elif g.kind in ("scale", "copy"):
        z = one if g.kind == "copy" else g.zeta
        dl.B[(2 * ins[0] - 1, c1)] = z
        dl.B[(2 * o - 1, c2)] = one
        dl.A[(2 * o - 1, c1)] = one
        dl.A[(2 * o, c2)] = one
    elif g.kind == "minus":
        dl.B[(2 * ins[0] - 1, c1)] = one
        dl.B[(2 * ins[1] - 1, c2)] = one
        dl.B[(2 * o - 1, c2)] = one
        dl.A[(2 * o - 1, c1)] = one
        dl.A[(2 * o, c2)] = one
    elif g.kind == "less":
        dl.B[(2 * ins[0] - 1, c1)] = one
        dl.B[(2 * ins[1] - 1, c2)] = one
        dl.A[(2 * o - 1, c2)] = one
        dl.A[(2 * o, c1)] = one
    elif g.kind in ("or", "and"):
        dl.B[(2 * ins[0] - 1, c1)] = one
        dl.B[(2 * ins[1] - 1, c1)] = one
        dl.B_col[c2] = Fraction(1 if g.kind == "or" else 3, 2 * K)
        dl.A[(2 * o - 1, c1)] = one
        dl.A[(2 * o, c2)] = one
    elif g.kind == "not":
        dl.B[(2 * ins[0] - 1, c1)] = one
        dl.B[(2 * ins[0], c2)] = one
        dl.A[(2 * o - 1, c2)] = one
        dl.A[(2 * o, c1)] = one
    return dl


class SparseGame:
    """Prototype plus gadget deltas, stored without densifying.

    B_col holds additions applied to every row of a column.
    """

    def __init__(self, params: PrototypeParams):
        self.params = params
        self.dA: dict[Cell, Fraction] = {}
        self.dB: dict[Cell, Fraction] = {}
        self.dB_col: dict[int, Fraction] = {}
        self.dB_cols_touched: set[int] = set()  # columns with a single-cell B delta
        self.gadgets: list[GadgetInstance] = []
        self.driven: set[int] = set()
        self.internals: set[int] = set()

    def A(self, i: int, j: int) -> Fraction:
        return prototype_entry(self.params, i, j)[0] + self.dA.get((i, j), Fraction(0))

    def B(self, i: int, j: int) -> Fraction:
        base = prototype_entry(self.params, i, j)[1]
        return base + self.dB.get((i, j), Fraction(0)) + self.dB_col.get(j, Fraction(0))

    def dense(self) -> BimatrixGame:
        N = self.params.N
        if N > 64:
            raise GadgetError(f"refusing to densify a {N} x {N} game")
        r = range(1, N + 1)
        return BimatrixGame([[self.A(i, j) for j in r] for i in r], [[self.B(i, j) for j in r] for i in r])


def check_gadget(game: SparseGame, g: GadgetInstance) -> None:
    p = game.params
    for v in (*g.inputs, g.output):
        if not 1 <= v <= p.K:
            raise GadgetError(f"arithmetic node {v} outside 1..{p.K}")
    if not 1 <= g.internal <= p.K:
        raise GadgetError(f"internal node {g.internal} outside 1..{p.K}")
    if g.output in game.driven:
        raise GadgetError(f"node {g.output} already has a driving gadget")
    if g.internal in game.internals:
        raise GadgetError(f"internal node {g.internal} already used")
    if g.kind == "const" and not 0 <= g.zeta <= p.capacity - p.eps:
        raise GadgetError(f"constant {g.zeta} outside [0, 1/K - eps]")
    if g.kind == "scale" and not 0 <= g.zeta <= 1:
        raise GadgetError(f"scale factor {g.zeta} outside [0, 1]")


def insert_gadget(game: SparseGame, g: GadgetInstance) -> None:
    check_gadget(game, g)
    dl = gadget_deltas(g, game.params)
    for cell in dl.A:
        if cell in game.dA:
            raise GadgetError(f"A cell {cell} modified twice")
    for cell in dl.B:
        if cell in game.dB or cell[1] in game.dB_col or cell[1] in dl.B_col:
            raise GadgetError(f"B cell {cell} modified twice")
    for col in dl.B_col:
        if col in game.dB_col or col in game.dB_cols_touched:
            raise GadgetError(f"B column {col} modified twice")
    game.dA.update(dl.A)
    game.dB.update(dl.B)
    game.dB_cols_touched.update(j for _, j in dl.B)
    game.dB_col.update(dl.B_col)
    game.gadgets.append(g)
    game.driven.add(g.output)
    game.internals.add(g.internal)


def in_class_L(game: SparseGame) -> bool:
    vals = list(game.dA.values()) + list(game.dB.values()) + list(game.dB_col.values())
    return all(0 <= v <= 1 for v in vals) and not registry_mismatches(game)


def registry_mismatches(game: SparseGame) -> list[str]:
    """Differences between stored deltas and those the registry implies,
    including cells claimed by more than one gadget."""
    want_A: dict[Cell, Fraction] = {}
    want_B: dict[Cell, Fraction] = {}
    want_col: dict[int, Fraction] = {}
    problems: list[str] = []
    outs: set[int] = set()
    ints: set[int] = set()
    for g in game.gadgets:
        if g.output in outs:
            problems.append(f"node {g.output} driven twice")
        if g.internal in ints:
            problems.append(f"internal node {g.internal} reused")
        outs.add(g.output)
        ints.add(g.internal)
        dl = gadget_deltas(g, game.params)
        for src, dst, name in ((dl.A, want_A, "A"), (dl.B, want_B, "B")):
            for cell, v in src.items():
                if cell in dst:
                    problems.append(f"{name} cell {cell} modified twice")
                dst[cell] = v
        for col, v in dl.B_col.items():
            if col in want_col:
                problems.append(f"B column {col} modified twice")
            want_col[col] = v
    for (i, j) in want_B:
        if j in want_col:
            problems.append(f"B cell {(i, j)} lies in a fully modified column")
    for name, have, want in (("A", game.dA, want_A), ("B", game.dB, want_B), ("B column", game.dB_col, want_col)):
        for key in sorted(set(have) | set(want)):
            if have.get(key) != want.get(key):
                problems.append(f"{name} {key}: stored {have.get(key)}, registry {want.get(key)}")
    return problems


# profile views ------------------------------------------------------------------

def value(vec: Sequence[Fraction] | Mapping[int, Fraction], v: int) -> Fraction:
    """Mass on strategy 2v-1 (1-based) of a dense vector or sparse map."""
    if isinstance(vec, Mapping):
        return vec.get(2 * v - 1, Fraction(0))
    return vec[2 * v - 2]


def capacity(vec: Sequence[Fraction] | Mapping[int, Fraction], v: int) -> Fraction:
    if isinstance(vec, Mapping):
        return vec.get(2 * v - 1, Fraction(0)) + vec.get(2 * v, Fraction(0))
    return vec[2 * v - 2] + vec[2 * v - 1]


@dataclass(frozen=True)
class ContractResult:
    ok: bool
    residual: Fraction
    applicable: bool = True


def gadget_contract_check(g: GadgetInstance, prof: MixedProfile, eps) -> ContractResult:
    """Whether the gadget's output respects its guarantee at the profile.

    residual is the amount by which the guarantee is missed (0 when met).
    Conditional guarantees whose premise fails are reported as met and not
    applicable.
    """
    eps = to_fraction(eps)
    x = prof.x
    val = [value(x, v) for v in g.inputs]
    out, cap = value(x, g.output), capacity(x, g.output)
    caps = [capacity(x, v) for v in g.inputs]
    zero = Fraction(0)

    def band(target: Fraction) -> ContractResult:
        r = max(abs(out - target) - eps, zero)
        return ContractResult(r == 0, r)

    def exact(target: Fraction) -> ContractResult:
        r = abs(out - target)
        return ContractResult(r == 0, r)

    if g.kind == "plus":
        return band(min(val[0] + val[1], cap))
    if g.kind == "const":
        return band(g.zeta)
    if g.kind in ("scale", "copy"):
        z = Fraction(1) if g.kind == "copy" else g.zeta
        return band(min(z * val[0], cap))
    if g.kind == "minus":
        diff = val[0] - val[1]
        lo, hi = min(diff, cap) - eps, max(diff, zero) + eps
        r = max(lo - out, out - hi, zero)
        return ContractResult(r == 0, r)
    if g.kind == "less":
        if val[0] < val[1] - eps:
            return exact(cap)
        if val[0] > val[1] + eps:
            return exact(zero)
    elif g.kind == "or":
        if val[0] == caps[0] or val[1] == caps[1]:
            return exact(cap)
        if val[0] == 0 and val[1] == 0:
            return exact(zero)
    elif g.kind == "and":
        if val[0] == 0 or val[1] == 0:
            return exact(zero)
        if val[0] == caps[0] and val[1] == caps[1]:
            return exact(cap)
    elif g.kind == "not":
        if val[0] == caps[0]:
            return exact(zero)
        if val[0] == 0:
            return exact(cap)
    return ContractResult(True, zero, applicable=False)


def capacity_deviation(prof: MixedProfile, params: PrototypeParams) -> Fraction:
    """max over nodes of |x_C[v] - 1/K|, over both players."""
    c = params.capacity
    return max(
        abs(capacity(vec, v) - c) for vec in (prof.x, prof.y) for v in range(1, params.K + 1)
    )


def build_minimal_game(kind: str, params: PrototypeParams | None = None, zeta=None) -> tuple[SparseGame, GadgetInstance]:
    """One gadget on nodes 1..3 with internal node 1 in an otherwise bare prototype."""
    params = params or PrototypeParams.test(4)
    n_in = KINDS[kind][0]
    if KINDS[kind][1] and zeta is None:
        zeta = params.capacity - 2 * params.eps if kind == "const" else Fraction(1, 2)
    g = GadgetInstance(kind, tuple(range(1, n_in + 1)), n_in + 1, 1, zeta)
    game = SparseGame(params)
    insert_gadget(game, g)
    return game, g


# idealised forward evaluation ---------------------------------------------------

@dataclass
class ForwardResult:
    values: dict[int, Fraction]
    brittle: set[int]
    converged: bool
    rounds: int


def _eval_gadget(g: GadgetInstance, ins: list[Fraction], cap: Fraction) -> Fraction | None:
    """Exact-arithmetic output; None marks a comparator tie."""
    zero = Fraction(0)
    if g.kind == "plus":
        return min(ins[0] + ins[1], cap)
    if g.kind == "const":
        return g.zeta
    if g.kind == "scale":
        return min(g.zeta * ins[0], cap)
    if g.kind == "copy":
        return min(ins[0], cap)
    if g.kind == "minus":
        return min(max(ins[0] - ins[1], zero), cap)
    if g.kind == "less":
        if ins[0] == ins[1]:
            return None
        return cap if ins[0] < ins[1] else zero
    bits = []
    for v in ins:
        if v not in (zero, cap):
            raise GadgetError(f"logic gadget {g.kind} got non-boolean input {v}")
        bits.append(v == cap)
    if g.kind == "or":
        res = bits[0] or bits[1]
    elif g.kind == "and":
        res = bits[0] and bits[1]
    else:
        res = not bits[0]
    return cap if res else zero


def forward_eval(
    gadgets: Iterable[GadgetInstance],
    sources: Mapping[int, Fraction],
    K: int,
    max_rounds: int = 64,
) -> ForwardResult:
    """Propagate values through a gadget network with eps = 0 and all
    capacities 1/K.

    Source assignments override the gadget driving that node, which is how
    feedback edges are cut.  Comparator ties mark the node brittle; brittle
    inputs make outputs brittle.  Remaining cycles are iterated from zero.
    """
    cap = Fraction(1, K)
    values: dict[int, Fraction] = {v: to_fraction(x) for v, x in sources.items()}
    brittle: set[int] = set()
    active = [g for g in gadgets if g.output not in values]
    driver = {g.output: g for g in active}
    # Kahn order over gadgets whose inputs are sources or earlier outputs
    pending = {g.output: sum(1 for v in g.inputs if v in driver) for g in active}
    users: dict[int, list[GadgetInstance]] = {}
    for g in active:
        for v in g.inputs:
            users.setdefault(v, []).append(g)
    ready = [g for g in active if pending[g.output] == 0]
    order: list[GadgetInstance] = []
    while ready:
        g = ready.pop()
        order.append(g)
        for h in users.get(g.output, ()):
            pending[h.output] -= 1
            if pending[h.output] == 0:
                ready.append(h)
    cyclic = [g for g in active if pending[g.output] > 0]

    def run(g: GadgetInstance) -> None:
        if any(v in brittle for v in g.inputs):
            brittle.add(g.output)
            values.pop(g.output, None)
            return
        ins = [values.get(v, Fraction(0)) for v in g.inputs]
        res = _eval_gadget(g, ins, cap)
        if res is None:
            brittle.add(g.output)
            values.pop(g.output, None)
        else:
            brittle.discard(g.output)
            values[g.output] = res

    for g in order:
        run(g)
    converged, rounds = True, 0
    if cyclic:
        converged = False
        for rounds in range(1, max_rounds + 1):
            before = (dict(values), set(brittle))
            for g in cyclic:
                run(g)
            for g in order:
                run(g)
            if (values, brittle) == before:
                converged = True
                break
    return ForwardResult(values, brittle, converged, rounds)


# sparse game text format --------------------------------------------------------

def dumps_sparse(game: SparseGame) -> str:
    p = game.params
    lines = [f"proto K={p.K} M={format_rational(p.M)} eps={format_rational(p.eps)} mode={p.mode}"]
    lines += [f"A {i} {j} {format_rational(v)}" for (i, j), v in sorted(game.dA.items())]
    lines += [f"B {i} {j} {format_rational(v)}" for (i, j), v in sorted(game.dB.items())]
    lines += [f"B * {j} {format_rational(v)}" for j, v in sorted(game.dB_col.items())]
    lines += [g.dumps() for g in game.gadgets]
    return "\n".join(lines) + "\n"


def loads_sparse(text: str) -> SparseGame:
    """Read deltas and registry verbatim; consistency is left to validation."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "proto":
        raise ValueError("sparse game must start with a proto line")
    kv = dict(t.split("=", 1) for t in lines[0][1:])
    params = PrototypeParams(int(kv["K"]), Fraction(kv["M"]), Fraction(kv["eps"]), kv.get("mode", "test"))
    game = SparseGame(params)
    for tok in lines[1:]:
        if tok[0] == "A":
            game.dA[(int(tok[1]), int(tok[2]))] = Fraction(tok[3])
        elif tok[0] == "B" and tok[1] == "*":
            game.dB_col[int(tok[2])] = Fraction(tok[3])
        elif tok[0] == "B":
            game.dB[(int(tok[1]), int(tok[2]))] = Fraction(tok[3])
            game.dB_cols_touched.add(int(tok[2]))
        elif tok[0] == "gadget":
            kv = dict(t.split("=", 1) for t in tok[2:])
            ins = tuple(int(v) for v in kv["in"].split(",") if v)
            zeta = Fraction(kv["zeta"]) if "zeta" in kv else None
            g = GadgetInstance(tok[1], ins, int(kv["out"]), int(kv["internal"]), zeta)
            game.gadgets.append(g)
            game.driven.add(g.output)
            game.internals.add(g.internal)
        else:
            raise ValueError(f"unknown line {' '.join(tok)!r}")
    return game
