"""Composition of coloring transforms that reshapes a 2-dimensional
instance into one with m coordinates of size 2^l each, plus the trace
format used to replay and decode it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .circuit import BrouwerCircuit
from .coloring import WellBehaved
from .grid import GridBounds, Point
from .transforms import (
    ColoringTriple,
    l1_decode,
    l1_pad,
    l2_add,
    l2_decode,
    l3_decode,
    l3_snake,
    make_triple,
    snake_size,
)


@dataclass(frozen=True)
class Step:
    kind: str
    args: tuple[int, ...]

    def __post_init__(self) -> None:
        arity = {"L1": 2, "L2": 1, "L3": 3}.get(self.kind)
        if arity is None or len(self.args) != arity:
            raise ValueError(f"bad step {self.kind} {self.args}")

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.args)])

    def output_bounds(self, r: Sequence[int]) -> tuple[int, ...]:
        r = list(r)
        if self.kind == "L1":
            t, u = self.args
            r[t - 1] = u
        elif self.kind == "L2":
            r.append(self.args[0])
        else:
            t, a, b = self.args
            if r[t - 1] != snake_size(a, b):
                raise ValueError(f"snake step {self} does not match r_t = {r[t - 1]}")
            r[t - 1] = a + 5
            r.append(4 * b + 3)
        return tuple(r)


def apply_step(T: ColoringTriple, step: Step) -> ColoringTriple:
    if step.kind == "L1":
        t, u = step.args
        return l1_pad(T, t, u, allow_equal=True)
    if step.kind == "L2":
        return l2_add(T, step.args[0])
    return l3_snake(T, *step.args)


def decode_step(T: ColoringTriple, step: Step, pts: Sequence[Point], target: ColoringTriple | None = None) -> list[Point]:
    if step.kind == "L1":
        return l1_decode(T, *step.args, pts, target=target)
    if step.kind == "L2":
        return l2_decode(T, step.args[0], pts, target=target)
    return l3_decode(T, *step.args, pts, target=target)


@dataclass
class TransformTrace:
    base: GridBounds
    steps: list[Step] = field(default_factory=list)

    def shapes(self) -> list[tuple[int, ...]]:
        """Grid bounds before the first step and after every step."""
        out = [self.base.r]
        for s in self.steps:
            out.append(s.output_bounds(out[-1]))
        return out

    def dumps(self) -> str:
        lines = [f"base d={self.base.d} r={','.join(map(str, self.base.r))}"]
        lines.extend(str(s) for s in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "TransformTrace":
        lines = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0][0] != "base":
            raise ValueError("trace must start with a base line")
        fields = dict(tok.split("=", 1) for tok in lines[0][1:])
        base = GridBounds(tuple(int(x) for x in fields["r"].split(",")))
        if int(fields["d"]) != base.d:
            raise ValueError("base dimension disagrees with bounds")
        trace = cls(base, [Step(tok[0], tuple(int(x) for x in tok[1:])) for tok in lines[1:]])
        trace.shapes()
        return trace


@dataclass(frozen=True)
class PipelinePlan:
    n: int
    l: int
    m_prime: int
    m: int
    trace: TransformTrace


def plan_pipeline(n: int, f: WellBehaved) -> PipelinePlan:
    """Steps taking the (2, (2^n, 2^n)) grid to m coordinates of size 2^l,
    with l = f(11n) and m = ceil(11n / l)."""
    f.check(11 * n)
    l = f(11 * n)
    mp = math.ceil(n / (l - 2))
    m = math.ceil(11 * n / l)
    if mp < 6:
        raise ValueError(f"ceil(n/(l-2)) = {mp} < 6; n = {n} is too small for l = {l}")
    top = 1 << l
    b = (1 << (l - 2)) - 1
    stretch = (1 << (l - 1)) - 1
    trace = TransformTrace(GridBounds((1 << n, 1 << n)))
    r = list(trace.base.r)

    def push(step: Step) -> None:
        nonlocal r
        r = list(step.output_bounds(r))
        trace.steps.append(step)

    for c in (1, 2):
        push(Step("L1", (c, 1 << (mp * (l - 2)))))
        for t in range(mp - 5):
            a = (1 << ((mp - t - 1) * (l - 2))) - 5
            push(Step("L1", (c, a * stretch + 5)))
            push(Step("L3", (c, a, b)))
            push(Step("L1", (len(r), top)))
        while r[c - 1] > top:
            k = -(-(r[c - 1] - 5) // stretch) + 5
            push(Step("L1", (c, (k - 5) * stretch + 5)))
            push(Step("L3", (c, k - 5, b)))
            push(Step("L1", (len(r), top)))
        push(Step("L1", (c, top)))
    if len(r) > m:
        raise ValueError(f"pipeline reached dimension {len(r)} > m = {m}")
    while len(r) < m:
        push(Step("L2", (top,)))
    assert r == [top] * m
    return PipelinePlan(n, l, mp, m, trace)


def replay(base: BrouwerCircuit, trace: TransformTrace, validate_samples: int = 0, seed: int = 0) -> list[ColoringTriple]:
    """Every intermediate triple, starting with the base."""
    if base.bounds != trace.base:
        raise ValueError(f"base circuit grid {base.bounds.r} differs from trace base {trace.base.r}")
    triples = [make_triple(base, validate=validate_samples > 0, samples=validate_samples, seed=seed)]
    for step in trace.steps:
        T = apply_step(triples[-1], step)
        if validate_samples:
            T.check(mode="sampled", samples=validate_samples, seed=seed)
        triples.append(T)
    return triples


def pipeline_build(base: BrouwerCircuit, n: int, f: WellBehaved, validate_samples: int = 0) -> tuple[list[ColoringTriple], TransformTrace]:
    plan = plan_pipeline(n, f)
    return replay(base, plan.trace, validate_samples), plan.trace


def pipeline_decode(triples: Sequence[ColoringTriple], trace: TransformTrace, pts: Sequence[Point]) -> list[Point]:
    """Pull a panchromatic set of the final triple back to the base triple."""
    if len(triples) != len(trace.steps) + 1:
        raise ValueError("need one triple per step plus the base")
    cur = [tuple(p) for p in pts]
    for k in range(len(trace.steps) - 1, -1, -1):
        cur = decode_step(triples[k], trace.steps[k], cur, target=triples[k + 1])
    return cur
