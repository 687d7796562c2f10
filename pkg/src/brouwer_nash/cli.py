"""Command-line entry points.

Exit status: 0 on success, 1 when an input or a checked property fails
validation (including bad flags), 2 when an internal invariant breaks.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .circuit import dumps_circuit, loads_circuit
from .coloring import (
    InvalidPattern,
    check_validity,
    color_at,
    get_f,
    instance_shape,
    is_panchromatic,
    make_corner_circuit,
    random_valid_circuit,
)
from .fixedpoint import SolverError, brute_force_panchromatic, path_follow
from .gadgets import GadgetError, PrototypeParams
from .games import (
    ProfileError,
    approx_to_wsne,
    dumps_game,
    dumps_profile,
    format_rational,
    loads_game,
    loads_profile,
    normalize_positive,
    verify_approx_ne,
    verify_wsne,
)
from .grid import GridBounds
from .pipeline import Step, TransformTrace, apply_step, pipeline_decode, plan_pipeline, replay
from .reduction import (
    build_reduction,
    check_boundary_conditions,
    decode_equilibrium,
    read_bundle,
    synthetic_profile,
    validate_structure,
    write_bundle,
)
from .smoothed import SOLVERS, smoothed_bench, smoothed_for_approximation
from .solvers import SolverLimit, lemke_howson, support_enumeration_solve
from .transforms import DecodeError, make_triple


class CheckFailed(Exception):
    """A checked property does not hold; reported with exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _points(text: str) -> list[tuple[int, ...]]:
    return [_ints(p) for p in text.split(";") if p.strip()]


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None


def _fmt_point(p: Sequence) -> str:
    return "(" + ",".join(str(v) for v in p) + ")"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_circuit(path: str):
    return loads_circuit(Path(path).read_text())


# circuit -----------------------------------------------------------------------

def cmd_circuit_gen(a) -> None:
    if a.n is not None:
        bounds = instance_shape(a.n, get_f(a.f))
    elif a.r is not None:
        bounds = GridBounds(a.r)
    else:
        raise ValueError("give --r or --n")
    if a.family == "corner":
        c = make_corner_circuit(bounds, mode=a.mode)
    else:
        c = random_valid_circuit(bounds, a.seed)
    print(f"seed {a.seed}")
    print(f"grid {','.join(map(str, bounds.r))} size {c.size}")
    Path(a.output).write_text(dumps_circuit(c))


def cmd_circuit_check(a) -> None:
    c = _load_circuit(a.circuit)
    bad = check_validity(c, mode=a.mode, samples=a.samples, seed=a.seed, limit=a.limit)
    print(f"grid {','.join(map(str, c.bounds.r))} size {c.size}")
    for v in bad:
        print(f"violation {_fmt_point(v.point)} {v.reason}")
    if bad:
        raise CheckFailed("circuit is not valid")
    print("PASS")


def cmd_circuit_color(a) -> None:
    c = _load_circuit(a.circuit)
    for p in a.points:
        if not c.bounds.contains(p):
            raise ValueError(f"point {p} outside the grid {c.bounds.r}")
        try:
            print(f"{_fmt_point(p)} {color_at(c, p)}")
        except InvalidPattern as e:
            raise CheckFailed(f"{_fmt_point(p)}: {e}") from None


# fixed points ------------------------------------------------------------------------

def cmd_fp_brute(a) -> None:
    c = _load_circuit(a.circuit)
    found = brute_force_panchromatic(c, cap=a.cap)
    print(f"count {len(found)}")
    for s in found:
        print(" ".join(_fmt_point(p) for p in s))


def cmd_fp_walk(a) -> None:
    c = _load_circuit(a.circuit)
    trace = [] if a.trace else None
    res = path_follow(c, max_steps=a.max_steps, trace=trace)
    if not is_panchromatic(c, res.points):
        raise SolverError("walk ended on a set that is not panchromatic")
    print(f"steps {res.steps}")
    print("set " + " ".join(_fmt_point(p) for p in res.points))
    if trace is not None:
        Path(a.trace).write_text("".join(f"{_fmt_point(s.base)} {','.join(map(str, s.perm))}\n" for s in trace))


# transforms --------------------------------------------------------------------------

def cmd_transform_apply(a) -> None:
    T = make_triple(_load_circuit(a.circuit), validate=not a.no_validate, samples=a.samples)
    for text in a.step:
        tok = text.split()
        step = Step(tok[0], tuple(int(t) for t in tok[1:]))
        T = apply_step(T, step)
        print(f"{step} -> {','.join(map(str, T.r))}")
    Path(a.output).write_text(dumps_circuit(T.circuit))


def cmd_transform_pipeline(a) -> None:
    plan = plan_pipeline(a.n, get_f(a.f))
    print(f"l {plan.l} m' {plan.m_prime} m {plan.m} steps {len(plan.trace.steps)}")
    Path(a.trace).write_text(plan.trace.dumps())
    if a.circuit:
        triples = replay(_load_circuit(a.circuit), plan.trace, validate_samples=a.samples)
        print(f"final grid {','.join(map(str, triples[-1].r))} size {triples[-1].circuit.size}")
        if a.output:
            Path(a.output).write_text(dumps_circuit(triples[-1].circuit))


def cmd_transform_decode(a) -> None:
    trace = TransformTrace.loads(Path(a.trace).read_text())
    triples = replay(_load_circuit(a.circuit), trace)
    final = triples[-1].circuit
    if a.points:
        pts = a.points
    else:
        res = path_follow(final)
        print(f"walk steps {res.steps}")
        pts = list(res.points)
    print("final " + " ".join(_fmt_point(p) for p in pts))
    base = pipeline_decode(triples, trace, pts)
    print("base " + " ".join(_fmt_point(p) for p in base))
    if not is_panchromatic(triples[0].circuit, base):
        raise SolverError("decoded set is not panchromatic")


# games -------------------------------------------------------------------------------

def _load_game(path: str):
    return loads_game(Path(path).read_text())


def cmd_game_solve(a) -> None:
    g = _load_game(a.game)
    if a.method == "lh":
        res = lemke_howson(g, a.label)
        print(f"pivots {res.pivots}")
        sys.stdout.write(dumps_profile(res.profile))
    else:
        eqs = support_enumeration_solve(g)
        print(f"count {len(eqs)}")
        for p in eqs:
            sys.stdout.write(dumps_profile(p))


def cmd_game_verify(a) -> None:
    g = _load_game(a.game)
    prof = loads_profile(Path(a.profile).read_text())
    check = verify_wsne if a.kind == "wsne" else verify_approx_ne
    w = check(g, prof, a.eps)
    if w.ok:
        print("PASS")
        return
    who = "row" if w.player == 1 else "column"
    detail = f"player {who} best {w.better + 1}"
    if w.worse is not None:
        detail += f" played {w.worse + 1}"
    print(f"FAIL {detail} margin {format_rational(w.margin)}")
    raise CheckFailed(f"profile is not an {a.eps}-{a.kind}")


def cmd_game_convert(a) -> None:
    g = _load_game(a.game)
    prof = loads_profile(Path(a.profile).read_text())
    out = approx_to_wsne(g, prof, a.eps, check_precondition=not a.no_precondition)
    _emit(dumps_profile(out), a.output)


def cmd_game_normalize(a) -> None:
    _emit(dumps_game(normalize_positive(_load_game(a.game), a.bound)), a.output)


# reduction ---------------------------------------------------------------------------

def cmd_reduce_build(a) -> None:
    c = _load_circuit(a.circuit)
    params = PrototypeParams.test(a.K) if a.K else None
    out = build_reduction(c, params)
    p = out.config.params
    print(f"n {out.n} m {out.config.m} K {p.K} N {p.N} gadgets {len(out.game.gadgets)} nodes {out.nodes['nodes_used']}")
    write_bundle(out, a.output)


def cmd_reduce_validate(a) -> None:
    out = read_bundle(a.bundle)
    rep = validate_structure(out, spot_checks=a.spot_checks, seed=a.seed)
    print(f"gadgets {rep.gadgets} nodes {rep.nodes_used} internals {rep.internals_used}")
    for msg in rep.problems:
        print(f"problem {msg}")
    viol = check_boundary_conditions(out.circuit, seed=a.seed) if a.boundary else []
    for v in viol:
        print(f"boundary clause {v.clause} {_fmt_point(v.point)} {v.detail}")
    if rep.problems or viol:
        raise CheckFailed("structure validation failed")
    print("PASS")


def cmd_reduce_decode(a) -> None:
    out = read_bundle(a.bundle)
    if a.start:
        x, brittle = synthetic_profile(out, a.start)
        print(f"brittle {len(brittle)}")
    elif a.profile:
        x = {}
        for ln in Path(a.profile).read_text().splitlines():
            tok = ln.split()
            if tok:
                x[int(tok[0])] = Fraction(tok[1])
    else:
        raise ValueError("give --profile or --start")
    res = decode_equilibrium(out, x)
    print(f"good {len(res.good)} bad {len(res.bad)}")
    print("Q " + " ".join(_fmt_point(q) for q in res.Q))
    print("tally " + " ".join(map(str, res.tally)))
    if not res.panchromatic:
        print("FAIL")
        raise CheckFailed("decoded points are not panchromatic")
    print("witness " + " ".join(_fmt_point(q) for q in res.witness))
    print("PASS")


# smoothed ----------------------------------------------------------------------------

def cmd_smooth_run(a) -> None:
    g = _load_game(a.game)
    res = smoothed_for_approximation(g, a.eps, solver=a.solver, seed=a.seed, model=a.model)
    ok = res.approx_ok and res.bound_ok
    print(f"{a.seed} {res.cost} {'ok' if ok else 'FAIL'}")
    sys.stdout.write(dumps_profile(res.profile))
    if not ok:
        raise SolverError("smoothed solution failed its guarantee")


def cmd_smooth_bench(a) -> None:
    games = [_load_game(p) for p in a.games]
    rep = smoothed_bench(games, a.sigma, a.trials, solver=a.solver, seed=a.seed, model=a.model, jobs=a.jobs)
    print(f"seed {a.seed}")
    for ln in rep.lines():
        print(ln)
    for inst, st in rep.per_instance().items():
        print(f"summary {inst} mean {st['mean']:.3f} max {st['max']} trials {st['trials']}")
    if not rep.all_verified:
        raise SolverError("a perturbed game was not solved exactly")


# parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="brouwer-nash", description="Discrete fixed points, their reduction to bimatrix games, and solvers.")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for operations that parallelize")
    top = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def group(name: str, help: str):
        g = top.add_parser(name, help=help)
        return g.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    circ = group("circuit", "Brouwer-mapping circuits")
    p = circ.add_parser("gen", help="write a valid circuit")
    p.add_argument("--family", choices=("corner", "random"), default="corner")
    p.add_argument("--r", type=_ints, help="grid side lengths, e.g. 8,8")
    p.add_argument("--n", type=int, help="instance size; grid from --f")
    p.add_argument("--f", default="const3")
    p.add_argument("--mode", choices=("auto", "table", "comparator"), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_circuit_gen)
    p = circ.add_parser("check", help="validity check")
    p.add_argument("circuit")
    p.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=10)
    p.set_defaults(func=cmd_circuit_check)
    p = circ.add_parser("color", help="colors of points")
    p.add_argument("circuit")
    p.add_argument("--points", type=_points, required=True, help="e.g. '0,0;3,1'")
    p.set_defaults(func=cmd_circuit_color)

    fp = group("fp", "panchromatic simplices")
    p = fp.add_parser("brute", help="every panchromatic simplex")
    p.add_argument("circuit", nargs="?")
    p.add_argument("--circuit", dest="circuit_flag")
    p.add_argument("--cap", type=int, default=1 << 16)
    p.set_defaults(func=cmd_fp_brute)
    p = fp.add_parser("walk", help="path following from the boundary")
    p.add_argument("circuit", nargs="?")
    p.add_argument("--circuit", dest="circuit_flag")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--trace", help="file receiving one simplex per line")
    p.set_defaults(func=cmd_fp_walk)

    tr = group("transform", "dimension transforms")
    p = tr.add_parser("apply", help="apply steps such as 'L1 1 9', 'L2 7', 'L3 1 2 1'")
    p.add_argument("circuit")
    p.add_argument("--step", action="append", required=True)
    p.add_argument("--no-validate", action="store_true")
    p.add_argument("--samples", type=int, default=512)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_transform_apply)
    p = tr.add_parser("pipeline", help="plan (and optionally run) the full embedding")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", default="const3")
    p.add_argument("--trace", required=True, help="output trace file")
    p.add_argument("--circuit", help="base circuit over (2^n, 2^n)")
    p.add_argument("--samples", type=int, default=0, help="sampled validity checks per stage")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transform_pipeline)
    p = tr.add_parser("decode", help="pull a panchromatic set back through a trace")
    p.add_argument("circuit", help="base circuit")
    p.add_argument("--trace", required=True)
    p.add_argument("--points", type=_points, help="panchromatic set of the final triple; walked if omitted")
    p.set_defaults(func=cmd_transform_decode)

    gm = group("game", "bimatrix games")
    p = gm.add_parser("solve")
    p.add_argument("game")
    p.add_argument("--method", choices=("support", "lh"), default="support")
    p.add_argument("--label", type=int, default=1)
    p.set_defaults(func=cmd_game_solve)
    p = gm.add_parser("verify")
    p.add_argument("game")
    p.add_argument("profile")
    p.add_argument("--eps", type=_rational, default=Fraction(0))
    p.add_argument("--kind", choices=("wsne", "approx"), default="wsne")
    p.set_defaults(func=cmd_game_verify)
    p = gm.add_parser("convert", help="approximate to well-supported")
    p.add_argument("game")
    p.add_argument("profile")
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--no-precondition", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_game_convert)
    p = gm.add_parser("normalize", help="map [-b, b] payoffs to [0, 1]")
    p.add_argument("game")
    p.add_argument("--bound", type=_rational, default=Fraction(1))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_game_normalize)

    rd = group("reduce", "circuit to game reduction")
    p = rd.add_parser("build")
    p.add_argument("circuit")
    p.add_argument("--K", type=int, help="test-mode node budget instead of 2^(6m)")
    p.add_argument("-o", "--output", required=True, help="bundle directory")
    p.set_defaults(func=cmd_reduce_build)
    p = rd.add_parser("validate")
    p.add_argument("bundle")
    p.add_argument("--spot-checks", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boundary", action="store_true", help="also check the face color constraints")
    p.set_defaults(func=cmd_reduce_validate)
    p = rd.add_parser("decode")
    p.add_argument("bundle")
    p.add_argument("--profile", help="sparse row strategy, lines 'index p/q'")
    p.add_argument("--start", type=lambda s: [_rational(t) for t in s.split(",")],
                   help="synthetic profile from these start coordinates in [0, 8]")
    p.set_defaults(func=cmd_reduce_decode)

    sm = group("smooth", "perturbed games")
    p = sm.add_parser("run")
    p.add_argument("game")
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--solver", choices=sorted(SOLVERS), default="lh")
    p.add_argument("--model", choices=("uniform", "gaussian"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_smooth_run)
    p = sm.add_parser("bench")
    p.add_argument("games", nargs="+")
    p.add_argument("--sigma", type=_rational, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--solver", choices=sorted(SOLVERS), default="lh")
    p.add_argument("--model", choices=("uniform", "gaussian"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_smooth_bench)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(a, "circuit_flag", None):
        a.circuit = a.circuit_flag
    if hasattr(a, "circuit") and a.circuit is None and a.group == "fp":
        print("error: a circuit file is required", file=sys.stderr)
        return 1
    try:
        a.func(a)
    except CheckFailed as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (SolverError, AssertionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ProfileError, DecodeError, GadgetError, SolverLimit, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
