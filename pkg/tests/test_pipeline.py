import pytest

from brouwer_nash.coloring import BUILTIN_F, is_panchromatic, make_corner_circuit, random_valid_circuit
from brouwer_nash.fixedpoint import brute_force_panchromatic, path_follow
from brouwer_nash.grid import GridBounds
from brouwer_nash.pipeline import Step, TransformTrace, pipeline_build, pipeline_decode, plan_pipeline, replay
from brouwer_nash.transforms import l1_decode, make_triple, snake_size


def test_plan_for_n6():
    plan = plan_pipeline(6, BUILTIN_F["const3"])
    assert (plan.l, plan.m_prime, plan.m) == (3, 6, 22)
    assert len(plan.trace.steps) == 36
    assert plan.trace.shapes()[-1] == (8,) * 22
    assert plan.trace.base.r == (64, 64)


def test_plan_rejects_small_n():
    with pytest.raises(ValueError):
        plan_pipeline(5, BUILTIN_F["const3"])


def test_every_snake_step_matches_its_side_length():
    plan = plan_pipeline(7, BUILTIN_F["const3"])
    shapes = plan.trace.shapes()
    for before, step in zip(shapes, plan.trace.steps):
        if step.kind == "L3":
            t, a, b = step.args
            assert before[t - 1] == snake_size(a, b)


def test_trace_round_trip():
    trace = plan_pipeline(6, BUILTIN_F["const3"]).trace
    text = trace.dumps()
    again = TransformTrace.loads(text)
    assert again.dumps() == text and again.steps == trace.steps


def test_bad_steps():
    with pytest.raises(ValueError):
        Step("L4", (1,))
    with pytest.raises(ValueError):
        Step("L3", (1, 2, 1)).output_bounds((10,))


def test_identity_trace():
    c = random_valid_circuit(GridBounds((8, 8)), 1)
    triples = replay(c, TransformTrace(c.bounds))
    P = brute_force_panchromatic(c)[0]
    assert pipeline_decode(triples, TransformTrace(c.bounds), P) == list(P)


def test_single_l1_step_delegates():
    c = random_valid_circuit(GridBounds((8, 8)), 2)
    trace = TransformTrace(c.bounds, [Step("L1", (1, 12))])
    triples = replay(c, trace)
    for P in brute_force_panchromatic(triples[-1].circuit):
        assert pipeline_decode(triples, trace, P) == l1_decode(triples[0], 1, 12, P)


def test_two_step_trace_decodes_by_brute_force():
    c = random_valid_circuit(GridBounds((9, 7)), 3)
    trace = TransformTrace(c.bounds, [Step("L1", (1, 11)), Step("L3", (1, 2, 1))])
    triples = replay(c, trace, validate_samples=64)
    assert triples[-1].r == (7, 7, 7)
    found = brute_force_panchromatic(triples[-1].circuit)
    assert found
    for P in found:
        assert is_panchromatic(c, pipeline_decode(triples, trace, P))


def test_full_embedding_end_to_end():
    base = make_corner_circuit(GridBounds((64, 64)))
    triples, trace = pipeline_build(base, 6, BUILTIN_F["const3"])
    final = triples[-1]
    assert final.r == (8,) * 22
    P = path_follow(final.circuit).points
    assert is_panchromatic(base, pipeline_decode(triples, trace, P))


def test_replay_checks_base_grid():
    trace = plan_pipeline(6, BUILTIN_F["const3"]).trace
    with pytest.raises(ValueError):
        replay(make_triple(make_corner_circuit(GridBounds((8, 8)))).circuit, trace)
