from fractions import Fraction as F
from types import SimpleNamespace

import pytest

import oracles
from brouwer_nash.circuit import circuit_from_function
from brouwer_nash.coloring import make_corner_circuit
from brouwer_nash.gadgets import GadgetInstance, PrototypeParams, forward_eval
from brouwer_nash.grid import RED, GridBounds
from brouwer_nash.reduction import (
    _Net,
    build_reduction,
    build_sampling_network,
    check_boundary_conditions,
    color_gap_norm,
    decode_equilibrium,
    is_poorly_positioned,
    is_well_positioned,
    pi_floor,
    read_bundle,
    size_exponent,
    synthetic_profile,
    validate_structure,
    write_bundle,
)

CORNER2 = make_corner_circuit(GridBounds((8, 8)))


@pytest.fixture
def red2():
    return build_reduction(CORNER2)


class TestPositions:
    def test_pi_floor(self):
        assert pi_floor(F(15, 2)) == 7
        assert pi_floor(F(1, 2)) == 0
        assert pi_floor(F(3)) == 2
        assert pi_floor(F(-1)) == 0
        assert pi_floor(F(9)) == 7

    def test_poorly_positioned(self):
        K = 2 ** 18
        assert not is_poorly_positioned(F(7, 2), K)
        assert is_poorly_positioned(F(3), K)
        assert is_poorly_positioned(3 + F(10, K * K), K)
        assert is_well_positioned(3 + F(81, K * K), K)

    def test_size_exponent(self):
        assert size_exponent(SimpleNamespace(size=20)) == 5
        assert size_exponent(SimpleNamespace(size=16)) == 4
        assert size_exponent(SimpleNamespace(size=17)) == 5


class TestBuild:
    def test_full_size_parameters(self, red2):
        assert red2.config.m == size_exponent(CORNER2) == 8
        assert red2.config.params.K == 2 ** 48
        assert red2.samples == 8
        assert red2.sample_node(1, 0) == 1 and red2.sample_node(2, 0) == 2

    def test_requires_side_eight(self):
        with pytest.raises(ValueError):
            build_reduction(make_corner_circuit(GridBounds((8, 7))))

    def test_structure_ok(self, red2):
        rep = validate_structure(red2)
        assert rep.ok, rep.problems[:5]
        assert rep.nodes_used == red2.nodes["nodes_used"] <= red2.config.params.K

    def test_bits_of_a_sampled_value(self):
        """5.5/(8K) reads as the bits 1, 0, 1."""
        net = _Net(PrototypeParams.test(64))
        src = net.node()
        build_sampling_network(net, [src], make_corner_circuit(GridBounds((8,))))
        K = 64
        res = forward_eval(net.game.gadgets, {src: F(11, 16 * K)}, K)
        bits = [res.values[g.output] for g in net.game.gadgets if g.kind == "less"]
        assert bits == [F(1, K), 0, F(1, K)]


class TestValidation:
    def test_flags_double_modification(self, red2):
        red2.game.gadgets.append(red2.game.gadgets[5])
        rep = validate_structure(red2)
        assert not rep.ok
        assert any("modified twice" in p for p in rep.problems)

    def test_flags_large_delta(self, red2):
        cell = next(iter(red2.game.dA))
        red2.game.dA[cell] = F(2)
        rep = validate_structure(red2)
        assert any("outside [0, 1]" in p for p in rep.problems)

    def test_flags_undriven_input(self, red2):
        red2.game.gadgets.append(GadgetInstance("copy", (red2.config.params.K - 1,), red2.config.params.K, red2.config.params.K))
        rep = validate_structure(red2)
        assert any("has no driver" in p for p in rep.problems)


class TestDecode:
    def test_single_red_point(self, red2):
        K = red2.config.params.K
        x = {2 * red2.sample_node(i, k) - 1: F(7, 2) / (8 * K) for k in range(8) for i in (1, 2)}
        res = decode_equilibrium(red2, x)
        assert res.Q == [(3, 3)]
        assert res.tally == [0, 0, len(res.good)] and len(res.good) == 8
        assert not res.panchromatic and res.witness is None

    def test_integer_coordinate_is_bad(self, red2):
        K = red2.config.params.K
        x = {2 * red2.sample_node(i, k) - 1: F(7, 2) / (8 * K) for k in range(8) for i in (1, 2)}
        x[2 * red2.sample_node(2, 4) - 1] = F(3) / (8 * K)
        res = decode_equilibrium(red2, x)
        assert res.bad == [4] and len(res.good) == 7

    def test_panchromatic_witness(self, red2):
        K = red2.config.params.K
        # samples around the corner (0,0): colors 2 at (0,0), 1 at (0,1), red at (1,1)
        spots = [(F(1, 2), F(1, 2))] * 3 + [(F(1, 2), F(3, 2))] * 3 + [(F(3, 2), F(3, 2))] * 2
        x = {}
        for k, p in enumerate(spots):
            for i in (1, 2):
                x[2 * red2.sample_node(i, k) - 1] = p[i - 1] / (8 * K)
        res = decode_equilibrium(red2, x)
        assert res.panchromatic
        assert res.witness == [(0, 0), (0, 1), (1, 1)]
        assert res.tally == [3, 3, 2]

    def test_synthetic_profile_reads_back(self):
        out = build_reduction(make_corner_circuit(GridBounds((8,))))
        x, brittle = synthetic_profile(out, [F(11, 2)])
        res = decode_equilibrium(out, x)
        assert not brittle
        assert res.points == [(F(11, 2),)] and res.Q == [(5,)]
        assert res.tally == [0, 1]

    def test_color_gap_norm(self):
        assert color_gap_norm([64, 0, 0, 0, 0], 7) == F(64, 7)
        assert color_gap_norm([2, 3, 3], 10) == F(1, 10)
        assert color_gap_norm([4, 4, 4], 10) == 0


class TestBoundary:
    def test_corner_has_no_violations(self):
        assert check_boundary_conditions(CORNER2) == []

    def test_top_face_of_own_color(self):
        c = circuit_from_function(GridBounds((8,)), lambda p: 1)
        bad = check_boundary_conditions(c)
        assert [(v.point, v.clause) for v in bad] == [((7,), 3)]

    def test_red_on_zero_face(self):
        c = circuit_from_function(GridBounds((8, 8)), lambda p: RED if p == (0, 4) else oracles.corner_color(p, (8, 8)))
        assert ((0, 4), 1) in [(v.point, v.clause) for v in check_boundary_conditions(c)]

    def test_wrong_grid(self):
        with pytest.raises(ValueError):
            check_boundary_conditions(make_corner_circuit(GridBounds((7,))))


def test_bundle_round_trip(tmp_path, red2):
    write_bundle(red2, tmp_path / "b")
    back = read_bundle(tmp_path / "b")
    assert back.nodes == red2.nodes
    assert back.config == red2.config
    assert back.game.dA == red2.game.dA and back.game.gadgets == red2.game.gadgets
    assert validate_structure(back).ok
