import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from brouwer_nash.coloring import ColorOracle, check_validity, color_at, is_panchromatic, make_corner_circuit, random_valid_circuit
from brouwer_nash.fixedpoint import brute_force_panchromatic
from brouwer_nash.grid import RED, GridBounds
from brouwer_nash.transforms import (
    ColoringTriple,
    DecodeError,
    l1_decode,
    l1_pad,
    l2_add,
    l2_decode,
    l3_decode,
    l3_snake,
    make_triple,
    snake_map,
    snake_size,
)


def triple(r, seed=None):
    b = GridBounds(r)
    c = make_corner_circuit(b) if seed is None else random_valid_circuit(b, seed)
    return make_triple(c)


def all_points(r):
    return itertools.product(*(range(x) for x in r))


seeds = st.integers(0, 2 ** 31)


class TestTriple:
    def test_side_lengths_at_least_seven(self):
        with pytest.raises(ValueError):
            ColoringTriple(make_corner_circuit(GridBounds((6, 8))))

    def test_invalid_circuit_rejected(self):
        from brouwer_nash.circuit import circuit_from_function

        c = circuit_from_function(GridBounds((7,)), lambda p: RED)
        with pytest.raises(ValueError):
            make_triple(c)


class TestPadding:
    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.integers(7, 10), min_size=1, max_size=2), seeds, st.data())
    def test_colors_follow_definition(self, r, seed, data):
        r = tuple(r)
        T = triple(r, seed)
        t = data.draw(st.integers(1, len(r)))
        u = r[t - 1] + data.draw(st.integers(1, 5))
        Tn = l1_pad(T, t, u)
        o = ColorOracle(T.circuit)
        on = ColorOracle(Tn.circuit)
        for p in all_points(Tn.r):
            assert on(p) == oracles.l1_color(p, Tn.r, t, r, o)

    def test_requires_growth(self):
        T = triple((8, 8))
        with pytest.raises(ValueError):
            l1_pad(T, 1, 8)
        assert l1_pad(T, 1, 8, allow_equal=True).r == (8, 8)

    def test_decode_rejects_non_panchromatic(self):
        T = triple((8, 8))
        with pytest.raises(DecodeError):
            l1_decode(T, 1, 10, [(0, 0), (1, 0), (1, 1)])

    def test_decode_rejects_corner_in_padding(self):
        T = triple((8, 8))
        with pytest.raises(DecodeError):
            l1_decode(T, 1, 10, [(8, 0), (8, 1), (9, 1)])

    def test_decode_identity_on_genuine_sets(self):
        T = triple((7, 8), 3)
        Tn = l1_pad(T, 2, 11)
        for P in brute_force_panchromatic(Tn.circuit):
            assert l1_decode(T, 2, 11, P, target=Tn) == sorted(P)


class TestAddDimension:
    def test_examples(self):
        T = triple((7,))
        Tn = l2_add(T, 7)
        assert color_at(Tn.circuit, (3, 0)) == 2
        assert color_at(Tn.circuit, (3, 1)) == RED
        assert l2_decode(T, 7, [(0, 1), (1, 0), (1, 1)], target=Tn) == [(0,), (1,)]

    def test_u_at_least_seven(self):
        with pytest.raises(ValueError):
            l2_add(triple((7,)), 6)

    @settings(max_examples=15, deadline=None)
    @given(st.lists(st.integers(7, 9), min_size=1, max_size=2), st.integers(7, 9), seeds)
    def test_colors_follow_definition(self, r, u, seed):
        T = triple(tuple(r), seed)
        Tn = l2_add(T, u)
        o, on = ColorOracle(T.circuit), ColorOracle(Tn.circuit)
        for p in all_points(Tn.r):
            assert on(p) == oracles.l2_color(p, Tn.r, o)

    def test_decode_rejects_non_panchromatic(self):
        with pytest.raises(DecodeError):
            l2_decode(triple((7,)), 7, [(3, 3), (3, 4), (4, 4)])


class TestSnake:
    def test_psi_examples(self):
        assert snake_map((3, 5), 1, 2, 1) == (3,)
        assert snake_map((4, 4), 1, 2, 1) == (4,)
        assert snake_map((2, 1), 1, 2, 1) == (6,)

    def test_outside_snake(self):
        with pytest.raises(ValueError):
            snake_map((1, 1), 1, 2, 1)

    def test_shape_example(self):
        Tn = l3_snake(triple((11,)), 1, 2, 1)
        assert Tn.r == (7, 7)
        assert check_validity(Tn.circuit, mode="exhaustive") == []

    def test_factorization_checked(self):
        with pytest.raises(ValueError):
            l3_snake(triple((10,)), 1, 2, 1)

    def test_a_equal_one_gives_six_values(self):
        Tn = l3_snake(triple((8,)), 1, 1, 1)
        assert Tn.r == (6, 7) and Tn.relaxed

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 2), st.integers(1, 2), seeds, st.data())
    def test_colors_follow_definition(self, a, b, d, seed, data):
        t = data.draw(st.integers(1, d))
        r = [7] * d
        r[t - 1] = snake_size(a, b)
        T = triple(tuple(r), seed)
        Tn = l3_snake(T, t, a, b)
        o, on = ColorOracle(T.circuit), ColorOracle(Tn.circuit)
        for p in all_points(Tn.r):
            assert on(p) == oracles.l3_color(p, Tn.r, t, a, b, o)
        assert check_validity(Tn.circuit, mode="exhaustive") == []

    def test_decode_every_set_of_example(self):
        T = triple((11,))
        Tn = l3_snake(T, 1, 2, 1)
        found = brute_force_panchromatic(Tn.circuit)
        assert found
        for P in found:
            back = l3_decode(T, 1, 2, 1, P, target=Tn)
            assert is_panchromatic(T.circuit, back)
            assert oracles.accommodated(back)

    def test_decode_rejects_top_row_corner(self):
        T = triple((11,))
        Tn = l3_snake(T, 1, 2, 1)
        # corner row 4b+1 = 5: cube between rows 5 and 6
        with pytest.raises(DecodeError):
            l3_decode(T, 1, 2, 1, [(0, 5), (0, 6), (1, 6)], target=Tn)
