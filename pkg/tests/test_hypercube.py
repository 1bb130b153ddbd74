# tests/test_hypercube.py
import pytest
from hypothesis import given, settings, strategies as st

from app.errors import InputError
from app.graph.hypercube import (
    CubeVertex,
    LayerRange,
    PrefixVector,
    cube_edges,
    cube_neighbours,
    layer,
    layer_count,
    layer_order,
    middle_binomial,
    prefix_adjacent,
    prefix_divergence,
)


class TestPrefixVector:
    def test_parse_coordinate_one_first(self):
        x = PrefixVector.parse("011")
        assert x.bits == 0b110 and x.length == 3
        assert str(x) == "011"
        assert str(x.truncate(1)) == "0"

    def test_parse_rejects_other_characters(self):
        with pytest.raises(InputError):
            PrefixVector.parse("012")

    def test_subcube(self):
        assert list(PrefixVector.parse("1").subcube(3)) == [1, 3, 5, 7]
        assert list(PrefixVector(0, 0).subcube(2)) == [0, 1, 2, 3]

    def test_adjacency(self):
        assert prefix_adjacent(PrefixVector.parse("01"), PrefixVector.parse("11"))
        assert not prefix_adjacent(PrefixVector.parse("00"), PrefixVector.parse("11"))
        assert not prefix_adjacent(PrefixVector.parse("01"), PrefixVector.parse("01"))
        assert prefix_adjacent(PrefixVector.parse("0"), PrefixVector.parse("10"))

    def test_divergence(self):
        x, z = PrefixVector.parse("01"), PrefixVector.parse("00")
        assert prefix_divergence(x, z, [1, 2]) == 2
        assert prefix_divergence(PrefixVector.parse("10"), z, [1, 2]) == 1
        assert prefix_divergence(x, x, [1, 2]) == 3
        with pytest.raises(InputError):
            prefix_divergence(PrefixVector.parse("0"), z, [1, 2])


class TestCube:
    def test_vertex_bounds(self):
        with pytest.raises(InputError):
            CubeVertex(8, 3)
        v = CubeVertex(0b101, 3)
        assert v.weight == 2
        assert v.prefix(2) == PrefixVector(0b01, 2)
        assert sorted(u.bits for u in cube_neighbours(v)) == [0b001, 0b100, 0b111]

    def test_edges(self):
        edges = list(cube_edges(3))
        assert len(edges) == 12
        assert all(x < y and (x ^ y).bit_count() == 1 for x, y in edges)

    def test_layers(self):
        assert layer_count(LayerRange(4, 1, 2)) == 10
        with pytest.raises(InputError):
            LayerRange(3, 2, 1)
        assert middle_binomial(4) == 6 and middle_binomial(5) == 10 and middle_binomial(0) == 1
        assert layer_order(3) == [0, 1, 2, 4, 3, 5, 6, 7]
        assert layer(4, 1) == [1, 2, 4, 8]

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10))
    def test_layer_order_is_a_graded_permutation(self, n):
        order = layer_order(n)
        assert sorted(order) == list(range(1 << n))
        weights = [x.bit_count() for x in order]
        assert weights == sorted(weights)
