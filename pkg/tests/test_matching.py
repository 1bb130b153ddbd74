# tests/test_matching.py
from fractions import Fraction

import pytest

from app.embed.embedding import CubeEmbedding
from app.embed.matching import (
    MatchParams,
    PairStatus,
    PartitionWithException,
    good_components,
    judge_pair,
    matching_dichotomy,
    multicolour_ramsey_upper,
    pack_bicliques,
    verdict_matrix,
)
from app.errors import InputError
from app.graph.coloured import ColouredGraph, VertexSet
from app.graph.constructions import extremal_colouring
from app.oracle.validators import validate_embedding

HALF = Fraction(1, 2)


@pytest.fixture
def params():
    return MatchParams(HALF, 3, m=2)


@pytest.fixture
def extremal_3_4_sets():
    g = extremal_colouring(3, 4)
    sets = [VertexSet(0x7F), VertexSet(0x7F << 7), VertexSet(0x7F << 15), VertexSet(0x7F << 22)]
    return g, sets


class TestJudgePair:
    def test_dense_red_pair_is_good(self, extremal_3_4_sets, params):
        g, sets = extremal_3_4_sets
        v = judge_pair(g, sets[0], sets[1], params)
        assert v.status is PairStatus.GOOD and v.method == "density"
        assert v.margin == Fraction(55, 4)

    def test_degree_certificate(self, params):
        g = ColouredGraph.all_red(6)
        v = judge_pair(g, VertexSet.of([0, 1, 2]), VertexSet.of([3, 4, 5]), params)
        assert v.status is PairStatus.GOOD and v.method == "degree"

    def test_blue_pair_is_bad(self, extremal_3_4_sets, params):
        g, sets = extremal_3_4_sets
        v = judge_pair(g, sets[0], sets[2], params)
        assert v.status is PairStatus.BAD and v.method == "untrimmed"
        assert v.left == sets[0] and v.right == sets[2]

    def test_rejects_overlap(self, extremal_3_4_sets, params):
        g, sets = extremal_3_4_sets
        with pytest.raises(InputError):
            judge_pair(g, sets[0], sets[0], params)


class TestComponents:
    def test_export(self, extremal_3_4_sets, params):
        g, sets = extremal_3_4_sets
        lines = verdict_matrix(g, sets, params).export().splitlines()
        assert lines[:5] == ["verdicts 4", ".GBB", "G.BB", "BB.G", "BBG."]
        assert lines[5].startswith("0 1 good density ")
        assert len(lines) == 5 + 6

    def test_partition(self, extremal_3_4_sets, params):
        g, sets = extremal_3_4_sets
        P = good_components(g, sets, 4, params)
        assert P.parts == [sets[:2], sets[2:]]
        assert P.indices == [[0, 1], [2, 3]]
        assert not P.X and P.undetermined == 0
        assert P.part_mass(0) == 14

    def test_light_components_partition(self, extremal_3_4_sets, params):
        g, sets = extremal_3_4_sets
        assert isinstance(matching_dichotomy(g, sets, 4, params), PartitionWithException)

    def test_heavy_component_embeds(self, params):
        g = ColouredGraph.all_red(16)
        e = matching_dichotomy(g, [VertexSet(0xFF), VertexSet(0xFF00)], 2, params)
        assert isinstance(e, CubeEmbedding)
        assert validate_embedding(g, e).ok


class TestPackings:
    def test_greedy(self):
        g = ColouredGraph.all_red(8)
        packing = pack_bicliques(g, VertexSet(0x0F), VertexSet(0xF0), 2, 3)
        assert [w.left for w in packing.witnesses] == [VertexSet.of([0, 1]), VertexSet.of([2, 3])]
        assert [w.right for w in packing.witnesses] == [VertexSet.of([4, 5]), VertexSet.of([6, 7])]
        assert packing.shortfall == 1
        assert len(packing.vertices()) == 8

    def test_ramsey_bound(self):
        assert multicolour_ramsey_upper(2, 3) == 64
        with pytest.raises(InputError):
            multicolour_ramsey_upper(1, 3)
