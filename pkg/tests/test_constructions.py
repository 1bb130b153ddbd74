# tests/test_constructions.py
import networkx as nx
import pytest

from app.errors import InputError
from app.graph.coloured import Colour, VertexSet, is_clique, red_components
from app.graph.constructions import extremal_colouring, multipartite_colouring, part_blocks, ramsey_formula
from app.oracle.validators import certify_lower_bound
from app.stability.general import h_profile, lower_bound_colouring


def test_formula():
    assert ramsey_formula(2, 2) == 4
    assert ramsey_formula(3, 3) == 15
    assert ramsey_formula(1, 5) == 1
    assert ramsey_formula(4, 0) == 1
    with pytest.raises(InputError):
        ramsey_formula(0, 2)


def test_blocks_are_consecutive():
    assert part_blocks([2, 0, 3]) == [VertexSet.of([0, 1]), VertexSet(), VertexSet.of([2, 3, 4])]
    g = multipartite_colouring([2, 3])
    assert red_components(g) == [VertexSet.of([0, 1]), VertexSet.of([2, 3, 4])]
    with pytest.raises(InputError):
        multipartite_colouring([2, -1])


@pytest.mark.parametrize("s", [2, 3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_extremal_is_a_lower_bound(s, n):
    g = extremal_colouring(s, n)
    assert g.n_vertices == ramsey_formula(s, n) - 1
    for part in red_components(g):
        assert len(part) == (1 << n) - 1 and is_clique(g, part, Colour.RED)
    report = certify_lower_bound(g, n, s=s)
    assert report.ok, report.problems
    assert report.method == "complete-multipartite"


def test_one_more_vertex_breaks_it(extremal_3_2, with_vertex):
    report = certify_lower_bound(with_vertex(extremal_3_2, []), 2, s=3)
    assert not report.ok
    report = certify_lower_bound(with_vertex(extremal_3_2, [0, 3]), 2, s=3)
    assert not report.ok


def test_extremal_needs_two_parts():
    with pytest.raises(InputError):
        extremal_colouring(1, 3)


def test_pattern_lower_bound():
    h = nx.complete_bipartite_graph(2, 3)
    g = lower_bound_colouring(h_profile(h), 3)
    assert g.n_vertices == 8
    assert certify_lower_bound(g, 3, h=h).ok
