# tests/test_stability.py
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from app.embed.embedding import CubeEmbedding
from app.errors import (
    BudgetExceeded,
    CapacityError,
    InputError,
    PreconditionViolated,
    RetriesExhausted,
)
from app.graph.coloured import ColouredGraph, VertexSet
from app.graph.constructions import extremal_colouring, multipartite_colouring
from app.graph.hypercube import cube_edges
from app.graph.search import CliqueWitness
from app.oracle.validators import validate_clique, validate_embedding
from app.stability.general import (
    dependent_random_choice,
    h_profile,
    lower_bound_colouring,
    vertex_switch_repair,
)
from app.stability.partition import (
    NoCertificateRequired,
    StabilityParams,
    StabilityPartition,
    exact_red_cube,
    final_embed,
    final_preconditions,
    ramsey_main,
    stability_partition,
    validate_stability,
)

HALF = Fraction(1, 2)


@pytest.fixture
def params():
    return StabilityParams(HALF, 3)


@pytest.fixture
def red_to_first_part(with_vertex):
    """Extremal colouring for s=3, n=4 plus a vertex red to the first part, blue to the second."""
    return with_vertex(extremal_colouring(3, 4), range(15, 30))


class TestProfile:
    @pytest.mark.parametrize("h, chi, sigma", [
        (nx.complete_graph(3), 3, 1),
        (nx.cycle_graph(5), 3, 1),
        (nx.complete_bipartite_graph(2, 3), 2, 2),
        (nx.empty_graph(3), 1, 3),
        (nx.path_graph(4), 2, 2),
    ])
    def test_values(self, h, chi, sigma):
        p = h_profile(h)
        assert (p.chi, p.sigma) == (chi, sigma)

    def test_rejects(self):
        with pytest.raises(InputError):
            h_profile(nx.Graph())
        looped = nx.path_graph(3)
        looped.add_edge(1, 1)
        with pytest.raises(InputError):
            h_profile(looped)
        with pytest.raises(CapacityError):
            h_profile(nx.path_graph(13))

    def test_clique_lower_bound_is_extremal(self):
        assert lower_bound_colouring(h_profile(nx.complete_graph(3)), 2) == extremal_colouring(3, 2)


class TestDependentRandomChoice:
    def test_small_set(self):
        g = multipartite_colouring([30, 20, 20])
        parts = [VertexSet(((1 << 20) - 1) << 30), VertexSet(((1 << 20) - 1) << 50)]
        result = dependent_random_choice(g, VertexSet.range(30), parts, 2, 6, constant=2)
        assert result.small and result.members is None

    def test_finds_common_neighbourhood(self):
        g = multipartite_colouring([40, 20, 20])
        parts = [VertexSet(((1 << 20) - 1) << 40), VertexSet(((1 << 20) - 1) << 60)]
        result = dependent_random_choice(g, VertexSet.range(40), parts, 2, 6, constant=2)
        assert not result.small
        assert result.members == VertexSet.of([0, 1])
        assert (result.t, result.target, result.attempts) == (1, 11, 1)

    def test_floor_precondition(self):
        g = multipartite_colouring([40, 20, 20])
        parts = [VertexSet(((1 << 20) - 1) << 40), VertexSet(((1 << 20) - 1) << 60)]
        with pytest.raises(PreconditionViolated):
            dependent_random_choice(g, VertexSet.range(40), parts, 2, 6, constant=2, floor=21)

    def test_unreachable_target(self):
        g = multipartite_colouring([40, 10, 10])
        parts = [VertexSet(((1 << 10) - 1) << 40), VertexSet(((1 << 10) - 1) << 50)]
        with pytest.raises(RetriesExhausted) as info:
            dependent_random_choice(g, VertexSet.range(40), parts, 2, 6, constant=2, retries=3)
        assert info.value.best == [10, 10]


class TestRepair:
    def test_swap_clears_blue_edge(self):
        g = ColouredGraph.from_blue_edges(4, [(0, 1)])
        fixed = vertex_switch_repair(g, CubeEmbedding(2, (0, 1, 2, 3)))
        assert fixed.images == (2, 1, 0, 3)
        assert not fixed.blue_edges(g)

    def test_spare_vertex(self):
        g = ColouredGraph.from_blue_edges(3, [(0, 1)])
        fixed = vertex_switch_repair(g, CubeEmbedding(1, (0, 1)), spare=g.vertices())
        assert fixed.images == (2, 1)

    def test_red_embedding_untouched(self):
        g = ColouredGraph.all_red(4)
        e = CubeEmbedding(2, (3, 1, 2, 0))
        assert vertex_switch_repair(g, e) == e


class TestFinalEmbed:
    def test_extra_vertex_hosts_origin(self):
        g = ColouredGraph.all_red(16)
        e = final_embed(g, VertexSet(0xFFFE), VertexSet.of([0]), 4)
        assert e.images[0] == 0
        assert validate_embedding(g, e).ok

    def test_extra_vertex_with_a_blue_neighbour(self):
        g = ColouredGraph.from_blue_edges(32, [(0, 1)])
        X, Y = VertexSet(0xFFFFFFFE), VertexSet.of([0])
        assert final_preconditions(g, X, Y, 5) == []
        e = final_embed(g, X, Y, 5)
        assert validate_embedding(g, e).ok

    def test_preconditions(self):
        g = ColouredGraph.from_blue_edges(16, [(1, 2)])
        names = [name for name, _ in final_preconditions(g, VertexSet(0xFFFE), VertexSet(), 4)]
        assert names == ["size", "clique"]
        with pytest.raises(PreconditionViolated):
            final_embed(g, VertexSet(0xFFFE), VertexSet.of([0]), 4)


class TestStabilityPartition:
    def test_extra_vertex_is_absorbed(self, red_to_first_part, params):
        P = stability_partition(red_to_first_part, 4, 3, params)
        assert isinstance(P, StabilityPartition)
        assert validate_stability(red_to_first_part, P, 4, params) == []
        assert not P.exception
        assert sorted(len(S) for S in P.cliques) == [15, 16]

    def test_too_few_vertices(self, params):
        with pytest.raises(PreconditionViolated):
            stability_partition(ColouredGraph.all_red(10), 4, 3, params)

    def test_defaults(self, params):
        assert params.density(4) == Fraction(1, 16)
        assert params.match_params(1).m == 1
        assert params.size_schedule(31).a == (31, 7, 1)


class TestRamseyMain:
    def test_extra_vertex_red_to_a_part(self, red_to_first_part, params):
        e = ramsey_main(red_to_first_part, 3, 4, params)
        assert isinstance(e, CubeEmbedding)
        assert validate_embedding(red_to_first_part, e).ok

    def test_extra_vertex_with_one_blue_edge(self, with_vertex, params):
        g = with_vertex(extremal_colouring(3, 4), [0])
        e = ramsey_main(g, 3, 4, params)
        assert isinstance(e, CubeEmbedding)
        assert validate_embedding(g, e).ok

    def test_all_red(self, params):
        g = ColouredGraph.all_red(31)
        assert ramsey_main(g, 3, 4, params) == CubeEmbedding(4, tuple(range(16)))

    def test_all_blue(self, params):
        g = ColouredGraph.all_blue(31)
        w = ramsey_main(g, 3, 4, params)
        assert isinstance(w, CliqueWitness)
        assert validate_clique(g, w, 3).ok

    def test_small_cases(self, params):
        assert ramsey_main(ColouredGraph.all_red(1), 1, 3, params).members == VertexSet.of([0])
        g = ColouredGraph.from_blue_edges(4, [(1, 3)])
        assert ramsey_main(g, 2, 2, params).members == VertexSet.of([1, 3])

    def test_sizes(self, params):
        with pytest.raises(PreconditionViolated):
            ramsey_main(ColouredGraph.all_red(30), 3, 4, params)
        assert ramsey_main(ColouredGraph.all_red(30), 3, 4, params, any_size=True) == NoCertificateRequired(30, 31)
        e = ramsey_main(ColouredGraph.all_red(40), 3, 4, params, any_size=True)
        assert validate_embedding(ColouredGraph.all_red(40), e).ok

    @settings(max_examples=10, deadline=None,
              suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
    @given(st.integers(0, 2**16), st.sampled_from([0.05, 0.2, 0.5]))
    def test_triangle_free_blue_is_always_certified(self, make_bipartite, params, seed, p):
        g = make_bipartite(31, p, seed)
        result = ramsey_main(g, 3, 4, params, seed=seed)
        assert isinstance(result, CubeEmbedding)
        assert validate_embedding(g, result).ok


class TestExactRedCube:
    def test_clique_host(self):
        g = ColouredGraph.all_red(16)
        assert validate_embedding(g, exact_red_cube(g, 4)).ok

    def test_components_too_small(self):
        assert exact_red_cube(extremal_colouring(3, 4), 4) is None

    def test_extra_vertex_completes_a_part(self, red_to_first_part):
        e = exact_red_cube(red_to_first_part, 4)
        assert validate_embedding(red_to_first_part, e).ok
        assert 30 in e.images

    def test_square_with_pendant(self):
        g = ColouredGraph.from_red_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
        e = exact_red_cube(g, 2)
        assert e.images == (0, 1, 3, 2)
        assert validate_embedding(g, e).ok

    def test_red_five_cycle_has_no_square(self):
        g = ColouredGraph.from_red_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
        assert exact_red_cube(g, 2) is None

    def test_budget(self):
        g = ColouredGraph.from_red_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
        with pytest.raises(BudgetExceeded):
            exact_red_cube(g, 2, budget=1)


def perturbed_extremal(with_vertex, s: int, n: int, kind: str, seed: int) -> ColouredGraph:
    """Extremal colouring plus one vertex whose blue neighbours depend on `kind`."""
    g = extremal_colouring(s, n)
    part = (1 << n) - 1
    if kind == "red-to-first-part":
        blue_to = range(part, (s - 1) * part)
    elif kind == "one-blue-edge":
        blue_to = [seed % g.n_vertices]
    else:
        rng = np.random.default_rng(seed)
        blue_to = [
            int(v) for j in range(s - 1)
            for v in rng.choice(np.arange(j * part, (j + 1) * part), size=part // 2, replace=False)
        ]
    return with_vertex(g, blue_to)


@pytest.mark.slow
class TestPerturbedExtremal:
    @pytest.mark.parametrize("s, n", [(3, 6), (4, 6), (3, 7), (3, 8)])
    @pytest.mark.parametrize("kind, seed", [
        ("red-to-first-part", 0),
        ("one-blue-edge", 0),
        ("one-blue-edge", 70),
        ("random-half", 1),
        ("random-half", 2),
    ])
    def test_certified(self, with_vertex, s, n, kind, seed):
        g = perturbed_extremal(with_vertex, s, n, kind, seed)
        assert g.n_vertices == (s - 1) * ((1 << n) - 1) + 1
        result = ramsey_main(g, s, n, StabilityParams(HALF, s), seed=seed)
        if isinstance(result, CubeEmbedding):
            assert validate_embedding(g, result).ok
        else:
            assert validate_clique(g, result, s).ok


def final_instance(n: int, seed: int) -> tuple[ColouredGraph, VertexSet, VertexSet]:
    """Random host meeting the final-embedding preconditions: X a red clique, |Y| <= 2^(n-3),
    each vertex of Y blue to exactly floor(|X|/n^2) vertices of X, noise elsewhere."""
    rng = np.random.default_rng(seed)
    size = 1 << n
    y_count = int(rng.integers(0, (size >> 3) + 1))
    x_count = size - y_count + int(rng.integers(0, 4))
    N = x_count + y_count + int(rng.integers(0, 4))
    order = rng.permutation(N)
    X, Y = order[:x_count], order[x_count:x_count + y_count]
    upper = np.triu(rng.random((N, N)) < 0.5, 1)
    blue = upper | upper.T
    blue[np.ix_(X, X)] = False
    allowed = x_count // n**2
    for y in Y:
        blue[y, X] = False
        blue[X, y] = False
        hit = rng.choice(X, size=allowed, replace=False)
        blue[y, hit] = True
        blue[hit, y] = True
    return ColouredGraph(blue), VertexSet.of(X.tolist()), VertexSet.of(Y.tolist())


class TestFinalEmbedSeeds:
    @pytest.mark.parametrize("n", [4, 5, 6, 7, pytest.param(8, marks=pytest.mark.slow),
                                   pytest.param(9, marks=pytest.mark.slow),
                                   pytest.param(10, marks=pytest.mark.slow)])
    def test_hundred_instances(self, n):
        for seed in range(100):
            g, X, Y = final_instance(n, seed)
            assert final_preconditions(g, X, Y, n) == []
            e = final_embed(g, X, Y, n)
            assert validate_embedding(g, e).ok
            assert set(Y) <= set(e.images)


def perturbed_embedding(seed: int, n: int = 6, spares: int = 4) -> tuple[ColouredGraph, CubeEmbedding, int]:
    """A shuffled embedding into 2^n red-dense hosts with 1..spares blue cube edges, plus
    `spares` extra hosts red to everything."""
    rng = np.random.default_rng(seed)
    size = 1 << n
    images = rng.permutation(size)
    noise = np.triu(rng.random((size, size)) < 0.05, 1)
    edges = list(cube_edges(n))
    for x, y in edges:
        u, v = sorted((int(images[x]), int(images[y])))
        noise[u, v] = False
    k = int(rng.integers(1, spares + 1))
    for i in rng.choice(len(edges), size=k, replace=False):
        x, y = edges[i]
        u, v = sorted((int(images[x]), int(images[y])))
        noise[u, v] = True
    blue = np.zeros((size + spares, size + spares), dtype=bool)
    blue[:size, :size] = noise | noise.T
    return ColouredGraph(blue), CubeEmbedding(n, tuple(int(v) for v in images)), k


class TestRepairSeeds:
    @pytest.mark.parametrize("seed", range(100))
    def test_reaches_zero(self, seed):
        g, e, k = perturbed_embedding(seed)
        assert len(e.blue_edges(g)) == k
        fixed = vertex_switch_repair(g, e, spare=VertexSet.range(68))
        assert fixed.blue_edges(g) == []
        assert validate_embedding(g, fixed).ok
