# tests/test_decompose.py
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from app.decomp.decompose import SizeSchedule, decompose, validate_decomposition
from app.decomp.families import keeps_kr_free, maximal_family
from app.errors import InputError, PreconditionViolated
from app.graph.coloured import Colour, ColouredGraph, VertexSet, max_internal_degree
from app.graph.constructions import extremal_colouring
from app.graph.search import find_clique

SETTINGS = settings(
    max_examples=15, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
HALF = Fraction(1, 2)


class TestFamilies:
    def test_keeps_kr_free(self, extremal_3_2):
        g = extremal_3_2
        assert keeps_kr_free(g, 0b1, 1, 2)
        assert not keeps_kr_free(g, 0b1, 3, 2)
        assert keeps_kr_free(g, 0b1001, 1, 3)
        assert keeps_kr_free(g, 0b11011, 2, 3)
        assert not keeps_kr_free(ColouredGraph.all_blue(3), 0b11, 2, 3)

    def test_red_cliques_pack(self, extremal_3_2):
        fam = maximal_family(extremal_3_2, extremal_3_2.vertices(), 3, 2)
        assert fam.sets == [VertexSet.of([0, 1, 2]), VertexSet.of([3, 4, 5])]
        assert not fam.remainder and not fam.heuristic

    def test_nothing_fits(self, extremal_3_2):
        fam = maximal_family(extremal_3_2, extremal_3_2.vertices(), 4, 2)
        assert fam.sets == [] and fam.remainder == extremal_3_2.vertices()
        assert not fam.heuristic

    def test_r_one_is_empty(self):
        g = ColouredGraph.all_red(5)
        fam = maximal_family(g, g.vertices(), 2, 1)
        assert fam.sets == [] and len(fam.remainder) == 5
        with pytest.raises(InputError):
            maximal_family(g, g.vertices(), 0, 2)

    @SETTINGS
    @given(st.integers(6, 20), st.integers(2, 4), st.integers(0, 2**16))
    def test_family_contract(self, make_random, N, a, seed):
        g = make_random(N, 0.3, seed)
        fam = maximal_family(g, g.vertices(), a, 2, seed=seed)
        seen = 0
        for U in fam.sets:
            assert len(U) == a and U.mask & seen == 0
            assert find_clique(g, U, 2, Colour.BLUE) is None
            seen |= U.mask
        assert fam.remainder == VertexSet(g.full_mask & ~seen)
        if not fam.heuristic:
            assert find_clique(g, fam.remainder, a, Colour.RED) is None


class TestSchedule:
    def test_geometric(self):
        assert SizeSchedule.geometric(64, HALF, Fraction(1, 4)).a == (64, 16, 4, 1)
        assert SizeSchedule.geometric(64, HALF).a == (64, 4)
        with pytest.raises(InputError):
            SizeSchedule.geometric(64, HALF, Fraction(3, 2))

    def test_problems(self):
        assert SizeSchedule((10, 10, 1), HALF, relaxed=True).problems(10) == ["schedule must be strictly decreasing"]
        assert "a(0) must equal N = 12" in SizeSchedule((10, 2), HALF, relaxed=True).problems(12)
        strict = SizeSchedule((64, 16), HALF)
        assert any("a(i+1) > (eps/8) a(i)" in p for p in strict.problems(64))


class TestDecompose:
    def test_all_red_is_one_set(self):
        g = ColouredGraph.all_red(64)
        schedule = SizeSchedule.geometric(64, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 3, schedule)
        assert result.family.level == 0
        assert result.family.sets == (g.vertices(),)
        assert [step.r for step in result.trace] == [2, 3]
        assert result.report.ok

    def test_strict_needs_long_schedule(self):
        g = ColouredGraph.all_red(64)
        with pytest.raises(PreconditionViolated):
            decompose(g, HALF, 3, SizeSchedule.geometric(64, HALF))

    def test_bad_schedule(self):
        g = ColouredGraph.all_red(10)
        with pytest.raises(PreconditionViolated):
            decompose(g, HALF, 3, SizeSchedule((12, 3), HALF, relaxed=True))

    def test_extremal_plus_vertex(self, with_vertex):
        g = with_vertex(extremal_colouring(3, 4), range(15, 30))
        schedule = SizeSchedule.geometric(31, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 3, schedule)
        fam = result.family
        assert validate_decomposition(g, fam, schedule, HALF).ok
        a_i, a_next = schedule.a[fam.level], schedule.a[fam.level + 1]
        for U in fam.sets:
            assert len(U) == a_i
            assert max_internal_degree(g, U, Colour.BLUE) <= a_next
        assert len(fam.union()) >= 31 / 2

    def test_s2_is_one_level_zero_set(self):
        g = ColouredGraph.all_red(64)
        schedule = SizeSchedule.geometric(64, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 2, schedule)
        assert result.family.level == 0
        assert result.family.sets == (g.vertices(),)
        assert result.trace == []
        assert result.report.ok

    def test_all_red_s4(self):
        g = ColouredGraph.all_red(64)
        schedule = SizeSchedule.geometric(64, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 4, schedule)
        assert result.family.level == 0
        assert result.family.sets == (g.vertices(),)
        assert [step.r for step in result.trace] == [2, 3, 4]

    @SETTINGS
    @given(st.integers(4, 100))
    def test_s2_any_size(self, N):
        g = ColouredGraph.all_red(N)
        schedule = SizeSchedule.geometric(N, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 2, schedule)
        assert result.report.ok
        assert result.family.union() == g.vertices()

    @SETTINGS
    @given(st.integers(6, 15), st.floats(0.1, 0.9), st.integers(0, 2**16))
    def test_bipartite_blue_always_decomposes(self, make_bipartite, h, p, seed):
        N = 4 * h
        g = make_bipartite(N, p, seed)
        schedule = SizeSchedule.geometric(N, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 3, schedule, seed=seed)
        self._check(g, result, schedule)

    @SETTINGS
    @given(st.integers(4, 15), st.floats(0.1, 0.9), st.integers(0, 2**16))
    def test_tripartite_blue_always_decomposes(self, make_blocked, a1, p, seed):
        g = make_blocked([a1, a1, 2 * a1], p, seed)
        schedule = SizeSchedule.geometric(4 * a1, HALF, Fraction(1, 4), relaxed=True)
        result = decompose(g, HALF, 4, schedule, seed=seed)
        self._check(g, result, schedule)
        assert [step.r for step in result.trace] == [2, 3, 4]

    @staticmethod
    def _check(g, result, schedule):
        fam = result.family
        assert result.report.ok
        assert validate_decomposition(g, fam, schedule, HALF).ok
        assert sum(len(U) for U in fam.sets) == len(fam.union())
        assert len(fam.union()) >= (1 - HALF) * g.n_vertices
        for U in fam.sets:
            assert len(U) == schedule.a[fam.level]
            assert max_internal_degree(g, U, Colour.BLUE) <= schedule.a[fam.level + 1]
        levels = [step.i_r for step in result.trace]
        assert levels == sorted(levels)
        assert all(step.x_bound_ok for step in result.trace)
