# tests/conftest.py
# Shared instance builders. Builders are exposed as fixtures returning functions.
from pathlib import Path

import numpy as np
import pytest

from app.graph.coloured import ColouredGraph
from app.graph.constructions import extremal_colouring

DATA = Path(__file__).parent / "data"


def random_colouring(N: int, p_blue: float, seed: int) -> ColouredGraph:
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((N, N)) < p_blue, 1)
    return ColouredGraph(upper | upper.T)


def bipartite_blue(N: int, p_blue: float, seed: int) -> ColouredGraph:
    """Blue edges only across the halves [0, N/2) and [N/2, N): no blue triangle."""
    rng = np.random.default_rng(seed)
    half = N // 2
    blue = np.zeros((N, N), dtype=bool)
    blue[:half, half:] = rng.random((half, N - half)) < p_blue
    return ColouredGraph(blue | blue.T)


def blocked_blue(sizes, p_blue: float, seed: int) -> ColouredGraph:
    """Consecutive blocks of the given sizes, red inside; blue edges only across blocks,
    so the blue graph has no clique larger than the number of blocks."""
    rng = np.random.default_rng(seed)
    block = np.repeat(np.arange(len(sizes)), sizes)
    N = len(block)
    across = block[:, None] != block[None, :]
    upper = np.triu(across & (rng.random((N, N)) < p_blue), 1)
    return ColouredGraph(upper | upper.T)


def add_vertex(g: ColouredGraph, blue_to) -> ColouredGraph:
    """g plus one vertex (index g.n_vertices) whose blue neighbours are `blue_to`."""
    N = g.n_vertices
    blue = np.zeros((N + 1, N + 1), dtype=bool)
    blue[:N, :N] = g.blue
    for v in blue_to:
        blue[N, v] = blue[v, N] = True
    return ColouredGraph(blue)


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def make_random():
    return random_colouring


@pytest.fixture
def make_bipartite():
    return bipartite_blue


@pytest.fixture
def make_blocked():
    return blocked_blue


@pytest.fixture
def with_vertex():
    return add_vertex


@pytest.fixture
def extremal_3_2() -> ColouredGraph:
    return extremal_colouring(3, 2)
