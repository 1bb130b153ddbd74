# app/graph/coloured.py
# Two-coloured complete graph. Blue is stored (dense numpy matrix + one int bitmask per
# vertex); red is the complement. Vertex sets are int bitmasks too.
from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Optional

import numpy as np

from app.errors import InputError


class Colour(str, Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def other(self) -> "Colour":
        return Colour.BLUE if self is Colour.RED else Colour.RED


def popcount(x: int) -> int:
    return x.bit_count()


def bits_iter(x: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class VertexSet:
    """Immutable set of vertex indices backed by an int bitmask."""

    __slots__ = ("mask",)

    def __init__(self, mask: int = 0):
        if mask < 0:
            raise InputError("vertex set mask must be non-negative")
        self.mask = mask

    @classmethod
    def of(cls, members: Iterable[int]) -> "VertexSet":
        mask = 0
        for v in members:
            if v < 0:
                raise InputError(f"negative vertex index {v}")
            mask |= 1 << v
        return cls(mask)

    @classmethod
    def range(cls, n: int) -> "VertexSet":
        return cls((1 << n) - 1)

    def __iter__(self) -> Iterator[int]:
        return bits_iter(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, v: int) -> bool:
        return v >= 0 and (self.mask >> v) & 1 == 1

    def __bool__(self) -> bool:
        return self.mask != 0

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask & other.mask)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask | other.mask)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask & ~other.mask)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VertexSet) and other.mask == self.mask

    def __hash__(self) -> int:
        return hash(self.mask)

    def __repr__(self) -> str:
        return f"VertexSet({self.members()})"

    def members(self) -> list[int]:
        return list(bits_iter(self.mask))

    def first(self, count: int) -> "VertexSet":
        """The `count` smallest members."""
        mask, x = 0, self.mask
        for _ in range(count):
            if not x:
                break
            low = x & -x
            mask |= low
            x ^= low
        return VertexSet(mask)

    def min(self) -> int:
        if not self.mask:
            raise InputError("min of an empty vertex set")
        return (self.mask & -self.mask).bit_length() - 1

    def isdisjoint(self, other: "VertexSet") -> bool:
        return self.mask & other.mask == 0

    def issubset(self, other: "VertexSet") -> bool:
        return self.mask & ~other.mask == 0


def _row_mask(row: np.ndarray) -> int:
    packed = np.packbits(row.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


class ColouredGraph:
    """Complete graph on `n_vertices` vertices, each edge red or blue.

    `blue` is the symmetric irreflexive boolean adjacency of the blue graph; it is
    copied and frozen at construction, so instances are safe to share across threads.
    """

    def __init__(self, blue: np.ndarray):
        blue = np.array(blue, dtype=bool, copy=True)
        if blue.ndim != 2 or blue.shape[0] != blue.shape[1]:
            raise InputError("blue adjacency must be a square matrix", shape=list(blue.shape))
        if not np.array_equal(blue, blue.T):
            raise InputError("blue adjacency must be symmetric")
        np.fill_diagonal(blue, False)
        blue.setflags(write=False)
        self.blue: np.ndarray = blue
        self.n_vertices: int = blue.shape[0]
        self.full_mask: int = (1 << self.n_vertices) - 1
        self.blue_masks: list[int] = [_row_mask(blue[v]) for v in range(self.n_vertices)]
        self.red_masks: list[int] = [
            self.full_mask & ~self.blue_masks[v] & ~(1 << v) for v in range(self.n_vertices)
        ]

    # -------- constructors --------
    @classmethod
    def all_red(cls, n_vertices: int) -> "ColouredGraph":
        return cls(np.zeros((n_vertices, n_vertices), dtype=bool))

    @classmethod
    def all_blue(cls, n_vertices: int) -> "ColouredGraph":
        return cls(~np.eye(n_vertices, dtype=bool))

    @classmethod
    def from_blue_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int]]) -> "ColouredGraph":
        blue = np.zeros((n_vertices, n_vertices), dtype=bool)
        for u, v in edges:
            if not (0 <= u < n_vertices and 0 <= v < n_vertices) or u == v:
                raise InputError(f"bad edge ({u}, {v}) for {n_vertices} vertices")
            blue[u, v] = blue[v, u] = True
        return cls(blue)

    @classmethod
    def from_red_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int]]) -> "ColouredGraph":
        red = cls.from_blue_edges(n_vertices, edges).blue
        blue = ~red
        np.fill_diagonal(blue, False)
        return cls(blue)

    # -------- queries --------
    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n_vertices:
            raise InputError(f"vertex {v} out of range [0, {self.n_vertices})", vertex=v)

    def check_set(self, S: VertexSet) -> None:
        if S.mask & ~self.full_mask:
            raise InputError("vertex set exceeds the vertex range", n_vertices=self.n_vertices)

    def neighbours(self, v: int, colour: Colour) -> int:
        return self.blue_masks[v] if colour is Colour.BLUE else self.red_masks[v]

    def masks(self, colour: Colour) -> list[int]:
        return self.blue_masks if colour is Colour.BLUE else self.red_masks

    def is_blue(self, u: int, v: int) -> bool:
        return bool(self.blue[u, v])

    def colour_of(self, u: int, v: int) -> Colour:
        if u == v:
            raise InputError("a vertex has no edge to itself", vertex=u)
        return Colour.BLUE if self.blue[u, v] else Colour.RED

    def vertices(self) -> VertexSet:
        return VertexSet(self.full_mask)

    def blue_degrees(self) -> np.ndarray:
        return self.blue.sum(axis=1)

    def induced(self, members: list[int]) -> "ColouredGraph":
        """Subgraph on `members`, relabelled 0..len-1 in the given order."""
        idx = np.asarray(members, dtype=np.intp)
        return ColouredGraph(self.blue[np.ix_(idx, idx)])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ColouredGraph) and np.array_equal(self.blue, other.blue)

    def __repr__(self) -> str:
        edges = int(self.blue.sum()) // 2
        return f"ColouredGraph(n_vertices={self.n_vertices}, blue_edges={edges})"


# -------- public API: degrees and densities --------
def degree_in(g: ColouredGraph, v: int, S: VertexSet, colour: Colour) -> int:
    """|N_colour(v) ∩ S|, with v never its own neighbour."""
    g.check_vertex(v)
    g.check_set(S)
    return (g.neighbours(v, colour) & S.mask).bit_count()


def edge_count(g: ColouredGraph, X: VertexSet, Y: VertexSet, colour: Colour) -> int:
    """Number of colour edges with one end in X and the other in Y (X, Y disjoint)."""
    masks = g.masks(colour)
    return sum((masks[x] & Y.mask).bit_count() for x in X)


def pair_density(g: ColouredGraph, X: VertexSet, Y: VertexSet, colour: Colour) -> Fraction:
    g.check_set(X)
    g.check_set(Y)
    if not X or not Y:
        raise InputError("pair_density needs two nonempty sets")
    if not X.isdisjoint(Y):
        raise InputError("pair_density needs disjoint sets", overlap=len(X & Y))
    return Fraction(edge_count(g, X, Y, colour), len(X) * len(Y))


def max_internal_degree(g: ColouredGraph, S: VertexSet, colour: Colour = Colour.BLUE) -> int:
    masks = g.masks(colour)
    return max(((masks[v] & S.mask).bit_count() for v in S), default=0)


def red_components(g: ColouredGraph) -> list[VertexSet]:
    """Connected components of the red graph, ordered by least vertex."""
    seen = 0
    comps: list[VertexSet] = []
    for v in range(g.n_vertices):
        if (seen >> v) & 1:
            continue
        comp, frontier = 1 << v, 1 << v
        while frontier:
            nxt = 0
            for u in bits_iter(frontier):
                nxt |= g.red_masks[u]
            frontier = nxt & ~comp
            comp |= nxt
        seen |= comp
        comps.append(VertexSet(comp))
    return comps


def is_clique(g: ColouredGraph, S: VertexSet, colour: Colour) -> bool:
    masks = g.masks(colour)
    return all(S.mask & ~masks[v] & ~(1 << v) == 0 for v in S)
