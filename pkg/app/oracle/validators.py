# app/oracle/validators.py
# Independent checks. Nothing here calls the embedders or their search kernels: edges are
# read straight from the numpy matrix, cube edges are recomputed, searches are plain
# exhaustive enumeration.
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import networkx as nx
import numpy as np

from app.errors import BudgetExceeded, InputError
from app.graph.coloured import Colour, ColouredGraph, VertexSet
from app.graph.search import BicliqueWitness, CliqueWitness
from app.embed.embedding import CubeEmbedding

DEFAULT_BUDGET = 5 * 10**6


@dataclass
class Report:
    ok: bool = True
    problems: list[str] = field(default_factory=list)
    offending: Optional[tuple] = None

    def fail(self, problem: str, offending: Optional[tuple] = None) -> None:
        self.ok = False
        self.problems.append(problem)
        if self.offending is None and offending is not None:
            self.offending = offending


def _colour_matrix(g: ColouredGraph, colour: Colour) -> np.ndarray:
    if colour is Colour.BLUE:
        return g.blue
    red = ~g.blue
    np.fill_diagonal(red, False)
    return red


# -------- embeddings and witnesses --------
def validate_embedding(g: ColouredGraph, e: CubeEmbedding) -> Report:
    """Totality, injectivity, and redness of all n·2^(n-1) cube edges."""
    report = Report()
    size = 1 << e.n
    if len(e.images) != size:
        report.fail(f"expected {size} images, got {len(e.images)}")
        return report
    for x, v in enumerate(e.images):
        if not 0 <= v < g.n_vertices:
            report.fail(f"cube vertex {x} maps outside the graph ({v})", (x,))
    if not report.ok:
        return report
    if len(set(e.images)) != size:
        seen: dict[int, int] = {}
        for x, v in enumerate(e.images):
            if v in seen:
                report.fail(f"cube vertices {seen[v]} and {x} share image {v}", (seen[v], x))
                break
            seen[v] = x
    for x in range(size):
        for bit in range(e.n):
            y = x | (1 << bit)
            if y == x:
                continue
            if g.blue[e.images[x], e.images[y]]:
                report.fail(f"cube edge {x}-{y} maps to blue edge {e.images[x]}-{e.images[y]}", (x, y))
    return report


def validate_clique(g: ColouredGraph, w: CliqueWitness, size: Optional[int] = None) -> Report:
    report = Report()
    members = w.members.members()
    if size is not None and len(members) != size:
        report.fail(f"clique has {len(members)} vertices, expected {size}")
    if any(v >= g.n_vertices for v in members):
        report.fail("clique vertex outside the graph")
        return report
    want_blue = w.colour is Colour.BLUE
    for u, v in itertools.combinations(members, 2):
        if bool(g.blue[u, v]) != want_blue:
            report.fail(f"pair {u}-{v} is not {w.colour.value}", (u, v))
    return report


def validate_biclique(g: ColouredGraph, w: BicliqueWitness) -> Report:
    report = Report()
    if not w.left.isdisjoint(w.right):
        report.fail("biclique sides overlap")
    want_blue = w.colour is Colour.BLUE
    for u in w.left:
        for v in w.right:
            if bool(g.blue[u, v]) != want_blue:
                report.fail(f"pair {u}-{v} is not {w.colour.value}", (u, v))
    return report


# -------- brute-force finders --------
@dataclass(frozen=True)
class Pattern:
    kind: str  # "cube" | "biclique" | "clique"
    size: int

    @classmethod
    def cube(cls, n: int) -> "Pattern":
        return cls("cube", n)

    @classmethod
    def biclique(cls, t: int) -> "Pattern":
        return cls("biclique", t)

    @classmethod
    def clique(cls, s: int) -> "Pattern":
        return cls("clique", s)


Witness = Union[CliqueWitness, BicliqueWitness, CubeEmbedding]


def brute_subgraph(
    g: ColouredGraph, pattern: Pattern, colour: Colour, budget: int = DEFAULT_BUDGET
) -> Optional[Witness]:
    """Exhaustive search for the pattern in the colour graph; lexicographically least witness.

    A cube witness is returned as a CubeEmbedding (images in cube order) whatever the colour.
    """
    adj = _colour_matrix(g, colour)
    if pattern.kind == "clique":
        return _brute_clique(adj, pattern.size, colour, budget)
    if pattern.kind == "biclique":
        return _brute_biclique(adj, list(range(g.n_vertices)), None, pattern.size, colour, budget)
    if pattern.kind == "cube":
        if pattern.size > 3 and g.n_vertices > 16:
            raise BudgetExceeded(f"brute Q_{pattern.size} search is limited to n <= 3", stage="oracle")
        return _brute_cube(adj, pattern.size, budget)
    raise InputError(f"unknown pattern kind {pattern.kind!r}")


def brute_biclique_between(
    g: ColouredGraph, X: VertexSet, Y: VertexSet, t: int, colour: Colour, budget: int = DEFAULT_BUDGET
) -> Optional[BicliqueWitness]:
    """K_{t,t} with left ⊆ X, right ⊆ Y by plain enumeration of both sides."""
    return _brute_biclique(_colour_matrix(g, colour), X.members(), Y.members(), t, colour, budget)


def _spend(counter: list[int], budget: int, amount: int = 1) -> None:
    counter[0] += amount
    if counter[0] > budget:
        raise BudgetExceeded(f"brute-force budget of {budget} exceeded", stage="oracle", budget=budget)


def _brute_clique(adj: np.ndarray, s: int, colour: Colour, budget: int) -> Optional[CliqueWitness]:
    if s < 1:
        raise InputError("clique size must be positive")
    counter = [0]
    for combo in itertools.combinations(range(adj.shape[0]), s):
        _spend(counter, budget)
        if all(adj[u, v] for u, v in itertools.combinations(combo, 2)):
            return CliqueWitness(VertexSet.of(combo), colour)
    return None


def _brute_biclique(
    adj: np.ndarray, left_pool: list[int], right_pool: Optional[list[int]], t: int,
    colour: Colour, budget: int,
) -> Optional[BicliqueWitness]:
    counter = [0]
    for left in itertools.combinations(left_pool, t):
        _spend(counter, budget)
        pool = right_pool if right_pool is not None else [v for v in range(adj.shape[0]) if v > left[0]]
        common = [v for v in pool if v not in left and all(adj[u, v] for u in left)]
        if len(common) >= t:
            return BicliqueWitness(VertexSet.of(left), VertexSet.of(common[:t]), colour)
    return None


def _brute_cube(adj: np.ndarray, n: int, budget: int) -> Optional[CubeEmbedding]:
    size = 1 << n
    images: list[int] = []
    counter = [0]

    def extend(x: int) -> bool:
        if x == size:
            return True
        lower = [x ^ (1 << b) for b in range(n) if (x >> b) & 1]
        for v in range(adj.shape[0]):
            _spend(counter, budget)
            if v in images:
                continue
            if all(adj[images[y], v] for y in lower):
                images.append(v)
                if extend(x + 1):
                    return True
                images.pop()
        return False

    if not extend(0):
        return None
    return CubeEmbedding(n, tuple(images))


# -------- lower-bound certification --------
@dataclass
class LowerBoundReport(Report):
    red_component_sizes: list[int] = field(default_factory=list)
    method: str = ""


def colouring_fits_parts(h: nx.Graph, part_sizes: Sequence[int], max_vertices: int = 12) -> bool:
    """True iff V(h) splits into independent sets that fit injectively into parts of the
    given sizes, i.e. h is a subgraph of the complete multipartite graph on those parts."""
    nodes = sorted(h.nodes())
    if len(nodes) > max_vertices:
        raise BudgetExceeded(f"H has {len(nodes)} > {max_vertices} vertices", stage="oracle")
    parts = sorted((p for p in part_sizes if p > 0), reverse=True)
    k = len(parts)
    index = {v: i for i, v in enumerate(nodes)}
    nbrs = [[index[u] for u in h.neighbors(v)] for v in nodes]
    colours = [-1] * len(nodes)
    sizes: list[int] = []

    def fits() -> bool:
        return all(c <= p for c, p in zip(sorted(sizes, reverse=True), parts))

    def place(i: int) -> bool:
        if i == len(nodes):
            return fits()
        for c in range(min(len(sizes) + 1, k)):
            if any(colours[j] == c for j in nbrs[i] if j < i):
                continue
            if c == len(sizes):
                sizes.append(0)
            sizes[c] += 1
            colours[i] = c
            if sizes[c] <= parts[0] and place(i + 1):
                return True
            colours[i] = -1
            sizes[c] -= 1
            if sizes[c] == 0 and c == len(sizes) - 1:
                sizes.pop()
        return False

    return place(0) if nodes else True


def certify_lower_bound(
    g: ColouredGraph, n: int, s: Optional[int] = None, h: Optional[nx.Graph] = None,
    budget: int = DEFAULT_BUDGET,
) -> LowerBoundReport:
    """Certify that g has no red Q_n and no blue K_s (or no blue H).

    Red side: Q_n is connected, so every red copy sits inside one red component; components
    smaller than 2^n rule it out. Blue side: when the red components are cliques the blue
    graph is complete multipartite and containment is a colouring question on the pattern;
    otherwise fall back to exhaustive search.
    """
    if (s is None) == (h is None):
        raise InputError("certify_lower_bound needs exactly one of s or h")
    pattern = nx.complete_graph(s) if h is None else h
    report = LowerBoundReport()
    red = nx.from_numpy_array(_colour_matrix(g, Colour.RED).astype(np.uint8))
    comps = sorted((sorted(c) for c in nx.connected_components(red)), key=lambda c: c[0])
    report.red_component_sizes = [len(c) for c in comps]
    if g.n_vertices and max(report.red_component_sizes) >= (1 << n):
        if n <= 3:
            witness = brute_subgraph(g, Pattern.cube(n), Colour.RED, budget)
            if witness is not None:
                report.fail(f"red Q_{n} found", tuple(witness.images))
        else:
            report.fail(f"red component of size {max(report.red_component_sizes)} >= 2^{n}; cannot rule out red Q_{n}")
    cliques = all(
        all(red.has_edge(u, v) for u, v in itertools.combinations(c, 2)) for c in comps
    )
    if cliques:
        report.method = "complete-multipartite"
        if colouring_fits_parts(pattern, report.red_component_sizes):
            report.fail("blue pattern fits the blue multipartite structure")
    else:
        report.method = "exhaustive"
        matcher = nx.algorithms.isomorphism.GraphMatcher(
            nx.from_numpy_array(g.blue.astype(np.uint8)), pattern
        )
        if matcher.subgraph_is_monomorphic():
            report.fail("blue pattern found by exhaustive matching")
    return report
