# app/oracle/search.py
# Exhaustive Ramsey decision at desk scale: vertex-by-vertex extension of 2-colourings,
# pruned as soon as a blue K_s or a red target through the new vertex appears.
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.engine import WorkerPool
from app.errors import InputError
from app.graph.coloured import ColouredGraph

logger = logging.getLogger(__name__)

TARGETS = {"q1": 1, "q2": 2, "c4": 2, "q3": 3}
DEFAULT_NODE_BUDGET = 10**7


@dataclass(frozen=True)
class RamseyVerdict:
    holds: bool
    counterexample: Optional[ColouredGraph]
    nodes: int


# blue[v] holds the blue neighbours of v among the vertices placed so far
State = tuple[int, ...]


def _has_clique(blue: State, cand: int, needed: int) -> bool:
    if needed <= 0:
        return True
    if cand.bit_count() < needed:
        return False
    rest = cand
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        if _has_clique(blue, rest & blue[v], needed - 1):
            return True
    return False


def _red_masks(blue: State) -> list[int]:
    full = (1 << len(blue)) - 1
    return [full & ~b & ~(1 << v) for v, b in enumerate(blue)]


def _has_red_cube_at(blue: State, v: int, dim: int) -> bool:
    """Red Q_dim through vertex v (Q_dim is vertex-transitive, so v may host cube vertex 0)."""
    red = _red_masks(blue)
    if dim == 1:
        return red[v] != 0
    if dim == 2:
        nbrs = list(_bits(red[v]))
        for a, b in itertools.combinations(nbrs, 2):
            if red[a] & red[b] & ~(1 << v):
                return True
        return False
    size = 1 << dim
    images = [v]

    def extend(x: int, used: int) -> bool:
        if x == size:
            return True
        cand = (1 << len(blue)) - 1 & ~used
        for bit in range(dim):
            if (x >> bit) & 1:
                cand &= red[images[x ^ (1 << bit)]]
        while cand:
            low = cand & -cand
            images.append(low.bit_length() - 1)
            if extend(x + 1, used | low):
                return True
            images.pop()
            cand ^= low
        return False

    return extend(1, 1 << v)


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _canonical(blue: State) -> tuple[int, ...]:
    """Least upper-triangle blue pattern over all relabellings."""
    n = len(blue)
    best: Optional[tuple[int, ...]] = None
    for perm in itertools.permutations(range(n)):
        code = tuple(
            (blue[perm[i]] >> perm[j]) & 1 for j in range(n) for i in range(j)
        )
        if best is None or code < best:
            best = code
    return best or ()


class _Search:
    def __init__(self, s: int, dim: int, N: int, pool: WorkerPool):
        self.s = s
        self.dim = dim
        self.N = N
        self.pool = pool

    def children(self, blue: State):
        v = len(blue)
        for b in range(1 << v):
            self.pool.charge()
            if _has_clique(blue, b, self.s - 1):
                continue
            child = tuple(m | (((b >> u) & 1) << v) for u, m in enumerate(blue)) + (b,)
            if _has_red_cube_at(child, v, self.dim):
                continue
            yield child

    def subtree(self, blue: State) -> Optional[State]:
        if len(blue) == self.N:
            return blue
        for child in self.children(blue):
            found = self.subtree(child)
            if found is not None:
                return found
        return None

    def frontier(self, depth: int, iso: bool) -> list[State]:
        """States at `depth` vertices in DFS order, isomorphic duplicates removed."""
        level: list[State] = [()]
        for d in range(depth):
            nxt: list[State] = []
            seen: set[tuple[int, ...]] = set()
            for state in level:
                for child in self.children(state):
                    if iso:
                        key = _canonical(child)
                        if key in seen:
                            continue
                        seen.add(key)
                    nxt.append(child)
            level = nxt
            logger.debug("depth %d: %d states", d + 1, len(level))
        return level


def _to_graph(blue: State) -> ColouredGraph:
    n = len(blue)
    mat = np.zeros((n, n), dtype=bool)
    for v, b in enumerate(blue):
        for u in _bits(b):
            mat[u, v] = mat[v, u] = True
    return ColouredGraph(mat)


def ramsey_decide(
    s: int,
    target: str,
    N: int,
    budget: int = DEFAULT_NODE_BUDGET,
    workers: Optional[int] = None,
    iso_cutoff: int = 5,
) -> RamseyVerdict:
    """Does every 2-colouring of K_N contain a blue K_s or a red target?

    Targets: q1, q2 (= c4), q3. Colourings are built vertex by vertex; a branch is cut as
    soon as the new vertex closes a blue K_s or a red target, since every extension keeps
    it. Isomorphic partial colourings are merged up to `iso_cutoff` vertices; below that
    the remaining subtrees are searched (in parallel when workers > 1) and the first
    counterexample in subtree order is returned.
    """
    if target not in TARGETS:
        raise InputError(f"unknown target {target!r}; expected one of {sorted(TARGETS)}")
    if s < 1 or N < 0:
        raise InputError("need s >= 1 and N >= 0", s=s, N=N)
    with WorkerPool(workers, budget=budget) as pool:
        search = _Search(s, TARGETS[target], N, pool)
        depth = min(iso_cutoff, N)
        roots = search.frontier(depth, iso=iso_cutoff > 0)
        if pool.workers == 1:
            found = None
            for root in roots:
                found = search.subtree(root)
                if found is not None:
                    break
        else:
            results = pool.map_ordered(search.subtree, roots)
            found = next((r for r in results if r is not None), None)
        nodes = pool.nodes
    logger.info("ramsey_decide s=%d target=%s N=%d: %s after %d nodes",
                s, target, N, "counterexample" if found is not None else "holds", nodes)
    if found is None:
        return RamseyVerdict(True, None, nodes)
    return RamseyVerdict(False, _to_graph(found), nodes)
