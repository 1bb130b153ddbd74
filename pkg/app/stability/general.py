# app/stability/general.py
# Ingredients for a general blue pattern H: its chromatic profile, the matching lower-bound
# colouring, dependent random choice towards a common blue neighbourhood, and repair of an
# almost-red embedding by swapping pre-images.
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import networkx as nx

from app.embed.embedding import CubeEmbedding
from app.errors import CapacityError, InputError, InternalAssertion, PreconditionViolated, RetriesExhausted
from app.graph.coloured import ColouredGraph, VertexSet, bits_iter
from app.graph.constructions import multipartite_colouring
from app.rng import SplitMix64

logger = logging.getLogger(__name__)

MAX_H_VERTICES = 12
DRC_CONSTANT = 8
DRC_RETRIES = 100
DRC_SUBSET_BUDGET = 10**6


# -------- chromatic profile --------
@dataclass(frozen=True)
class HProfile:
    h: nx.Graph
    chi: int
    sigma: int

    @property
    def order(self) -> int:
        return self.h.number_of_nodes()


def _neighbour_lists(h: nx.Graph) -> tuple[list, list[list[int]]]:
    # high degree first, the usual order for colouring searches
    nodes = sorted(h.nodes(), key=lambda v: (-h.degree(v), str(v)))
    index = {v: i for i, v in enumerate(nodes)}
    return nodes, [[index[u] for u in h.neighbors(v) if u != v] for v in nodes]


def _colourings(nbrs: list[list[int]], k: int):
    """Proper colourings with at most k colours, colours introduced in order (one per
    permutation class). Yields the class sizes."""
    colours = [-1] * len(nbrs)
    sizes: list[int] = []

    def place(i: int):
        if i == len(nbrs):
            yield list(sizes)
            return
        for c in range(min(len(sizes) + 1, k)):
            if any(colours[j] == c for j in nbrs[i] if j < i):
                continue
            if c == len(sizes):
                sizes.append(0)
            sizes[c] += 1
            colours[i] = c
            yield from place(i + 1)
            colours[i] = -1
            sizes[c] -= 1
            if sizes[c] == 0:
                sizes.pop()

    yield from place(0)


def h_profile(h: nx.Graph) -> HProfile:
    """Exact chi(H) and sigma(H), the least possible smallest class over chi-colourings."""
    v = h.number_of_nodes()
    if v == 0:
        raise InputError("H needs at least one vertex")
    if v > MAX_H_VERTICES:
        raise CapacityError(
            f"H has {v} vertices; exhaustive colouring is limited to {MAX_H_VERTICES}",
            stage="profile-h", vertices=v, limit=MAX_H_VERTICES,
        )
    if any(h.has_edge(u, u) for u in h.nodes()):
        raise InputError("H must not have loops")
    _, nbrs = _neighbour_lists(h)
    chi = 1
    while next(_colourings(nbrs, chi), None) is None:
        chi += 1
    sigma = min(min(sizes) for sizes in _colourings(nbrs, chi) if len(sizes) == chi)
    return HProfile(h, chi, sigma)


def lower_bound_colouring(profile: HProfile, n: int) -> ColouredGraph:
    """chi-1 red cliques of size 2^n-1 and one of size sigma-1, blue between."""
    if n < 0:
        raise InputError("n must be non-negative", n=n)
    sizes = [(1 << n) - 1] * (profile.chi - 1)
    if profile.sigma > 1:
        sizes.append(profile.sigma - 1)
    return multipartite_colouring(sizes)


# -------- dependent random choice --------
@dataclass
class DrcResult:
    members: Optional[VertexSet]
    small: bool
    attempts: int = 0
    t: int = 0
    target: int = 0
    best_sizes: list[int] = field(default_factory=list)


def _common_floor_subset(
    g: ColouredGraph, pool: int, parts: Sequence[VertexSet], sigma: int, target: int, budget: int
) -> tuple[Optional[int], list[int]]:
    """Least sigma-subset of `pool` whose common blue neighbourhood keeps `target` vertices
    in every part. Also returns the best per-part sizes seen."""
    members = list(bits_iter(pool))
    blue = g.blue_masks
    best = [0] * len(parts)
    spent = [budget]

    def grow(start: int, chosen: int, common: list[int], left: int) -> Optional[int]:
        spent[0] -= 1
        if spent[0] < 0:
            return None
        if left == 0:
            return chosen
        for idx in range(start, len(members) - left + 1):
            v = members[idx]
            nxt = [c & blue[v] for c in common]
            sizes = [c.bit_count() for c in nxt]
            if min(sizes) > min(best):
                best[:] = sizes
            if min(sizes) < target:
                continue
            hit = grow(idx + 1, chosen | (1 << v), nxt, left - 1)
            if hit is not None:
                return hit
        return None

    return grow(0, 0, [S.mask for S in parts], sigma), best


def dependent_random_choice(
    g: ColouredGraph,
    A: VertexSet,
    parts: Sequence[VertexSet],
    sigma: int,
    n: int,
    seed: int = 0,
    constant: int = DRC_CONSTANT,
    floor: Optional[float] = None,
    retries: int = DRC_RETRIES,
    budget: int = DRC_SUBSET_BUDGET,
) -> DrcResult:
    """A sigma-subset of A whose common blue neighbourhood meets 2^n / n^(C-1) of every part.

    Each attempt draws t vertices per part with repetition and keeps the vertices of A
    blue to all of them. Sets A with |A| <= n^C are reported as small without sampling.
    """
    if sigma < 1 or not parts:
        raise InputError("need sigma >= 1 and at least one part", sigma=sigma, parts=len(parts))
    if n < 2:
        raise InputError("dependent random choice needs n >= 2", n=n)
    size = 1 << n
    floor = size / n**2 if floor is None else floor
    for v in A:
        for j, S in enumerate(parts):
            deg = (g.blue_masks[v] & S.mask).bit_count()
            if deg < floor:
                raise PreconditionViolated(
                    f"vertex {v} has {deg} blue neighbours in part {j + 1}, below the floor {floor:.4g}",
                    stage="drc", vertex=v, part=j + 1, degree=deg, floor=floor,
                )
    if len(A) <= n**constant:
        logger.debug("drc: |A| = %d <= n^C = %d, small set", len(A), n**constant)
        return DrcResult(None, True)
    s = len(parts) + 1
    t = max(1, math.floor(math.log(len(A)) / (2 * s * math.log(n))))
    target = math.ceil(size / n ** (constant - 1))
    best: list[int] = []
    for attempt in range(retries):
        rng = SplitMix64(seed, attempt)
        common = A.mask
        for S in parts:
            members = S.members()
            for _ in range(t):
                common &= g.blue_masks[rng.choice(members)]
        hit, sizes = _common_floor_subset(g, common, parts, sigma, target, budget)
        logger.debug("drc attempt %d: common %d, best part sizes %s", attempt, common.bit_count(), sizes)
        if min(sizes, default=0) > min(best, default=-1):
            best = sizes
        if hit is not None:
            X = VertexSet(hit)
            for j, S in enumerate(parts):
                common_part = S.mask
                for v in X:
                    common_part &= g.blue_masks[v]
                if common_part.bit_count() < target:
                    raise InternalAssertion(
                        "selected set misses the common-neighbourhood floor", stage="drc", part=j + 1,
                    )
            return DrcResult(X, False, attempt + 1, t, target, sizes)
    raise RetriesExhausted(
        f"no sigma-subset reached {target} common blue neighbours in every part after {retries} attempts",
        stage="drc", best=best, target=target, t=t,
    )


# -------- vertex switching --------
def _blue_incident(g: ColouredGraph, images: list[int], n: int, xs: Sequence[int]) -> int:
    seen = set()
    count = 0
    for x in xs:
        for i in range(n):
            y = x ^ (1 << i)
            edge = (min(x, y), max(x, y))
            if edge in seen:
                continue
            seen.add(edge)
            count += g.is_blue(images[x], images[y])
    return count


def _improving_move(
    g: ColouredGraph, images: list[int], n: int, u: int, spare: list[int]
) -> Optional[tuple[str, int]]:
    for z in range(1 << n):
        if z == u:
            continue
        before = _blue_incident(g, images, n, (u, z))
        images[u], images[z] = images[z], images[u]
        after = _blue_incident(g, images, n, (u, z))
        images[u], images[z] = images[z], images[u]
        if after < before:
            return "swap", z
    for v in spare:
        before = _blue_incident(g, images, n, (u,))
        old, images[u] = images[u], v
        after = _blue_incident(g, images, n, (u,))
        images[u] = old
        if after < before:
            return "move", v
    return None


def vertex_switch_repair(
    g: ColouredGraph, embedding: CubeEmbedding, spare: Optional[VertexSet] = None
) -> CubeEmbedding:
    """Swap pre-images while that strictly lowers the number of blue image edges.

    Blue cube edges are scanned in lexicographic order; for each endpoint the first swap
    partner (or unused `spare` host vertex) that lowers the count is applied and the scan
    restarts. The result may still carry blue edges; callers read them off `blue_edges`.
    """
    n = embedding.n
    images = list(embedding.images)
    free = [] if spare is None else [v for v in spare if v not in set(images)]
    blue = len(embedding.blue_edges(g))
    swaps = 0
    while blue:
        current = CubeEmbedding(n, tuple(images))
        applied = False
        for x, y in current.blue_edges(g):
            for u in (x, y):
                move = _improving_move(g, images, n, u, free)
                if move is None:
                    continue
                kind, other = move
                if kind == "swap":
                    images[u], images[other] = images[other], images[u]
                else:
                    free.remove(other)
                    free.append(images[u])
                    free.sort()
                    images[u] = other
                applied = True
                break
            if applied:
                break
        if not applied:
            break
        new_blue = len(CubeEmbedding(n, tuple(images)).blue_edges(g))
        if new_blue >= blue:
            raise InternalAssertion("vertex switch did not lower the blue count", stage="repair")
        blue = new_blue
        swaps += 1
    logger.info("repair: %d swaps, residual %d blue cube edges", swaps, blue)
    return CubeEmbedding(n, tuple(images))
