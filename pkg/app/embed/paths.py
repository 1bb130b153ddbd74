# app/embed/paths.py
# m-paths: strings of vertex sets joined by many disjoint red K_{t,t}. Q_n is built as
# Q_m x Q_(n-m): red Q_m copies threaded along the path, then a dense embedding of
# Q_(n-m) into the quotient colouring on those copies.
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import networkx as nx
import numpy as np

from app.embed.dense import DenseParams, dense_embed
from app.embed.embedding import CubeEmbedding
from app.embed.matching import (
    MatchParams,
    PairStatus,
    judge_pair,
    multicolour_ramsey_upper,
    pack_bicliques,
)
from app.errors import (
    ExtensionStuck,
    InputError,
    InternalAssertion,
    PackingShortfall,
    PreconditionViolated,
    QuotientCliqueUnliftable,
    SizeConditionViolated,
)
from app.graph.coloured import Colour, ColouredGraph, VertexSet, bits_iter, max_internal_degree
from app.graph.hypercube import LayerRange, layer_count, layer_order
from app.graph.search import BicliqueWitness, CliqueWitness, clique_in_mask
from app.rng import derive_seed

logger = logging.getLogger(__name__)


@dataclass
class MPath:
    """Sets V_1..V_l in path order; packings[i] joins sets[i] (left sides) to sets[i+1]."""

    sets: list[VertexSet]
    packings: list[list[BicliqueWitness]] = field(default_factory=list)
    walk: list[int] = field(default_factory=list)


def validate_mpath(g: ColouredGraph, path: MPath, t: int, M: int) -> list[str]:
    problems = []
    seen = 0
    for i, V in enumerate(path.sets):
        if seen & V.mask:
            problems.append(f"set {i} overlaps an earlier set")
        seen |= V.mask
    if len(path.packings) != max(0, len(path.sets) - 1):
        problems.append(f"{len(path.packings)} packings for {len(path.sets)} sets")
    for i, packing in enumerate(path.packings):
        if len(packing) < M:
            problems.append(f"packing {i} has {len(packing)} < {M} bicliques")
        used = 0
        for w in packing:
            if w.vertices.mask & used:
                problems.append(f"packing {i} reuses a vertex")
            used |= w.vertices.mask
            if len(w.left) != t or len(w.right) != t:
                problems.append(f"packing {i} holds a biclique of the wrong size")
            if not (w.left.issubset(path.sets[i]) and w.right.issubset(path.sets[i + 1])):
                problems.append(f"packing {i} leaves its pair of sets")
            if not w.holds_in(g) or w.colour is not Colour.RED:
                problems.append(f"packing {i} holds a non-red biclique")
    return problems


# -------- building an m-path from a good component --------
def closed_walk(good: nx.Graph) -> list[int]:
    """Doubled spanning tree from the least node, children ascending: 2u-1 entries."""
    nodes = sorted(good.nodes())
    if not nodes:
        return []
    if not nx.is_connected(good):
        raise InputError("component is not connected through good pairs")
    tree = nx.dfs_tree(good, source=nodes[0])
    walk: list[int] = []

    def visit(v: int) -> None:
        walk.append(v)
        for child in sorted(tree.successors(v)):
            visit(child)
            walk.append(v)

    visit(nodes[0])
    return walk


def _balanced_fill(U: int, forced: list[int]) -> list[int]:
    """Split U into len(forced) parts containing the forced masks, sizes as equal as possible."""
    parts = list(forced)
    free = U
    for f in forced:
        free &= ~f
    for v in bits_iter(free):
        k = min(range(len(parts)), key=lambda i: (parts[i].bit_count(), i))
        parts[k] |= 1 << v
    return parts


def build_m_path(
    g: ColouredGraph,
    component: Sequence[VertexSet],
    n: int,
    params: MatchParams,
    good_pairs: Optional[set[tuple[int, int]]] = None,
) -> MPath:
    """Refine a good component into an m-path along the doubled spanning tree.

    Each walk edge gets M disjoint red K_{t,t}, packed greedily from vertices no earlier
    walk edge used. Every occurrence of a set in the walk becomes one refined set holding
    its packing vertices; the rest of the set is shared out so that occurrences of the
    same set differ in size by at most one.
    """
    sets = list(component)
    u = len(sets)
    if u == 0:
        raise InputError("empty component")
    good = nx.Graph()
    good.add_nodes_from(range(u))
    if good_pairs is None:
        good_pairs = {
            (i, j) for i in range(u) for j in range(i + 1, u)
            if judge_pair(g, sets[i], sets[j], params).status is PairStatus.GOOD
        }
    good.add_edges_from(sorted(good_pairs))
    m, t, M = params.dims(n)
    for i, U in enumerate(sets):
        lhs = params.gamma * math.sqrt(m) * len(U)
        rhs = float(params.size_constant) * (1 << n) * u
        if lhs < rhs:
            if not params.relaxed:
                raise SizeConditionViolated(
                    f"gamma*sqrt(m)*|U| = {float(lhs):.4g} < c*2^n*|component| = {rhs:.4g}",
                    stage="m-path", set=i,
                )
            logger.warning("m-path: size condition misses for set %d (%.4g < %.4g)", i, float(lhs), rhs)
    walk = closed_walk(good)
    if u == 1:
        return MPath([sets[0]], [], walk)

    used = 0
    packings: list[list[BicliqueWitness]] = []
    for step in range(len(walk) - 1):
        a, b = walk[step], walk[step + 1]
        packing = pack_bicliques(
            g, VertexSet(sets[a].mask & ~used), VertexSet(sets[b].mask & ~used), t, M, params.biclique_cap
        )
        if packing.shortfall:
            raise PackingShortfall(
                f"walk edge {step} ({a}-{b}) holds only {len(packing.witnesses)} of {M} red K_{t},{t}",
                stage="m-path", step=step, found=len(packing.witnesses), needed=M,
            )
        packings.append(packing.witnesses)
        used |= packing.vertices().mask
    for i, U in enumerate(sets):
        spent = (U.mask & used).bit_count()
        if spent > params.gamma * len(U):
            params.soft(f"packings use {spent} > gamma*|U| vertices of set {i}", set=i, spent=spent)

    occurrences: dict[int, list[int]] = {}
    for pos, idx in enumerate(walk):
        occurrences.setdefault(idx, []).append(pos)
    refined = [0] * len(walk)
    for idx, positions in occurrences.items():
        forced = []
        for pos in positions:
            mask = 0
            if pos > 0:
                mask |= sum(w.right.mask for w in packings[pos - 1])
            if pos < len(walk) - 1:
                mask |= sum(w.left.mask for w in packings[pos])
            forced.append(mask)
        for pos, part in zip(positions, _balanced_fill(sets[idx].mask, forced)):
            refined[pos] = part
        sizes = [refined[p].bit_count() for p in positions]
        if max(sizes) - min(sizes) > 1:
            params.soft(f"refined copies of set {idx} have sizes {sizes}", set=idx)
        if min(sizes) < len(sets[idx]) / (2 * u):
            params.soft(f"refined copy of set {idx} below |U|/(2|component|)", set=idx, size=min(sizes))
    path = MPath([VertexSet(m) for m in refined], packings, walk)
    logger.info("m-path: walk %s, %d sets, %d bicliques per edge", walk, len(path.sets), M)
    return path


# -------- quotient colourings --------
@dataclass
class QuotientColouring:
    """Quotient vertex i stands for the red Q_m copy lift[i] (lift[i][x] = host vertex of x)."""

    base: ColouredGraph
    lift: list[tuple[int, ...]]
    m: int

    @classmethod
    def build(cls, g: ColouredGraph, copies: Sequence[Sequence[int]], m: int) -> "QuotientColouring":
        """Edge ij is blue iff some x has x^(i) x^(j) blue in g."""
        images = np.asarray(copies, dtype=np.intp).reshape(len(copies), 1 << m)
        blue = np.zeros((len(copies), len(copies)), dtype=bool)
        for x in range(1 << m):
            col = images[:, x]
            blue |= g.blue[np.ix_(col, col)]
        np.fill_diagonal(blue, False)
        return cls(ColouredGraph(blue), [tuple(c) for c in copies], m)

    def sound(self, g: ColouredGraph) -> bool:
        for i in range(self.base.n_vertices):
            for j in bits_iter(self.base.red_masks[i]):
                if j > i and any(g.is_blue(self.lift[i][x], self.lift[j][x]) for x in range(1 << self.m)):
                    return False
        return True

    def lift_embedding(self, quotient: CubeEmbedding, n: int) -> CubeEmbedding:
        """Cube vertex z: low m bits pick the Q_m position, high bits the quotient vertex."""
        low = (1 << self.m) - 1
        return CubeEmbedding(n, tuple(
            self.lift[quotient.images[z >> self.m]][z & low] for z in range(1 << n)
        ))

    def lift_clique(self, g: ColouredGraph, witness: CliqueWitness, s: int) -> CliqueWitness:
        """s members of a blue quotient clique whose x-images are pairwise blue, for some x."""
        members = witness.members.members()
        for x in range(1 << self.m):
            hosts = [self.lift[q][x] for q in members]
            local = [
                sum(1 << b for b, h2 in enumerate(hosts) if b != a and g.is_blue(h, h2))
                for a, h in enumerate(hosts)
            ]
            hit = clique_in_mask(local, (1 << len(hosts)) - 1, s)
            if hit is not None:
                return CliqueWitness(VertexSet.of(hosts[b] for b in bits_iter(hit)), Colour.BLUE)
        raise QuotientCliqueUnliftable(
            f"blue quotient clique of {len(members)} has no position with a blue K_{s}",
            stage="path-embed", size=len(members),
        )


# -------- path embedding --------
def layer_split(sizes: Sequence[int], n: int, m: int, factor: Fraction) -> list[LayerRange]:
    """Greedy maximal b(i) with |V_i| >= factor * 2^(n-m) * v(Q_m[a(i), b(i)]), until b = m."""
    ranges: list[LayerRange] = []
    a = 0
    unit = factor * (1 << (n - m))
    for size in sizes:
        if a > m:
            break
        b = a - 1
        while b + 1 <= m and size >= unit * layer_count(LayerRange(m, a, b + 1)):
            b += 1
        if b < a:
            raise SizeConditionViolated(
                f"a set of {size} cannot host layer {a} of Q_{m}", stage="path-embed",
                size=size, layer=a, needed=str(unit * math.comb(m, a)),
            )
        ranges.append(LayerRange(m, a, b))
        a = b + 1
    if a <= m:
        raise SizeConditionViolated(
            f"path sets cover layers 0..{a - 1} of Q_{m} only", stage="path-embed", covered=a,
        )
    if sum(layer_count(r) for r in ranges) != 1 << m:
        raise InternalAssertion("layer split does not cover Q_m", stage="path-embed")
    return ranges


def _build_copies(
    g: ColouredGraph, path: MPath, ranges: list[LayerRange], M: int, m: int
) -> list[list[int]]:
    """M disjoint red Q_m copies; layers b(i), a(i+1) come from packing i, the rest is greedy."""
    owner = {}
    for i, rng in enumerate(ranges):
        for x in range(1 << m):
            if rng.a <= x.bit_count() <= rng.b:
                owner[x] = i
    order = layer_order(m)
    reserved = 0
    pre: list[dict[int, int]] = [dict() for _ in range(M)]
    for i in range(len(ranges) - 1):
        lo_layer, hi_layer = ranges[i].b, ranges[i + 1].a
        left_cube = [x for x in order if x.bit_count() == lo_layer]
        right_cube = [x for x in order if x.bit_count() == hi_layer]
        # an interior single-layer set already got its layer from packing i-1
        if i > 0 and ranges[i].a == ranges[i].b:
            continue
        for j in range(M):
            w = path.packings[i][j]
            for x, v in zip(left_cube, w.left.members()):
                pre[j][x] = v
                reserved |= 1 << v
            for x, v in zip(right_cube, w.right.members()):
                pre[j][x] = v
                reserved |= 1 << v
    used = reserved
    copies: list[list[int]] = []
    for j in range(M):
        images = dict(pre[j])
        for x in order:
            if x in images:
                continue
            cand = path.sets[owner[x]].mask & ~used
            for bit in range(m):
                y = x ^ (1 << bit)
                if y in images:
                    cand &= ~g.blue_masks[images[y]]
            if not cand:
                raise ExtensionStuck(
                    f"Q_{m} copy {j}: no red vertex left in set {owner[x]} for cube vertex {x}",
                    stage="path-embed", copy=j, set=owner[x], cube_vertex=x,
                )
            v = (cand & -cand).bit_length() - 1
            images[x] = v
            used |= 1 << v
        copy = [images[x] for x in range(1 << m)]
        for x in range(1 << m):
            for bit in range(m):
                y = x | (1 << bit)
                if y != x and g.is_blue(copy[x], copy[y]):
                    raise ExtensionStuck(
                        f"Q_{m} copy {j}: pre-placed vertices {copy[x]}, {copy[y]} are blue",
                        stage="path-embed", copy=j, cube_edge=[x, y],
                    )
        copies.append(copy)
    return copies


def path_embed(
    g: ColouredGraph, path: MPath, n: int, params: MatchParams, seed: int = 0
) -> Union[CubeEmbedding, CliqueWitness]:
    """Red Q_n along an m-path, or a blue K_s lifted from the quotient."""
    m, t, M = params.dims(n)
    total = sum(len(V) for V in path.sets)
    if total < (1 + 3 * params.epsilon) * (1 << n):
        params.soft(f"path mass {total} below (1+3eps)2^n", total=total)
    if params.blue_degree_bound is not None:
        for i, V in enumerate(path.sets):
            worst = max_internal_degree(g, V, Colour.BLUE)
            if worst > params.blue_degree_bound:
                raise PreconditionViolated(
                    f"set {i} has internal blue degree {worst} > {params.blue_degree_bound}",
                    stage="path-embed", set=i,
                )
    sizes = [len(V) for V in path.sets]
    try:
        ranges = layer_split(sizes, n, m, 1 + 2 * params.epsilon)
    except SizeConditionViolated:
        if not params.relaxed:
            raise
        tight = Fraction(M, 1 << (n - m))
        logger.warning("path-embed: layer split falls back to the tight factor %s", tight)
        ranges = layer_split(sizes, n, m, tight)
    for p in path.packings[: len(ranges) - 1]:
        if len(p) < M or any(min(len(w.left), len(w.right)) < t for w in p[:M]):
            raise PackingShortfall(
                f"path packings hold fewer than {M} red K_{t},{t}", stage="path-embed", needed=M, t=t,
            )
    logger.info("path-embed: layers %s over %d sets, %d copies of Q_%d",
                [(r.a, r.b) for r in ranges], len(path.sets), M, m)
    copies = _build_copies(g, path, ranges, M, m)
    quotient = QuotientColouring.build(g, copies, m)
    if not quotient.sound(g):
        raise InternalAssertion("quotient red edge lifts to a blue edge", stage="path-embed")
    s_quot = min(multicolour_ramsey_upper(1 << m, params.s) if m >= 1 else params.s, M + 1)
    dense = params.dense or (
        DenseParams.for_dimension(n - m, params.epsilon, s_quot) if n > m else None
    )
    if n == m:
        result: Union[CubeEmbedding, CliqueWitness] = CubeEmbedding(0, (0,))
    else:
        result = dense_embed(quotient.base, n - m, dense, derive_seed(seed, m))
    if isinstance(result, CliqueWitness):
        return quotient.lift_clique(g, result, params.s)
    embedding = quotient.lift_embedding(result, n)
    if embedding.blue_edges(g):
        raise InternalAssertion("lifted embedding uses a blue edge", stage="path-embed")
    return embedding
