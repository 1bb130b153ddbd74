# app/embed/matching.py
# Good and bad pairs of vertex sets, red K_{t,t} packings, good components with their
# exception set, and the embed-or-partition dichotomy built on them.
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import networkx as nx

from app.embed.dense import DenseParams
from app.embed.embedding import CubeEmbedding
from app.engine import WorkerPool
from app.errors import ExceptionSetOverflow, InputError, ThresholdViolated
from app.graph.coloured import Colour, ColouredGraph, VertexSet, edge_count, pair_density
from app.graph.hypercube import middle_binomial
from app.graph.search import BICLIQUE_CAP, BicliqueWitness, CliqueWitness, find_biclique, zarankiewicz_threshold

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchParams:
    """Parameters of the dichotomy. t = C(m, m/2) and M = ceil((1+eps) 2^(n-m)) follow from m and n.

    `match_density` bounds the red density across parts after trimming (default 1/n^4).
    With `relaxed` set, threshold and size-condition misses are logged instead of raised.
    `dense` configures the quotient recursion (default: DenseParams.for_dimension).
    """

    epsilon: Fraction
    s: int
    k: int = 0
    m: int = 2
    gamma: Fraction = Fraction(1, 8)
    match_density: Optional[Fraction] = None
    size_constant: Fraction = Fraction(1)
    biclique_cap: int = BICLIQUE_CAP
    blue_degree_bound: Optional[int] = None
    relaxed: bool = True
    workers: Optional[int] = None
    dense: Optional[DenseParams] = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive", epsilon=str(self.epsilon))
        if not 0 < self.gamma < 1:
            raise InputError("gamma must lie in (0, 1)", gamma=str(self.gamma))
        if self.m < 1 or self.s < 2:
            raise InputError("need m >= 1 and s >= 2", m=self.m, s=self.s)

    @property
    def t(self) -> int:
        return middle_binomial(self.m)

    def dims(self, n: int) -> tuple[int, int, int]:
        """(m, t, M) for Q_n, with m capped at n."""
        m = min(self.m, n)
        return m, middle_binomial(m), math.ceil((1 + self.epsilon) * (1 << (n - m)))

    def M(self, n: int) -> int:
        return self.dims(n)[2]

    def density_threshold(self, n: int) -> Fraction:
        if self.match_density is not None:
            return Fraction(self.match_density)
        return Fraction(1, max(1, n) ** 4)

    def soft(self, message: str, **margins) -> None:
        if not self.relaxed:
            raise ThresholdViolated(message, stage="dichotomy", **margins)
        logger.warning("dichotomy: %s %s", message, margins)


def multicolour_ramsey_upper(r: int, s: int) -> int:
    """r^(rs), an upper bound on the r-colour Ramsey number R_r(s)."""
    if r < 2 or s < 2:
        raise InputError("multicolour Ramsey bound needs r, s >= 2", r=r, s=s)
    return r ** (r * s)


# -------- packings --------
@dataclass
class Packing:
    witnesses: list[BicliqueWitness]
    requested: int

    @property
    def shortfall(self) -> int:
        return max(0, self.requested - len(self.witnesses))

    def vertices(self) -> VertexSet:
        mask = 0
        for w in self.witnesses:
            mask |= w.vertices.mask
        return VertexSet(mask)


def pack_bicliques(
    g: ColouredGraph, U1: VertexSet, U2: VertexSet, t: int, count: int, cap: int = BICLIQUE_CAP
) -> Packing:
    """Up to `count` vertex-disjoint red K_{t,t}, left sides in U1, found greedily."""
    if not U1.isdisjoint(U2):
        raise InputError("pack_bicliques needs disjoint sets", overlap=len(U1 & U2))
    found: list[BicliqueWitness] = []
    left, right = U1, U2
    while len(found) < count:
        w = find_biclique(g, left, right, t, Colour.RED, cap)
        if w is None:
            break
        found.append(w)
        left, right = left - w.left, right - w.right
    return Packing(found, count)


# -------- pair verdicts --------
class PairStatus(str, Enum):
    GOOD = "good"
    BAD = "bad"
    UNDETERMINED = "undetermined"

    @property
    def symbol(self) -> str:
        return {"good": "G", "bad": "B", "undetermined": "?"}[self.value]


@dataclass(frozen=True)
class GoodPairVerdict:
    status: PairStatus
    margin: Fraction
    method: str = ""
    left: Optional[VertexSet] = None
    right: Optional[VertexSet] = None


def _trim(g: ColouredGraph, side: VertexSet, other: VertexSet, gamma: Fraction) -> VertexSet:
    """Drop the floor(gamma|side|) vertices with the most red edges into `other`."""
    drop = math.floor(gamma * len(side))
    if drop == 0:
        return side
    ranked = sorted(side, key=lambda v: (-(g.red_masks[v] & other.mask).bit_count(), v))
    return side - VertexSet.of(ranked[:drop])


def judge_pair(g: ColouredGraph, U1: VertexSet, U2: VertexSet, params: MatchParams) -> GoodPairVerdict:
    """Three-valued (m, gamma)-goodness.

    GOOD when either certificate holds for every trim of at most a gamma fraction per side:
      density: e_R(U1, U2) - 2 gamma |U1||U2| exceeds the Zarankiewicz bound for |U1| x |U2|;
      degree:  any t trimmed vertices of U1 keep >= t common red neighbours in any trim of U2.
    BAD when no red K_{t,t} survives the untrimmed pair or the greedy gamma-trim; the
    surviving sides are the certificate. UNDETERMINED otherwise.
    """
    if not U1 or not U2 or not U1.isdisjoint(U2):
        raise InputError("judge_pair needs two nonempty disjoint sets")
    t, gamma = params.t, params.gamma
    n1, n2 = len(U1), len(U2)
    red = edge_count(g, U1, U2, Colour.RED)
    density_margin = red - 2 * gamma * n1 * n2 - zarankiewicz_threshold(n1, n2, t)
    if density_margin > 0:
        return GoodPairVerdict(PairStatus.GOOD, Fraction(density_margin), "density")
    worst_blue = max((g.blue_masks[v] & U2.mask).bit_count() for v in U1)
    kept1 = n1 - math.floor(gamma * n1)
    degree_margin = n2 - math.floor(gamma * n2) - t * worst_blue - t
    if kept1 >= t and degree_margin >= 0:
        return GoodPairVerdict(PairStatus.GOOD, Fraction(degree_margin), "degree")
    if find_biclique(g, U1, U2, t, Colour.RED, params.biclique_cap) is None:
        return GoodPairVerdict(PairStatus.BAD, Fraction(0), "untrimmed", U1, U2)
    Y1 = _trim(g, U1, U2, gamma)
    Y2 = _trim(g, U2, Y1, gamma)
    if find_biclique(g, Y1, Y2, t, Colour.RED, params.biclique_cap) is None:
        return GoodPairVerdict(PairStatus.BAD, Fraction(len(Y1) + len(Y2), n1 + n2), "trimmed", Y1, Y2)
    return GoodPairVerdict(PairStatus.UNDETERMINED, Fraction(density_margin), "")


@dataclass
class VerdictMatrix:
    size: int
    verdicts: dict[tuple[int, int], GoodPairVerdict] = field(default_factory=dict)

    def __getitem__(self, pair: tuple[int, int]) -> GoodPairVerdict:
        i, j = pair
        return self.verdicts[(i, j) if i < j else (j, i)]

    def good_pairs(self) -> list[tuple[int, int]]:
        return [p for p, v in sorted(self.verdicts.items()) if v.status is PairStatus.GOOD]

    def count(self, status: PairStatus) -> int:
        return sum(1 for v in self.verdicts.values() if v.status is status)

    def export(self) -> str:
        """Status grid (G, B, ?, . on the diagonal) followed by one margin line per pair."""
        lines = [f"verdicts {self.size}"]
        for i in range(self.size):
            lines.append("".join("." if i == j else self[(i, j)].status.symbol for j in range(self.size)))
        for (i, j), v in sorted(self.verdicts.items()):
            lines.append(f"{i} {j} {v.status.value} {v.method or '-'} {v.margin}")
        return "\n".join(lines) + "\n"


def verdict_matrix(g: ColouredGraph, U: Sequence[VertexSet], params: MatchParams) -> VerdictMatrix:
    pairs = list(itertools.combinations(range(len(U)), 2))
    with WorkerPool(params.workers) as pool:
        results = pool.map_ordered(lambda p: judge_pair(g, U[p[0]], U[p[1]], params), pairs)
    matrix = VerdictMatrix(len(U), dict(zip(pairs, results)))
    for (i, j), v in matrix.verdicts.items():
        logger.debug("pair %d-%d: %s (%s, margin %s)", i, j, v.status.value, v.method, v.margin)
    return matrix


# -------- components and the exception set --------
@dataclass
class PartitionWithException:
    parts: list[list[VertexSet]]
    X: VertexSet
    indices: list[list[int]] = field(default_factory=list)
    undetermined: int = 0

    def part_mass(self, i: int) -> int:
        return sum(len(U) for U in self.parts[i])


def component_indices(matrix: VerdictMatrix) -> list[list[int]]:
    """Connected components of the GOOD graph, each sorted, ordered by least index."""
    graph = nx.Graph()
    graph.add_nodes_from(range(matrix.size))
    graph.add_edges_from(matrix.good_pairs())
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


def validate_partition(
    g: ColouredGraph, P: PartitionWithException, n: int, params: MatchParams
) -> list[str]:
    """|X|, per-part mass and cross-part red density after removing X."""
    problems = []
    size = 1 << n
    if len(P.X) > params.epsilon * size:
        problems.append(f"|X| = {len(P.X)} > eps*2^n = {float(params.epsilon * size):.4g}")
    for i in range(len(P.parts)):
        if P.part_mass(i) > (1 + params.epsilon) * size:
            problems.append(f"part {i} has mass {P.part_mass(i)} > (1+eps)2^n")
    threshold = params.density_threshold(n)
    for i, j in itertools.combinations(range(len(P.parts)), 2):
        for A in P.parts[i]:
            for B in P.parts[j]:
                A2, B2 = A - P.X, B - P.X
                if not A2 or not B2:
                    continue
                d = pair_density(g, A2, B2, Colour.RED)
                if d > threshold:
                    problems.append(
                        f"red density {float(d):.4g} > {float(threshold):.4g} between parts {i} and {j}"
                    )
    return problems


def good_components(
    g: ColouredGraph,
    U: Sequence[VertexSet],
    n: int,
    params: MatchParams,
    matrix: Optional[VerdictMatrix] = None,
) -> PartitionWithException:
    """Parts = GOOD components; X = what BAD certificates trim across parts.

    UNDETERMINED pairs count as non-edges and add nothing to X.
    """
    sets = list(U)
    union = 0
    for S in sets:
        if union & S.mask:
            raise InputError("good_components needs disjoint sets")
        union |= S.mask
    if matrix is None:
        matrix = verdict_matrix(g, sets, params)
    comps = component_indices(matrix)
    part_of = {i: c for c, comp in enumerate(comps) for i in comp}
    X = 0
    contribution: dict[tuple[int, int], int] = {}
    undetermined = 0
    for (i, j), v in matrix.verdicts.items():
        if part_of[i] == part_of[j]:
            continue
        if v.status is PairStatus.BAD:
            trimmed = (sets[i].mask & ~v.left.mask) | (sets[j].mask & ~v.right.mask)
            contribution[(i, j)] = trimmed.bit_count()
            X |= trimmed
        elif v.status is PairStatus.UNDETERMINED:
            undetermined += 1
    P = PartitionWithException(
        [[sets[i] for i in comp] for comp in comps], VertexSet(X), comps, undetermined
    )
    logger.info(
        "dichotomy: %d sets, %d components, masses %s, |X| = %d, %d undetermined cross pairs",
        len(sets), len(comps), [P.part_mass(c) for c in range(len(comps))], len(P.X), undetermined,
    )
    if len(P.X) > params.epsilon * (1 << n):
        worst = max(contribution, key=contribution.get)
        raise ExceptionSetOverflow(
            f"|X| = {len(P.X)} exceeds eps*2^n", stage="dichotomy",
            size=len(P.X), bound=str(params.epsilon * (1 << n)), pair=list(worst),
            pair_share=contribution[worst],
        )
    for p in validate_partition(g, P, n, params):
        params.soft(p)
    return P


# -------- the dichotomy --------
def matching_dichotomy(
    g: ColouredGraph,
    U: Sequence[VertexSet],
    n: int,
    params: MatchParams,
    seed: int = 0,
) -> Union[CubeEmbedding, PartitionWithException, CliqueWitness]:
    """Embed Q_n through the heaviest good component when its mass reaches (1+3eps)2^n,
    otherwise return the partition into good components with its exception set."""
    from app.embed.paths import build_m_path, path_embed

    sets = list(U)
    matrix = verdict_matrix(g, sets, params)
    comps = component_indices(matrix)
    masses = [sum(len(sets[i]) for i in comp) for comp in comps]
    if comps:
        heaviest = max(range(len(comps)), key=lambda c: (masses[c], -c))
        if masses[heaviest] >= (1 + 3 * params.epsilon) * (1 << n):
            comp = comps[heaviest]
            local = {i: k for k, i in enumerate(comp)}
            good = {(local[i], local[j]) for i, j in matrix.good_pairs() if i in local and j in local}
            logger.info("dichotomy: component %s has mass %d, building an m-path", comp, masses[heaviest])
            path = build_m_path(g, [sets[i] for i in comp], n, params, good)
            return path_embed(g, path, n, params, seed)
    return good_components(g, sets, n, params, matrix)
