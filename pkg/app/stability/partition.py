# app/stability/partition.py
# Stability partition of a blue-K_s-free colouring into s-1 near-cliques plus an exception
# set, the final embedding of Q_n into a red clique with a few extra vertices, and the
# pipeline that certifies a red Q_n or a blue K_s on (s-1)(2^n-1)+1 vertices.
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from app.decomp.decompose import DEFAULT_RELAXED_RATIO, SizeSchedule, decompose
from app.decomp.families import FAMILY_BUDGET, RESTARTS
from app.embed.embedding import CubeEmbedding
from app.embed.matching import MatchParams, PartitionWithException, matching_dichotomy
from app.errors import (
    BudgetExceeded,
    CapacityError,
    EmbeddingStuck,
    InputError,
    InternalAssertion,
    PreconditionViolated,
    RamseyCubeError,
    ThresholdViolated,
)
from app.graph.coloured import (
    Colour,
    ColouredGraph,
    VertexSet,
    bits_iter,
    is_clique,
    pair_density,
    red_components,
)
from app.graph.constructions import ramsey_formula
from app.graph.hypercube import layer_order, neighbour_bits
from app.graph.search import CliqueWitness, clique_in_mask
from app.stability.general import vertex_switch_repair

logger = logging.getLogger(__name__)

CLIQUE_BUDGET = 10**6
THROW_OUT = Fraction(1, 4)

Outcome = Union["StabilityPartition", CubeEmbedding, CliqueWitness]


@dataclass(frozen=True)
class StabilityParams:
    """Knobs of the stability stage.

    `stability_density` bounds red density across parts, blue degree of exception
    vertices and the high-red-degree sets Y (default 1/n^2). The decomposition runs with
    `decompose_epsilon` (default min(eps, 1/2)) on `schedule` (default geometric in
    `a_ratio` steps). `match` configures the dichotomy (default m = min(2, n)).
    """

    epsilon: Fraction
    s: int
    stability_density: Optional[Fraction] = None
    decompose_epsilon: Optional[Fraction] = None
    a_ratio: Fraction = DEFAULT_RELAXED_RATIO
    schedule: Optional[SizeSchedule] = None
    match: Optional[MatchParams] = None
    throw_out: Fraction = THROW_OUT
    relaxed: bool = True
    restarts: int = RESTARTS
    family_budget: int = FAMILY_BUDGET
    clique_budget: int = CLIQUE_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "a_ratio", Fraction(self.a_ratio))
        object.__setattr__(self, "throw_out", Fraction(self.throw_out))
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive", epsilon=str(self.epsilon))
        if self.s < 2:
            raise InputError("s must be at least 2", s=self.s)

    def density(self, n: int) -> Fraction:
        if self.stability_density is not None:
            return Fraction(self.stability_density)
        return Fraction(1, max(1, n) ** 2)

    def decomposition_epsilon(self) -> Fraction:
        if self.decompose_epsilon is not None:
            return Fraction(self.decompose_epsilon)
        return min(self.epsilon, Fraction(1, 2))

    def size_schedule(self, N: int) -> SizeSchedule:
        if self.schedule is not None:
            return self.schedule
        ratio = self.a_ratio if self.relaxed else None
        return SizeSchedule.geometric(N, self.decomposition_epsilon(), ratio, self.relaxed)

    def match_params(self, n: int) -> MatchParams:
        if self.match is not None:
            return self.match
        return MatchParams(self.epsilon, self.s, m=max(1, min(2, n)), relaxed=self.relaxed)

    def soft(self, message: str, **margins) -> None:
        if not self.relaxed:
            raise ThresholdViolated(message, stage="stability", **margins)
        logger.warning("stability: %s %s", message, margins)


@dataclass
class StabilityPartition:
    """parts[0] is the exception set S_0, parts[1..s-1] the near-cliques."""

    n: int
    parts: list[VertexSet]
    margins: dict[str, object] = field(default_factory=dict)

    @property
    def exception(self) -> VertexSet:
        return self.parts[0]

    @property
    def cliques(self) -> list[VertexSet]:
        return self.parts[1:]


@dataclass(frozen=True)
class NoCertificateRequired:
    """Below (s-1)(2^n-1)+1 vertices nothing is forced; the extremal colouring shows it."""

    n_vertices: int
    threshold: int
    reason: str = "fewer vertices than (s-1)(2^n-1)+1"


# -------- helpers --------
def _red_into(g: ColouredGraph, v: int, T: int) -> int:
    return (g.red_masks[v] & T).bit_count()


def _blue_into(g: ColouredGraph, v: int, T: int) -> int:
    return (g.blue_masks[v] & T).bit_count()


def high_red_set(g: ColouredGraph, S: VertexSet, T: VertexSet, density: Fraction) -> VertexSet:
    """Vertices of S with at least density*|T| red neighbours in T."""
    if not T:
        return VertexSet()
    bound = density * len(T)
    return VertexSet.of(v for v in S if _red_into(g, v, T.mask) >= bound)


def _extend_blue(g: ColouredGraph, chosen: list[int], pools: Sequence[int]) -> Optional[list[int]]:
    """Extend `chosen` by the least common blue neighbour in each pool, in order."""
    out = list(chosen)
    for pool in pools:
        cand = pool
        for v in out:
            cand &= g.blue_masks[v]
        if not cand:
            return None
        out.append((cand & -cand).bit_length() - 1)
    return out


def validate_stability(
    g: ColouredGraph, P: StabilityPartition, n: int, params: StabilityParams
) -> list[str]:
    """The four partition conditions, recomputed from scratch, plus coverage."""
    problems = []
    size = 1 << n
    density = params.density(n)
    union = 0
    for j, S in enumerate(P.parts):
        if union & S.mask:
            problems.append(f"part {j} overlaps an earlier part")
        union |= S.mask
    if union != g.full_mask:
        problems.append(f"parts cover {union.bit_count()} of {g.n_vertices} vertices")
    if len(P.exception) > params.epsilon * size:
        problems.append(f"|S_0| = {len(P.exception)} > eps*2^n = {float(params.epsilon * size):.4g}")
    for j, S in enumerate(P.cliques, start=1):
        if len(S) > (1 + params.epsilon) * size:
            problems.append(f"|S_{j}| = {len(S)} > (1+eps)2^n = {float((1 + params.epsilon) * size):.4g}")
        if not is_clique(g, S, Colour.RED):
            problems.append(f"S_{j} is not a red clique")
    for (j, A), (k, B) in itertools.combinations(enumerate(P.cliques, start=1), 2):
        if A and B:
            d = pair_density(g, A, B, Colour.RED)
            if d > density:
                problems.append(f"red density {float(d):.4g} > {float(density):.4g} between S_{j} and S_{k}")
    for v in P.exception:
        if not any(_blue_into(g, v, S.mask) <= density * len(S) for S in P.cliques):
            problems.append(f"exception vertex {v} has many blue neighbours in every part")
    return problems


# -------- stability partition --------
def _greedy_across_parts(
    g: ColouredGraph, keep: list[list[VertexSet]], s: int, budget: int
) -> Optional[CliqueWitness]:
    """One vertex per part from the largest kept set of the first s parts, each blue to
    the earlier ones; falls back to an exact search over those sets."""
    heads = []
    for sets in keep[:s]:
        best = max(sets, key=len, default=VertexSet())
        heads.append(best.mask)
    chosen = _extend_blue(g, [], heads)
    if chosen is not None:
        return CliqueWitness(VertexSet.of(chosen), Colour.BLUE)
    union = 0
    for sets in keep:
        for U in sets:
            union |= U.mask
    try:
        hit = clique_in_mask(g.blue_masks, union, s, budget)
    except CapacityError:
        hit = None
    return None if hit is None else CliqueWitness(VertexSet(hit), Colour.BLUE)


def _clean_cliques(
    g: ColouredGraph, parts: list[int], s: int, params: StabilityParams
) -> Union[list[int], CliqueWitness]:
    """Remove blue edges inside the parts: a blue edge that extends to a blue K_s across
    the other parts is returned as a witness; otherwise (relaxed) the endpoint with more
    blue neighbours in its part leaves."""
    for j in range(len(parts)):
        while True:
            edge = None
            for u in bits_iter(parts[j]):
                inside = g.blue_masks[u] & parts[j]
                if inside:
                    edge = (u, (inside & -inside).bit_length() - 1)
                    break
            if edge is None:
                break
            u, v = edge
            others = [parts[k] for k in range(len(parts)) if k != j]
            if len(others) >= s - 2:
                chosen = _extend_blue(g, [u, v], others[: s - 2])
                if chosen is not None:
                    return CliqueWitness(VertexSet.of(chosen), Colour.BLUE)
            if not params.relaxed:
                raise ThresholdViolated(
                    f"blue edge {u}-{v} inside part {j + 1} does not extend to a blue K_{s}",
                    stage="stability", part=j + 1, edge=[u, v],
                )
            du, dv = _blue_into(g, u, parts[j]), _blue_into(g, v, parts[j])
            drop = u if (du, u) > (dv, v) else v
            logger.warning("stability: moving %d out of part %d (blue edge %d-%d)", drop, j + 1, u, v)
            parts[j] &= ~(1 << drop)
    return parts


def _absorb(g: ColouredGraph, parts: list[int], exception: int, n: int, params: StabilityParams) -> int:
    """Move exception vertices into a part they are red-complete to while every
    partition condition keeps holding."""
    cap = (1 + params.epsilon) * (1 << n)
    density = params.density(n)
    for v in bits_iter(exception):
        for j, S in enumerate(parts):
            if S & ~g.red_masks[v] or S.bit_count() + 1 > cap:
                continue
            fits = True
            for k, T in enumerate(parts):
                if k == j or not T:
                    continue
                if _red_into(g, v, T) >= density * T.bit_count():
                    fits = False
                    break
                red = sum(_red_into(g, w, T) for w in bits_iter(S)) + _red_into(g, v, T)
                if Fraction(red, (S.bit_count() + 1) * T.bit_count()) > density:
                    fits = False
                    break
            if fits:
                parts[j] |= 1 << v
                exception &= ~(1 << v)
                break
    return exception


def stability_partition(
    g: ColouredGraph, n: int, s: int, params: StabilityParams, seed: int = 0
) -> Outcome:
    """Partition V into S_0 and s-1 red cliques, or return a red Q_n / blue K_s met on the way.

    Runs the decomposition and the dichotomy; with s or more good parts a blue K_s is
    built greedily across them, otherwise every part loses its share of the exception set
    X and its high-red-degree vertices Y, blue edges left inside a part are resolved, and
    what remains unplaced becomes S_0.
    """
    if n < 1:
        raise InputError("n must be positive", n=n)
    if s < 2:
        raise InputError("s must be at least 2", s=s)
    N = g.n_vertices
    delta = Fraction(1, 2 * s)
    if N < (1 - delta) * (s - 1) * (1 << n):
        raise PreconditionViolated(
            f"{N} vertices < (1-1/2s)(s-1)2^n", stage="stability", vertices=N,
            needed=str((1 - delta) * (s - 1) * (1 << n)),
        )
    density = params.density(n)
    try:
        dec = decompose(
            g, params.decomposition_epsilon(), s, params.size_schedule(N), seed,
            params.restarts, params.family_budget,
        )
    except RamseyCubeError as err:
        raise err.tagged("decompose")
    logger.info("stability: decomposition level %d, %d sets", dec.family.level, len(dec.family.sets))
    try:
        result = matching_dichotomy(g, dec.family.sets, n, params.match_params(n), seed)
    except RamseyCubeError as err:
        raise err.tagged("dichotomy")
    if not isinstance(result, PartitionWithException):
        return result

    X = result.X
    keep: list[list[VertexSet]] = []
    thrown = 0
    for sets in result.parts:
        kept = []
        for U in sets:
            if len(X & U) > params.throw_out * len(U):
                thrown |= U.mask
            else:
                kept.append(U)
        keep.append(kept)
    bodies = [VertexSet(sum(U.mask for U in sets)) - X for sets in keep]
    cleaned: list[list[VertexSet]] = []
    for i, sets in enumerate(keep):
        row = []
        for U in sets:
            body = U - X
            Y = 0
            for k, T in enumerate(bodies):
                if k != i:
                    Y |= high_red_set(g, body, T, density).mask
            row.append(body - VertexSet(Y))
        cleaned.append(row)
    logger.info("stability: %d good parts, |X| = %d, %d vertices thrown out",
                len(cleaned), len(X), thrown.bit_count())

    if len(cleaned) >= s:
        witness = _greedy_across_parts(g, cleaned, s, params.clique_budget)
        if witness is not None:
            return witness
        raise ThresholdViolated(
            f"{len(cleaned)} good parts but no blue K_{s} across them", stage="stability",
            parts=len(cleaned),
        )
    if len(cleaned) < s - 1:
        logger.warning("stability: only %d good parts, padding with empty parts", len(cleaned))
    parts = [sum(U.mask for U in row) for row in cleaned]
    parts += [0] * (s - 1 - len(parts))
    outcome = _clean_cliques(g, parts, s, params)
    if isinstance(outcome, CliqueWitness):
        return outcome
    placed = 0
    for S in parts:
        placed |= S
    exception = _absorb(g, parts, g.full_mask & ~placed, n, params)

    for v in bits_iter(exception):
        if any(_blue_into(g, v, S) <= density * S.bit_count() for S in parts):
            continue
        chosen = _extend_blue(g, [v], parts)
        if chosen is not None:
            return CliqueWitness(VertexSet.of(chosen), Colour.BLUE)

    P = StabilityPartition(n, [VertexSet(exception)] + [VertexSet(S) for S in parts])
    size = 1 << n
    P.margins = {
        "exception": float(params.epsilon * size - len(P.exception)),
        "largest_part": float((1 + params.epsilon) * size - max(len(S) for S in P.cliques)),
        "thrown_out": thrown.bit_count(),
    }
    for p in validate_stability(g, P, n, params):
        params.soft(p)
    logger.info("stability: |S_0| = %d, parts %s", len(P.exception), [len(S) for S in P.cliques])
    return P


# -------- final embedding --------
def final_preconditions(g: ColouredGraph, X: VertexSet, Y: VertexSet, n: int) -> list[tuple[str, str]]:
    size = 1 << n
    out = []
    if len(X) + len(Y) < size:
        out.append(("size", f"|X| + |Y| = {len(X) + len(Y)} < 2^n = {size}"))
    if len(Y) > size >> 3:
        out.append(("extra", f"|Y| = {len(Y)} > 2^(n-3) = {size >> 3}"))
    if not is_clique(g, X, Colour.RED):
        out.append(("clique", "X is not a red clique"))
    bound = Fraction(len(X), max(1, n) ** 2)
    worst = max((_blue_into(g, v, X.mask) for v in Y), default=0)
    if worst > bound:
        out.append(("blue-degree", f"a vertex of Y has {worst} > |X|/n^2 = {float(bound):.4g} blue neighbours in X"))
    return out


def final_embed(
    g: ColouredGraph, X: VertexSet, Y: VertexSet, n: int, check: bool = True
) -> CubeEmbedding:
    """Q_n into the red clique X plus the extra set Y.

    The lowest even layers (and part of layer 2l) go to Y in lexicographic order, then
    every other cube vertex takes the least unused vertex of X avoiding the blue
    neighbourhoods of its embedded cube neighbours. With `check` off the preconditions are
    not enforced and a stuck vertex takes the unused vertex with fewest blue conflicts.
    """
    if not X.isdisjoint(Y):
        raise InputError("X and Y must be disjoint", overlap=len(X & Y))
    g.check_set(X | Y)
    size = 1 << n
    if check:
        for name, message in final_preconditions(g, X, Y, n):
            raise PreconditionViolated(message, stage="final-embed", which=name)
    elif len(X) + len(Y) < size:
        raise PreconditionViolated(
            f"|X| + |Y| = {len(X) + len(Y)} < 2^n", stage="final-embed", which="size",
        )

    ell, filled = 0, 0
    while 2 * ell <= n and filled + math.comb(n, 2 * ell) <= len(Y):
        filled += math.comb(n, 2 * ell)
        ell += 1
    order = layer_order(n)
    y_slots = [x for x in order if x.bit_count() % 2 == 0 and x.bit_count() < 2 * ell]
    y_slots += [x for x in order if x.bit_count() == 2 * ell][: len(Y) - filled]
    images: dict[int, int] = dict(zip(y_slots, Y.members()))
    used = VertexSet.of(images.values()).mask
    spare = (X.mask | Y.mask) & ~used

    for x in order:
        if x in images:
            continue
        placed = [images[y] for y in (x ^ (1 << i) for i in range(n)) if y in images]
        cand = X.mask & ~used
        for v in placed:
            cand &= ~g.blue_masks[v]
        if not cand:
            if check:
                raise InternalAssertion(
                    f"no red candidate for cube vertex {x} although the preconditions hold",
                    stage="final-embed", cube_vertex=x, weight=x.bit_count(), ell=ell,
                )
            pool = spare & ~used
            if not pool:
                raise EmbeddingStuck("ran out of host vertices", stage="final-embed", cube_vertex=x)
            cand = min(bits_iter(pool), key=lambda v: (sum(g.is_blue(v, w) for w in placed), v))
            cand = 1 << cand
        v = (cand & -cand).bit_length() - 1
        images[x] = v
        used |= 1 << v
    embedding = CubeEmbedding.from_map(n, images)
    if check and embedding.blue_edges(g):
        raise InternalAssertion("final embedding used a blue edge", stage="final-embed")
    return embedding


# -------- main pipeline --------
def _exception_owner(g: ColouredGraph, v: int, parts: Sequence[VertexSet], density: Fraction) -> int:
    """Least j (1-based) whose part holds few blue neighbours of v; else the part with the
    smallest blue share."""
    for j, S in enumerate(parts, start=1):
        if _blue_into(g, v, S.mask) <= density * len(S):
            return j
    shares = [(Fraction(_blue_into(g, v, S.mask), max(1, len(S))), j) for j, S in enumerate(parts, start=1)]
    return min(shares)[1]


def _certify(
    g: ColouredGraph, s: int, n: int, params: StabilityParams, seed: int
) -> Union[CubeEmbedding, CliqueWitness]:
    result = stability_partition(g, n, s, params, seed)
    if not isinstance(result, StabilityPartition):
        return result
    density = params.density(n)
    extra: dict[int, list[int]] = {j: [] for j in range(1, s)}
    for v in result.exception:
        extra[_exception_owner(g, v, result.cliques, density)].append(v)
    size = 1 << n
    chosen = next((j for j in range(1, s) if len(result.parts[j]) + len(extra[j]) >= size), None)
    if chosen is None:
        raise InternalAssertion(
            "no part reaches 2^n vertices with its exception vertices", stage="stability",
            sizes=[len(result.parts[j]) + len(extra[j]) for j in range(1, s)],
        )
    X, Y = result.parts[chosen], VertexSet.of(extra[chosen])
    logger.info("pipeline: final embedding into part %d (|X| = %d, |Y| = %d)", chosen, len(X), len(Y))
    problems = final_preconditions(g, X, Y, n)
    if not problems or not params.relaxed:
        try:
            return final_embed(g, X, Y, n)
        except RamseyCubeError as err:
            raise err.tagged("final-embed")
    for name, message in problems:
        logger.warning("pipeline: final precondition %s fails: %s", name, message)
    embedding = final_embed(g, X, Y, n, check=False)
    if embedding.blue_edges(g):
        embedding = vertex_switch_repair(g, embedding, spare=g.vertices())
    residual = len(embedding.blue_edges(g))
    if residual:
        raise EmbeddingStuck(
            f"{residual} blue cube edges left after repair", stage="final-embed", residual=residual,
        )
    return embedding


def _greedy_red_clique(g: ColouredGraph, within: int, start: int, size: int) -> Optional[list[int]]:
    chosen, cand = [start], within & g.red_masks[start]
    while cand and len(chosen) < size:
        v = max(bits_iter(cand), key=lambda u: ((g.red_masks[u] & cand).bit_count(), -u))
        chosen.append(v)
        cand &= g.red_masks[v]
    return chosen if len(chosen) == size else None


def exact_red_cube(g: ColouredGraph, n: int, budget: int = CLIQUE_BUDGET) -> Optional[CubeEmbedding]:
    """A red Q_n by backtracking over cube vertices in layer order, or None.

    Only red components with at least 2^n vertices are searched. Each is first scanned for
    a red clique on 2^n vertices grown greedily from every start vertex. Hosts are tried by
    descending red degree; a placement is undone as soon as an unplaced cube neighbour
    has no free red host left. Raises BudgetExceeded after `budget` placements.
    """
    size = 1 << n
    order = layer_order(n)
    ranked = sorted(range(g.n_vertices), key=lambda v: (-g.red_masks[v].bit_count(), v))
    spent = 0
    for comp in red_components(g):
        if len(comp) < size:
            continue
        hosts = [v for v in ranked if v in comp]
        for start in hosts:
            clique = _greedy_red_clique(g, comp.mask, start, size)
            if clique is not None:
                return CubeEmbedding(n, tuple(clique))
        images = [-1] * size

        def free(x: int, used: int) -> int:
            cand = comp.mask & ~used
            for y in neighbour_bits(x, n):
                if images[y] >= 0:
                    cand &= g.red_masks[images[y]]
            return cand

        tried = [0] * size
        used, k = 0, 0
        while 0 <= k < size:
            x = order[k]
            if images[x] >= 0:
                used &= ~(1 << images[x])
                images[x] = -1
            cand = free(x, used)
            placed = False
            while tried[k] < len(hosts):
                v = hosts[tried[k]]
                tried[k] += 1
                if not (cand >> v) & 1:
                    continue
                spent += 1
                if spent > budget:
                    raise BudgetExceeded("red cube search budget exhausted", stage="cube-search", budget=budget)
                images[x] = v
                used |= 1 << v
                if all(free(y, used) for y in neighbour_bits(x, n) if images[y] < 0):
                    placed = True
                    break
                images[x] = -1
                used &= ~(1 << v)
            if placed:
                k += 1
                if k < size:
                    tried[k] = 0
            else:
                k -= 1
        if k == size:
            return CubeEmbedding(n, tuple(images))
    return None


def ramsey_main(
    g: ColouredGraph,
    s: int,
    n: int,
    params: StabilityParams,
    seed: int = 0,
    any_size: bool = False,
) -> Union[CubeEmbedding, CliqueWitness, NoCertificateRequired]:
    """A red Q_n or a blue K_s in a colouring on (s-1)(2^n-1)+1 vertices.

    With `any_size`, smaller colourings return NoCertificateRequired and larger ones are
    cut to their first (s-1)(2^n-1)+1 vertices. When the pipeline fails, an exact blue
    K_s search and then an exact red Q_n search over the whole colouring are tried
    before the error is passed on.
    """
    if s < 1 or n < 0:
        raise InputError("need s >= 1 and n >= 0", s=s, n=n)
    need = ramsey_formula(s, n)
    N = g.n_vertices
    if N != need:
        if not any_size:
            raise PreconditionViolated(
                f"expected {need} vertices, got {N}", stage="pipeline", vertices=N, needed=need,
            )
        if N < need:
            return NoCertificateRequired(N, need)
        g = g.induced(list(range(need)))
    size = 1 << n
    if s == 1:
        return CliqueWitness(VertexSet.of([0]), Colour.BLUE)
    if not any(g.blue_masks):
        return CubeEmbedding(n, tuple(range(size)))
    if s == 2:
        u = next(v for v in range(need) if g.blue_masks[v])
        v = (g.blue_masks[u] & -g.blue_masks[u]).bit_length() - 1
        return CliqueWitness(VertexSet.of([u, v]), Colour.BLUE)

    logger.info("pipeline: s = %d, n = %d, %d vertices", s, n, need)
    try:
        result = _certify(g, s, n, params, seed)
    except RamseyCubeError as err:
        if isinstance(err, InternalAssertion):
            raise
        try:
            hit = clique_in_mask(g.blue_masks, g.full_mask, s, params.clique_budget)
        except CapacityError:
            hit = None
        if hit is not None:
            logger.warning("pipeline: %s at %s; returning a blue K_%d from exact search", err.condition, err.stage, s)
            result = CliqueWitness(VertexSet(hit), Colour.BLUE)
        else:
            try:
                cube = exact_red_cube(g, n, params.clique_budget)
            except CapacityError:
                cube = None
            if cube is None:
                raise err
            logger.warning("pipeline: %s at %s; returning a red Q_%d from exact search", err.condition, err.stage, n)
            result = cube

    if isinstance(result, CubeEmbedding):
        if result.n != n or len(set(result.images)) != size or result.blue_edges(g):
            raise InternalAssertion("pipeline produced an invalid embedding", stage="pipeline")
    elif len(result.members) != s or not result.holds_in(g):
        raise InternalAssertion("pipeline produced an invalid blue clique", stage="pipeline")
    return result
