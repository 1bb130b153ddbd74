# app/embed/dense.py
# Dense embedder: level-r assignments of Q_n into a colouring with few blue edges per
# vertex, refined level by level and finished by a greedy red embedding.
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

from app.embed.embedding import CubeEmbedding
from app.errors import (
    BlueCliqueFound,
    CapacityError,
    EmbeddingStuck,
    InputError,
    InternalAssertion,
    ParametersInfeasible,
    PreconditionViolated,
    RetriesExhausted,
)
from app.graph.coloured import Colour, ColouredGraph, VertexSet, bits_iter
from app.graph.hypercube import PrefixVector, prefix_divergence
from app.graph.search import CliqueWitness, clique_in_mask
from app.rng import SplitMix64, derive_seed

logger = logging.getLogger(__name__)

RETRIES = 100
DEFAULT_DECAY = 4
FALLBACK_CLIQUE_BUDGET = 10**6


@dataclass(frozen=True)
class DenseParams:
    """Knobs of the dense embedder.

    d_schedule holds d(0) = 0 < d(1) < ... < d(k+1). d(k+2) only appears inside degree
    thresholds and is d_top (default d(k+1) + 1). `decay` is the exponent base of the
    blue-degree thresholds and must be even.
    """

    epsilon: Fraction
    s: int
    k: int
    d_schedule: tuple[int, ...]
    d_top: Optional[int] = None
    decay: int = DEFAULT_DECAY
    c_gap: Fraction = Fraction(1)
    relaxed: bool = False
    retries: int = RETRIES

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "c_gap", Fraction(self.c_gap))
        object.__setattr__(self, "d_schedule", tuple(self.d_schedule))
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive", epsilon=str(self.epsilon))
        if self.s < 2:
            raise InputError("the dense embedder needs s >= 2", s=self.s)
        if self.k < 0 or len(self.d_schedule) != self.k + 2:
            raise InputError(
                f"d_schedule must list d(0..k+1), {self.k + 2} values", got=len(self.d_schedule)
            )
        if self.d_schedule[0] != 0:
            raise InputError("d(0) must be 0", d0=self.d_schedule[0])
        if any(b <= a for a, b in zip(self.d_schedule, self.d_schedule[1:])):
            raise InputError("d_schedule must be strictly increasing", d=list(self.d_schedule))
        if self.decay < 2 or self.decay % 2:
            raise InputError("decay must be an even integer >= 2", decay=self.decay)
        if self.d_top is not None and self.d_top <= self.d_schedule[-1]:
            raise InputError("d_top must exceed d(k+1)", d_top=self.d_top)
        if self.c_gap < 1:
            raise InputError("c_gap must be at least 1", c_gap=str(self.c_gap))
        if self.retries < 1:
            raise InputError("retries must be positive", retries=self.retries)

    # -------- derived quantities --------
    @property
    def gamma(self) -> Fraction:
        return self.epsilon / (3 * (self.k + 2))

    def d(self, t: int) -> int:
        if t == self.k + 2:
            return self.d_top if self.d_top is not None else self.d_schedule[-1] + 1
        return self.d_schedule[t]

    def set_size(self, n: int, r: int) -> int:
        """|A(x)| at level r."""
        return math.floor((1 + 3 * (self.k + 2 - r) * self.gamma) * (1 << (n - self.d(r))))

    def core_size(self, n: int, r: int) -> int:
        """|C(y)'| while refining level r into level r+1."""
        return math.floor((1 + (3 * (self.k + 1 - r) + 1) * self.gamma) * (1 << (n - self.d(r + 1))))

    def degree_bound(self, n: int, r: int, t: int) -> Fraction:
        """Blue degree allowed into A(x) from A(x') at level r, t = t(x, x')."""
        return Fraction(1 << (n - self.d(r)), self.d(t) ** (self.decay * (self.k + 2 - r)))

    def core_bound(self, n: int, r: int, t: int) -> Fraction:
        return Fraction(1 << (n - self.d(r + 1)), self.d(t) ** (self.decay * (self.k + 1 - r) + self.decay // 2))

    def trim_bound(self, n: int, r: int, t: int) -> Fraction:
        return Fraction(1 << (n - self.d(r + 1)), self.d(t) ** (self.decay * (self.k + 1 - r)))

    # -------- feasibility --------
    def problems(self, n: int) -> list[str]:
        out = []
        if self.d_schedule[-1] > n:
            out.append(f"d(k+1) = {self.d_schedule[-1]} exceeds n = {n}")
        for r in range(self.k + 1):
            if self.d(r + 1) < self.s * self.d(r) * self.c_gap:
                out.append(f"d({r + 1}) = {self.d(r + 1)} < s*d({r})*c_gap = {self.s * self.d(r) * self.c_gap}")
            lhs = 2 ** (self.d(r + 1) / self.s)
            rhs = float(self.d(r + 2) ** (5 * self.k) * self.c_gap)
            if lhs < rhs:
                out.append(f"2^(d({r + 1})/s) = {lhs:.4g} < d({r + 2})^(5k)*c_gap = {rhs:.4g}")
        return out

    def check(self, n: int) -> None:
        problems = self.problems(n)
        if not problems:
            return
        if not self.relaxed:
            raise ParametersInfeasible("; ".join(problems), stage="dense", n=n)
        for p in problems:
            logger.warning("dense params: %s", p)

    # -------- builders --------
    @classmethod
    def geometric(
        cls, epsilon: Fraction, s: int, k: int, d1: int, growth: Fraction, **kwargs
    ) -> "DenseParams":
        """d(r) = ceil(d1 * growth^(r-1)) for r = 1..k+1."""
        growth = Fraction(growth)
        if d1 < 1 or growth < 1:
            raise InputError("geometric schedule needs d1 >= 1 and growth >= 1", d1=d1, growth=str(growth))
        d = [0]
        for r in range(1, k + 2):
            d.append(max(d[-1] + 1, math.ceil(d1 * growth ** (r - 1))))
        return cls(Fraction(epsilon), s, k, tuple(d), **kwargs)

    @classmethod
    def for_dimension(cls, n: int, epsilon: Fraction, s: int, relaxed: bool = True, **kwargs) -> "DenseParams":
        """Single refinement (k = 0) with d(1) large enough that the reserve 2*gamma*2^n
        left for the last child covers a whole child set."""
        if n < 1:
            raise InputError("for_dimension needs n >= 1", n=n)
        gamma = Fraction(epsilon) / 6
        d1 = max(1, min(n, math.ceil(math.log2((1 + 4 * gamma) / (2 * gamma)))))
        return cls(Fraction(epsilon), max(2, s), 0, (0, d1), relaxed=relaxed, **kwargs)


@dataclass
class Assignment:
    level: int
    prefix_length: int
    sets: dict[PrefixVector, VertexSet] = field(default_factory=dict)

    def __getitem__(self, x: PrefixVector) -> VertexSet:
        return self.sets[x]

    def prefixes(self) -> list[PrefixVector]:
        """Prefixes in lexicographic order of their coordinate strings."""
        return sorted(self.sets, key=str)

    def union(self) -> VertexSet:
        mask = 0
        for S in self.sets.values():
            mask |= S.mask
        return VertexSet(mask)

    def set_of_vertex(self, z: int) -> VertexSet:
        """A(z[d]) for a cube vertex given as its bit mask."""
        return self.sets[PrefixVector(z & ((1 << self.prefix_length) - 1), self.prefix_length)]


def _soft(params: DenseParams, message: str, **margins) -> None:
    if not params.relaxed:
        raise ParametersInfeasible(message, stage="dense", **margins)
    logger.warning("dense: %s %s", message, margins)


# -------- dense subsets --------
def find_dense_subset(g: ColouredGraph, X: VertexSet, d: int, s: int) -> VertexSet:
    """Y ⊆ X with |Y| >= 2^(-(s-2)d)|X| and blue degree <= 2^(-d)|Y| inside Y.

    Descends into the blue neighbourhood of the first violating vertex. Each step drops
    the blue clique number of the current set by one, so after s-2 steps the set must be
    blue-free; a blue edge there closes a blue K_s, raised as BlueCliqueFound.
    """
    if s < 2 or d < 0:
        raise InputError("find_dense_subset needs s >= 2 and d >= 0", s=s, d=d)
    g.check_set(X)
    chain: list[int] = []
    current = X.mask
    while True:
        if len(chain) == s - 2:
            for v in bits_iter(current):
                hit = g.blue_masks[v] & current
                if hit:
                    u = (hit & -hit).bit_length() - 1
                    witness = CliqueWitness(VertexSet.of(chain + [v, u]), Colour.BLUE)
                    raise BlueCliqueFound(witness, "dense-subset descent closed a blue clique", stage="dense")
            return VertexSet(current)
        size = current.bit_count()
        violator = next(
            (v for v in bits_iter(current) if (g.blue_masks[v] & current).bit_count() * (1 << d) > size),
            None,
        )
        if violator is None:
            return VertexSet(current)
        chain.append(violator)
        current &= g.blue_masks[violator]


def sized_dense_subset(
    g: ColouredGraph,
    X: VertexSet,
    a: int,
    d: int,
    s: int,
    seed: int = 0,
    retries: int = RETRIES,
    relaxed: bool = True,
) -> VertexSet:
    """Exactly a vertices of X with blue degree <= 2^(-d+1)*a inside.

    Takes the dense subset of X and samples a-subsets of it until one meets the degree
    bound. Relaxed mode allows a below log|X| * 2^(d+3) and falls back to sampling from
    X when the dense subset is smaller than a.
    """
    if a < 1 or a > len(X):
        raise ParametersInfeasible(f"cannot take {a} vertices from a set of {len(X)}", stage="dense",
                                   a=a, size=len(X))
    low = math.log(len(X)) * (1 << (d + 3)) if len(X) > 1 else 0
    high = Fraction(len(X), 1 << ((s - 2) * d))
    for ok, text in ((a >= low, f"a = {a} < log|X| * 2^(d+3) = {low:.4g}"),
                     (a <= high, f"a = {a} > 2^(-(s-2)d)|X| = {float(high):.4g}")):
        if not ok:
            if not relaxed:
                raise PreconditionViolated(text, stage="dense", a=a, size=len(X), d=d)
            logger.debug("sized_dense_subset window: %s", text)
    pool = find_dense_subset(g, X, d, s)
    if len(pool) < a:
        logger.warning("sized_dense_subset: dense subset has %d < %d vertices, sampling from X", len(pool), a)
        pool = X
    bound = Fraction(2 * a, 1 << d)
    members = pool.members()
    best: Optional[tuple[int, VertexSet, int]] = None
    attempts = 1 if a == len(members) else retries
    for attempt in range(attempts):
        picked = members if a == len(members) else SplitMix64(seed, attempt).sample(members, a)
        mask = VertexSet.of(picked).mask
        worst_v, worst = -1, -1
        for v in picked:
            deg = (g.blue_masks[v] & mask).bit_count()
            if deg > worst:
                worst_v, worst = v, deg
        if worst <= bound:
            logger.debug("sized_dense_subset: accepted after %d attempts", attempt + 1)
            return VertexSet(mask)
        if best is None or worst < best[0]:
            best = (worst, VertexSet(mask), worst_v)
    assert best is not None
    raise RetriesExhausted(
        f"no {a}-subset with blue degree <= {float(bound):.4g} in {attempts} attempts",
        best=best[1], stage="dense", worst_degree=best[0], worst_vertex=best[2], bound=str(bound),
    )


# -------- assignments --------
def level0(g: ColouredGraph, n: int, params: DenseParams) -> Assignment:
    """{A(empty)} with the first (1+eps)2^n vertices."""
    size = params.set_size(n, 0)
    if g.n_vertices < size:
        raise PreconditionViolated(
            f"need {size} = (1+eps)2^{n} vertices, graph has {g.n_vertices}",
            stage="dense", needed=size, have=g.n_vertices,
        )
    return Assignment(0, 0, {PrefixVector(0, 0): g.vertices().first(size)})


def _flips(bits: int, length: int) -> Iterable[int]:
    for i in range(length):
        yield bits ^ (1 << i)


def validate_assignment(g: ColouredGraph, A: Assignment, n: int, params: DenseParams) -> list[str]:
    """Disjointness, set sizes and cross-set blue degrees; one line per failure kind."""
    problems: list[str] = []
    r = A.level
    d_levels = [params.d(p) for p in range(1, r + 1)]
    seen = 0
    for x, S in A.sets.items():
        if seen & S.mask:
            problems.append(f"A({x}) overlaps an earlier set")
        seen |= S.mask
    size = params.set_size(n, r)
    wrong = [str(x) for x, S in A.sets.items() if len(S) != size]
    if wrong:
        problems.append(f"{len(wrong)} sets differ from size {size}, first A({wrong[0]})")
    worst: Optional[tuple[Fraction, str]] = None
    for x, S in A.sets.items():
        for xb in [x.bits, *_flips(x.bits, x.length)]:
            x2 = PrefixVector(xb, x.length)
            if x2 not in A.sets:
                continue
            t = prefix_divergence(x, x2, d_levels) if r else 1
            bound = params.degree_bound(n, r, t)
            deg = max(((g.blue_masks[v] & S.mask).bit_count() for v in A.sets[x2]), default=0)
            if deg > bound and (worst is None or deg - bound > worst[0]):
                worst = (deg - bound, f"A({x2}) -> A({x}): degree {deg} > {float(bound):.4g}")
    if worst is not None:
        problems.append(f"cross-set blue degree too high, worst {worst[1]}")
    return problems


def _refill(keep: int, spare: int, need: int, score) -> int:
    """Top `keep` up to `need` vertices from `spare`, lowest score first."""
    missing = need - keep.bit_count()
    extra = sorted(bits_iter(spare), key=lambda v: (score(v), v))[:missing]
    for v in extra:
        keep |= 1 << v
    return keep


def refine_assignment(
    g: ColouredGraph, A: Assignment, n: int, params: DenseParams, seed: int = 0
) -> Assignment:
    """Level-(r+1) assignment with C(y) ⊆ A(y[d(r)]).

    First pass, y_j in lexicographic order: unoccupied part of the parent set, minus the
    vertices with high blue degree into an earlier neighbour's core, then a dense core of
    the core size. Second pass: drop from each core the vertices with high blue degree into
    a later neighbour's core and trim to the level-(r+1) size.
    """
    r = A.level
    if r > params.k:
        raise InputError(f"assignment is already at the top level {r}", level=r)
    dr, dn = params.d(r), params.d(r + 1)
    d_levels = [params.d(p) for p in range(1, r + 2)]
    core_size = params.core_size(n, r)
    gamma = params.gamma
    order = [PrefixVector(b, dn) for b in range(1 << dn)]
    order.sort(key=str)
    core: dict[int, int] = {}
    occupied = 0

    for j, y in enumerate(order):
        parent = A[y.truncate(dr)].mask
        U = parent & ~occupied
        if U.bit_count() < 2 * gamma * (1 << (n - dr)):
            _soft(params, "unoccupied part below 2*gamma*2^(n-d(r))", prefix=str(y), size=U.bit_count())
        if U.bit_count() < core_size:
            raise ParametersInfeasible(
                f"only {U.bit_count()} unoccupied vertices left for C({y})'", stage="dense",
                level=r, prefix=str(y), needed=core_size,
            )
        removed = 0
        earlier = [z for z in _flips(y.bits, dn) if z in core]
        for z in earlier:
            t = prefix_divergence(PrefixVector(z, dn), y, d_levels)
            threshold = params.core_bound(n, r, t)
            Di = sum(1 << v for v in bits_iter(U) if (g.blue_masks[v] & core[z]).bit_count() >= threshold)
            cap = Fraction(1 << (dn - dr), params.d(t) ** 2) * core[z].bit_count()
            if Di.bit_count() > cap:
                _soft(params, "high-degree set above its double-counting bound",
                      prefix=str(y), t=t, size=Di.bit_count(), bound=str(cap))
            removed |= Di
        X = U & ~removed
        if X.bit_count() < gamma * (1 << (n - dr)):
            _soft(params, "candidate set below gamma*2^(n-d(r))", prefix=str(y), size=X.bit_count())
        if X.bit_count() < core_size:
            if not params.relaxed:
                raise ParametersInfeasible(f"X for C({y})' has {X.bit_count()} < {core_size} vertices",
                                           stage="dense", prefix=str(y))
            X = _refill(X, removed, core_size,
                        lambda v: sum((g.blue_masks[v] & core[z]).bit_count() for z in earlier))
        try:
            Y = sized_dense_subset(g, VertexSet(X), core_size, dn // params.s, params.s,
                                   derive_seed(seed, r, j), params.retries, params.relaxed)
        except RetriesExhausted as e:
            if not params.relaxed:
                raise
            logger.warning("dense: %s; keeping the best sample", e.message)
            Y = e.best
        self_bound = params.core_bound(n, r, r + 2)
        worst = max(((g.blue_masks[v] & Y.mask).bit_count() for v in Y), default=0)
        if worst > self_bound:
            _soft(params, "core blue degree above its self bound", prefix=str(y), degree=worst,
                  bound=str(self_bound))
        core[y.bits] = Y.mask
        occupied |= Y.mask

    target = params.set_size(n, r + 1)
    sets: dict[PrefixVector, VertexSet] = {}
    position = {y.bits: j for j, y in enumerate(order)}
    for j, y in enumerate(order):
        Cp = core[y.bits]
        later = [z for z in _flips(y.bits, dn) if position[z] > j]
        drop = 0
        for z in later:
            t = prefix_divergence(PrefixVector(z, dn), y, d_levels)
            threshold = params.trim_bound(n, r, t)
            Dh = sum(1 << v for v in bits_iter(Cp) if (g.blue_masks[v] & core[z]).bit_count() >= threshold)
            cap = Fraction(core[z].bit_count(), params.d(t) ** 2)
            if Dh.bit_count() > cap:
                _soft(params, "trimmed set above its double-counting bound",
                      prefix=str(y), t=t, size=Dh.bit_count(), bound=str(cap))
            drop |= Dh
        keep = Cp & ~drop
        if keep.bit_count() < target:
            if not params.relaxed:
                raise ParametersInfeasible(f"C({y}) keeps {keep.bit_count()} < {target} vertices",
                                           stage="dense", prefix=str(y))
            keep = _refill(keep, drop, target,
                           lambda v: sum((g.blue_masks[v] & core[z]).bit_count() for z in later))
        sets[y] = VertexSet(keep).first(target)

    refined = Assignment(r + 1, dn, sets)
    problems = validate_assignment(g, refined, n, params)
    for p in problems:
        _soft(params, p, level=r + 1)
    logger.info("dense: level %d assignment, %d sets of %d vertices", r + 1, len(sets), target)
    return refined


# -------- embedding --------
def embed_via_assignment(
    g: ColouredGraph, A: Assignment, n: int, order: Optional[Iterable[int]] = None
) -> CubeEmbedding:
    """Greedy: each cube vertex z takes the least unused vertex of A(z[d]) that is red to
    the images of its already embedded cube neighbours."""
    images: dict[int, int] = {}
    used = 0
    for z in (range(1 << n) if order is None else order):
        cand = A.set_of_vertex(z).mask & ~used
        for y in _flips(z, n):
            if y in images:
                cand &= ~g.blue_masks[images[y]]
        if not cand:
            raise EmbeddingStuck(
                f"no red candidate for cube vertex {z}", stage="dense", cube_vertex=z,
                candidates=len(A.set_of_vertex(z)), embedded=len(images),
            )
        v = (cand & -cand).bit_length() - 1
        images[z] = v
        used |= 1 << v
    return CubeEmbedding.from_map(n, images)


def dense_embed(
    g: ColouredGraph,
    n: int,
    params: DenseParams,
    seed: int = 0,
    blue_degree_bound: Optional[int] = None,
) -> Union[CubeEmbedding, CliqueWitness]:
    """Red Q_n via k+1 refinements of the level-0 assignment, or a blue K_s met on the way.

    When the refinement or the greedy step gets stuck, the level-0 set is searched for a
    blue K_s before the error is passed on.
    """
    if n < 0:
        raise InputError("n must be non-negative", n=n)
    if blue_degree_bound is not None and g.n_vertices:
        worst = int(g.blue_degrees().max())
        if worst > blue_degree_bound:
            raise PreconditionViolated(
                f"max blue degree {worst} exceeds the declared bound {blue_degree_bound}",
                stage="dense", degree=worst, bound=blue_degree_bound,
            )
    if n == 0:
        if g.n_vertices < 1:
            raise PreconditionViolated("Q_0 needs one vertex", stage="dense")
        return CubeEmbedding(0, (0,))
    params.check(n)
    A = level0(g, n, params)
    try:
        for p in validate_assignment(g, A, n, params):
            _soft(params, p, level=0)
        for r in range(params.k + 1):
            A = refine_assignment(g, A, n, params, derive_seed(seed, r))
        embedding = embed_via_assignment(g, A, n)
    except BlueCliqueFound as found:
        return found.witness
    except (EmbeddingStuck, ParametersInfeasible) as stuck:
        try:
            hit = clique_in_mask(g.blue_masks, level0(g, n, params)[PrefixVector(0, 0)].mask,
                                 params.s, FALLBACK_CLIQUE_BUDGET)
        except CapacityError:
            hit = None
        if hit is None:
            raise
        logger.warning("dense: %s; returning a blue K_%d instead", stuck.message, params.s)
        return CliqueWitness(VertexSet(hit), Colour.BLUE)
    if embedding.blue_edges(g):
        raise InternalAssertion("greedy embedding used a blue edge", stage="dense")
    return embedding
