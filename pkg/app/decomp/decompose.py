# app/decomp/decompose.py
# Almost-partition of a blue-K_s-free colouring into equal sets with a degree gap:
# the induction over r = 2..s on maximal families, its trace, and the contract check.
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from app.decomp.families import FAMILY_BUDGET, RESTARTS, PackedFamily, maximal_family
from app.errors import DecompositionFailed, InputError, PreconditionViolated
from app.graph.coloured import Colour, ColouredGraph, VertexSet, max_internal_degree
from app.rng import derive_seed

logger = logging.getLogger(__name__)

DEFAULT_RELAXED_RATIO = Fraction(1, 4)


@dataclass(frozen=True)
class SizeSchedule:
    """a(0) = N > a(1) > ... > a(K) >= 1; strict schedules also keep a(i+1) <= (eps/8) a(i)."""

    a: tuple[int, ...]
    epsilon: Fraction
    relaxed: bool = False

    @property
    def K(self) -> int:
        return len(self.a) - 1

    @classmethod
    def geometric(
        cls, N: int, epsilon: Fraction, ratio: Optional[Fraction] = None, relaxed: bool = False
    ) -> "SizeSchedule":
        """a(i+1) = floor(ratio * a(i)) until it would reach 0; ratio defaults to eps/8."""
        epsilon = Fraction(epsilon)
        if ratio is None:
            ratio = DEFAULT_RELAXED_RATIO if relaxed else epsilon / 8
        ratio = Fraction(ratio)
        if not 0 < ratio < 1:
            raise InputError("schedule ratio must lie in (0, 1)", ratio=str(ratio))
        a = [N]
        while math.floor(ratio * a[-1]) >= 1:
            a.append(math.floor(ratio * a[-1]))
        return cls(tuple(a), epsilon, relaxed or ratio > epsilon / 8)

    def gap_margins(self) -> list[Fraction]:
        """(eps/8) a(i) - a(i+1) per level; negative entries break the degree gap."""
        return [self.epsilon / 8 * self.a[i] - self.a[i + 1] for i in range(self.K)]

    def problems(self, N: int) -> list[str]:
        out = []
        if not self.a or self.a[0] != N:
            out.append(f"a(0) must equal N = {N}")
        if any(x < 1 for x in self.a):
            out.append("schedule entries must be positive")
        if any(self.a[i + 1] >= self.a[i] for i in range(self.K)):
            out.append("schedule must be strictly decreasing")
        if self.K < 1:
            out.append("schedule needs K >= 1")
        if not self.relaxed:
            bad = [i for i, m in enumerate(self.gap_margins()) if m < 0]
            if bad:
                out.append(f"a(i+1) > (eps/8) a(i) at levels {bad}")
        return out


@dataclass(frozen=True)
class DecompositionFamily:
    level: int
    sets: tuple[VertexSet, ...]

    def union(self) -> VertexSet:
        mask = 0
        for U in self.sets:
            mask |= U.mask
        return VertexSet(mask)


@dataclass(frozen=True)
class TraceStep:
    r: int
    i_r: int
    U: int
    X: int
    W: int
    interval: tuple[int, int]
    x_bound_ok: bool

    def line(self) -> str:
        return (f"r={self.r} i_r={self.i_r} U={self.U} X={self.X} W={self.W} "
                f"I=[{self.interval[0]},{self.interval[1]}] x_bound={'ok' if self.x_bound_ok else 'over'}")


@dataclass
class GoodnessCertificate:
    """A good family U_r: its sets (all of size a(i_r)) and the interval I_r it was built for."""

    beta: Fraction
    interval: tuple[int, int]
    sets: list[VertexSet]


@dataclass
class DecompositionResult:
    family: DecompositionFamily
    trace: list[TraceStep]
    certificates: list[GoodnessCertificate]
    heuristic: bool
    report: "DecompositionReport"


@dataclass
class Check:
    name: str
    passed: bool
    margin: object


@dataclass
class DecompositionReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.name != "degree-gap")

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


# -------- public API --------
def validate_decomposition(
    g: ColouredGraph, fam: DecompositionFamily, schedule: SizeSchedule, epsilon: Fraction
) -> DecompositionReport:
    """Coverage, set sizes, internal blue degree and disjointness; margins reported.
    The schedule's degree gap at the chosen level is reported but does not fail the report."""
    epsilon = Fraction(epsilon)
    report = DecompositionReport()
    N = g.n_vertices
    i = fam.level
    if not 0 <= i < schedule.K:
        report.checks.append(Check("level", False, i))
        return report
    covered = sum(len(U) for U in fam.sets)
    union = fam.union()
    report.checks.append(Check("disjoint", len(union) == covered, covered - len(union)))
    need = (1 - epsilon) * N
    report.checks.append(Check("coverage", len(union) >= need, Fraction(len(union)) - need))
    a_i, a_next = schedule.a[i], schedule.a[i + 1]
    worst_size = max((abs(len(U) - a_i) for U in fam.sets), default=0)
    report.checks.append(Check("set-size", worst_size == 0, worst_size))
    worst_degree = max((max_internal_degree(g, U, Colour.BLUE) for U in fam.sets), default=0)
    report.checks.append(Check("internal-degree", worst_degree <= a_next, a_next - worst_degree))
    gap = schedule.epsilon / 8 * a_i - a_next
    report.checks.append(Check("degree-gap", gap >= 0, gap))
    return report


def _kth_root_floor(K: int, s: int) -> int:
    k = max(1, int(round(K ** (1.0 / s))))
    while k ** s > K:
        k -= 1
    while (k + 1) ** s <= K:
        k += 1
    return max(1, k)


def _chunks(U: VertexSet, size: int) -> list[VertexSet]:
    members = U.members()
    return [VertexSet.of(members[j:j + size]) for j in range(0, len(members) - size + 1, size)]


def decompose(
    g: ColouredGraph,
    epsilon: Fraction,
    s: int,
    schedule: SizeSchedule,
    seed: int = 0,
    restarts: int = RESTARTS,
    budget: int = FAMILY_BUDGET,
) -> DecompositionResult:
    """Run the maximal-family induction and return a family meeting the coverage,
    size and degree conditions.

    For r = 2..s the level i_r advances from i_{r-1} in steps of k^(s-r+1) until the
    family count stops growing by more than eps*N/(4s); the sets found at a(i_r) form the
    good family U_r, the next level's sets in what is left form X_r, and the rest is
    carried into the next round. Afterwards each good set is cut into a(i)-chunks for the
    first level i that meets the contract.
    """
    epsilon = Fraction(epsilon)
    N = g.n_vertices
    if s < 1:
        raise InputError("s must be positive", s=s)
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)", epsilon=str(epsilon))
    problems = schedule.problems(N)
    if problems:
        raise PreconditionViolated("; ".join(problems), stage="decompose")
    K = schedule.K
    k_full = math.ceil(8 * s / epsilon)
    if K >= k_full ** s:
        k = k_full
    elif schedule.relaxed:
        k = _kth_root_floor(K, s)
    else:
        raise PreconditionViolated(
            f"strict mode needs K >= k^s = {k_full}^{s}", stage="decompose", K=K, k=k_full,
        )
    a = schedule.a
    slack = epsilon * N / (4 * s)
    W = g.vertices()
    trace: list[TraceStep] = []
    certificates: list[GoodnessCertificate] = []
    heuristic = False
    i_prev = 0

    # s <= 2: the blue graph is edgeless and W itself is the only good set
    rounds = range(2, s + 1)
    if s <= 2:
        certificates.append(GoodnessCertificate(Fraction(1), (0, K), [W]))
        rounds = range(0)
    for r in rounds:
        step = k ** (s - r + 1)
        cache: dict[int, PackedFamily] = {}

        def family_at(i: int) -> PackedFamily:
            nonlocal heuristic
            if i not in cache:
                cache[i] = maximal_family(g, W, a[i], r, derive_seed(seed, r, i), restarts, budget)
                heuristic = heuristic or cache[i].heuristic
            return cache[i]

        i_r = i_prev
        while i_r + step <= K - 1 and family_at(i_r + step).covered > family_at(i_r).covered + slack:
            i_r += step
        good = family_at(i_r)
        W_prime = W - good.union()
        X_size = 0
        if i_r + step <= K and len(W_prime) >= a[i_r + step]:
            pruned = maximal_family(g, W_prime, a[i_r + step], r, derive_seed(seed, r, -1), restarts, budget)
            heuristic = heuristic or pruned.heuristic
            X_size = pruned.covered
            W = W_prime - pruned.union()
        else:
            W = W_prime
        hi = i_prev + k ** (s - r + 2)
        x_ok = X_size <= slack + epsilon * good.covered / 8
        step_record = TraceStep(r, i_r, good.covered, X_size, len(W), (i_r, hi), x_ok)
        trace.append(step_record)
        logger.info("decompose %s", step_record.line())
        certificates.append(GoodnessCertificate(1 - epsilon / 2, (i_r, hi), good.sets))
        i_prev = i_r

    lo, hi = (i_prev, K) if s <= 2 else trace[-1].interval
    preferred = [i for i in range(lo, min(hi, K)) if i + 1 <= hi]
    candidates = preferred + [i for i in range(i_prev, K) if i not in preferred]
    if not schedule.relaxed:
        candidates = preferred
    best_cover = -1
    for i in candidates:
        sets: list[VertexSet] = []
        for cert in certificates:
            for U in cert.sets:
                for chunk in _chunks(U, a[i]):
                    if max_internal_degree(g, chunk, Colour.BLUE) <= a[i + 1]:
                        sets.append(chunk)
        fam = DecompositionFamily(i, tuple(sets))
        report = validate_decomposition(g, fam, schedule, epsilon)
        if report.ok:
            if not report.checks[-1].passed:
                logger.warning("decompose: degree gap (eps/8)a(i) - a(i+1) = %s at level %d",
                               report.checks[-1].margin, i)
            return DecompositionResult(fam, trace, certificates, heuristic, report)
        best_cover = max(best_cover, len(fam.union()))
    raise DecompositionFailed(
        f"no level in {candidates} meets coverage, size and degree conditions",
        stage="decompose", best_coverage=best_cover, needed=str((1 - epsilon) * N),
        heuristic=heuristic,
    )
