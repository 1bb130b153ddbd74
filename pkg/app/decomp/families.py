# app/decomp/families.py
# Packings of disjoint blue-K_r-free a-sets: the computable stand-in for f(W, a, r).
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from app.errors import CapacityError, InputError
from app.graph.coloured import ColouredGraph, VertexSet, bits_iter
from app.graph.search import clique_in_mask
from app.rng import SplitMix64, derive_seed

logger = logging.getLogger(__name__)

RESTARTS = 50
FAMILY_BUDGET = 200_000


@dataclass
class PackedFamily:
    sets: list[VertexSet]
    remainder: VertexSet
    heuristic: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def covered(self) -> int:
        return sum(len(U) for U in self.sets)

    def union(self) -> VertexSet:
        mask = 0
        for U in self.sets:
            mask |= U.mask
        return VertexSet(mask)


def keeps_kr_free(g: ColouredGraph, members: int, v: int, r: int) -> bool:
    """Adding v to the blue-K_r-free set `members` keeps it K_r-free."""
    inter = g.blue_masks[v] & members
    if r <= 1:
        return False
    if r == 2:
        return inter == 0
    if inter.bit_count() < r - 1:
        return True
    if r == 3:
        return all(g.blue_masks[u] & inter == 0 for u in bits_iter(inter))
    return clique_in_mask(g.blue_masks, inter, r - 1) is None


def _greedy_set(g: ColouredGraph, order: list[int], a: int, r: int) -> Optional[int]:
    members = 0
    size = 0
    for v in order:
        if keeps_kr_free(g, members, v, r):
            members |= 1 << v
            size += 1
            if size == a:
                return members
    return None


def _find_one(g: ColouredGraph, pool: int, a: int, r: int, seed: int, restarts: int) -> Optional[int]:
    """One K_r-free a-subset of `pool`: lexicographic greedy first, then seeded random restarts."""
    base = list(bits_iter(pool))
    if len(base) < a:
        return None
    found = _greedy_set(g, base, a, r)
    attempt = 0
    while found is None and attempt < restarts:
        rng = SplitMix64(seed, attempt)
        start = rng.below(len(base))
        order = [base[start]] + rng.shuffled(base[:start] + base[start + 1:])
        found = _greedy_set(g, order, a, r)
        attempt += 1
    return found


def _exact_set(g: ColouredGraph, pool: int, a: int, r: int, budget: int) -> Optional[int]:
    """Exhaustive search for a K_r-free a-subset of `pool` with a node budget."""
    if pool.bit_count() < a:
        return None
    if r == 2:
        return clique_in_mask(g.red_masks, pool, a, budget)
    spent = [budget]

    def grow(members: int, size: int, cand: int) -> Optional[int]:
        spent[0] -= 1
        if spent[0] < 0:
            raise CapacityError("family verification budget exhausted", stage="maximal-family")
        if size == a:
            return members
        while cand and size + cand.bit_count() >= a:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            if keeps_kr_free(g, members, v, r):
                found = grow(members | low, size + 1, cand)
                if found is not None:
                    return found
        return None

    return grow(0, 0, pool)


def maximal_family(
    g: ColouredGraph,
    W: VertexSet,
    a: int,
    r: int,
    seed: int = 0,
    restarts: int = RESTARTS,
    budget: int = FAMILY_BUDGET,
) -> PackedFamily:
    """Disjoint blue-K_r-free a-subsets of W, packed greedily and then made non-extendable.

    After the greedy packing one local move is tried per set (re-pack the set together
    with the remainder into two sets). The remainder is then checked exhaustively for a
    further set; when that check runs out of budget the family is flagged heuristic.
    """
    if a < 1 or r < 1:
        raise InputError("maximal_family needs a >= 1 and r >= 1", a=a, r=r)
    g.check_set(W)
    family = PackedFamily([], W)
    if r == 1:
        return family
    seed = derive_seed(seed, a, r)
    remaining = W.mask
    sets: list[int] = []

    def pack() -> None:
        nonlocal remaining
        while remaining.bit_count() >= a:
            found = _find_one(g, remaining, a, r, derive_seed(seed, len(sets)), restarts)
            if found is None:
                return
            sets.append(found)
            remaining &= ~found

    pack()
    # single-swap improvement: one set plus the remainder may hold two sets
    if sets and remaining.bit_count() >= a:
        for idx in range(len(sets)):
            pool = sets[idx] | remaining
            first = _find_one(g, pool, a, r, derive_seed(seed, -1, idx), restarts=4)
            if first is None:
                continue
            second = _find_one(g, pool & ~first, a, r, derive_seed(seed, -2, idx), restarts=4)
            if second is None:
                continue
            sets[idx] = first
            sets.append(second)
            remaining = pool & ~first & ~second
            pack()
            if remaining.bit_count() < a:
                break

    heuristic = False
    while remaining.bit_count() >= a:
        try:
            extra = _exact_set(g, remaining, a, r, budget)
        except (CapacityError, RecursionError):
            heuristic = True
            family.notes.append(f"non-extendability of {remaining.bit_count()} vertices not verified")
            logger.debug("maximal_family a=%d r=%d: verification out of budget", a, r)
            break
        if extra is None:
            break
        sets.append(extra)
        remaining &= ~extra
        pack()

    family.sets = [VertexSet(m) for m in sets]
    family.remainder = VertexSet(remaining)
    family.heuristic = heuristic
    return family
