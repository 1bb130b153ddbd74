# app/graph/search.py
# Clique and biclique search on bitmasks, plus the explicit Kővári–Sós–Turán edge bound.
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from app.errors import CapacityError, InputError
from app.graph.coloured import Colour, ColouredGraph, VertexSet, is_clique

BICLIQUE_CAP = 10**7


@dataclass(frozen=True)
class CliqueWitness:
    members: VertexSet
    colour: Colour

    def holds_in(self, g: ColouredGraph) -> bool:
        return is_clique(g, self.members, self.colour)


@dataclass(frozen=True)
class BicliqueWitness:
    left: VertexSet
    right: VertexSet
    colour: Colour

    def holds_in(self, g: ColouredGraph) -> bool:
        if not self.left.isdisjoint(self.right):
            return False
        masks = g.masks(self.colour)
        return all(self.right.mask & ~masks[u] == 0 for u in self.left)

    @property
    def vertices(self) -> VertexSet:
        return self.left | self.right


# ----- colouring bound (greedy colour classes of the complement) -----
def colour_bound(masks: list[int], cand: int, needed: int) -> int:
    """Greedy count of colour classes covering `cand`, where a class is an independent
    set of the graph given by `masks`. Stops counting once `needed` is reached."""
    classes = 0
    remaining = cand
    while remaining and classes < needed:
        classes += 1
        avail = remaining
        while avail:
            low = avail & -avail
            v = low.bit_length() - 1
            remaining ^= low
            avail &= ~masks[v] & ~low
    return classes


def _clique_search(
    masks: list[int], cand: int, needed: int, chosen: int, spent: Optional[list[int]] = None
) -> Optional[int]:
    if spent is not None:
        spent[0] -= 1
        if spent[0] < 0:
            raise CapacityError("clique search budget exhausted", stage="clique")
    if needed == 0:
        return chosen
    if cand.bit_count() < needed:
        return None
    if needed > 2 and colour_bound(masks, cand, needed) < needed:
        return None
    rest = cand
    while rest:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        if rest.bit_count() < needed - 1:
            return None
        found = _clique_search(masks, rest & masks[v], needed - 1, chosen | low, spent)
        if found is not None:
            return found
    return None


def find_clique(g: ColouredGraph, S: VertexSet, size: int, colour: Colour) -> Optional[CliqueWitness]:
    """Lexicographically least `size`-clique of `colour` inside S, or None."""
    if size < 1:
        raise InputError("clique size must be at least 1", size=size)
    g.check_set(S)
    found = _clique_search(g.masks(colour), S.mask, size, 0)
    if found is None:
        return None
    return CliqueWitness(VertexSet(found), colour)


def find_biclique(
    g: ColouredGraph,
    X: VertexSet,
    Y: VertexSet,
    t: int,
    colour: Colour,
    cap: int = BICLIQUE_CAP,
) -> Optional[BicliqueWitness]:
    """K_{t,t} of `colour` with left ⊆ X and right ⊆ Y.

    Enumerates t-subsets of the smaller side in lexicographic order, pruning when the
    common neighbourhood on the other side drops below t; the other side of the
    witness is the t least common neighbours.
    """
    if t < 1:
        raise InputError("biclique size must be at least 1", t=t)
    g.check_set(X)
    g.check_set(Y)
    if not X.isdisjoint(Y):
        raise InputError("find_biclique needs disjoint sides", overlap=len(X & Y))
    if t > min(len(X), len(Y)):
        return None
    swap = len(Y) < len(X)
    small, large = (Y, X) if swap else (X, Y)
    subsets = math.comb(len(small), t)
    if subsets > cap:
        raise CapacityError(
            f"C({len(small)}, {t}) = {subsets} t-subsets exceed the biclique cap",
            stage="biclique", subsets=subsets, cap=cap,
        )
    masks = g.masks(colour)
    found = _biclique_search(masks, small.mask, large.mask, t, t, 0)
    if found is None:
        return None
    picked, common = found
    other = VertexSet(common).first(t)
    if swap:
        return BicliqueWitness(other, VertexSet(picked), colour)
    return BicliqueWitness(VertexSet(picked), other, colour)


def _biclique_search(masks: list[int], cand: int, common: int, t: int, still: int, picked: int):
    if still == 0:
        return picked, common
    rest = cand
    while rest.bit_count() >= still:
        low = rest & -rest
        v = low.bit_length() - 1
        rest ^= low
        narrowed = common & masks[v]
        if narrowed.bit_count() < t:
            continue
        found = _biclique_search(masks, rest, narrowed, t, still - 1, picked | low)
        if found is not None:
            return found
    return None


def zarankiewicz_threshold(n1: int, n2: int, t: int) -> int:
    """ceil((t-1)^(1/t) (n2-t+1) n1^(1-1/t) + (t-1) n1).

    A bipartite graph with parts n1, n2 and more edges than this contains K_{t,t}.
    For t = 1 the bound is 0: any edge is a K_{1,1}. A side smaller than t holds no
    K_{t,t} at all, so the bound is then every pair, n1 * n2.
    """
    if t < 1:
        raise InputError("t must be positive", t=t)
    if n1 < 0 or n2 < 0:
        raise InputError("side sizes must be non-negative", n1=n1, n2=n2)
    if min(n1, n2) < t:
        return n1 * n2
    if t == 1:
        return 0
    value = (t - 1) ** (1.0 / t) * (n2 - t + 1) * n1 ** (1.0 - 1.0 / t) + (t - 1) * n1
    return math.ceil(value - 1e-9)


def clique_in_mask(masks: list[int], cand: int, size: int, budget: Optional[int] = None) -> Optional[int]:
    """Bitmask of the least `size`-clique inside `cand`, or None.

    With a node budget the search raises CapacityError instead of running unbounded.
    """
    spent = None if budget is None else [budget]
    return _clique_search(masks, cand, size, 0, spent)
