# app/graph/constructions.py
# Lower-bound colourings: disjoint red cliques joined completely in blue.
from __future__ import annotations

from typing import Sequence

import numpy as np

from app.errors import InputError
from app.graph.coloured import ColouredGraph, VertexSet


def ramsey_formula(s: int, n: int) -> int:
    """(s-1)(2^n-1)+1."""
    if s < 1 or n < 0:
        raise InputError("need s >= 1 and n >= 0", s=s, n=n)
    return (s - 1) * ((1 << n) - 1) + 1


def multipartite_colouring(part_sizes: Sequence[int]) -> ColouredGraph:
    """Red cliques of the given sizes (consecutive index blocks), blue between blocks."""
    if any(size < 0 for size in part_sizes):
        raise InputError("part sizes must be non-negative", part_sizes=list(part_sizes))
    labels = np.repeat(np.arange(len(part_sizes)), part_sizes)
    blue = labels[:, None] != labels[None, :]
    return ColouredGraph(blue)


def part_blocks(part_sizes: Sequence[int]) -> list[VertexSet]:
    blocks, start = [], 0
    for size in part_sizes:
        blocks.append(VertexSet(((1 << size) - 1) << start))
        start += size
    return blocks


def extremal_colouring(s: int, n: int) -> ColouredGraph:
    """s-1 red cliques of size 2^n-1, blue between: no blue K_s, no red Q_n."""
    if s < 2:
        raise InputError("extremal colouring needs s >= 2", s=s)
    return multipartite_colouring([(1 << n) - 1] * (s - 1))
