# app/graph/hypercube.py
# Hypercube Q_n on n-bit masks. Coordinate 1 is bit 0 (little-endian), so the initial
# subcube of a length-d prefix is every vertex whose low d bits equal the prefix.
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from app.errors import InputError


@dataclass(frozen=True, order=True)
class CubeVertex:
    bits: int
    n: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.bits < (1 << self.n):
            raise InputError(f"cube vertex {self.bits} outside Q_{self.n}", bits=self.bits, n=self.n)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def prefix(self, d: int) -> "PrefixVector":
        return PrefixVector(self.bits & ((1 << d) - 1), d)


@dataclass(frozen=True, order=True)
class PrefixVector:
    bits: int
    length: int

    def __post_init__(self):
        if self.length < 0 or not 0 <= self.bits < (1 << self.length):
            raise InputError(f"prefix {self.bits} does not fit {self.length} coordinates")

    @classmethod
    def parse(cls, text: str) -> "PrefixVector":
        """'011' means x1=0, x2=1, x3=1 (coordinate 1 first)."""
        if any(c not in "01" for c in text):
            raise InputError(f"prefix must be a 0/1 string, got {text!r}")
        bits = sum(1 << i for i, c in enumerate(text) if c == "1")
        return cls(bits, len(text))

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))

    def truncate(self, d: int) -> "PrefixVector":
        if d > self.length:
            raise InputError(f"cannot truncate a length-{self.length} prefix to {d}")
        return PrefixVector(self.bits & ((1 << d) - 1), d)

    def subcube(self, n: int) -> Iterator[int]:
        """Vertices of Q_n in the initial subcube Q_x, ascending."""
        for high in range(1 << (n - self.length)):
            yield (high << self.length) | self.bits


@dataclass(frozen=True)
class LayerRange:
    m: int
    a: int
    b: int

    def __post_init__(self):
        if not 0 <= self.a <= self.b <= self.m:
            raise InputError(f"invalid layer range [{self.a}, {self.b}] in Q_{self.m}")


# -------- public API --------
def cube_neighbours(x: CubeVertex) -> list[CubeVertex]:
    return [CubeVertex(x.bits ^ (1 << i), x.n) for i in range(x.n)]


def neighbour_bits(bits: int, n: int) -> list[int]:
    return [bits ^ (1 << i) for i in range(n)]


def cube_edges(n: int) -> Iterator[tuple[int, int]]:
    """Each edge of Q_n once, as (x, y) with x < y."""
    for x in range(1 << n):
        for i in range(n):
            y = x ^ (1 << i)
            if x < y:
                yield x, y


def prefix_adjacent(x: PrefixVector, z: PrefixVector) -> bool:
    """Q_x ~ Q_z: the prefixes differ in exactly one of their first min(d, d') coordinates."""
    m = min(x.length, z.length)
    return ((x.bits ^ z.bits) & ((1 << m) - 1)).bit_count() == 1


def prefix_divergence(x: PrefixVector, z: PrefixVector, d_levels: Sequence[int]) -> int:
    """Least p in [1, r] whose d(p)-prefixes differ, or r+1 when x = z.

    `d_levels` lists d(1), ..., d(r); both prefixes must have length d(r).
    """
    r = len(d_levels)
    expected = d_levels[-1] if r else 0
    if x.length != expected or z.length != expected:
        raise InputError(
            f"prefix lengths {x.length}, {z.length} do not match d(r) = {expected}",
            expected=expected,
        )
    diff = x.bits ^ z.bits
    for p, d in enumerate(d_levels, start=1):
        if diff & ((1 << d) - 1):
            return p
    return r + 1


def layer_count(layers: LayerRange) -> int:
    return sum(math.comb(layers.m, i) for i in range(layers.a, layers.b + 1))


def middle_binomial(m: int) -> int:
    """C(m, floor(m/2)); the largest binomial coefficient of order m."""
    if m < 0:
        raise InputError("m must be non-negative", m=m)
    return math.comb(m, m // 2)


def layer_order(n: int) -> list[int]:
    """All vertices of Q_n by weight, then by value."""
    return sorted(range(1 << n), key=lambda x: (x.bit_count(), x))


def layer(n: int, w: int) -> list[int]:
    return [x for x in range(1 << n) if x.bit_count() == w]
