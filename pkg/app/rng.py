# app/rng.py
# Deterministic 64-bit streams (splitmix64). Every randomised step takes a seed and a
# stream id, so serial and parallel runs draw identical numbers.
from __future__ import annotations

from typing import Sequence, TypeVar

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
STREAM_SPREAD = 0xD1342543DE82EF95


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *labels: int) -> int:
    """Fold integer labels (level, index, ...) into a seed. Order matters."""
    state = seed & MASK64
    for label in labels:
        state = _mix64((state + GOLDEN_GAMMA + (label & MASK64)) & MASK64)
    return state


class SplitMix64:
    """splitmix64 generator.

    Stream derivation: the initial state of (seed, stream) is
    seed XOR (stream * 0xD1342543DE82EF95 mod 2^64). Stream 0 is plain splitmix64,
    so (seed=0, stream=0) starts 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed & MASK64
        self.stream = stream & MASK64
        self.state = self.seed ^ ((self.stream * STREAM_SPREAD) & MASK64)

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise ValueError("choice from an empty sequence")
        return items[self.below(len(items))]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """k distinct items, uniformly, via Floyd's algorithm; returned in input order."""
        size = len(items)
        if k < 0 or k > size:
            raise ValueError(f"cannot sample {k} of {size}")
        picked: set[int] = set()
        for j in range(size - k, size):
            t = self.below(j + 1)
            picked.add(j if t in picked else t)
        return [items[i] for i in sorted(picked)]

    def shuffled(self, items: Sequence[T]) -> list[T]:
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out
