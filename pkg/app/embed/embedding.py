# app/embed/embedding.py
# The embedding record every pipeline returns: images[x] is the host vertex of cube vertex x.
from __future__ import annotations

from dataclasses import dataclass

from app.errors import InputError
from app.graph.coloured import ColouredGraph, VertexSet


@dataclass(frozen=True)
class CubeEmbedding:
    n: int
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != 1 << self.n:
            raise InputError(
                f"embedding of Q_{self.n} needs {1 << self.n} images, got {len(self.images)}",
                n=self.n, images=len(self.images),
            )

    @classmethod
    def from_map(cls, n: int, mapping: dict[int, int]) -> "CubeEmbedding":
        missing = [x for x in range(1 << n) if x not in mapping]
        if missing:
            raise InputError(f"cube vertices without an image: {missing[:8]}", missing=len(missing))
        return cls(n, tuple(mapping[x] for x in range(1 << n)))

    def image_set(self) -> VertexSet:
        return VertexSet.of(self.images)

    def blue_edges(self, g: ColouredGraph) -> list[tuple[int, int]]:
        """Cube edges (x < y) whose image edge is blue."""
        out = []
        for x in range(1 << self.n):
            for i in range(self.n):
                y = x ^ (1 << i)
                if x < y and g.is_blue(self.images[x], self.images[y]):
                    out.append((x, y))
        return out

    def swapped(self, x: int, y: int) -> "CubeEmbedding":
        images = list(self.images)
        images[x], images[y] = images[y], images[x]
        return CubeEmbedding(self.n, tuple(images))

    def moved(self, x: int, v: int) -> "CubeEmbedding":
        images = list(self.images)
        images[x] = v
        return CubeEmbedding(self.n, tuple(images))
