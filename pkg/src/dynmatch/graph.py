"""Dynamic bipartite graph over two fixed vertex pools.

Vertices are addressed by (side, index) pairs.  Edges always connect a
left vertex to a right vertex and are stored in a canonical orientation,
so an ``Edge`` compares equal regardless of the order its endpoints were
supplied in.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterator, NamedTuple

from .errors import GraphError


class Side(IntEnum):
    LEFT = 0
    RIGHT = 1


class VertexId(NamedTuple):
    side: Side
    index: int

    def __repr__(self) -> str:
        return ("L" if self.side == Side.LEFT else "R") + str(self.index)


class Edge(NamedTuple):
    left: VertexId
    right: VertexId

    def other(self, v: VertexId) -> VertexId:
        if v == self.left:
            return self.right
        if v == self.right:
            return self.left
        raise GraphError(f"{v!r} is not an endpoint of {self!r}")

    def __repr__(self) -> str:
        return f"({self.left!r}-{self.right!r})"


def left_vertex(index: int) -> VertexId:
    return VertexId(Side.LEFT, index)


def right_vertex(index: int) -> VertexId:
    return VertexId(Side.RIGHT, index)


def make_edge(u: VertexId, v: VertexId) -> Edge:
    """Build the canonical edge for an endpoint pair in either order."""
    if u.side == v.side:
        raise GraphError(f"endpoints {u!r} and {v!r} lie on the same side")
    if u.side == Side.LEFT:
        return Edge(u, v)
    return Edge(v, u)


class DynBipartiteGraph:
    """Adjacency-set bipartite graph supporting edge insertion and deletion.

    The vertex pools are fixed at construction; updates only touch edges.
    All operations are O(1) apart from snapshots.
    """

    def __init__(self, n_left: int, n_right: int) -> None:
        if n_left < 0 or n_right < 0:
            raise GraphError("vertex pool sizes must be non-negative")
        self.n_left = n_left
        self.n_right = n_right
        self._adj: dict[VertexId, set[VertexId]] = {}
        for i in range(n_left):
            self._adj[left_vertex(i)] = set()
        for j in range(n_right):
            self._adj[right_vertex(j)] = set()
        self._m = 0

    def _check_vertex(self, v: VertexId) -> None:
        limit = self.n_left if v.side == Side.LEFT else self.n_right
        if not 0 <= v.index < limit:
            raise GraphError(f"vertex {v!r} outside pool of size {limit}")

    @property
    def m(self) -> int:
        return self._m

    def insert_edge(self, u: VertexId, v: VertexId) -> Edge:
        """Add the edge between ``u`` and ``v``; it must not be present."""
        edge = make_edge(u, v)
        self._check_vertex(edge.left)
        self._check_vertex(edge.right)
        if edge.right in self._adj[edge.left]:
            raise GraphError(f"edge {edge!r} already present")
        self._adj[edge.left].add(edge.right)
        self._adj[edge.right].add(edge.left)
        self._m += 1
        return edge

    def delete_edge(self, u: VertexId, v: VertexId) -> Edge:
        """Remove the edge between ``u`` and ``v``; it must be present."""
        edge = make_edge(u, v)
        self._check_vertex(edge.left)
        self._check_vertex(edge.right)
        if edge.right not in self._adj[edge.left]:
            raise GraphError(f"edge {edge!r} not present")
        self._adj[edge.left].discard(edge.right)
        self._adj[edge.right].discard(edge.left)
        self._m -= 1
        return edge

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        edge = make_edge(u, v)
        self._check_vertex(edge.left)
        self._check_vertex(edge.right)
        return edge.right in self._adj[edge.left]

    def degree(self, v: VertexId) -> int:
        self._check_vertex(v)
        return len(self._adj[v])

    def neighbors(self, v: VertexId) -> set[VertexId]:
        """Live neighbour set of ``v``; callers must not mutate it."""
        self._check_vertex(v)
        return self._adj[v]

    def edges(self) -> Iterator[Edge]:
        """Yield every edge once, in sorted order."""
        for u in sorted(v for v in self._adj if v.side == Side.LEFT):
            for w in sorted(self._adj[u]):
                yield Edge(u, w)

    def left_adjacency(self) -> dict[VertexId, list[VertexId]]:
        """Sorted left-keyed adjacency snapshot, as used by the solvers."""
        return {
            u: sorted(self._adj[u])
            for u in sorted(v for v in self._adj if v.side == Side.LEFT)
        }
