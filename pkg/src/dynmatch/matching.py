"""Approximate matching maintained over a bounded-degree edge stream.

Consumes the certificate subgraph's change stream and keeps a matching
within a (1 + eps) factor of that subgraph's optimum.  Most changes are
absorbed lazily: deletions drop at most one matched edge, insertions
are at best matched greedily, and a counter triggers a rebuild after
roughly eps / 2 times the matching size of them, so the drift between
rebuilds stays within the approximation budget.

The rebuild augments the current matching along shortest augmenting
paths, phase by phase, but gives up once the shortest path needs more
than ceil(1 / eps) matched edges; stopping there is what caps the work
per rebuild, and any matching with no short augmenting path left is
already (1 + eps)-approximate.
"""

from __future__ import annotations

from math import ceil

from .errors import ConfigError, GraphError
from .graph import Edge, Side, VertexId


class MaintainedMatching:
    """Matching over a mirrored host graph fed by edge deltas."""

    def __init__(self, epsilon: float, greedy: bool = True) -> None:
        if not 0 < epsilon < 1:
            raise ConfigError(f"epsilon must be in (0, 1), got {epsilon}")
        self.epsilon = epsilon
        self.k = ceil(1 / epsilon)
        self.greedy = greedy
        self._adj: dict[VertexId, set[VertexId]] = {}
        self._edges: set[Edge] = set()
        self._match_l: dict[VertexId, VertexId] = {}
        self._match_r: dict[VertexId, VertexId] = {}
        self.size_at_rebuild = 0
        self.updates_since_rebuild = 0

    @property
    def rebuild_threshold(self) -> int:
        return ceil(self.epsilon * max(1, self.size_at_rebuild) / 2)

    @property
    def size(self) -> int:
        return len(self._match_l)

    def current_matching(self) -> set[Edge]:
        return {Edge(u, v) for u, v in self._match_l.items()}

    def host_edges(self) -> set[Edge]:
        return set(self._edges)

    # -- updates -------------------------------------------------------

    def on_h_change(self, change: tuple[str, Edge]) -> None:
        kind, edge = change
        if kind == "add":
            if edge in self._edges:
                raise GraphError(f"{edge!r} already in the host subgraph")
            self._edges.add(edge)
            self._adj.setdefault(edge.left, set()).add(edge.right)
            self._adj.setdefault(edge.right, set()).add(edge.left)
            if (
                self.greedy
                and edge.left not in self._match_l
                and edge.right not in self._match_r
            ):
                self._match_l[edge.left] = edge.right
                self._match_r[edge.right] = edge.left
        elif kind == "remove":
            if edge not in self._edges:
                raise GraphError(f"{edge!r} not in the host subgraph")
            self._edges.discard(edge)
            self._adj[edge.left].discard(edge.right)
            self._adj[edge.right].discard(edge.left)
            if self._match_l.get(edge.left) == edge.right:
                del self._match_l[edge.left]
                del self._match_r[edge.right]
        else:
            raise GraphError(f"unknown change kind {kind!r}")
        self.updates_since_rebuild += 1
        if self.updates_since_rebuild >= self.rebuild_threshold:
            self.rebuild()

    # -- truncated augmenting search -----------------------------------

    def rebuild(self) -> set[Edge]:
        """Augment along shortest paths until none fits the length cap."""
        while self._augment_phase():
            pass
        self.size_at_rebuild = self.size
        self.updates_since_rebuild = 0
        return self.current_matching()

    def _free_lefts(self) -> list[VertexId]:
        return [
            u
            for u in self._adj
            if u.side == Side.LEFT and u not in self._match_l and self._adj[u]
        ]

    def _augment_phase(self) -> bool:
        # Layer the left vertices by alternating-path distance from the
        # free ones, stopping at the first layer that can reach a free
        # right vertex, or at k layers, whichever comes first.
        dist: dict[VertexId, float] = {}
        layer = self._free_lefts()
        for u in layer:
            dist[u] = 0
        reachable = False
        depth = 0
        while layer and not reachable and depth < self.k:
            frontier: list[VertexId] = []
            for u in layer:
                for v in self._adj[u]:
                    w = self._match_r.get(v)
                    if w is None:
                        reachable = True
                    elif w not in dist:
                        dist[w] = depth + 1
                        frontier.append(w)
            layer = frontier
            depth += 1
        if not reachable:
            return False
        augmented = False
        for u in self._free_lefts():
            if self._advance(u, dist):
                augmented = True
        return augmented

    def _advance(self, u: VertexId, dist: dict[VertexId, float]) -> bool:
        for v in self._adj[u]:
            w = self._match_r.get(v)
            if w is None:
                self._match_l[u] = v
                self._match_r[v] = u
                return True
            if dist.get(w) == dist[u] + 1 and self._advance(w, dist):
                self._match_l[u] = v
                self._match_r[v] = u
                return True
        # Dead end: no alternating continuation this phase.
        dist[u] = float("inf")
        return False
