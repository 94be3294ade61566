"""Weighted degree-constrained certificate for low-arboricity graphs.

Maintains integer edge weights so that every used edge keeps its
endpoint degree sum at most ``beta`` while every graph edge, used or
not, keeps it at least ``beta - 1``.  A vertex degree here is the sum
of its incident weights.

Updates are realized as unit weight changes.  Each unit change can
break the bounds at its two endpoints; each endpoint is then repaired
by an alternating walk that removes a unit from a saturated edge,
re-adds one on an underfull edge, and so on until it reaches a vertex
that can absorb the change.  Mid-walk, the walk's head has one
outstanding unit applied, so edges at the head are classified against
the head's degree minus that unit ("base degree"); everywhere else
true degrees are used.  This matches classifying against the
pre-change snapshot, which is what makes the walks sound.

The edge currently being inserted or deleted is mid-repair and exempt
from the bounds, so it is kept out of every candidate search until its
own loop finishes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Literal

from .errors import ConfigError, GraphError, InvariantBreachError
from .graph import DynBipartiteGraph, Edge, Side, VertexId
from .orientation import FlipEvent

EdgeClass = Literal["full", "deficient", "neither"]


@dataclass
class AlternatingPath:
    """One applied repair walk.

    ``steps`` lists (edge, weight delta) in application order, strictly
    alternating -1 on saturated edges with +1 on underfull ones.
    ``visited`` records each visited vertex with its base degree at
    visit time; ``terminal`` is the final vertex and the sign of the
    unit it absorbed.
    """

    steps: list[tuple[Edge, int]] = field(default_factory=list)
    visited: list[tuple[VertexId, int]] = field(default_factory=list)
    terminal: tuple[VertexId, int] = None  # type: ignore[assignment]


class WeightedEdcs:
    """Certificate subgraph with per-edge multiplicities.

    Needs the companion orientation to enumerate a vertex's owned
    edges; every unowned incident edge is indexed at its non-owning
    endpoint under the owner-side degree, so candidate searches cost
    one bucket probe plus one owned-list scan.
    """

    def __init__(
        self, graph: DynBipartiteGraph, orientation, beta: int
    ) -> None:
        if beta < 2:
            raise ConfigError(f"beta must be at least 2, got {beta}")
        self.beta = beta
        self._graph = graph
        self._orientation = orientation
        self._w: dict[Edge, int] = {}
        self._d_h: dict[VertexId, int] = {}
        self._index: dict[VertexId, dict[int, set[Edge]]] = {}
        self._index_loc: dict[Edge, tuple[VertexId, int]] = {}
        self._h_events: deque[tuple[str, Edge]] = deque()
        self._active_edge: Edge | None = None
        self._deltas: list[tuple[Edge, int]] = []
        self._unit_counts: list[int] = []
        self.last_unit_change_counts: list[int] = []
        self.last_path_lengths: list[int] = []

    # -- queries -------------------------------------------------------

    def weight(self, edge: Edge) -> int:
        return self._w.get(edge, 0)

    def weights(self) -> dict[Edge, int]:
        return dict(self._w)

    def degree(self, v: VertexId) -> int:
        return self._d_h.get(v, 0)

    def h_edges(self) -> Iterator[Edge]:
        return iter(sorted(self._w))

    def classify(self, edge: Edge) -> EdgeClass:
        """Judge an edge by true degrees: saturated, underfull, or neither."""
        if not self._graph.has_edge(edge.left, edge.right):
            raise GraphError(f"{edge!r} not in the graph")
        ed = self.degree(edge.left) + self.degree(edge.right)
        if self.weight(edge) >= 1 and ed == self.beta:
            return "full"
        if ed == self.beta - 1:
            return "deficient"
        return "neither"

    # -- candidate index ----------------------------------------------

    def _register(self, edge: Edge) -> None:
        owner = self._orientation.owner(edge)
        home = edge.other(owner)
        key = self.degree(owner)
        self._index.setdefault(home, {}).setdefault(key, set()).add(edge)
        self._index_loc[edge] = (home, key)

    def _unregister(self, edge: Edge) -> None:
        home, key = self._index_loc.pop(edge)
        bucket = self._index[home][key]
        bucket.discard(edge)
        if not bucket:
            del self._index[home][key]

    def on_flip(self, flip: FlipEvent) -> None:
        """Move a flipped edge's index entry to the new non-owner side."""
        if flip.edge not in self._index_loc:
            raise InvariantBreachError(f"flip of unregistered {flip.edge!r}")
        self._unregister(flip.edge)
        home = flip.edge.other(flip.new_owner)
        key = self.degree(flip.new_owner)
        self._index.setdefault(home, {}).setdefault(key, set()).add(flip.edge)
        self._index_loc[flip.edge] = (home, key)

    def on_degree_change(self, x: VertexId) -> None:
        """Re-key ``x`` in the index of every partner of an edge it owns."""
        key = self.degree(x)
        for edge in self._orientation.owned_edges(x):
            if edge == self._active_edge:
                continue
            home, old_key = self._index_loc[edge]
            if old_key == key:
                continue
            bucket = self._index[home][old_key]
            bucket.discard(edge)
            if not bucket:
                del self._index[home][old_key]
            self._index[home].setdefault(key, set()).add(edge)
            self._index_loc[edge] = (home, key)

    def _probe(
        self, x: VertexId, key: int, need_weight: bool, exclude: Edge | None
    ) -> Edge | None:
        """Incident edge whose partner degree equals ``key``: indexed
        candidates first, then ``x``'s owned edges; ties to the lowest
        partner id within a stage."""
        best: Edge | None = None
        for edge in self._index.get(x, {}).get(key, ()):
            if edge == exclude or (need_weight and self.weight(edge) < 1):
                continue
            if best is None or edge.other(x) < best.other(x):
                best = edge
        if best is not None:
            return best
        for edge in self._orientation.owned_edges(x):
            if edge == exclude or (need_weight and self.weight(edge) < 1):
                continue
            if self.degree(edge.other(x)) != key:
                continue
            if best is None or edge.other(x) < best.other(x):
                best = edge
        return best

    def find_full(self, x: VertexId) -> Edge | None:
        return self._probe(x, self.beta - self.degree(x), True, None)

    def find_deficient(self, x: VertexId) -> Edge | None:
        return self._probe(x, self.beta - 1 - self.degree(x), False, None)

    # -- unit changes and repair walks ---------------------------------

    def _change_weight(self, edge: Edge, delta: int) -> None:
        old = self._w.get(edge, 0)
        new = old + delta
        if not 0 <= new <= self.beta:
            raise InvariantBreachError(f"weight of {edge!r} driven to {new}")
        if new == 0:
            del self._w[edge]
        else:
            self._w[edge] = new
        if old == 0 and new == 1:
            self._h_events.append(("add", edge))
        elif old == 1 and new == 0:
            self._h_events.append(("remove", edge))
        self._deltas.append((edge, delta))
        if self._unit_counts:
            self._unit_counts[-1] += 1
        for v in (edge.left, edge.right):
            self._d_h[v] = self.degree(v) + delta
            self.on_degree_change(v)

    def _walk(self, start: VertexId, excess: int) -> AlternatingPath:
        limit = 2 * self.beta + 1
        path = AlternatingPath()
        head, exc = start, excess
        path.visited.append((head, self.degree(head) - exc))
        while True:
            # A breach normally sits one past the bound, but the other
            # endpoint of the triggering edge may have pushed the same
            # edge one unit further before its own walk runs, so each
            # step probes the deeper offset first.
            if exc == 1:
                edge = None
                for over in (2, 1):
                    key = self.beta - self.degree(head) + over
                    edge = self._probe(head, key, True, self._active_edge)
                    if edge is not None:
                        break
                delta = -1
            else:
                edge = None
                for under in (3, 2):
                    key = self.beta - under - self.degree(head)
                    edge = self._probe(head, key, False, self._active_edge)
                    if edge is not None:
                        break
                delta = 1
            if edge is None:
                break
            self._change_weight(edge, delta)
            path.steps.append((edge, delta))
            if len(path.steps) > limit:
                raise InvariantBreachError(
                    f"repair walk from {start!r} exceeded {limit} steps"
                )
            head, exc = edge.other(head), -exc
            path.visited.append((head, self.degree(head) - exc))
        path.terminal = (head, exc)
        self._check_path(path)
        if path.steps:
            self.last_path_lengths.append(len(path.steps))
        return path

    def _check_path(self, path: AlternatingPath) -> None:
        seen = {v for v, _ in path.visited}
        if len(seen) != len(path.visited):
            raise InvariantBreachError("repair walk revisited a vertex")
        for side in (Side.LEFT, Side.RIGHT):
            interior = [
                base for v, base in path.visited[1:-1] if v.side == side
            ]
            if len(set(interior)) != len(interior):
                raise InvariantBreachError(
                    "repair walk repeated a base degree on one side"
                )

    def fix_increase(self, x: VertexId) -> AlternatingPath | None:
        """Repair after the degree of ``x`` rose by one unit."""
        path = self._walk(x, 1)
        return path if path.steps else None

    def fix_decrease(self, x: VertexId) -> AlternatingPath | None:
        """Repair after the degree of ``x`` fell by one unit."""
        path = self._walk(x, -1)
        return path if path.steps else None

    def _repair_endpoints(self, edge: Edge, excess: int) -> None:
        first = self._walk(edge.left, excess)
        if first.terminal != (edge.right, -excess):
            self._walk(edge.right, excess)

    # -- graph updates -------------------------------------------------

    def _begin_op(self, edge: Edge) -> None:
        self._active_edge = edge
        self._deltas = []
        self._unit_counts = []
        self.last_path_lengths = []

    def _end_op(self) -> list[tuple[Edge, int]]:
        self._active_edge = None
        self.last_unit_change_counts = self._unit_counts
        return self._deltas

    def on_graph_insert(self, edge: Edge) -> list[tuple[Edge, int]]:
        """Absorb a new graph edge; returns all weight changes made.

        Adds units to the edge until its degree sum clears the lower
        bound, repairing both endpoints after each unit.  The loop adds
        at most ``ceil((beta - 1) / 2)`` units since every iteration
        grows the degree sum.
        """
        if not self._graph.has_edge(edge.left, edge.right):
            raise GraphError(f"{edge!r} not in the graph")
        if edge in self._index_loc:
            raise GraphError(f"{edge!r} already tracked")
        self._begin_op(edge)
        rounds = 0
        while self.degree(edge.left) + self.degree(edge.right) < self.beta - 1:
            rounds += 1
            if rounds > self.beta:
                raise InvariantBreachError(f"insert loop stuck on {edge!r}")
            self._unit_counts.append(0)
            self._change_weight(edge, 1)
            self._repair_endpoints(edge, 1)
        self._register(edge)
        return self._end_op()

    def on_graph_delete(self, edge: Edge) -> list[tuple[Edge, int]]:
        """Forget a deleted graph edge; returns all weight changes.

        The edge leaves the candidate index before any unit is removed,
        so repair walks can never push weight back onto it.
        """
        if self._graph.has_edge(edge.left, edge.right):
            raise GraphError(f"{edge!r} still in the graph")
        if edge not in self._index_loc:
            raise GraphError(f"{edge!r} not tracked")
        self._begin_op(edge)
        self._unregister(edge)
        for _ in range(self.weight(edge)):
            self._unit_counts.append(0)
            self._change_weight(edge, -1)
            self._repair_endpoints(edge, -1)
        return self._end_op()

    def drain_h_events(self) -> list[tuple[str, Edge]]:
        """Membership changes (weight crossing zero) since last drain."""
        events = list(self._h_events)
        self._h_events.clear()
        return events

    # -- reconstruction oracle -----------------------------------------

    def index_snapshot(self) -> dict[VertexId, dict[int, frozenset[Edge]]]:
        out: dict[VertexId, dict[int, frozenset[Edge]]] = {}
        for home, buckets in self._index.items():
            kept = {k: frozenset(s) for k, s in buckets.items() if s}
            if kept:
                out[home] = kept
        return out

    def reconstructed_index(self) -> dict[VertexId, dict[int, frozenset[Edge]]]:
        """Rebuild the candidate index from owner, weight, and degree."""
        fresh: dict[VertexId, dict[int, set[Edge]]] = {}
        for edge in self._graph.edges():
            owner = self._orientation.owner(edge)
            home = edge.other(owner)
            fresh.setdefault(home, {}).setdefault(
                self.degree(owner), set()
            ).add(edge)
        return {
            home: {k: frozenset(s) for k, s in buckets.items()}
            for home, buckets in fresh.items()
        }

    @classmethod
    def from_state(
        cls,
        graph: DynBipartiteGraph,
        orientation,
        beta: int,
        weights: dict[Edge, int],
    ) -> "WeightedEdcs":
        """Adopt an explicit weight assignment without repairing it."""
        h = cls(graph, orientation, beta)
        for edge, w in weights.items():
            if not graph.has_edge(edge.left, edge.right):
                raise GraphError(f"{edge!r} not in the graph")
            if not 0 <= w <= beta:
                raise GraphError(f"weight {w} on {edge!r} out of range")
            if w > 0:
                h._w[edge] = w
                for v in (edge.left, edge.right):
                    h._d_h[v] = h.degree(v) + w
        for edge in graph.edges():
            h._register(edge)
        return h
