"""Owner-per-edge orientations with bounded per-vertex load.

Two schemes share the ``insert / delete -> flips`` interface consumed
by the subgraph layer:

``SqrtOrientation``
    Keeps every load within 3 * sqrt(mBar), where mBar is a frozen
    edge-count ceiling.  New edges go to a small-degree endpoint;
    overloaded owners shed edges by scanning a few owned edges per
    update, and shrinking vertices reclaim incident edges the same
    way.  When m drifts out of [mBar/4, mBar] the caller triggers an
    eager full rebuild.

``ArbOrientation``
    For graphs of known low arboricity: assigns to the lower-load
    endpoint and rescans an overloaded vertex's owned edges against a
    fixed load cap, raising if the cap cannot be restored.

All threshold comparisons square both sides so only integers are ever
compared.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .errors import CapacityExceededError, GraphError, InvariantBreachError
from .graph import DynBipartiteGraph, Edge, Side, VertexId
from .ring import Ring

# Scan budget per trigger; enough to outpace the drift of sqrt(m)
# between rebuilds.
_SCAN_STEPS = 5


class FlipEvent(NamedTuple):
    edge: Edge
    new_owner: VertexId


class SqrtOrientation:
    """Load-bounded orientation driven by a live bipartite graph.

    The graph must be updated first; ``insert`` and ``delete`` are then
    told about the edge and read post-update degrees.  ``rebuild`` must
    be called whenever ``needs_rebuild`` reports the edge count has
    left the window, and reorients everything from scratch.
    """

    def __init__(self, graph: DynBipartiteGraph) -> None:
        self._graph = graph
        self.m_bar = 4
        self._owner: dict[Edge, VertexId] = {}
        self._load: dict[VertexId, int] = {}
        self._owned: dict[VertexId, Ring] = {}
        self._incident: dict[VertexId, Ring] = {}
        self.rebuild()

    # -- queries -------------------------------------------------------

    def owner(self, edge: Edge) -> VertexId:
        try:
            return self._owner[edge]
        except KeyError:
            raise GraphError(f"{edge!r} has no owner") from None

    def load(self, v: VertexId) -> int:
        return self._load.get(v, 0)

    def max_load(self) -> int:
        return max(self._load.values(), default=0)

    def owned_edges(self, v: VertexId) -> list[Edge]:
        ring = self._owned.get(v)
        return list(ring.items()) if ring is not None else []

    def _is_small(self, v: VertexId) -> bool:
        return self._graph.degree(v) ** 2 < 4 * self.m_bar

    def _owned_ring(self, v: VertexId) -> Ring:
        ring = self._owned.get(v)
        if ring is None:
            ring = self._owned[v] = Ring()
        return ring

    def _incident_ring(self, v: VertexId) -> Ring:
        ring = self._incident.get(v)
        if ring is None:
            ring = self._incident[v] = Ring()
        return ring

    # -- mutation ------------------------------------------------------

    def _assign(self, edge: Edge, v: VertexId) -> None:
        self._owner[edge] = v
        self._load[v] = self._load.get(v, 0) + 1
        self._owned_ring(v).add(edge)

    def _flip(self, edge: Edge, new_owner: VertexId) -> FlipEvent:
        old = self._owner[edge]
        self._owned[old].remove(edge)
        self._load[old] -= 1
        self._assign(edge, new_owner)
        return FlipEvent(edge, new_owner)

    def _choose_owner(self, edge: Edge) -> VertexId:
        small_l = self._is_small(edge.left)
        small_r = self._is_small(edge.right)
        if small_l != small_r:
            return edge.left if small_l else edge.right
        if self._load.get(edge.left, 0) <= self._load.get(edge.right, 0):
            return edge.left
        return edge.right

    def insert(self, edge: Edge) -> list[FlipEvent]:
        """Orient a just-inserted edge; returns any shed-load flips."""
        if not self._graph.has_edge(edge.left, edge.right):
            raise GraphError(f"{edge!r} not in the graph")
        if edge in self._owner:
            raise GraphError(f"{edge!r} already oriented")
        self._incident_ring(edge.left).add(edge)
        self._incident_ring(edge.right).add(edge)
        owner = self._choose_owner(edge)
        self._assign(edge, owner)
        flips: list[FlipEvent] = []
        if self._load[owner] ** 2 > 4 * self.m_bar:
            ring = self._owned[owner]
            for _ in range(min(_SCAN_STEPS, len(ring))):
                candidate = ring.step()
                other = candidate.other(owner)
                if self._is_small(other):
                    flips.append(self._flip(candidate, other))
        return flips

    def delete(self, edge: Edge) -> list[FlipEvent]:
        """Drop a just-deleted edge; shrinking endpoints reclaim edges."""
        if edge not in self._owner:
            raise GraphError(f"{edge!r} not oriented")
        owner = self._owner.pop(edge)
        self._owned[owner].remove(edge)
        self._load[owner] -= 1
        self._incident[edge.left].remove(edge)
        self._incident[edge.right].remove(edge)
        flips: list[FlipEvent] = []
        for v in (edge.left, edge.right):
            if not self._is_small(v):
                continue
            ring = self._incident[v]
            for _ in range(min(_SCAN_STEPS, len(ring))):
                candidate = ring.step()
                if self._owner[candidate] != v:
                    flips.append(self._flip(candidate, v))
        return flips

    def needs_rebuild(self) -> bool:
        m = self._graph.m
        return m > self.m_bar or 4 * m < self.m_bar

    def rebuild(self) -> None:
        """Refreeze mBar at max(4, 2m) and reorient all edges statically."""
        self.m_bar = max(4, 2 * self._graph.m)
        self._owner.clear()
        self._load.clear()
        self._owned.clear()
        self._incident.clear()
        for edge in self._graph.edges():
            self._incident_ring(edge.left).add(edge)
            self._incident_ring(edge.right).add(edge)
            self._assign(edge, self._choose_owner(edge))

    # -- auditing ------------------------------------------------------

    def audit(self) -> None:
        """Recount everything; raise on any bookkeeping or bound breach."""
        edges = set(self._graph.edges())
        if set(self._owner) != edges:
            raise InvariantBreachError("owner map out of sync with graph")
        recount: dict[VertexId, int] = {}
        for edge, owner in self._owner.items():
            if owner not in (edge.left, edge.right):
                raise InvariantBreachError(f"owner of {edge!r} not an endpoint")
            recount[owner] = recount.get(owner, 0) + 1
        for v, n in recount.items():
            if self._load.get(v, 0) != n or len(self._owned.get(v, ())) != n:
                raise InvariantBreachError(f"load mismatch at {v!r}")
        for v, n in self._load.items():
            if n != recount.get(v, 0):
                raise InvariantBreachError(f"stale load at {v!r}")
            if n * n > 9 * self.m_bar:
                raise InvariantBreachError(f"load {n} at {v!r} over bound")
        for edge, owner in self._owner.items():
            other = edge.other(owner)
            if (
                self._load.get(owner, 0) ** 2 > 9 * self.m_bar
                and self._graph.degree(other) ** 2 < self.m_bar
            ):
                raise InvariantBreachError(
                    f"overloaded {owner!r} owns edge to low-degree {other!r}"
                )


def default_delta_cap(alpha: int, n_total: int) -> int:
    """Load cap for ``ArbOrientation`` on ``n_total`` vertices."""
    if alpha < 1 or n_total < 1:
        raise GraphError("arboricity and vertex count must be positive")
    return 4 * alpha + 2 * (n_total - 1).bit_length()


class ArbOrientation:
    """Fixed-cap orientation for graphs of bounded arboricity."""

    def __init__(self, delta_cap: int) -> None:
        if delta_cap < 1:
            raise GraphError("load cap must be positive")
        self.delta_cap = delta_cap
        self._owner: dict[Edge, VertexId] = {}
        self._load: dict[VertexId, int] = {}
        self._owned: dict[VertexId, Ring] = {}

    def owner(self, edge: Edge) -> VertexId:
        try:
            return self._owner[edge]
        except KeyError:
            raise GraphError(f"{edge!r} has no owner") from None

    def load(self, v: VertexId) -> int:
        return self._load.get(v, 0)

    def max_load(self) -> int:
        return max(self._load.values(), default=0)

    def owned_edges(self, v: VertexId) -> list[Edge]:
        ring = self._owned.get(v)
        return list(ring.items()) if ring is not None else []

    def _owned_ring(self, v: VertexId) -> Ring:
        ring = self._owned.get(v)
        if ring is None:
            ring = self._owned[v] = Ring()
        return ring

    def _assign(self, edge: Edge, v: VertexId) -> None:
        self._owner[edge] = v
        self._load[v] = self._load.get(v, 0) + 1
        self._owned_ring(v).add(edge)

    def insert(self, edge: Edge) -> list[FlipEvent]:
        if edge in self._owner:
            raise GraphError(f"{edge!r} already oriented")
        if self._load.get(edge.left, 0) <= self._load.get(edge.right, 0):
            owner = edge.left
        else:
            owner = edge.right
        self._assign(edge, owner)
        flips: list[FlipEvent] = []
        if self._load[owner] > self.delta_cap:
            ring = self._owned[owner]
            for _ in range(len(ring)):
                candidate = ring.step()
                other = candidate.other(owner)
                if self._load.get(other, 0) < self.delta_cap:
                    old = self._owner[candidate]
                    self._owned[old].remove(candidate)
                    self._load[old] -= 1
                    self._assign(candidate, other)
                    flips.append(FlipEvent(candidate, other))
                    if self._load[owner] <= self.delta_cap:
                        break
            if self._load[owner] > self.delta_cap:
                raise CapacityExceededError(
                    f"cannot keep load of {owner!r} within {self.delta_cap}"
                )
        return flips

    def delete(self, edge: Edge) -> list[FlipEvent]:
        if edge not in self._owner:
            raise GraphError(f"{edge!r} not oriented")
        owner = self._owner.pop(edge)
        self._owned[owner].remove(edge)
        self._load[owner] -= 1
        return []

    def audit(self, edges: Iterable[Edge]) -> None:
        """Recount against the caller's edge set; raise on mismatch."""
        expected = set(edges)
        if set(self._owner) != expected:
            raise InvariantBreachError("owner map out of sync with graph")
        recount: dict[VertexId, int] = {}
        for edge, owner in self._owner.items():
            if owner not in (edge.left, edge.right):
                raise InvariantBreachError(f"owner of {edge!r} not an endpoint")
            recount[owner] = recount.get(owner, 0) + 1
        for v, n in self._load.items():
            if n != recount.get(v, 0):
                raise InvariantBreachError(f"stale load at {v!r}")
            if n > self.delta_cap:
                raise InvariantBreachError(f"load {n} at {v!r} over cap")
