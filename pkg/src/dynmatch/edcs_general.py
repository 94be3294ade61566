"""Unweighted degree-constrained certificate for arbitrary graphs.

Maintains an edge subset H so that every kept edge has endpoint degree
sum at most ``beta`` while every skipped edge keeps at least
``beta * (1 - lam)``.  Because a vertex may own up to 3 * sqrt(m)
edges under the companion orientation, it cannot afford to tell every
owned partner each time its degree moves.  Degree information is
therefore pushed lazily: each degree change refreshes only the next
``r`` owned partners, and partners bucket their unowned neighbors by
the last value pushed, in buckets of width ``ell = beta * lam / 6``.

Edge degrees fall into ranges F0..F7: F0 below the lower bound, F7
exactly ``beta``, and six width-``ell`` ranges in between.  A skipped
edge in F1..F5 is "augmentable": repair walks may add it, alternating
with removals of saturated edges, and estimates are fresh enough that
a bounded bucket probe plus a bounded owned-list scan finds one
whenever the walk's safety argument needs it.

Buckets hold only edges currently outside H.  A kept edge with a low
degree sum would otherwise sit in a low bucket, get picked, fail the
"outside H" half of augmentability, and abort a search that a skipped
edge in a later bucket should have served; keeping used edges out of
the buckets removes that failure mode while estimates are still
tracked for every unowned edge.

The walk mechanics mirror the weighted module: changes apply
immediately, the walk's head carries one outstanding unit, and edges
at the head are classified against its degree minus that unit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator

from .errors import ConfigError, GraphError, InvariantBreachError
from .graph import DynBipartiteGraph, Edge, Side, VertexId
from .orientation import FlipEvent, SqrtOrientation
from .ring import Ring


def range_of(edge_degree: int, beta: int, ell: int) -> int:
    """Range label 0..7 for an edge degree, total on [0, 2 * beta].

    Boundary degrees shared by two adjacent ranges resolve to the
    lower index; degrees above ``beta`` clamp to 7.
    """
    if not 0 <= edge_degree <= 2 * beta:
        raise GraphError(f"edge degree {edge_degree} outside [0, {2 * beta}]")
    low = beta - 6 * ell
    if edge_degree < low:
        return 0
    if edge_degree >= beta:
        return 7
    d = edge_degree - low
    return max(1, -(-d // ell))


@dataclass
class RepairWalk:
    """One applied alternating walk of removals and additions."""

    steps: list[tuple[Edge, int]] = field(default_factory=list)
    visited: list[tuple[VertexId, int]] = field(default_factory=list)
    terminal: tuple[VertexId, int] = None  # type: ignore[assignment]


class GeneralEdcs:
    """Certificate subgraph driven by approximate neighbor degrees."""

    def __init__(
        self,
        graph: DynBipartiteGraph,
        orientation: SqrtOrientation,
        beta: int,
        lam: float,
        audit_mode: bool = False,
    ) -> None:
        ell = round(beta * lam / 6.0)
        if abs(6 * ell - beta * lam) > 1e-9:
            raise ConfigError(
                f"beta * lam = {beta * lam} is not a multiple of 6"
            )
        if ell < 2:
            raise ConfigError(f"bucket width {ell} below 2; raise beta")
        if beta % ell:
            raise ConfigError(f"beta {beta} not a multiple of width {ell}")
        self.beta = beta
        self.lam = lam
        self.ell = ell
        # Estimates can reach beta exactly, so one bucket tops the
        # beta / ell many that cover [0, beta).
        self.n_buckets = beta // ell + 1
        self._graph = graph
        self._orientation = orientation
        self.audit_mode = audit_mode
        self.in_h: set[Edge] = set()
        self._h_adj: dict[VertexId, set[VertexId]] = {}
        self._d_h: dict[VertexId, int] = {}
        self._owner: dict[Edge, VertexId] = {}
        self._est: dict[Edge, int] = {}
        self._bucket_of: dict[Edge, int] = {}
        self._buckets: dict[VertexId, dict[int, set[Edge]]] = {}
        self._home_edges: dict[VertexId, set[Edge]] = {}
        self._rings: dict[VertexId, Ring] = {}
        self._odometer: dict[VertexId, int] = {}
        self._dec_count: dict[VertexId, int] = {}
        self._h_events: deque[tuple[str, Edge]] = deque()
        self._changes: list[tuple[str, Edge]] = []
        self._audit_log: list[str] = []
        self.last_path_lengths: list[int] = []
        self.r = 0
        self._recompute_r()

    # -- parameters and queries ----------------------------------------

    def _recompute_r(self) -> None:
        # ceil(3 * sqrt(mBar) / ell), kept in integers throughout.
        s = isqrt(9 * self._orientation.m_bar)
        if s * s < 9 * self._orientation.m_bar:
            s += 1
        self.r = -(-s // self.ell)

    def degree(self, v: VertexId) -> int:
        return self._d_h.get(v, 0)

    def h_edges(self) -> Iterator[Edge]:
        return iter(sorted(self.in_h))

    def h_neighbors(self, v: VertexId) -> set[VertexId]:
        return self._h_adj.get(v, set())

    def edge_range(self, edge: Edge) -> int:
        return range_of(
            self.degree(edge.left) + self.degree(edge.right),
            self.beta,
            self.ell,
        )

    def _is_augmentable(self, edge: Edge, eff: int, head: VertexId) -> bool:
        ed = eff + self.degree(edge.other(head))
        return (
            edge not in self.in_h
            and self.beta - 6 * self.ell <= ed <= self.beta - self.ell
        )

    # -- tracking of graph edges ---------------------------------------

    def _ring(self, v: VertexId) -> Ring:
        ring = self._rings.get(v)
        if ring is None:
            ring = self._rings[v] = Ring(cursors=("info", "repair"))
        return ring

    def _bucket_index(self, est: int) -> int:
        return est // self.ell + 1

    def _bucket_add(self, edge: Edge, home: VertexId, est: int) -> None:
        idx = self._bucket_index(est)
        self._buckets.setdefault(home, {}).setdefault(idx, set()).add(edge)
        self._bucket_of[edge] = idx

    def _bucket_remove(self, edge: Edge, home: VertexId) -> None:
        idx = self._bucket_of.pop(edge)
        bucket = self._buckets[home][idx]
        bucket.discard(edge)
        if not bucket:
            del self._buckets[home][idx]

    def _track_edge(self, edge: Edge, owner: VertexId) -> None:
        home = edge.other(owner)
        self._owner[edge] = owner
        self._home_edges.setdefault(home, set()).add(edge)
        self._est[edge] = self.degree(owner)
        if edge not in self.in_h:
            self._bucket_add(edge, home, self._est[edge])
        self._ring(owner).add(edge)

    def _untrack_edge(self, edge: Edge) -> None:
        owner = self._owner.pop(edge)
        home = edge.other(owner)
        self._home_edges[home].discard(edge)
        del self._est[edge]
        if edge in self._bucket_of:
            self._bucket_remove(edge, home)
        self._rings[owner].remove(edge)

    def on_flip(self, flip: FlipEvent) -> list[tuple[str, Edge]]:
        """Re-home a flipped edge's estimate, bucket, and list entry.

        Membership never changes on a flip, so the change list is
        always empty; it exists so callers can treat all three update
        entry points uniformly.
        """
        edge, new_owner = flip
        old_owner = self._owner.get(edge)
        if old_owner is None:
            raise InvariantBreachError(f"flip of untracked {edge!r}")
        self._untrack_edge(edge)
        self._track_edge(edge, new_owner)
        return []

    def on_orientation_rebuild(self) -> None:
        """Re-derive all ownership bookkeeping after a wholesale reorientation.

        The subgraph and its degrees are untouched; estimates restart
        exact, and the scan budget follows the new edge-count ceiling,
        so the odometer accounting restarts as well.
        """
        self._owner.clear()
        self._est.clear()
        self._bucket_of.clear()
        self._buckets.clear()
        self._home_edges.clear()
        self._rings.clear()
        self._odometer.clear()
        self._dec_count.clear()
        self._recompute_r()
        for edge in self._graph.edges():
            self._track_edge(edge, self._orientation.owner(edge))

    # -- degree information --------------------------------------------

    def information_update(self, x: VertexId) -> None:
        """Push the exact degree of ``x`` to its next ``r`` owned partners."""
        ring = self._rings.get(x)
        if ring is None or len(ring) == 0:
            return
        fresh = self.degree(x)
        for _ in range(min(self.r, len(ring))):
            edge = ring.step("info")
            self._est[edge] = fresh
            if edge in self._bucket_of:
                home = edge.other(x)
                idx = self._bucket_index(fresh)
                if idx != self._bucket_of[edge]:
                    self._bucket_remove(edge, home)
                    self._bucket_add(edge, home, fresh)

    def _apply_degree(self, x: VertexId, delta: int) -> None:
        self._d_h[x] = self.degree(x) + delta
        self.information_update(x)

    # -- searches ------------------------------------------------------

    def _scan_full(self, x: VertexId, eff: int) -> Edge | None:
        best: VertexId | None = None
        for y in self._h_adj.get(x, ()):
            if eff + self.degree(y) == self.beta and (best is None or y < best):
                best = y
        if best is None:
            return None
        return Edge(x, best) if x.side == Side.LEFT else Edge(best, x)

    def find_full(self, x: VertexId) -> Edge | None:
        """Exact scan of the kept edges at ``x`` for a saturated one."""
        return self._scan_full(x, self.degree(x))

    def _probe_window(self, eff: int) -> range:
        t = self.beta - 7 * self.ell - eff
        start = 1 if t < 0 else t // self.ell + 1
        return range(start, start + 8)

    def _find_augmentable(self, x: VertexId, eff: int) -> Edge | None:
        buckets = self._buckets.get(x, {})
        pick: Edge | None = None
        for idx in self._probe_window(eff):
            if idx > self.n_buckets:
                break
            bucket = buckets.get(idx)
            if bucket:
                pick = min(bucket, key=lambda e: e.other(x))
                break
        if pick is not None and self.audit_mode:
            # A pick must be near-best among unowned skipped edges.
            d_pick = self.degree(pick.other(x))
            for other in self._home_edges.get(x, ()):
                if other in self.in_h:
                    continue
                if d_pick > self.degree(other.other(x)) + 3 * self.ell:
                    self._audit_log.append(
                        f"pick {pick!r} at {x!r} overshoots {other!r}"
                    )
        if pick is not None:
            # Only the first pick is recheckable within the probe
            # budget: stale estimates may surface a bad candidate even
            # when good ones exist, so a failed recheck means give up.
            if eff + self.degree(pick.other(x)) <= self.beta - self.ell:
                return pick
            pick = None
        if self.audit_mode:
            window = self._probe_window(eff)
            for edge in self._home_edges.get(x, ()):
                if edge in self.in_h or not self._is_augmentable(edge, eff, x):
                    continue
                if self._bucket_of[edge] not in window:
                    self._audit_log.append(
                        f"augmentable {edge!r} outside probe window of {x!r}"
                    )
        return None

    def find_augmentable(self, x: VertexId) -> Edge | None:
        """Bounded bucket probe for a skipped edge that can take a unit.

        Checks at most 8 buckets, verifies only the single picked edge
        exactly, and gives up otherwise; stale estimates make misses
        legitimate.
        """
        return self._find_augmentable(x, self.degree(x))

    def _repair_scan(self, x: VertexId, eff: int) -> Edge | None:
        ring = self._rings.get(x)
        if ring is None or len(ring) == 0:
            # An empty owned list counts as fully traversed.
            self._odometer[x] = self._odometer.get(x, 0) + self.r
            return None
        for taken in range(1, self.r + 1):
            edge = ring.step("repair")
            if self._is_augmentable(edge, eff, x):
                self._odometer[x] = self._odometer.get(x, 0) + taken
                return edge
        self._odometer[x] = self._odometer.get(x, 0) + self.r
        return None

    def repair_scan(self, x: VertexId) -> Edge | None:
        """Exactly test the next ``r`` owned edges of ``x``; first hit wins.

        The cursor persists across calls, wrapping over the owned list,
        so consecutive scans cover it round-robin.
        """
        return self._repair_scan(x, self.degree(x))

    # -- path ends -----------------------------------------------------

    def _safety_audit(self, x: VertexId) -> None:
        # A degree decrease must never strand a nearly-deficient
        # skipped edge: such an edge guarantees the searches a hit.
        for edge in self._home_edges.get(x, ()):
            if edge in self.in_h:
                continue
            if self.edge_range(edge) in (1, 2):
                self._audit_log.append(
                    f"decrease at {x!r} despite low skipped {edge!r}"
                )

    def _path_end(self, x: VertexId, delta: int) -> None:
        if delta == -1:
            self._dec_count[x] = self._dec_count.get(x, 0) + 1
            if self.audit_mode:
                self._safety_audit(x)

    def end_of_path(self, x: VertexId, delta: int) -> None:
        """Let ``x`` absorb a unit after all searches failed there."""
        if delta not in (-1, 1):
            raise GraphError(f"delta must be +/-1, got {delta}")
        self._apply_degree(x, delta)
        self._path_end(x, delta)

    # -- membership toggles and walks ----------------------------------

    def _toggle(self, edge: Edge, add: bool) -> None:
        if add:
            self.in_h.add(edge)
            self._h_adj.setdefault(edge.left, set()).add(edge.right)
            self._h_adj.setdefault(edge.right, set()).add(edge.left)
            if edge in self._bucket_of:
                self._bucket_remove(edge, edge.other(self._owner[edge]))
            self._h_events.append(("add", edge))
            self._changes.append(("add", edge))
        else:
            self.in_h.discard(edge)
            self._h_adj[edge.left].discard(edge.right)
            self._h_adj[edge.right].discard(edge.left)
            if edge in self._owner:
                # Back into the buckets it goes, filed under the
                # estimate its home already holds.
                home = edge.other(self._owner[edge])
                self._bucket_add(edge, home, self._est[edge])
            self._h_events.append(("remove", edge))
            self._changes.append(("remove", edge))
        delta = 1 if add else -1
        self._apply_degree(edge.left, delta)
        self._apply_degree(edge.right, delta)

    def _walk(self, start: VertexId, excess: int) -> RepairWalk:
        limit = 12 * self.beta // (6 * self.ell) + 1  # 12 / lam + 1
        walk = RepairWalk()
        head, exc = start, excess
        walk.visited.append((head, self.degree(head) - exc))
        while True:
            if exc == 1:
                edge = self._scan_full(head, self.degree(head) - 1)
                if edge is None:
                    self._path_end(head, 1)
                    break
                self._toggle(edge, add=False)
                walk.steps.append((edge, -1))
            else:
                eff = self.degree(head) + 1
                edge = self._find_augmentable(head, eff)
                if edge is None:
                    edge = self._repair_scan(head, eff)
                if edge is None:
                    self._path_end(head, -1)
                    break
                self._toggle(edge, add=True)
                walk.steps.append((edge, 1))
            if len(walk.steps) > limit:
                raise InvariantBreachError(
                    f"repair walk from {start!r} exceeded {limit} steps"
                )
            head, exc = edge.other(head), -exc
            walk.visited.append((head, self.degree(head) - exc))
        walk.terminal = (head, exc)
        self.last_path_lengths.append(len(walk.steps))
        self._check_walk(walk)
        return walk

    def _check_walk(self, walk: RepairWalk) -> None:
        seen = {v for v, _ in walk.visited}
        if len(seen) != len(walk.visited):
            raise InvariantBreachError("repair walk revisited a vertex")
        for side in (Side.LEFT, Side.RIGHT):
            bases = [b for v, b in walk.visited if v.side == side]
            if len(set(bases)) != len(bases):
                raise InvariantBreachError(
                    "repair walk repeated a base degree on one side"
                )

    def _repair_endpoints(self, edge: Edge, excess: int) -> None:
        first = self._walk(edge.left, excess)
        if first.terminal != (edge.right, -excess):
            self._walk(edge.right, excess)

    # -- graph updates -------------------------------------------------

    def _begin_op(self) -> None:
        self._changes = []
        self.last_path_lengths = []

    def _end_op(self) -> list[tuple[str, Edge]]:
        limit = 24 * self.beta // (6 * self.ell) + 2  # 24 / lam + 2
        if len(self._changes) > limit:
            raise InvariantBreachError(
                f"{len(self._changes)} membership changes exceed {limit}"
            )
        return self._changes

    def on_graph_insert(self, edge: Edge) -> list[tuple[str, Edge]]:
        """Admit a new graph edge, keeping it only if its degree sum
        is still short of the lower bound; repairs both endpoints."""
        if not self._graph.has_edge(edge.left, edge.right):
            raise GraphError(f"{edge!r} not in the graph")
        if edge in self._owner:
            raise GraphError(f"{edge!r} already tracked")
        self._begin_op()
        ed = self.degree(edge.left) + self.degree(edge.right)
        if ed < self.beta - 6 * self.ell:
            self.in_h.add(edge)
            self._h_adj.setdefault(edge.left, set()).add(edge.right)
            self._h_adj.setdefault(edge.right, set()).add(edge.left)
            self._h_events.append(("add", edge))
            self._changes.append(("add", edge))
            self._apply_degree(edge.left, 1)
            self._apply_degree(edge.right, 1)
            self._track_edge(edge, self._orientation.owner(edge))
            self._repair_endpoints(edge, 1)
        else:
            self._track_edge(edge, self._orientation.owner(edge))
        return self._end_op()

    def on_graph_delete(self, edge: Edge) -> list[tuple[str, Edge]]:
        """Forget a deleted graph edge, repairing both endpoints if it
        was kept.  All of its bookkeeping leaves first, so repair walks
        can never select it."""
        if self._graph.has_edge(edge.left, edge.right):
            raise GraphError(f"{edge!r} still in the graph")
        if edge not in self._owner:
            raise GraphError(f"{edge!r} not tracked")
        self._begin_op()
        self._untrack_edge(edge)
        if edge in self.in_h:
            self.in_h.discard(edge)
            self._h_adj[edge.left].discard(edge.right)
            self._h_adj[edge.right].discard(edge.left)
            self._h_events.append(("remove", edge))
            self._changes.append(("remove", edge))
            self._apply_degree(edge.left, -1)
            self._apply_degree(edge.right, -1)
            self._repair_endpoints(edge, -1)
        return self._end_op()

    def drain_h_events(self) -> list[tuple[str, Edge]]:
        events = list(self._h_events)
        self._h_events.clear()
        return events

    def drain_audit_log(self) -> list[str]:
        log = self._audit_log
        self._audit_log = []
        return log

    # -- audits --------------------------------------------------------

    def audit_estimates(self) -> list[str]:
        """Estimate error must stay within one bucket width."""
        out = []
        for edge, est in self._est.items():
            actual = self.degree(self._owner[edge])
            if abs(est - actual) > self.ell:
                out.append(f"estimate {est} for {edge!r} vs degree {actual}")
        return out

    def audit_buckets(self) -> list[str]:
        """Bucket placement must be derivable from owner, membership,
        and stored estimate alone."""
        out = []
        rebuilt: dict[VertexId, dict[int, set[Edge]]] = {}
        for edge, owner in self._owner.items():
            if edge in self.in_h:
                if edge in self._bucket_of:
                    out.append(f"kept edge {edge!r} sits in a bucket")
                continue
            idx = self._bucket_index(self._est[edge])
            if self._bucket_of.get(edge) != idx:
                out.append(f"{edge!r} filed under {self._bucket_of.get(edge)}")
            rebuilt.setdefault(edge.other(owner), {}).setdefault(
                idx, set()
            ).add(edge)
        live = {
            home: {i: set(b) for i, b in buckets.items() if b}
            for home, buckets in self._buckets.items()
            if any(buckets.values())
        }
        if live != rebuilt:
            out.append("bucket structure differs from reconstruction")
        return out

    def audit_odometer(self) -> list[str]:
        """Each endpoint decrease must have cost a full repair scan."""
        out = []
        for v, decs in self._dec_count.items():
            if self._odometer.get(v, 0) < self.r * decs:
                out.append(
                    f"{v!r} scanned {self._odometer.get(v, 0)} positions "
                    f"for {decs} decreases"
                )
        return out

    def audit_state(self) -> None:
        """Full recount of every structure; raises on the first lie."""
        edges = set(self._graph.edges())
        if set(self._owner) != edges:
            raise InvariantBreachError("tracked edges out of sync with graph")
        if not self.in_h <= edges:
            raise InvariantBreachError("kept edge missing from graph")
        degree: dict[VertexId, int] = {}
        for edge in self.in_h:
            degree[edge.left] = degree.get(edge.left, 0) + 1
            degree[edge.right] = degree.get(edge.right, 0) + 1
        for v, d in degree.items():
            if self.degree(v) != d:
                raise InvariantBreachError(f"degree mismatch at {v!r}")
        for v, d in self._d_h.items():
            if d != degree.get(v, 0):
                raise InvariantBreachError(f"stale degree at {v!r}")
        for v, adj in self._h_adj.items():
            for y in adj:
                e = Edge(v, y) if v.side == Side.LEFT else Edge(y, v)
                if e not in self.in_h:
                    raise InvariantBreachError(f"adjacency ghost {e!r}")
        for edge in self.in_h:
            if edge.right not in self._h_adj.get(
                edge.left, ()
            ) or edge.left not in self._h_adj.get(edge.right, ()):
                raise InvariantBreachError(f"adjacency missing {edge!r}")
        owned: dict[VertexId, set[Edge]] = {}
        for edge, owner in self._owner.items():
            if self._orientation.owner(edge) != owner:
                raise InvariantBreachError(f"owner mirror stale for {edge!r}")
            owned.setdefault(owner, set()).add(edge)
        for v, ring in self._rings.items():
            if set(ring.items()) != owned.get(v, set()):
                raise InvariantBreachError(f"owned list stale at {v!r}")
        for problem in self.audit_buckets() + self.audit_estimates():
            raise InvariantBreachError(problem)

    # -- construction from an explicit state ---------------------------

    @classmethod
    def from_state(
        cls,
        graph: DynBipartiteGraph,
        orientation: SqrtOrientation,
        beta: int,
        lam: float,
        h_edges,
        est_overrides: dict[Edge, int] | None = None,
        audit_mode: bool = False,
    ) -> "GeneralEdcs":
        """Adopt an explicit membership set without repairing it.

        Estimates default to exact degrees; ``est_overrides`` plants
        stale values (and the matching bucket placement) for tests.
        """
        h = cls(graph, orientation, beta, lam, audit_mode=audit_mode)
        for edge in h_edges:
            if not graph.has_edge(edge.left, edge.right):
                raise GraphError(f"{edge!r} not in the graph")
            h.in_h.add(edge)
            h._h_adj.setdefault(edge.left, set()).add(edge.right)
            h._h_adj.setdefault(edge.right, set()).add(edge.left)
            h._d_h[edge.left] = h.degree(edge.left) + 1
            h._d_h[edge.right] = h.degree(edge.right) + 1
        for edge in graph.edges():
            h._track_edge(edge, orientation.owner(edge))
        for edge, est in (est_overrides or {}).items():
            home = edge.other(h._owner[edge])
            if edge in h._bucket_of:
                h._bucket_remove(edge, home)
                h._bucket_add(edge, home, est)
            h._est[edge] = est
        return h
