"""Reference algorithms used to cross-check the maintained structures.

Everything here recomputes from scratch and shares no state with the
incremental code paths: a Hopcroft-Karp solver for maximum matching
size, an exponential-time exact matcher for tiny instances, and
subgraph validators that re-derive every degree before judging the
degree bounds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import GraphError
from .graph import Edge, VertexId

# Slack applied to the fractional lower degree bound so that validation
# never flips on float rounding of beta * (1 - lam).
_FLOAT_SLACK = 1e-9


def _left_adjacency(graph) -> dict[VertexId, list[VertexId]]:
    if hasattr(graph, "left_adjacency"):
        return graph.left_adjacency()
    return {u: sorted(graph[u]) for u in sorted(graph)}


def hopcroft_karp(graph) -> tuple[int, dict[VertexId, VertexId]]:
    """Return the maximum matching size and one witness matching.

    ``graph`` is either a left-keyed adjacency mapping or any object
    with a ``left_adjacency()`` snapshot method.  The matching maps
    each covered left vertex to its partner.
    """
    adj = _left_adjacency(graph)
    lefts = list(adj)
    match_l: dict[VertexId, VertexId] = {}
    match_r: dict[VertexId, VertexId] = {}
    inf = float("inf")

    def dfs(u: VertexId) -> bool:
        for v in adj[u]:
            w = match_r.get(v)
            if w is None or (dist.get(w, inf) == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = inf
        return False

    while True:
        dist: dict[VertexId, float] = {}
        queue: deque[VertexId] = deque()
        for u in lefts:
            if u not in match_l:
                dist[u] = 0
                queue.append(u)
        reachable_free_right = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    reachable_free_right = True
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not reachable_free_right:
            return len(match_l), match_l
        for u in lefts:
            if u not in match_l:
                dfs(u)


def maximum_matching_size(graph) -> int:
    return hopcroft_karp(graph)[0]


def brute_force_mu(graph, limit: int = 24) -> int:
    """Exact maximum matching size by exhaustive search.

    Guarded by an edge-count limit because the search is exponential;
    meant for validating the polynomial solver on tiny instances.
    """
    adj = _left_adjacency(graph)
    m = sum(len(vs) for vs in adj.values())
    if m > limit:
        raise GraphError(f"{m} edges exceed the brute-force limit of {limit}")
    rights = sorted({v for vs in adj.values() for v in vs})
    bit = {v: 1 << i for i, v in enumerate(rights)}
    lefts = [u for u in adj if adj[u]]
    memo: dict[tuple[int, int], int] = {}

    def best(i: int, used: int) -> int:
        if i == len(lefts):
            return 0
        key = (i, used)
        cached = memo.get(key)
        if cached is not None:
            return cached
        result = best(i + 1, used)
        for v in adj[lefts[i]]:
            b = bit[v]
            if not used & b:
                result = max(result, 1 + best(i + 1, used | b))
        memo[key] = result
        return result

    return best(0, 0)


@dataclass
class ValidationReport:
    """Outcome of a degree-bound validation sweep.

    Each violation is (edge, constraint tag, observed edge degree),
    with tag ``"P1"`` for an upper-bound breach on a kept edge and
    ``"P2"`` for a lower-bound breach.
    """

    ok: bool
    violations: list[tuple[Edge, str, int]] = field(default_factory=list)


def _degrees_from_edges(edges: Iterable[Edge]) -> dict[VertexId, int]:
    degree: dict[VertexId, int] = {}
    for e in edges:
        degree[e.left] = degree.get(e.left, 0) + 1
        degree[e.right] = degree.get(e.right, 0) + 1
    return degree


def validate_edcs_unweighted(
    graph, h_edges: Iterable[Edge], beta: int, lam: float
) -> ValidationReport:
    """Check the degree bounds of a sparse certificate subgraph.

    Every kept edge must have endpoint degrees (within the subgraph)
    summing to at most ``beta``; every skipped graph edge must have
    them summing to at least ``beta * (1 - lam)``.  Degrees are
    recomputed here from the edge list alone.
    """
    h = set(h_edges)
    graph_edges = list(graph.edges())
    present = set(graph_edges)
    for e in h:
        if e not in present:
            raise GraphError(f"subgraph edge {e!r} not in the graph")
    degree = _degrees_from_edges(h)
    lower = beta * (1.0 - lam) - _FLOAT_SLACK
    violations: list[tuple[Edge, str, int]] = []
    for e in graph_edges:
        ed = degree.get(e.left, 0) + degree.get(e.right, 0)
        if e in h:
            if ed > beta:
                violations.append((e, "P1", ed))
        elif ed < lower:
            violations.append((e, "P2", ed))
    violations.sort()
    return ValidationReport(ok=not violations, violations=violations)


def validate_edcs_weighted(
    graph, weights: Mapping[Edge, int], beta: int
) -> ValidationReport:
    """Check the degree bounds of a multiplicity-weighted certificate.

    A vertex degree is the sum of incident edge weights.  Edges with
    positive weight must have endpoint degrees summing to at most
    ``beta``; every graph edge, used or not, must reach ``beta - 1``.
    """
    graph_edges = list(graph.edges())
    present = set(graph_edges)
    degree: dict[VertexId, int] = {}
    for e, w in weights.items():
        if e not in present:
            raise GraphError(f"weighted edge {e!r} not in the graph")
        if not 0 <= w <= beta:
            raise GraphError(f"weight {w} on {e!r} outside [0, {beta}]")
        degree[e.left] = degree.get(e.left, 0) + w
        degree[e.right] = degree.get(e.right, 0) + w
    violations: list[tuple[Edge, str, int]] = []
    for e in graph_edges:
        ed = degree.get(e.left, 0) + degree.get(e.right, 0)
        if weights.get(e, 0) >= 1 and ed > beta:
            violations.append((e, "P1", ed))
        if ed < beta - 1:
            violations.append((e, "P2", ed))
    violations.sort()
    return ValidationReport(ok=not violations, violations=violations)


def approx_ratio(graph, matching_size: int) -> float:
    """Ratio of the true optimum of ``graph`` to a maintained size."""
    if matching_size < 0:
        raise GraphError("matching size cannot be negative")
    return maximum_matching_size(graph) / max(1, matching_size)


def matching_is_valid(graph, matching: Mapping[VertexId, VertexId]) -> bool:
    """True iff the left-to-right map is a matching over existing edges."""
    used: set[VertexId] = set()
    for u, v in matching.items():
        if not graph.has_edge(u, v):
            return False
        if v in used:
            return False
        used.add(v)
    return True
