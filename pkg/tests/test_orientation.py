import random

import pytest

from dynmatch.errors import CapacityExceededError, GraphError
from dynmatch.graph import DynBipartiteGraph, left_vertex, make_edge, right_vertex
from dynmatch.orientation import ArbOrientation, SqrtOrientation, default_delta_cap


class Driver:
    """Couples a graph and orientation the way the pipeline does:
    graph first, then the orientation, then a rebuild check."""

    def __init__(self, n_left, n_right):
        self.graph = DynBipartiteGraph(n_left, n_right)
        self.orientation = SqrtOrientation(self.graph)

    def insert(self, i, j):
        edge = self.graph.insert_edge(left_vertex(i), right_vertex(j))
        flips = self.orientation.insert(edge)
        self._maybe_rebuild()
        return flips

    def delete(self, i, j):
        edge = self.graph.delete_edge(left_vertex(i), right_vertex(j))
        flips = self.orientation.delete(edge)
        self._maybe_rebuild()
        return flips

    def _maybe_rebuild(self):
        if self.orientation.needs_rebuild():
            self.orientation.rebuild()


def test_first_edge_goes_to_left_endpoint():
    d = Driver(2, 2)
    flips = d.insert(0, 0)
    assert flips == []
    e = make_edge(left_vertex(0), right_vertex(0))
    assert d.orientation.owner(e) == left_vertex(0)
    assert d.orientation.load(left_vertex(0)) == 1
    assert d.orientation.load(right_vertex(0)) == 0


def test_star_leaves_end_up_owning():
    d = Driver(1, 9)
    for j in range(9):
        d.insert(0, j)
        d.orientation.audit()
    # The edge ceiling doubled once, at the m=5 crossing of the
    # initial ceiling of 4.
    assert d.orientation.m_bar == 10
    assert d.orientation.load(left_vertex(0)) == 1
    assert d.orientation.max_load() == 1


def test_delete_only_edge():
    d = Driver(2, 2)
    d.insert(0, 0)
    flips = d.delete(0, 0)
    assert flips == []
    assert d.orientation.max_load() == 0
    d.orientation.audit()


def test_rebuild_triggers_exactly_once_at_crossing():
    d = Driver(10, 10)
    bars = []
    for k in range(8):
        d.insert(k % 10, (k * 3) % 10)
        bars.append(d.orientation.m_bar)
    # ceiling starts at 4, doubles to 10 when m reaches 5, then holds.
    assert bars == [4, 4, 4, 4, 10, 10, 10, 10]


def test_static_rule_on_complete_3x3():
    g = DynBipartiteGraph(3, 3)
    for i in range(3):
        for j in range(3):
            g.insert_edge(left_vertex(i), right_vertex(j))
    o = SqrtOrientation(g)
    assert o.m_bar == 18
    assert o.max_load() == 3
    assert o.max_load() ** 2 <= 4 * o.m_bar
    o.audit()


def test_rebuild_load_bound_on_random_graphs():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randrange(2, 12)
        g = DynBipartiteGraph(n, n)
        for i in range(n):
            for j in range(n):
                if rng.random() < 0.4:
                    g.insert_edge(left_vertex(i), right_vertex(j))
        o = SqrtOrientation(g)
        assert o.max_load() ** 2 <= 4 * o.m_bar
        o.audit()


def test_random_churn_keeps_bounds_and_flip_budget():
    rng = random.Random(3)
    d = Driver(30, 30)
    present = set()
    for step in range(2000):
        if present and (rng.random() < 0.4 or len(present) == 900):
            i, j = rng.choice(sorted(present))
            present.discard((i, j))
            flips = d.delete(i, j)
        else:
            while True:
                i, j = rng.randrange(30), rng.randrange(30)
                if (i, j) not in present:
                    break
            present.add((i, j))
            flips = d.insert(i, j)
        assert len(flips) <= 10
        assert d.orientation.max_load() ** 2 <= 9 * d.orientation.m_bar
        if step % 50 == 0:
            d.orientation.audit()
    d.orientation.audit()


def test_shrinking_vertex_reclaims_ownership():
    # Build a hub that is large, then delete its edges until it turns
    # small again; the full audit covers the low-degree ownership rule.
    d = Driver(1, 40)
    for j in range(40):
        d.insert(0, j)
    for j in range(35):
        d.delete(0, j)
        d.orientation.audit()
    assert d.graph.degree(left_vertex(0)) == 5


def test_insert_requires_graph_edge():
    g = DynBipartiteGraph(2, 2)
    o = SqrtOrientation(g)
    with pytest.raises(GraphError):
        o.insert(make_edge(left_vertex(0), right_vertex(0)))


def test_delete_requires_oriented_edge():
    g = DynBipartiteGraph(2, 2)
    o = SqrtOrientation(g)
    with pytest.raises(GraphError):
        o.delete(make_edge(left_vertex(0), right_vertex(0)))


def test_default_delta_cap():
    assert default_delta_cap(1, 4) == 8
    assert default_delta_cap(3, 50) == 24
    assert default_delta_cap(1, 400) == 22
    with pytest.raises(GraphError):
        default_delta_cap(0, 10)
    with pytest.raises(GraphError):
        default_delta_cap(1, 0)


def test_arb_single_edge():
    o = ArbOrientation(delta_cap=8)
    e = make_edge(left_vertex(0), right_vertex(0))
    assert o.insert(e) == []
    assert o.load(o.owner(e)) == 1
    assert o.max_load() == 1


def test_arb_duplicate_and_unknown_edges_rejected():
    o = ArbOrientation(delta_cap=4)
    e = make_edge(left_vertex(0), right_vertex(0))
    o.insert(e)
    with pytest.raises(GraphError):
        o.insert(e)
    with pytest.raises(GraphError):
        o.delete(make_edge(left_vertex(1), right_vertex(1)))


def random_forest_edges(n_left, n_right, rng):
    """Edges of a random bipartite forest (arboricity 1)."""
    # Join vertices one at a time to an already-connected component,
    # alternating sides so every edge crosses the bipartition.
    edges = []
    used_l, used_r = [0], [0]
    edges.append((0, 0))
    while len(used_l) < n_left or len(used_r) < n_right:
        if len(used_l) < n_left and (len(used_r) >= n_right or rng.random() < 0.5):
            i = len(used_l)
            edges.append((i, rng.choice(used_r)))
            used_l.append(i)
        else:
            j = len(used_r)
            edges.append((rng.choice(used_l), j))
            used_r.append(j)
    return edges


def test_arb_forest_insertion_orders_stay_within_cap():
    rng = random.Random(5)
    for _ in range(5):
        edges = random_forest_edges(100, 101, rng)
        assert len(edges) == 200
        rng.shuffle(edges)
        o = ArbOrientation(delta_cap=8)
        all_edges = []
        for i, j in edges:
            e = make_edge(left_vertex(i), right_vertex(j))
            all_edges.append(e)
            o.insert(e)
        assert o.max_load() <= 8
        o.audit(all_edges)


def test_arb_three_forest_union_churn():
    rng = random.Random(13)
    cap = default_delta_cap(3, 50)
    pairs = set()
    for _ in range(3):
        pairs.update(random_forest_edges(25, 25, rng))
    pairs = sorted(pairs)
    o = ArbOrientation(delta_cap=cap)
    present = {}
    for step in range(2000):
        i, j = rng.choice(pairs)
        e = make_edge(left_vertex(i), right_vertex(j))
        if e in present:
            del present[e]
            o.delete(e)
        else:
            present[e] = True
            o.insert(e)
        assert o.max_load() <= cap
    o.audit(present)


def test_arb_capacity_error_when_cap_too_small():
    # A complete 3x3 needs some vertex to own 2 edges; cap 1 must fail.
    o = ArbOrientation(delta_cap=1)
    with pytest.raises(CapacityExceededError):
        for i in range(3):
            for j in range(3):
                o.insert(make_edge(left_vertex(i), right_vertex(j)))
