"""Seeded update-stream generators and the stream file format.

A stream is an ordered list of ``(op, u, v)`` updates with op ``"+"``
or ``"-"``, u on the left side and v on the right.  Every generator is
deterministic given its seed, and every stream it emits is replayable:
inserts target absent edges, deletes target present ones.

Kinds:

``random``
    Drifts the edge count toward ``density * n_left * n_right`` and
    then churns around it with coin-flip inserts and deletes.
``sliding_window``
    Inserts fresh edges until ``window`` are live, then alternates
    deleting the oldest with inserting a replacement (FIFO).
``forest_union``
    Keeps the graph a union of at most ``alpha`` edge-disjoint
    forests, so its arboricity never exceeds ``alpha``.
``four_block``
    Builds the complete bipartite graph on two blocks per side minus
    the second-by-second block, then churns inside the allowed pairs.
``three_block``
    Three equal pieces per side.  The dense part pairs the first left
    piece with the second right piece and the second left piece with
    the third right piece, both regular of degree ``beta//2 - 1``; two
    perfect matchings pin the outer pieces, and the omitted
    middle-to-middle matching is exactly the part a degree-bounded
    subgraph may skip.  Its maximum matching covers all vertices while
    the intended subgraph only reaches two thirds of them.  The
    builder refuses the instance unless the intended subgraph passes
    the unweighted validator.
"""

from __future__ import annotations

import random
from collections import deque

from .errors import ConfigError, StreamError
from .graph import DynBipartiteGraph, Side, VertexId
from .oracle import validate_edcs_unweighted

Update = tuple[str, VertexId, VertexId]


def _lv(i: int) -> VertexId:
    return VertexId(Side.LEFT, i)


def _rv(j: int) -> VertexId:
    return VertexId(Side.RIGHT, j)


class _EdgePool:
    """Present-edge set with O(1) seeded random choice and removal."""

    def __init__(self) -> None:
        self._items: list[tuple[int, int]] = []
        self._pos: dict[tuple[int, int], int] = {}

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self._pos

    def add(self, pair: tuple[int, int]) -> None:
        self._pos[pair] = len(self._items)
        self._items.append(pair)

    def remove(self, pair: tuple[int, int]) -> None:
        at = self._pos.pop(pair)
        last = self._items.pop()
        if at < len(self._items):
            self._items[at] = last
            self._pos[last] = at

    def pick(self, rng: random.Random) -> tuple[int, int]:
        return self._items[rng.randrange(len(self._items))]


def _params(kind: str, given: dict, spec: dict) -> dict:
    """Validate a parameter dict against required keys and defaults."""
    out = {}
    left = dict(given)
    for name, default in spec.items():
        if name in left:
            out[name] = left.pop(name)
        elif default is _REQUIRED:
            raise ConfigError(f"{kind} stream needs parameter {name!r}")
        else:
            out[name] = default
    if left:
        stray = ", ".join(sorted(left))
        raise ConfigError(f"unknown {kind} stream parameter(s): {stray}")
    return out


_REQUIRED = object()


def _positive(kind: str, name: str, value) -> int:
    if not isinstance(value, int) or value < 1:
        raise ConfigError(f"{kind} stream parameter {name} must be >= 1")
    return value


# -- generators --------------------------------------------------------


def _gen_random(params: dict, rng: random.Random) -> list[Update]:
    p = _params(
        "random",
        params,
        {
            "n_left": _REQUIRED,
            "n_right": _REQUIRED,
            "steps": _REQUIRED,
            "density": 0.5,
        },
    )
    n_left = _positive("random", "n_left", p["n_left"])
    n_right = _positive("random", "n_right", p["n_right"])
    steps = _positive("random", "steps", p["steps"])
    density = p["density"]
    if not 0.0 < density < 1.0:
        raise ConfigError("random stream density must lie in (0, 1)")
    pairs = n_left * n_right
    target = max(1, round(density * pairs))

    present = _EdgePool()
    out: list[Update] = []
    for _ in range(steps):
        if len(present) < target:
            do_insert = True
        elif len(present) > target:
            do_insert = False
        else:
            do_insert = rng.random() < 0.5
        if do_insert and len(present) >= pairs:
            do_insert = False
        if do_insert:
            while True:
                pair = (rng.randrange(n_left), rng.randrange(n_right))
                if pair not in present:
                    break
            present.add(pair)
            out.append(("+", _lv(pair[0]), _rv(pair[1])))
        else:
            pair = present.pick(rng)
            present.remove(pair)
            out.append(("-", _lv(pair[0]), _rv(pair[1])))
    return out


def _gen_sliding_window(params: dict, rng: random.Random) -> list[Update]:
    p = _params(
        "sliding_window",
        params,
        {
            "n_left": _REQUIRED,
            "n_right": _REQUIRED,
            "steps": _REQUIRED,
            "window": _REQUIRED,
        },
    )
    n_left = _positive("sliding_window", "n_left", p["n_left"])
    n_right = _positive("sliding_window", "n_right", p["n_right"])
    steps = _positive("sliding_window", "steps", p["steps"])
    window = _positive("sliding_window", "window", p["window"])
    pairs = n_left * n_right
    if window > pairs // 2:
        raise ConfigError(
            f"window {window} too large for {n_left}x{n_right} vertices"
        )

    live: deque[tuple[int, int]] = deque()
    member: set[tuple[int, int]] = set()
    out: list[Update] = []
    for _ in range(steps):
        if len(live) >= window:
            pair = live.popleft()
            member.discard(pair)
            out.append(("-", _lv(pair[0]), _rv(pair[1])))
        else:
            while True:
                pair = (rng.randrange(n_left), rng.randrange(n_right))
                if pair not in member:
                    break
            live.append(pair)
            member.add(pair)
            out.append(("+", _lv(pair[0]), _rv(pair[1])))
    return out


def _forest_connected(
    adj: dict[VertexId, set[VertexId]], a: VertexId, b: VertexId
) -> bool:
    """Whether a and b share a tree in one forest (BFS over its edges)."""
    if a not in adj or b not in adj:
        return False
    frontier = [a]
    seen = {a}
    while frontier:
        v = frontier.pop()
        if v == b:
            return True
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return False


def _gen_forest_union(params: dict, rng: random.Random) -> list[Update]:
    p = _params(
        "forest_union",
        params,
        {
            "n_left": _REQUIRED,
            "n_right": _REQUIRED,
            "steps": _REQUIRED,
            "alpha": 1,
            "delete_prob": 0.25,
        },
    )
    n_left = _positive("forest_union", "n_left", p["n_left"])
    n_right = _positive("forest_union", "n_right", p["n_right"])
    steps = _positive("forest_union", "steps", p["steps"])
    alpha = _positive("forest_union", "alpha", p["alpha"])
    delete_prob = p["delete_prob"]
    if not 0.0 <= delete_prob < 1.0:
        raise ConfigError("forest_union delete_prob must lie in [0, 1)")

    forests: list[dict[VertexId, set[VertexId]]] = [
        {} for _ in range(alpha)
    ]
    home: dict[tuple[int, int], int] = {}
    present = _EdgePool()
    cap = alpha * (n_left + n_right - 1)
    out: list[Update] = []

    def try_insert() -> Update | None:
        for _ in range(60):
            f = rng.randrange(alpha)
            pair = (rng.randrange(n_left), rng.randrange(n_right))
            if pair in present:
                continue
            u, v = _lv(pair[0]), _rv(pair[1])
            if _forest_connected(forests[f], u, v):
                continue
            forests[f].setdefault(u, set()).add(v)
            forests[f].setdefault(v, set()).add(u)
            home[pair] = f
            present.add(pair)
            return ("+", u, v)
        return None

    def do_delete() -> Update:
        pair = present.pick(rng)
        present.remove(pair)
        f = home.pop(pair)
        u, v = _lv(pair[0]), _rv(pair[1])
        forests[f][u].discard(v)
        forests[f][v].discard(u)
        return ("-", u, v)

    for _ in range(steps):
        wants_delete = (
            len(present) > 0
            and (len(present) >= cap or rng.random() < delete_prob)
        )
        if wants_delete:
            out.append(do_delete())
            continue
        op = try_insert()
        if op is None:
            # Acyclic candidates are scarce; make room instead.
            op = do_delete()
        out.append(op)
    return out


def _churned(
    build: list[tuple[int, int]],
    churn_pool: list[tuple[int, int]],
    steps: int | None,
    rng: random.Random,
) -> list[Update]:
    """Shuffle a build phase, then toggle churn_pool pairs to length."""
    order = list(build)
    rng.shuffle(order)
    out: list[Update] = [("+", _lv(i), _rv(j)) for i, j in order]
    if steps is None or steps <= len(out):
        return out if steps is None else out[:steps]
    present = set(build)
    while len(out) < steps:
        pair = churn_pool[rng.randrange(len(churn_pool))]
        if pair in present:
            present.discard(pair)
            out.append(("-", _lv(pair[0]), _rv(pair[1])))
        else:
            present.add(pair)
            out.append(("+", _lv(pair[0]), _rv(pair[1])))
    return out


def _gen_four_block(params: dict, rng: random.Random) -> list[Update]:
    p = _params(
        "four_block",
        params,
        {"block": _REQUIRED, "steps": None},
    )
    block = _positive("four_block", "block", p["block"])
    steps = p["steps"]
    if steps is not None:
        steps = _positive("four_block", "steps", steps)
    # Complete between the two sides except the L2 x R2 corner.
    allowed = [
        (i, j)
        for i in range(2 * block)
        for j in range(2 * block)
        if i < block or j < block
    ]
    return _churned(allowed, allowed, steps, rng)


def _gen_three_block(params: dict, rng: random.Random) -> list[Update]:
    p = _params(
        "three_block",
        params,
        {
            "block": _REQUIRED,
            "beta": _REQUIRED,
            "lam": _REQUIRED,
            "steps": None,
        },
    )
    block = _positive("three_block", "block", p["block"])
    beta = _positive("three_block", "beta", p["beta"])
    lam = p["lam"]
    steps = p["steps"]
    if steps is not None:
        steps = _positive("three_block", "steps", steps)
    reg = beta // 2 - 1
    if reg < 1:
        raise ConfigError(f"three_block needs beta >= 4, got {beta}")
    if block < reg:
        raise ConfigError(
            f"three_block block size {block} cannot host a "
            f"{reg}-regular piece; need at least {reg}"
        )

    s = block
    used: list[tuple[int, int]] = []
    used += [(i, i) for i in range(s)]
    used += [(2 * s + i, 2 * s + i) for i in range(s)]
    for t in range(reg):
        used += [(i, s + (i + t) % s) for i in range(s)]
        used += [(s + i, 2 * s + (i + t) % s) for i in range(s)]
    red = [(s + i, s + i) for i in range(s)]

    graph = DynBipartiteGraph(3 * s, 3 * s)
    h_edges = set()
    for i, j in used:
        h_edges.add(graph.insert_edge(_lv(i), _rv(j)))
    for i, j in red:
        graph.insert_edge(_lv(i), _rv(j))
    report = validate_edcs_unweighted(graph, h_edges, beta, lam)
    if not report.ok:
        edge, rule, ed = report.violations[0]
        raise ConfigError(
            f"three_block instance rejected: {rule} fails at "
            f"({edge.left!r}, {edge.right!r}) with edge degree {ed}"
        )
    return _churned(used + red, red, steps, rng)


_KINDS = {
    "random": _gen_random,
    "sliding_window": _gen_sliding_window,
    "forest_union": _gen_forest_union,
    "four_block": _gen_four_block,
    "three_block": _gen_three_block,
}


def generate_stream(kind: str, params: dict, seed: int) -> list[Update]:
    """Build a deterministic update stream of the given kind."""
    if kind not in _KINDS:
        known = ", ".join(sorted(_KINDS))
        raise ConfigError(f"unknown stream kind {kind!r}; known: {known}")
    return _KINDS[kind](params, random.Random(seed))


# -- replayability and sizing ------------------------------------------


def validate_stream(stream: list[Update]) -> tuple[int, int]:
    """Check the stream replays cleanly; returns minimal side sizes.

    Raises StreamError naming the first offending step (1-based) if a
    delete targets an absent edge or an insert a present one.
    """
    present: set[tuple[int, int]] = set()
    n_left = n_right = 0
    for at, (op, u, v) in enumerate(stream, start=1):
        if u.side != Side.LEFT or v.side != Side.RIGHT:
            raise StreamError(f"step {at}: endpoints must be (left, right)")
        pair = (u.index, v.index)
        n_left = max(n_left, u.index + 1)
        n_right = max(n_right, v.index + 1)
        if op == "+":
            if pair in present:
                raise StreamError(
                    f"step {at}: insert of present edge ({u!r}-{v!r})"
                )
            present.add(pair)
        elif op == "-":
            if pair not in present:
                raise StreamError(
                    f"step {at}: delete of absent edge ({u!r}-{v!r})"
                )
            present.discard(pair)
        else:
            raise StreamError(f"step {at}: unknown op {op!r}")
    return n_left, n_right


# -- flat-file format --------------------------------------------------


def write_stream(stream: list[Update], path) -> None:
    """One ASCII line per update: `+ L<i> R<j>` or `- L<i> R<j>`."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for op, u, v in stream:
            fh.write(f"{op} L{u.index} R{v.index}\n")


def read_stream(path) -> list[Update]:
    out: list[Update] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in "+-":
                raise StreamError(f"{path}:{lineno}: bad update {line!r}")
            op, lt, rt = parts
            if not (lt.startswith("L") and rt.startswith("R")):
                raise StreamError(f"{path}:{lineno}: bad endpoints {line!r}")
            try:
                i, j = int(lt[1:]), int(rt[1:])
            except ValueError:
                raise StreamError(
                    f"{path}:{lineno}: bad vertex index in {line!r}"
                ) from None
            if i < 0 or j < 0:
                raise StreamError(f"{path}:{lineno}: negative index {line!r}")
            out.append((op, _lv(i), _rv(j)))
    return out
