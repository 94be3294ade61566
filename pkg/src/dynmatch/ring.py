"""Circular doubly-linked list with named round-robin cursors.

Several bookkeeping structures scan a per-vertex collection a few steps
at a time and must resume where the previous scan stopped, even while
items are inserted and removed in between.  A ``Ring`` supports O(1)
insertion and removal by item, and any number of independent cursors
that survive both.

New items are linked in just before the first cursor's node, so a full
cursor revolution visits every item that was present when it started.
"""

from __future__ import annotations

from typing import Hashable, Iterator


class _Node:
    __slots__ = ("item", "prev", "next")

    def __init__(self, item: Hashable) -> None:
        self.item = item
        self.prev: _Node = self
        self.next: _Node = self


class Ring:
    def __init__(self, cursors: tuple[str, ...] = ("scan",)) -> None:
        if not cursors:
            raise ValueError("a ring needs at least one cursor")
        self._cursor_names = cursors
        self._cursor: dict[str, _Node | None] = {name: None for name in cursors}
        self._nodes: dict[Hashable, _Node] = {}

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, item: Hashable) -> bool:
        return item in self._nodes

    def add(self, item: Hashable) -> None:
        if item in self._nodes:
            raise ValueError(f"{item!r} already in ring")
        node = _Node(item)
        anchor = self._cursor[self._cursor_names[0]]
        if anchor is None:
            for name in self._cursor_names:
                self._cursor[name] = node
        else:
            node.prev = anchor.prev
            node.next = anchor
            anchor.prev.next = node
            anchor.prev = node
        self._nodes[item] = node

    def remove(self, item: Hashable) -> None:
        node = self._nodes.pop(item)
        if not self._nodes:
            for name in self._cursor_names:
                self._cursor[name] = None
            return
        node.prev.next = node.next
        node.next.prev = node.prev
        for name, cur in self._cursor.items():
            if cur is node:
                self._cursor[name] = node.next

    def step(self, cursor: str = "scan") -> Hashable:
        """Return the item under ``cursor`` and advance it one position."""
        node = self._cursor[cursor]
        if node is None:
            raise IndexError("step on empty ring")
        self._cursor[cursor] = node.next
        return node.item

    def items(self, cursor: str | None = None) -> Iterator[Hashable]:
        """Yield every item once, starting from the given (or first) cursor."""
        start = self._cursor[cursor if cursor is not None else self._cursor_names[0]]
        if start is None:
            return
        node = start
        while True:
            yield node.item
            node = node.next
            if node is start:
                return
