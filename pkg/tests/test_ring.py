import pytest

from dynmatch.ring import Ring


def test_empty_ring():
    r = Ring()
    assert len(r) == 0
    assert list(r.items()) == []
    with pytest.raises(IndexError):
        r.step()


def test_single_item_cycles():
    r = Ring()
    r.add("a")
    assert r.step() == "a"
    assert r.step() == "a"
    assert "a" in r


def test_new_items_are_visited_last():
    r = Ring()
    r.add("a")
    r.add("b")
    r.add("c")
    assert r.step() == "a"
    r.add("d")
    # d is linked just before the cursor, so every older item is
    # stepped over before the cursor reaches it.
    assert [r.step() for _ in range(4)] == ["b", "c", "a", "d"]
    assert r.step() == "b"


def test_remove_under_cursor_advances():
    r = Ring()
    for x in "abc":
        r.add(x)
    r.remove("a")
    assert r.step() == "b"
    r.remove("c")
    assert r.step() == "b"
    r.remove("b")
    assert len(r) == 0
    with pytest.raises(IndexError):
        r.step()


def test_remove_elsewhere_keeps_cursor():
    r = Ring()
    for x in "abcd":
        r.add(x)
    assert r.step() == "a"
    r.remove("c")
    assert [r.step() for _ in range(3)] == ["b", "d", "a"]


def test_duplicate_add_rejected():
    r = Ring()
    r.add("a")
    with pytest.raises(ValueError):
        r.add("a")


def test_independent_cursors():
    r = Ring(cursors=("info", "repair"))
    for x in "abc":
        r.add(x)
    assert r.step("info") == "a"
    assert r.step("info") == "b"
    assert r.step("repair") == "a"
    assert r.step("info") == "c"
    assert r.step("repair") == "b"


def test_items_snapshot_in_traversal_order():
    r = Ring(cursors=("info", "repair"))
    for x in "abc":
        r.add(x)
    r.step("info")
    assert list(r.items("info")) == ["b", "c", "a"]
    assert list(r.items("repair")) == ["a", "b", "c"]
    assert list(r.items()) == ["b", "c", "a"]


def test_refill_after_emptying():
    r = Ring()
    r.add(1)
    r.remove(1)
    r.add(2)
    r.add(3)
    assert r.step() == 2
    assert r.step() == 3
    assert r.step() == 2
