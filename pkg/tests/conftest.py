"""Shared fixtures: small categories every module's tests lean on."""

import pytest

from fib2cat import fincat
from fib2cat.fincat import category_from_poset, finset_skeleton, validate_category


@pytest.fixture(scope="session")
def terminal_cat():
    return validate_category(
        "one", ["*"], [("id*", "*", "*")], {"*": "id*"}, {("id*", "id*"): "id*"}
    )


@pytest.fixture(scope="session")
def walking_iso():
    # two objects, i and its inverse
    mors = [
        ("ida", "a", "a"),
        ("idb", "b", "b"),
        ("i", "a", "b"),
        ("j", "b", "a"),
    ]
    comp = {
        ("ida", "ida"): "ida",
        ("idb", "idb"): "idb",
        ("i", "ida"): "i",
        ("idb", "i"): "i",
        ("j", "idb"): "j",
        ("ida", "j"): "j",
        ("j", "i"): "ida",
        ("i", "j"): "idb",
    }
    return validate_category("E", ["a", "b"], mors, {"a": "ida", "b": "idb"}, comp)


@pytest.fixture(scope="session")
def chain3():
    return category_from_poset("chain3", ["0", "1", "2"], [("0", "1"), ("1", "2")])


@pytest.fixture(scope="session")
def diamond():
    return category_from_poset(
        "diamond", ["bot", "x", "y", "top"],
        [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")],
    )


@pytest.fixture(scope="session")
def walking_arrow():
    return category_from_poset("arrow", ["0", "1"], [("0", "1")])


@pytest.fixture(scope="session")
def finset2():
    return finset_skeleton(2)


@pytest.fixture(scope="session")
def discrete2():
    return validate_category(
        "disc2", ["u", "v"], [("idu", "u", "u"), ("idv", "v", "v")],
        {"u": "idu", "v": "idv"}, {("idu", "idu"): "idu", ("idv", "idv"): "idv"},
    )
