from __future__ import annotations

import pytest

from gcluster.exact_core import q
from gcluster.expr import Atom, Const
from gcluster.gcs_engine import (
    MutationError,
    Quiver,
    Seed,
    VertexInfo,
    mutate_quiver,
    mutate_seed,
    pullback_discrepancy,
    y_exponents,
)


def a3() -> Quiver:
    return Quiver.build([(v, VertexInfo()) for v in "abc"], [("a", "b", 1), ("b", "c", 1)])


def test_quiver_mutation_reverses_and_composes():
    Q = mutate_quiver(a3(), "b")
    assert Q.table() == {("b", "a"): 1, ("c", "b"): 1, ("a", "c"): 1}


def test_quiver_mutation_is_involution():
    Q = a3()
    for v in "abc":
        assert mutate_quiver(mutate_quiver(Q, v), v).structure() == Q.structure()


def test_ordinary_exchange_relation():
    Q = a3()
    S = Seed.create(Q, {v: Atom(v) for v in "abc"}, {}, {"a": q(2), "b": q(3), "c": q(5)})
    T = mutate_seed(S, "b")
    assert T.value("b") == (q(2) + q(5)) / 3


def test_generalized_exchange_with_string():
    Q = Quiver.build([("a", VertexInfo()), ("k", VertexInfo(d=2)), ("b", VertexInfo(frozen=True)),
                      ("p", VertexInfo(frozen=True, isolated=True))], [("a", "k", 1), ("k", "b", 1)])
    V = {v: Atom(v) for v in "akbp"}
    S = Seed.create(Q, V, {"k": (Const(q(1)), Atom("p"), Const(q(1)))},
                    {"a": q(2), "k": q(3), "b": q(5), "p": q(7)})
    # a^2 + p a + b: the frozen neighbour enters once per d steps
    assert mutate_seed(S, "k").value("k") == q(4 + 14 + 5) / 3
    assert y_exponents(Q, "k") == {"b": 1, "a": -2}
    assert y_exponents(Q, "k", scaled=False) == {"b": 1, "a": -1}


def test_special_vertex_requires_string():
    Q = Quiver.build([("k", VertexInfo(d=2))])
    with pytest.raises(ValueError):
        Seed.create(Q, {"k": Atom("k")})


def test_cannot_mutate_frozen():
    Q = Quiver.build([("a", VertexInfo()), ("f", VertexInfo(frozen=True))], [("a", "f", 1)])
    S = Seed.create(Q, {"a": Atom("a"), "f": Atom("f")})
    with pytest.raises(MutationError):
        mutate_seed(S, "f")


def test_mutable_two_cycles_rejected():
    with pytest.raises(ValueError):
        Quiver.build([("a", VertexInfo()), ("b", VertexInfo())], [("a", "b", 1), ("b", "a", 1)])


def test_pullback_discrepancy_counts_in_minus_out():
    Q = a3()
    assert pullback_discrepancy({"a": 1}, Q, "b") == 1
    assert pullback_discrepancy({"c": 1}, Q, "b") == -1
