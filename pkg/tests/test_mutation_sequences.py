from __future__ import annotations

import json

import pytest

from gcluster.exact_core import det, sub
from gcluster.expr import Evaluator
from gcluster.gcs_engine import mutate_seed
from gcluster.cluster_functions import seed_toda, tbar_minus_expr, tbar_plus_expr
from gcluster.maps import psi_second
from gcluster.matrix_builders import word
from gcluster.mutation_sequences import (
    build_H,
    build_T,
    k_value,
    locate_positions,
    root_numbers,
    run_mu,
    run_W,
    tail_commutes,
    word_value,
)
from gcluster.quivers import TM, TP, boomerang_positions, boomerang_word

from conftest import generic


def test_head_sequence_n4():
    assert build_H(4).numbers == [0, -1, 1, 2, -2]


def test_head_sequence_n5():
    H = build_H(5)
    assert H.numbers == [0, -1, 1, 2, -2, 0, 1, -3, 3, 4, 5, -1, 0, -4]
    assert [s.vertex for s in H.R] == [3, 4, 5]
    assert root_numbers(4) == [1, 2]


def test_head_sequence_recursion_lengths():
    for n in range(5, 8):
        prev, cur = build_H(n - 1), build_H(n)
        assert cur.numbers[: len(prev.numbers)] == prev.numbers
        assert len(cur.I) == len(cur.S) == len(prev.R) + len(prev.S)


def test_head_sequence_rejects_small_n():
    with pytest.raises(ValueError):
        build_H(3)


def test_tail_plan_n4():
    targets = [ts.k for ts in build_T(4)]
    assert targets[0] == (4, 3)
    assert len(targets) == len(set(targets))


@pytest.mark.parametrize("n", [4, 5])
def test_boomerang_checkpoint(n):
    X = generic(n, 1)
    S = run_W(n, X).seed_after_head
    positions = locate_positions(S, n, X)
    for i, j in boomerang_positions(n):
        w = boomerang_word(n, i, j)
        if w is not None:
            assert S.value(positions[(i, j)]) == word_value(word(w), X)


@pytest.mark.parametrize("n", [4, 5])
def test_run_W_predictions_and_final_cluster(n):
    run = run_W(n, generic(n, 2))
    assert run.steps_ok
    assert run.head_quiver_ok and run.head_frozen_ok
    assert run.final_set_ok
    assert len(run.trace) == len(build_H(n).steps) + len(build_T(n))


def test_first_tail_step_gives_k_n_n_minus_1():
    n = 5
    X = generic(n, 3)
    run = run_W(n, X)
    first = next(t for t in run.trace if t.phase == "T")
    assert first.vertex == f"|{n},2|" and first.predicted == f"k_{n}{n - 1}" and first.ok


def test_k_value_diagonal_is_trailing_minor():
    X = generic(4, 4)
    assert k_value(X, 2, 2) == det(sub(X, [2, 3, 4], [2, 3, 4]))


def test_trace_is_json_serializable():
    data = run_W(4, generic(4, 5)).to_json()
    assert json.loads(json.dumps(data))["ok"] is True


def test_tail_mutations_commute_within_columns():
    assert tail_commutes(4, generic(4, 6))


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_run_mu(N):
    run = run_mu(N, psi_second(generic(N + 1, 7)))
    assert run.steps_ok and run.last_ok and run.restriction_ok


def test_first_toda_relation():
    rf = psi_second(generic(4, 8))
    S = seed_toda(3, rf)
    ev = Evaluator(dict(S.point))
    before = S.value(TM(1))
    S = mutate_seed(S, TM(1))
    assert before * S.value(TM(1)) == ev(tbar_minus_expr(2)) + ev(tbar_plus_expr(1)) ** 2
    assert S.value(TP(1)) == ev(tbar_plus_expr(1))
