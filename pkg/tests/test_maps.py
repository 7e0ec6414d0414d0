from __future__ import annotations

from itertools import combinations

import pytest

from gcluster.exact_core import DimensionError, det, sub
from gcluster.maps import (
    ConsistencyError,
    H_iterate,
    N_from_X,
    forward_chain,
    psi_prime,
    psi_second,
    reconstruct_X,
    remark_L,
    u_minor_via_X,
)
from gcluster.mutation_sequences import k_value

from conftest import generic


@pytest.mark.parametrize("m", [3, 4, 5])
def test_H_sequence_is_stable_after_m_minus_2_steps(m):
    U = generic(m, 3)
    Hs = H_iterate(U, m + 1)
    for k in range(m - 2, m + 2):
        assert (Hs[k] == Hs[m - 2]).all()


def test_H_sequence_has_not_stabilized_earlier():
    U = generic(5, 3)
    Hs = H_iterate(U, 4)
    assert not (Hs[2] == Hs[3]).all()


@pytest.mark.parametrize("n", [4, 5, 6])
def test_roundtrip_is_exact(n):
    for seed in range(3):
        X = generic(n, seed)
        assert (reconstruct_X(psi_prime(X), X[0], X[n - 1]).X == X).all()


@pytest.mark.parametrize("n", [4, 5])
def test_reconstruction_intermediates_match_forward_chain(n):
    X = generic(n, 4)
    rec = reconstruct_X(psi_prime(X), X[0], X[n - 1])
    fwd = forward_chain(X)
    assert (rec.Upsilon == fwd.Upsilon).all()
    assert (rec.upsilon == fwd.upsilon).all()
    assert (rec.m == fwd.m).all()


@pytest.mark.parametrize("n", [4, 5])
def test_L_is_symmetric_and_matches_closed_form(n):
    X = generic(n, 6)
    L = reconstruct_X(psi_prime(X), X[0], X[n - 1]).L
    assert (L == L.T).all()
    assert (L == remark_L(X)).all()


def test_reconstruction_rejects_rows_from_another_fiber():
    X, Y = generic(4, 1), generic(4, 2)
    with pytest.raises(ConsistencyError):
        reconstruct_X(psi_prime(X), Y[0], Y[3])


def test_reconstruction_rejects_wrong_row_length():
    X = generic(4, 1)
    with pytest.raises(DimensionError):
        reconstruct_X(psi_prime(X), X[0][:3], X[3])


@pytest.mark.parametrize("n", [4, 5])
def test_minors_of_N(n):
    X = generic(n, 8)
    N = N_from_X(X)
    for i in range(1, n + 1):
        for j in range(1, i):
            if (i, j) == (n, 1):
                continue
            got = det(sub(N, range(i, n + 1), range(j, n + j - i + 1)))
            assert got == k_value(X, i, j) / (k_value(X, i, i) * k_value(X, n + j - i, n + j - i))


def test_corner_of_N_is_normalized_by_the_last_diagonal_entry():
    X = generic(5, 8)
    assert N_from_X(X)[4, 0] == X[4, 0] / X[4, 4]


@pytest.mark.parametrize("n", [4, 5])
def test_all_minors_of_U_through_X(n):
    X = generic(n, 9)
    U = psi_prime(X)
    m = n - 1
    for k in range(1, m + 1):
        for I in combinations(range(1, m + 1), k):
            for J in combinations(range(1, m + 1), k):
                assert u_minor_via_X(X, list(I), list(J)) == det(sub(U, I, J))


@pytest.mark.parametrize("n", [4, 5, 6])
def test_fiber_values(n):
    X = generic(n, 10)
    U = psi_prime(X)
    assert det(U) == X[n - 1, 0] / X[0, n - 1]
    assert psi_second(X).qbar[0] == det(U)

