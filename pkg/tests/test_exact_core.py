from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest

from gcluster.exact_core import (
    Dual,
    DomainError,
    FactorizationError,
    SingularMatrixError,
    det,
    gauss_factorize,
    identity,
    inverse,
    matrix,
    nilpotent_exp,
    nilpotent_log,
    pairing,
    q,
    sample_matrix,
)


def leibniz_det(rows):
    """Permutation expansion over Fractions, independent of the Bareiss code."""
    n = len(rows)
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= Fraction(rows[i][perm[i]])
        total += term
    return total


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_det_matches_permutation_expansion(n):
    rng = random.Random(n)
    for _ in range(5):
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        assert det(matrix(rows)) == leibniz_det(rows)


def test_det_with_rational_entries():
    rows = [[Fraction(1, 2), Fraction(3, 7)], [Fraction(-5, 3), 4]]
    assert det(matrix(rows)) == leibniz_det(rows)


def test_inverse_round_trip():
    M = sample_matrix(random.Random(3), 4)
    assert (M @ inverse(M) == identity(4)).all()


def test_inverse_singular_raises():
    with pytest.raises(SingularMatrixError):
        inverse(matrix([[1, 2], [2, 4]]))


def test_gauss_factorization_shape_and_product():
    M = sample_matrix(random.Random(4), 4)
    plus, zm = gauss_factorize(M)
    assert (plus @ zm == M).all()
    assert all(plus[i, i] == 1 for i in range(4))
    assert all(plus[i, j] == 0 for i in range(4) for j in range(i))
    assert all(zm[i, j] == 0 for i in range(4) for j in range(i + 1, 4))


def test_gauss_factorization_reports_vanishing_minor():
    M = matrix([[1, 2, 3], [4, 5, 6], [7, 8, 0]])
    M[2, 2] = q(0)
    with pytest.raises(FactorizationError):
        gauss_factorize(M)


def test_nilpotent_exp_log_inverse():
    x = matrix([[0, 1, 2], [0, 0, 3], [0, 0, 0]])
    assert (nilpotent_log(nilpotent_exp(x)) == x).all()
    with pytest.raises(DomainError):
        nilpotent_exp(matrix([[0, 1], [1, 0]]))


def test_dual_numbers_product_and_quotient_rules():
    a = Dual.seed(3, 0, 2)
    b = Dual.seed(5, 1, 2)
    p = a * b / (a + 1)
    # d/da (ab/(a+1)) = b/(a+1)^2, d/db = a/(a+1)
    assert p.val == q(15) / 4
    assert p.d[0] == q(5) / 16
    assert p.d[1] == q(3) / 4


def test_det_of_dual_matrix_gives_cofactors():
    M = sample_matrix(random.Random(8), 3)
    D = np.empty((3, 3), dtype=object)
    for i in range(3):
        for j in range(3):
            D[i, j] = Dual.seed(M[i, j], 3 * i + j, 9)
    v = det(D)
    adj = inverse(M) * det(M)
    assert v.val == det(M)
    assert all(v.d[3 * i + j] == adj[j, i] for i in range(3) for j in range(3))


def test_pairing_is_trace_of_product():
    A = sample_matrix(random.Random(1), 3)
    B = sample_matrix(random.Random(2), 3)
    assert pairing(A, B) == sum((A @ B)[i, i] for i in range(3))
