from __future__ import annotations

import random

import pytest

from gcluster.cluster_functions import (
    c_coeffs,
    catalog,
    explicit_weights,
    f_variables,
    g_dual,
    g_dual_via_H,
    scale_point,
    seed_F,
    sign_phi,
    trivial_sign_products,
    ttc_coeffs,
)
from gcluster.exact_core import det, q
from gcluster.maps import psi_prime

from conftest import generic


@pytest.mark.parametrize("n", [4, 5, 6])
def test_trivialsigns(n):
    assert set(trivial_sign_products(n).values()) == {1}


def test_sign_phi_examples():
    # n even: (n-2)/2 + k(k-1)/2 + l(l-1)/2
    assert sign_phi(4, 1, 1) == -1
    assert sign_phi(4, 2, 1) == 1
    assert sign_phi(5, 1, 1) == 1


@pytest.mark.parametrize("n", [4, 5])
def test_ttc_endpoints(n):
    X = generic(n)
    c = ttc_coeffs(X)
    assert c[0] == X[0, n - 1] * det(X)


def test_c_coeffs_determinant_is_top_coefficient():
    U = generic(3)
    assert c_coeffs(U)[3] == det(U)


def test_weights_quoted_examples():
    w = explicit_weights(5)
    assert w["A"] == (5, 5) and w["C"] == (1, 1)
    # f weights split by parity
    assert w["(2,+)"][0] == 4 * 6 // 2
    assert w["(2,-)"][0] == 2 * 6 // 2 + 1


@pytest.mark.parametrize("n", [4, 5])
def test_every_variable_is_homogeneous(n):
    X = generic(n, 1)
    t, s = q("3/2"), q("-5/7")
    Y = scale_point(X, t, s)
    w = explicit_weights(n)
    for label, f in f_variables(n).items():
        assert f.at(Y) == t ** w[label][0] * s ** w[label][1] * f.at(X), label


def test_g_dual_two_formulas(X5):
    U = psi_prime(X5)
    for i in range(2, 5):
        for j in range(2, i + 1):
            assert g_dual(U, i, j) == g_dual_via_H(U, i, j)


def test_seed_F_vertex_assignment():
    S = seed_F(4)
    names = S.names
    assert names["A"] == "x_14" and names["B"] == "det X" and names["C"] == "x_41"
    assert names["D"] == "g_33"
    assert S.quiver.info["(1,1)"].d == 3
    assert len(S.strings["(1,1)"]) == 4


def test_catalog_is_memoized():
    cat = catalog(4)
    assert cat.phi(1, 1) is cat.phi(1, 1)
