from __future__ import annotations

import random
from collections import defaultdict
from itertools import product

import numpy as np
import pytest

from gcluster.cluster_functions import c_coeffs, catalog, hbar_atom, phi_dual
from gcluster.exact_core import ZERO, pairing, q, sample_matrix, unit, zeros
from gcluster.expr import Call, atom_matrix, x
from gcluster.maps import gamma, gamma_star
from gcluster.poisson import (
    BDOperators,
    GradientTable,
    bracket_dual,
    bracket_from_gradients,
    bracket_main,
    bracket_toda,
    bracket_toda_fn,
    toda_moment_bracket,
)
from gcluster.rational import RationalFunctionPoint
from gcluster.verify import ROW_FAMILIES, row_formula_values

from conftest import generic


def strict_upper(M):
    return np.triu(M, 1)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_gamma_adjointness(n):
    rng = random.Random(n)
    for _ in range(3):
        A, Bm = sample_matrix(rng, n, -9, 9), sample_matrix(rng, n, -9, 9)
        assert pairing(gamma(A), Bm) == pairing(A, gamma_star(Bm))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_shift_is_nilpotent_on_upper_part(n):
    A = strict_upper(sample_matrix(random.Random(n), n, -9, 9))
    for _ in range(n - 1):
        A = gamma(A)
    assert (A == zeros(n)).all()


@pytest.mark.parametrize("n", [4, 5, 6])
@pytest.mark.parametrize("family", ROW_FAMILIES)
def test_row_formulas(n, family):
    got, want = row_formula_values(generic(n, 2), family)
    assert got == want


def test_firstfirst_single_pair(X4):
    val = bracket_main(x(1, 1), x(1, 3), X4)
    assert val == q(2) / 4 * X4[0, 0] * X4[0, 2]


def test_det_is_casimir(X4):
    D = catalog(4).det()
    T = GradientTable(X4)
    assert all(bracket_main(D, x(i, j), X4, T) == 0 for i in range(1, 5) for j in range(1, 5))


def test_antisymmetry_and_leibniz(X4):
    cat = catalog(4)
    f, g, h = cat.phi(1, 1), cat.g(3, 2), cat.f(3)
    T = GradientTable(X4)
    assert bracket_main(f, g, X4, T) == -bracket_main(g, f, X4, T)
    lhs = bracket_main(f, g * h, X4, T)
    rhs = bracket_main(f, g, X4, T) * h.at(X4) + g.at(X4) * bracket_main(f, h, X4, T)
    assert lhs == rhs


def _coordinate_bracket_gradient(a, b, X):
    """Exact gradient of the quadratic polynomial {x_a, x_b} by central differences."""
    n = X.shape[0]
    ops = BDOperators(n)
    ga, gb = unit(n, a[1], a[0]), unit(n, b[1], b[0])
    P = lambda Y: bracket_from_gradients(ga, gb, Y, ops)
    out = zeros(n)
    for i, j in product(range(1, n + 1), repeat=2):
        E = unit(n, i, j)
        out[j - 1, i - 1] = (P(X + E) - P(X - E)) / 2
    return out


def test_jacobi_spot_checks():
    n = 4
    X = generic(n, 5)
    rng = random.Random(11)
    ops = BDOperators(n)
    coords = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    for _ in range(6):
        a, b, c = rng.sample(coords, 3)
        total = ZERO
        for p, r, s in ((a, b, c), (b, c, a), (c, a, b)):
            grad_rs = _coordinate_bracket_gradient(r, s, X)
            total += bracket_from_gradients(unit(n, p[1], p[0]), grad_rs, X, ops)
        assert total == 0


def _dual_fns(m):
    U = atom_matrix(m)
    cs = [Call(lambda V, r=r: c_coeffs(V)[r], (U,), (m, 0), f"c{r}") for r in range(1, m + 1)]
    phis = {(k, l): Call(lambda V, k=k, l=l: phi_dual(V, k, l), (U,), (m * m, 0), f"phi{k}{l}")
            for k in range(1, m) for l in range(1, m - k + 1)}
    return cs, phis


@pytest.mark.parametrize("m", [3, 4])
def test_dual_bracket_casimirs_and_phi_commutation(m):
    U = generic(m, 7)
    cs, phis = _dual_fns(m)
    T = GradientTable(U)
    probe = x(1, 2) * x(m, 1) + x(2, 2)
    for c in cs:
        assert bracket_dual(c, probe, U, T) == 0
    for f in phis.values():
        assert bracket_dual(f, phis[(m - 1, 1)], U, T) == 0


def test_dual_bracket_antisymmetry():
    U = generic(4, 9)
    T = GradientTable(U)
    f, g = x(1, 3) * x(2, 2), x(4, 1) + x(3, 3) * x(1, 1)
    assert bracket_dual(f, g, U, T) == -bracket_dual(g, f, U, T)


def test_toda_moment_bracket_examples():
    h = [q(v) for v in (2, 3, 5, 7, 11, 13)]
    assert toda_moment_bracket(1, 2, h) == h[1] * h[2]
    assert toda_moment_bracket(3, 3, h) == 0
    assert toda_moment_bracket(2, 1, h) == -h[1] * h[2]


def test_bracket_toda_expression_and_function_level():
    rf = RationalFunctionPoint.from_coeffs([3, -1, 4, 2], [5, 2, -7, 1])
    h = rf.moments(12)
    env = {("h", i): v for i, v in enumerate(h)}
    assert bracket_toda(1, 3).at(env) == toda_moment_bracket(1, 3, h)
    g1 = hbar_atom(1) * hbar_atom(2)
    g2 = hbar_atom(3)
    want = toda_moment_bracket(1, 3, h) * h[2] + h[1] * toda_moment_bracket(2, 3, h)
    assert bracket_toda_fn(g1, g2, env) == want


def test_generating_function_form_against_laurent_series():
    """{M(lam), M(mu)} = -(lam M(mu) - mu M(lam)) (M(lam) - M(mu)) / (lam - mu) coefficientwise."""
    rf = RationalFunctionPoint.from_coeffs([3, -1, 4, 2], [5, 2, -7, 1])
    K = 10
    h = rf.moments(2 * K + 2)

    def mul(A, B):
        out = defaultdict(lambda: ZERO)
        for (a1, b1), c1 in A.items():
            for (a2, b2), c2 in B.items():
                out[(a1 + a2, b1 + b2)] += c1 * c2
        return out

    # (M(lam) - M(mu)) / (lam - mu) = -sum_i h_i sum_{a + b = i + 1} lam^-a mu^-b
    quotient = {(-a, -b): -h[a + b - 1] for a in range(1, K + 2) for b in range(1, K + 2)}
    front = {(1, -j): -h[j] for j in range(K + 2)}
    for i in range(K + 2):
        front[(-i, 1)] = front.get((-i, 1), ZERO) + h[i]
    rhs = mul(front, quotient)
    for i in range(K - 1):
        for j in range(K - 1):
            assert rhs.get((-i, -j), ZERO) == toda_moment_bracket(i, j, h), (i, j)
