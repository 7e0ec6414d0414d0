"""The maps X -> U = X_L X_R^{-1} and X -> qbar/p, the stabilizing map H, and the inverse of X -> (U, rows 1 and n)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact_core import (
    ONE,
    ZERO,
    DimensionError,
    DomainError,
    det,
    gauss_factorize,
    identity,
    inverse,
    nilpotent_exp,
    nilpotent_log,
    sub,
    value_of,
    zeros,
)
from .expr import MatCall, MatExpr, atom_matrix
from .matrix_builders import build_G
from .rational import RationalFunctionPoint


class ConsistencyError(ValueError):
    """The rows of X handed to the reconstruction do not lie over the given U."""


def _size(X: np.ndarray) -> int:
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"expected a square matrix, got {X.shape}")
    return X.shape[0]


# ---------------------------------------------------------------- Schur complements and U

def schur_left(X: np.ndarray) -> np.ndarray:
    """X_L = X_{[2,n]}^{[1,n-1]} - X_{[2,n]}^{[n,n]} x_{1n}^{-1} X_{[1,1]}^{[1,n-1]}."""
    n = _size(X)
    x1n = X[0, n - 1]
    out = np.empty((n - 1, n - 1), dtype=object)
    for i in range(1, n):
        r = X[i, n - 1] / x1n
        for j in range(n - 1):
            out[i - 1, j] = X[i, j] - r * X[0, j]
    return out


def schur_right(X: np.ndarray) -> np.ndarray:
    """X_R = X_{[1,n-1]}^{[2,n]} - X_{[1,n-1]}^{[1,1]} x_{n1}^{-1} X_{[n,n]}^{[2,n]}."""
    n = _size(X)
    xn1 = X[n - 1, 0]
    out = np.empty((n - 1, n - 1), dtype=object)
    for i in range(n - 1):
        r = X[i, 0] / xn1
        for j in range(1, n):
            out[i, j - 1] = X[i, j] - r * X[n - 1, j]
    return out


def E_left(X: np.ndarray) -> np.ndarray:
    n = _size(X)
    E = zeros(n)
    E[n - 1, 0] = ONE / X[0, n - 1]
    return E


def E_right(X: np.ndarray) -> np.ndarray:
    n = _size(X)
    E = zeros(n)
    E[0, n - 1] = ONE / X[n - 1, 0]
    return E


def psi_prime(X: np.ndarray) -> np.ndarray:
    """U = X_L X_R^{-1}; raises ZeroDivisionError at non-generic X."""
    if value_of(X[0, -1]) == 0 or value_of(X[-1, 0]) == 0:
        raise ZeroDivisionError("psi_prime needs x_1n x_n1 != 0")
    return schur_left(X) @ inverse(schur_right(X))


def psi_second(X: np.ndarray) -> RationalFunctionPoint:
    """qbar_i = x_{n,i+1}/x_{1n}, p_i = x_{1,i+1}/x_{1n} for i in [0, n-1]."""
    n = _size(X)
    x1n = X[0, n - 1]
    if value_of(x1n) == 0:
        raise ZeroDivisionError("psi_second needs x_1n != 0")
    qbar = tuple(X[n - 1, i] / x1n for i in range(n))
    p = tuple(X[0, i] / x1n for i in range(n))
    return RationalFunctionPoint(qbar, p)


def psi_prime_node(n: int, X: MatExpr | None = None) -> MatCall:
    """Matrix node for U(X) over the atoms of an n x n matrix."""
    X = atom_matrix(n) if X is None else X
    return MatCall(psi_prime, (X,), (n - 1, n - 1), (2 * n - 1, 2 * n - 1), name="psi_prime")


# ---------------------------------------------------------------- shifts and the lifted shift

def gamma(A: np.ndarray) -> np.ndarray:
    """gamma(A)_{ij} = A_{i-1, j-1}, zero in the first row and column."""
    m = _size(A)
    out = zeros(m)
    out[1:, 1:] = A[:-1, :-1]
    return out


def gamma_star(A: np.ndarray) -> np.ndarray:
    """gamma*(A)_{ij} = A_{i+1, j+1}, zero in the last row and column."""
    m = _size(A)
    out = zeros(m)
    out[:-1, :-1] = A[1:, 1:]
    return out


def gamma_lift(B: np.ndarray) -> np.ndarray:
    """exp(gamma(log B)) for a unipotent triangular B."""
    return nilpotent_exp(gamma(nilpotent_log(B)))


def gamma_star_lift(B: np.ndarray) -> np.ndarray:
    return nilpotent_exp(gamma_star(nilpotent_log(B)))


def gamma_star_lower(A: np.ndarray) -> np.ndarray:
    """Multiplicative extension of gamma* to invertible lower triangular matrices.

    The trailing diagonal slot, which gamma* leaves empty, is filled with 1.
    """
    m = _size(A)
    out = gamma_star(A)
    out[m - 1, m - 1] = ONE
    return out


# ---------------------------------------------------------------- the map H

def H_iterate(U: np.ndarray, steps: int | None = None) -> list[np.ndarray]:
    """[H_0, ..., H_steps] with H_0 = U and H_k = U gamma(H_{k-1}_+); default steps = m - 1."""
    m = _size(U)
    steps = m - 1 if steps is None else steps
    out = [U]
    for _ in range(steps):
        plus, _zm = gauss_factorize(out[-1])
        out.append(U @ gamma_lift(plus))
    return out


def H(U: np.ndarray) -> np.ndarray:
    """The stable value of the sequence H_k(U)."""
    m = _size(U)
    return H_iterate(U, max(m - 2, 0))[-1]


# ---------------------------------------------------------------- the matrix N of the Gauss factors

def N_from_lower(Vzm: np.ndarray) -> np.ndarray:
    """N = ... gamma*^2(V) gamma*(V) V, so that V = gamma*(N)^{-1} N."""
    m = _size(Vzm)
    N = Vzm
    term = Vzm
    for _ in range(m - 1):
        term = gamma_star_lower(term)
        N = term @ N
    return N


def N_from_X(X: np.ndarray) -> np.ndarray:
    """N = X_- gamma(X_-^{-1}) for X = X_+ X_0 X_- with X_- lower unipotent."""
    n = _size(X)
    _plus, zm = gauss_factorize(X)
    X0inv = zeros(n)
    for i in range(n):
        X0inv[i, i] = ONE / zm[i, i]
    Xm = X0inv @ zm
    return Xm @ gamma_lift(inverse(Xm))


# ---------------------------------------------------------------- reconstruction of X

def _minor_1n(X: np.ndarray, a: int, b: int):
    """det X_{1n}^{ab}: rows 1 and n, columns a and b (1-based)."""
    n = X.shape[0]
    return X[0, a - 1] * X[n - 1, b - 1] - X[0, b - 1] * X[n - 1, a - 1]


def _rows_minor(r1, rn, a: int, b: int):
    return r1[a - 1] * rn[b - 1] - r1[b - 1] * rn[a - 1]


def companion_M(rn) -> np.ndarray:
    """The (n-1) square matrix with first row -x_{n1}^{-1}[x_{n2} .. x_{nn}] over the shifted identity."""
    n = len(rn)
    M = zeros(n - 1)
    for j in range(n - 1):
        M[0, j] = -rn[j + 1] / rn[0]
    for i in range(1, n - 1):
        M[i, i - 1] = ONE
    return M


def mu_row(r1, rn) -> np.ndarray:
    n = len(r1)
    s = -ONE / (r1[n - 1] * rn[0])
    return np.array([_rows_minor(r1, rn, 1, b) * s for b in range(2, n + 1)], dtype=object)


def m_row(r1, rn) -> np.ndarray:
    n = len(r1)
    s = -ONE / r1[n - 1]
    return np.array([_rows_minor(r1, rn, a, n) * s for a in range(1, n)], dtype=object)


def C_matrix(r1, rn) -> np.ndarray:
    """Rows mu, mu M, ..., mu M^{n-2}."""
    n = len(r1)
    M = companion_M(rn)
    row = mu_row(r1, rn)
    C = np.empty((n - 1, n - 1), dtype=object)
    for i in range(n - 1):
        C[i, :] = row
        row = row @ M
    return C


def toeplitz_lower(entries) -> np.ndarray:
    """Lower triangular Toeplitz matrix with entries[0] on the diagonal."""
    k = len(entries)
    T = zeros(k)
    for i in range(k):
        for j in range(i + 1):
            T[i, j] = entries[i - j]
    return T


@dataclass
class Reconstruction:
    V: np.ndarray
    Vplus: np.ndarray
    Vzm: np.ndarray
    N: np.ndarray
    M: np.ndarray
    mu: np.ndarray
    m: np.ndarray
    C: np.ndarray
    Upsilon: np.ndarray
    upsilon: np.ndarray
    L: np.ndarray
    Theta: np.ndarray
    X: np.ndarray


def reconstruct_X(U: np.ndarray, first_row, last_row) -> Reconstruction:
    """Recover X from U = X_L X_R^{-1} and the first and last rows of X."""
    m_ = _size(U)
    n = m_ + 1
    r1 = np.array(list(first_row), dtype=object)
    rn = np.array(list(last_row), dtype=object)
    if len(r1) != n or len(rn) != n:
        raise DimensionError(f"rows must have length {n}")
    x1n, xn1 = r1[n - 1], rn[0]
    if value_of(x1n) == 0 or value_of(xn1) == 0:
        raise ZeroDivisionError("reconstruction needs x_1n x_n1 != 0")
    if det(U) != xn1 / x1n:
        raise ConsistencyError("det U differs from x_n1 / x_1n")

    V = H(U)
    Vplus, Vzm = gauss_factorize(V)
    N = N_from_lower(Vzm)
    if N[0, 0] != xn1 / x1n:
        raise DomainError("upper left entry of N differs from x_n1 / x_1n")

    M = companion_M(rn)
    mu = mu_row(r1, rn)
    mr = m_row(r1, rn)
    C = C_matrix(r1, rn)
    L = toeplitz_lower(list(rn[: n - 1])) @ C
    Upsilon = toeplitz_lower(list(rn[: n - 2])) @ C[: n - 2, :]
    upsilon = rn[1: n - 1].copy()

    Theta_left = identity(n)
    Theta_left[1:, 1:] = Vplus
    Theta_right = identity(n)
    Theta_right[: n - 1, : n - 1] = inverse(N)
    Theta = Theta_left @ Theta_right

    base = zeros(n)
    base[1:, : n - 1] = L
    outer = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            outer[i, j] = rn[i] * r1[j] / x1n
    X = Theta @ (base + outer)
    return Reconstruction(V, Vplus, Vzm, N, M, mu, mr, C, Upsilon, upsilon, L, Theta, X)


@dataclass
class ForwardChain:
    """Intermediates computed from X itself, for comparison with the reconstruction."""

    Xtilde: np.ndarray
    Y: np.ndarray
    y: np.ndarray
    v: np.ndarray
    Ytilde: np.ndarray
    ytilde: np.ndarray
    Upsilon: np.ndarray
    upsilon: np.ndarray
    m: np.ndarray


def forward_chain(X: np.ndarray) -> ForwardChain:
    n = _size(X)
    x1n = X[0, n - 1]
    U = psi_prime(X)
    V = H(U)
    Vplus, Vzm = gauss_factorize(V)
    N = N_from_lower(Vzm)
    T = identity(n)
    for j in range(n - 1):
        T[n - 1, j] = -X[0, j] / x1n
    Xt = X @ T
    Vpinv = inverse(Vplus)
    P = Vpinv[: n - 2, : n - 2]
    Y = P @ Xt[1: n - 1, : n - 1]
    y = P @ X[1: n - 1, n - 1]
    v = Vpinv[:, n - 2]
    mr = Xt[n - 1, : n - 1]
    Yt = Y + np.outer(v[: n - 2], mr)
    yt = y + v[: n - 2] * X[n - 1, n - 1]
    Nsub = N[1:, 1:]
    Ups = Nsub @ Yt
    ups = Nsub @ yt + N[1:, 0] * x1n
    return ForwardChain(Xt, Y, y, v, Yt, yt, Ups, ups, mr)


def remark_L(X: np.ndarray) -> np.ndarray:
    """Closed-form candidate for the symmetric matrix L, filled for i <= j and mirrored."""
    n = _size(X)
    L = zeros(n - 1)
    for i in range(1, n):
        for j in range(i, n):
            s = ZERO
            for t in range(0, min(i - 1, n - j - 1) + 1):
                s = s + _minor_1n(X, i - t, j + 1 + t)
            L[i - 1, j - 1] = -s / X[0, n - 1]
            L[j - 1, i - 1] = L[i - 1, j - 1]
    return L


# ---------------------------------------------------------------- minors of U through X

def index_sign(J) -> int:
    """(-1)^J = (-1)^{k(k-1)/2} prod_{j in J} (-1)^j for an index set of size k."""
    k = len(J)
    return -1 if (k * (k - 1) // 2 + sum(J)) % 2 else 1


def u_minor_via_X(X: np.ndarray, I: list[int], J: list[int]):
    """Block-determinant expression for det U_I^J with U = psi_prime(X).

    I, J are 1-based subsets of [1, n-1] of equal size k.  The block matrix is
    G(hat J, 1 cup gamma(I)) with hat J = [1, n] minus J, of size n + 1.
    """
    n = _size(X)
    k = len(I)
    if len(J) != k:
        raise DimensionError("I and J must have equal size")
    hatJ = [j for j in range(1, n + 1) if j not in J]
    B = build_G([hatJ, [1] + [i + 1 for i in I]], X)
    sign = (-1) ** ((n - 1) * k) * index_sign(J)
    return sign * det(B) / (X[0, n - 1] * det(X))
