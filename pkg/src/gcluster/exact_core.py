"""Exact rational scalars and matrices, determinants, factorizations and dual numbers.

Matrices are numpy arrays of dtype ``object`` holding ``gmpy2.mpq`` values or
:class:`Dual` numbers.  Every routine here is generic over both element types,
so the same code path evaluates a function and its gradient.
"""
from __future__ import annotations

import random
from typing import Iterable, Sequence

import gmpy2
import numpy as np

Q = gmpy2.mpq
ZERO = Q(0)
ONE = Q(1)


class SingularMatrixError(ZeroDivisionError):
    """Raised when an inverse or solve hits a zero pivot."""


class FactorizationError(ZeroDivisionError):
    """Raised when a trailing principal minor vanishes during Gauss factorization."""

    def __init__(self, index: int):
        super().__init__(f"trailing principal minor {index} vanishes")
        self.index = index


class DimensionError(ValueError):
    pass


class DomainError(ValueError):
    pass


def q(x) -> gmpy2.mpq:
    """Coerce ints, Fractions, strings and mpq to an exact rational."""
    if isinstance(x, str):
        return Q(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Q(int(x.numerator), int(x.denominator))
    return Q(x)


class Dual:
    """Value together with exact first partials with respect to a fixed atom list."""

    __slots__ = ("val", "d")

    def __init__(self, val, d: np.ndarray):
        self.val = val
        self.d = d

    @classmethod
    def seed(cls, val, index: int, size: int) -> "Dual":
        d = np.full(size, ZERO, dtype=object)
        d[index] = ONE
        return cls(q(val), d)

    @classmethod
    def constant(cls, val, size: int) -> "Dual":
        return cls(q(val), np.full(size, ZERO, dtype=object))

    def __repr__(self) -> str:
        return f"Dual({self.val}, {list(self.d)})"

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val + o.val, self.d + o.d)
        return Dual(self.val + o, self.d)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val - o.val, self.d - o.d)
        return Dual(self.val - o, self.d)

    def __rsub__(self, o):
        return Dual(o - self.val, -self.d)

    def __neg__(self):
        return Dual(-self.val, -self.d)

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.val * o.val, self.d * o.val + o.d * self.val)
        return Dual(self.val * o, self.d * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Dual):
            if o.val == 0:
                raise ZeroDivisionError("division by a vanishing dual number")
            v = self.val / o.val
            return Dual(v, (self.d - o.d * v) / o.val)
        o = q(o)
        if o == 0:
            raise ZeroDivisionError("division by zero")
        return Dual(self.val / o, self.d / o)

    def __rtruediv__(self, o):
        if self.val == 0:
            raise ZeroDivisionError("division by a vanishing dual number")
        v = q(o) / self.val
        return Dual(v, -self.d * (v / self.val))

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise TypeError("only integer powers are supported")
        if e < 0:
            return 1 / (self ** (-e))
        if e == 0:
            return Dual(ONE, self.d * 0)
        v = self.val ** (e - 1)
        return Dual(v * self.val, self.d * (e * v))


def value_of(x):
    """Underlying rational value of a scalar or dual."""
    return x.val if isinstance(x, Dual) else x


def is_zero(x) -> bool:
    return value_of(x) == 0


def qdiv(a, b):
    """Exact division that never produces a float."""
    if isinstance(a, Dual) or isinstance(b, Dual):
        return a / b
    b = q(b)
    if b == 0:
        raise ZeroDivisionError("division by zero")
    return q(a) / b


# ---------------------------------------------------------------- matrices

def matrix(rows: Iterable[Iterable]) -> np.ndarray:
    """Build an object matrix from nested rows, coercing plain numbers to mpq."""
    data = [[x if isinstance(x, Dual) else q(x) for x in r] for r in rows]
    out = np.empty((len(data), len(data[0]) if data else 0), dtype=object)
    for i, r in enumerate(data):
        if len(r) != out.shape[1]:
            raise DimensionError("ragged rows")
        for j, x in enumerate(r):
            out[i, j] = x
    return out


def zeros(r: int, c: int | None = None) -> np.ndarray:
    return np.full((r, r if c is None else c), ZERO, dtype=object)


def identity(n: int) -> np.ndarray:
    out = zeros(n)
    for i in range(n):
        out[i, i] = ONE
    return out


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij (1-based)."""
    out = zeros(n)
    out[i - 1, j - 1] = ONE
    return out


def sub(M: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Submatrix M_rows^cols with 1-based, order-preserving index lists."""
    return M[np.ix_([r - 1 for r in rows], [c - 1 for c in cols])]


def rng_range(a: int, b: int) -> list[int]:
    """Inclusive 1-based interval [a, b]."""
    return list(range(a, b + 1))


def values(M: np.ndarray) -> np.ndarray:
    out = np.empty(M.shape, dtype=object)
    for idx, x in np.ndenumerate(M):
        out[idx] = value_of(x)
    return out


def has_dual(M: np.ndarray) -> bool:
    return any(isinstance(x, Dual) for x in M.flat)


def _square(M: np.ndarray) -> int:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M.shape[0]


def _bareiss(a: list[list]) -> gmpy2.mpz:
    n = len(a)
    if n == 0:
        return gmpy2.mpz(1)
    sign = 1
    prev = gmpy2.mpz(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return gmpy2.mpz(0)
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_rational(M: np.ndarray):
    n = _square(M)
    if n == 0:
        return ONE
    rows = []
    scale = gmpy2.mpz(1)
    for i in range(n):
        r = [q(x) for x in M[i]]
        l = gmpy2.mpz(1)
        for x in r:
            l = gmpy2.lcm(l, x.denominator)
        rows.append([x.numerator * (l // x.denominator) for x in r])
        scale *= l
    return Q(_bareiss(rows), scale)


def _det_generic(M: np.ndarray):
    n = _square(M)
    a = [list(M[i]) for i in range(n)]
    result = ONE
    for k in range(n):
        p = next((i for i in range(k, n) if not is_zero(a[i][k])), None)
        if p is None:
            return a[0][0] * 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            result = -result
        piv = a[k][k]
        result = result * piv
        for i in range(k + 1, n):
            if is_zero(a[i][k]) and not isinstance(a[i][k], Dual):
                continue
            f = a[i][k] / piv
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return result


def det(M: np.ndarray):
    """Exact determinant.

    Rational input goes through fraction-free Bareiss elimination after row scaling.
    Dual input uses Jacobi's formula d(det M) = det M * tr(M^-1 dM) when M is
    invertible at the point, and plain elimination in dual arithmetic otherwise.
    """
    n = _square(M)
    if n == 0:
        return ONE
    if not has_dual(M):
        return _det_rational(M)
    V = values(M)
    dv = _det_rational(V)
    if dv == 0:
        return _det_generic(M)
    inv = inverse(V)
    size = next(x for x in M.flat if isinstance(x, Dual)).d.shape[0]
    acc = np.full(size, ZERO, dtype=object)
    for (a, b), x in np.ndenumerate(M):
        if isinstance(x, Dual):
            w = inv[b, a]
            if w != 0:
                acc = acc + x.d * w
    return Dual(dv, acc * dv)


def inverse(M: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; raises SingularMatrixError on a singular input."""
    n = _square(M)
    a = [list(M[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for k in range(n):
        p = next((i for i in range(k, n) if not is_zero(a[i][k])), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        a[k] = [x / piv for x in a[k]]
        for i in range(n):
            if i != k and not (is_zero(a[i][k]) and not isinstance(a[i][k], Dual)):
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = a[i][n + j]
    return out


def gauss_factorize(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor M = M_+ M_{0,-} with M_+ unipotent upper and M_{0,-} lower triangular.

    Elimination runs from the bottom-right corner, so the pivots are ratios of
    trailing principal minors.  A vanishing trailing minor of size s raises
    FactorizationError(s).
    """
    n = _square(M)
    # LU of the corner-reversed matrix without pivoting
    Y = [[M[n - 1 - i, n - 1 - j] for j in range(n)] for i in range(n)]
    L = [[ZERO] * n for _ in range(n)]
    U = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = Y[i][j]
            for k in range(i):
                s = s - L[i][k] * U[k][j]
            U[i][j] = s
        if is_zero(U[i][i]):
            raise FactorizationError(i + 1)
        L[i][i] = ONE
        for j in range(i + 1, n):
            s = Y[j][i]
            for k in range(i):
                s = s - L[j][k] * U[k][i]
            L[j][i] = s / U[i][i]
    plus = np.empty((n, n), dtype=object)
    zm = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            plus[i, j] = L[n - 1 - i][n - 1 - j]
            zm[i, j] = U[n - 1 - i][n - 1 - j]
    return plus, zm


def _strict_part_is_triangular(x: np.ndarray) -> bool:
    n = x.shape[0]
    upper = all(is_zero(x[i, j]) for i in range(n) for j in range(i + 1))
    lower = all(is_zero(x[i, j]) for i in range(n) for j in range(i, n))
    return upper or lower


def nilpotent_exp(x: np.ndarray) -> np.ndarray:
    """exp of a strictly triangular matrix as a finite series."""
    n = _square(x)
    if not _strict_part_is_triangular(x):
        raise DomainError("exp is only defined here for strictly triangular input")
    out = identity(n)
    term = identity(n)
    for k in range(1, n):
        term = (term @ x) / k
        out = out + term
    return out


def nilpotent_log(B: np.ndarray) -> np.ndarray:
    """log of a unipotent triangular matrix as a finite series."""
    n = _square(B)
    N = B - identity(n)
    if not _strict_part_is_triangular(N):
        raise DomainError("log is only defined here for unipotent triangular input")
    out = zeros(n)
    power = identity(n)
    for k in range(1, n):
        power = power @ N
        out = out + power * Q((-1) ** (k + 1), k)
    return out


def trace(M: np.ndarray):
    s = ZERO
    for i in range(_square(M)):
        s = s + M[i, i]
    return s


def pairing(A: np.ndarray, B: np.ndarray):
    """Trace form <A, B> = Tr(AB)."""
    s = ZERO
    n = A.shape[0]
    for i in range(n):
        for j in range(n):
            s = s + A[i, j] * B[j, i]
    return s


# ---------------------------------------------------------------- sampling

def sample_matrix(rng: random.Random, n: int, lo: int = -99, hi: int = 99) -> np.ndarray:
    return matrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])


def sample_generic(rng: random.Random, n: int, accept=None, cap: int = 50) -> tuple[np.ndarray, int]:
    """Draw an integer matrix until ``accept`` holds and no ZeroDivisionError escapes.

    Returns the matrix and the number of rejected draws.
    """
    for attempt in range(cap):
        X = sample_matrix(rng, n)
        try:
            if det(X) != 0 and (accept is None or accept(X)):
                return X, attempt
        except ZeroDivisionError:
            continue
    raise ZeroDivisionError(f"no generic point found after {cap} attempts")


def grad(f, X: np.ndarray):
    """Value of f at X and its gradient with (nabla f)_{ij} = d f / d x_{ji}."""
    from .expr import grad_matrix

    return grad_matrix(f, X)
