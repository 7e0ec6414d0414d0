"""Block matrices assembled from rows of an n x n matrix X.

Every builder is generic over the element type of ``X``: exact rationals, dual
numbers, or plain strings (used for symbolic golden dumps).  The ``zero``
argument supplies the filler element.  Row selectors are 1-based and keep the
listed order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exact_core import ZERO, DimensionError, rng_range


# ---------------------------------------------------------------- row selectors

def interval(a: int, b: int) -> list[int]:
    return rng_range(a, b)


def one_and(rows: Iterable[int]) -> list[int]:
    """The selector 1 ∪ rows, with row 1 first."""
    return [1] + list(rows)


def with_last(rows: Iterable[int], n: int) -> list[int]:
    """The selector I ∪ n, with row n last."""
    return list(rows) + [n]


def shift_up(rows: Iterable[int]) -> list[int]:
    """gamma(J) = {j + 1 : j in J}."""
    return [j + 1 for j in rows]


def _check_rows(rows: Sequence[int], n: int) -> None:
    for r in rows:
        if not 1 <= r <= n:
            raise DimensionError(f"row index {r} outside [1, {n}]")


def _blank(r: int, c: int, zero) -> np.ndarray:
    return np.full((r, c), zero, dtype=object)


def _size(X: np.ndarray) -> int:
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise DimensionError(f"expected a square matrix, got {X.shape}")
    return X.shape[0]


# ---------------------------------------------------------------- Phi_kl

def phi_blocks(n: int, k: int, l: int) -> list[tuple[list[int], list[int]]]:
    """Row selectors (second tier, third tier) for each block column of Phi_kl."""
    if not (1 <= k <= n - 2 and 1 <= l <= n - 2 and k + l <= n - 1):
        raise DimensionError(f"Phi_kl needs 1 <= k, l and k + l <= n - 1, got k={k}, l={l}, n={n}")
    s = n - k - l
    out = []
    for i in range(1, s + 1):
        I = interval(l + 1, n - 1) if i == s else interval(2, n - 1)
        if i == s:
            J = interval(k + 1, n - 1)
        elif i == s - 1:
            J = interval(l + 1, n - 1)
        else:
            J = interval(2, n - 1)
        out.append((with_last(I, n), one_and(shift_up(J))))
    return out


def build_phi_matrix(X: np.ndarray, k: int, l: int, zero=ZERO) -> np.ndarray:
    """The (n-k-l)(n+1) square matrix whose determinant is phi_kl(X)."""
    n = _size(X)
    blocks = phi_blocks(n, k, l)
    size = len(blocks) * (n + 1)
    M = _blank(size, size, zero)
    for i, (second, third) in enumerate(blocks):
        top = i * n
        left = i * (n + 1)
        for r, row in enumerate(second):
            M[top + r, left:left + n] = X[row - 1, :]
        top += len(second)
        for r, row in enumerate(third):
            M[top + r, left + 1:left + n + 1] = X[row - 1, :]
    return M


# ---------------------------------------------------------------- G(I_1, ..., I_p)

def build_G(blocks: Sequence[Sequence[int]], X: np.ndarray, zero=ZERO) -> np.ndarray:
    """Stack X_{I_1}, ..., X_{I_p}, each block shifted one column right of the previous one."""
    n = _size(X)
    p = len(blocks)
    if p == 0:
        raise DimensionError("empty stack")
    rows = sum(len(I) for I in blocks)
    M = _blank(rows, n + p - 1, zero)
    r = 0
    for shift, I in enumerate(blocks):
        _check_rows(I, n)
        for row in I:
            M[r, shift:shift + n] = X[row - 1, :]
            r += 1
    return M


def gij_blocks(n: int, i: int, j: int) -> list[list[int]]:
    if not (2 <= j <= i <= n - 1):
        raise DimensionError(f"G_ij needs 2 <= j <= i <= n - 1, got i={i}, j={j}, n={n}")
    return [[1, n]] * (j - 2) + [one_and(interval(n + j - i, n)), one_and(interval(i + 1, n))]


def build_Gij(X: np.ndarray, i: int, j: int, zero=ZERO) -> np.ndarray:
    n = _size(X)
    M = build_G(gij_blocks(n, i, j), X, zero)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"G_{i}{j} is not square: {M.shape}")
    return M


def build_G_dexchange(X: np.ndarray, zero=ZERO) -> np.ndarray:
    """G({1,n}^{n-3}, {1,n-1,n}) = G_{n-2,n-2} with its first row and first column removed.

    This is the minor produced by the Pluecker relation behind the exchange at D.
    """
    n = _size(X)
    M = build_Gij(X, n - 2, n - 2, zero)
    return M[1:, 1:]


def build_G_dexchange_literal(X: np.ndarray, zero=ZERO) -> np.ndarray:
    """G_{n-1,n-2} with its first row and first column removed (does not satisfy the D exchange)."""
    n = _size(X)
    M = build_Gij(X, n - 1, n - 2, zero)
    return M[1:, 1:]


# ---------------------------------------------------------------- A, B and F

def build_AB(X: np.ndarray, zero=ZERO) -> tuple[np.ndarray, np.ndarray]:
    """Blocks A, B of size n+1 of the periodic staircase matrix."""
    n = _size(X)
    A = _blank(n + 1, n + 1, zero)
    B = _blank(n + 1, n + 1, zero)
    A[:n, 2:n + 1] = X[:, :n - 1]
    B[:n, 0] = X[:, n - 1]
    B[1:, 1:] = X
    return A, B


def pencil(X: np.ndarray, lam) -> np.ndarray:
    """lam * A(X) + B(X)."""
    A, B = build_AB(X)
    return A * lam + B


def build_F(X: np.ndarray, zero=ZERO) -> np.ndarray:
    """(2n-1) square matrix: row n of X, then rows 1 and n shifted by 1, 2, ..., n-1."""
    n = _size(X)
    return build_G([[n]] + [[1, n]] * (n - 1), X, zero)


def trailing(M: np.ndarray, k: int) -> np.ndarray:
    """Trailing principal k x k block."""
    if not 0 <= k <= min(M.shape):
        raise DimensionError(f"no trailing block of size {k} in shape {M.shape}")
    return M[M.shape[0] - k:, M.shape[1] - k:]


# ---------------------------------------------------------------- bracket words

@dataclass(frozen=True)
class Word:
    """A bracket word [k_1 ... k_p]; a barred part selects only last rows.

    An unbarred part of size k selects row 1 and the last k - 1 rows, a barred
    part of size k selects the last k rows.
    """

    parts: tuple[tuple[int, bool], ...]

    def __str__(self) -> str:
        return "[" + " ".join(("~" if b else "") + str(k) for k, b in self.parts) + "]"

    @property
    def size(self) -> int:
        return sum(k for k, _ in self.parts)

    def rows(self, n: int) -> list[list[int]]:
        out = []
        for k, barred in self.parts:
            if barred:
                out.append(interval(n - k + 1, n))
            else:
                out.append(one_and(interval(n - k + 2, n)))
        return out

    def check(self, n: int) -> None:
        p = len(self.parts)
        if p == 0:
            raise DimensionError("empty bracket word")
        for k, _ in self.parts:
            if not 1 <= k <= n:
                raise DimensionError(f"part {k} of {self} outside [1, {n}]")
        if self.size > n + p - 1:
            raise DimensionError(f"{self} needs {self.size} columns, only {n + p - 1} available")


_TOKEN = re.compile(r"^(~?)(\d+)(?:\^(\d+))?$")


def word(text: str | Sequence) -> Word:
    """Parse "~1 2^3 4" into a word; ``~`` marks a barred part and ``^`` repeats."""
    if isinstance(text, Word):
        return text
    if not isinstance(text, str):
        return Word(tuple((int(k), bool(b)) for k, b in text))
    parts: list[tuple[int, bool]] = []
    for tok in text.strip().strip("[]").split():
        m = _TOKEN.match(tok)
        if not m:
            raise DimensionError(f"malformed bracket token {tok!r}")
        rep = int(m.group(3)) if m.group(3) else 1
        parts.extend([(int(m.group(2)), m.group(1) == "~")] * rep)
    return Word(tuple(parts))


def bracket_matrix(w: Word | str, X: np.ndarray, zero=ZERO) -> np.ndarray:
    """Maximal trailing square submatrix of G(I_1, ..., I_p) for the word."""
    w = word(w)
    n = _size(X)
    w.check(n)
    G = build_G(w.rows(n), X, zero)
    return G[:, G.shape[1] - w.size:]


def promote(w: Word | str) -> Word:
    w = word(w)
    (k, barred), rest = w.parts[0], w.parts[1:]
    if not barred:
        return Word(((2, False),) + w.parts)
    if k == 1:
        return Word(((1, True), (2, False)) + rest)
    return Word(((1, True), (k + 1, False)) + rest)


def demote(w: Word | str) -> Word:
    w = word(w)
    first, rest = w.parts[0], w.parts[1:]
    if first == (2, False) and rest:
        return Word(((1, True),) + rest)
    if first == (1, True) and rest:
        return Word(rest)
    raise DimensionError(f"{w} is not a promoted word")


def kij_word(n: int, i: int, j: int) -> Word:
    if not (1 <= j < i <= n) or (i, j) == (n, 1):
        raise DimensionError(f"K_ij needs 1 <= j < i <= n and (i, j) != (n, 1), got ({i}, {j})")
    return Word(((n - i + 1, True), (i - j + 1, True)))


def build_Kij(X: np.ndarray, i: int, j: int, zero=ZERO) -> np.ndarray:
    return bracket_matrix(kij_word(_size(X), i, j), X, zero)


# ---------------------------------------------------------------- symbolic dumps

def symbolic_matrix(n: int) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = f"x{i + 1}{j + 1}"
    return out


def dump(M: np.ndarray) -> str:
    """Text rendering with one row per line, entries separated by spaces."""
    width = max(len(str(v)) for v in M.flat)
    return "\n".join(" ".join(str(v).rjust(width) for v in row) for row in M)
