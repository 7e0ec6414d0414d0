"""Rational functions q(lambda)/p(lambda) with monic denominator, and their moments."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exact_core import ONE, ZERO, DimensionError, det, q, value_of


@dataclass(frozen=True)
class RationalFunctionPoint:
    """M(lambda) = qbar(lambda) / p(lambda) with deg qbar <= size and p monic of degree size.

    ``qbar`` holds qbar_0..qbar_size and ``p`` holds p_0..p_size with p_size = 1.
    Entries may be rationals or dual numbers.
    """

    qbar: tuple
    p: tuple

    def __post_init__(self):
        if len(self.qbar) != len(self.p) or len(self.p) < 2:
            raise DimensionError("qbar and p need the same length >= 2")
        if value_of(self.p[-1]) != 1:
            raise DimensionError("denominator must be monic")

    @classmethod
    def from_coeffs(cls, qbar: Sequence, p: Sequence) -> "RationalFunctionPoint":
        return cls(tuple(q(c) if isinstance(c, int) else c for c in qbar),
                   tuple(q(c) if isinstance(c, int) else c for c in p))

    @property
    def size(self) -> int:
        return len(self.p) - 1

    def moments(self, count: int) -> list:
        """hbar_0..hbar_{count - 1} from qbar = p * sum_i hbar_i lambda^{-i}."""
        N = self.size
        h: list = []
        for k in range(count):
            acc = self.qbar[N - k] if k <= N else ZERO
            for i in range(max(0, k - N), k):
                acc = acc - self.p[N - k + i] * h[i]
            h.append(acc)
        return h

    def value(self, lam):
        num = ZERO
        den = ZERO
        for c in reversed(self.qbar):
            num = num * lam + c
        for c in reversed(self.p):
            den = den * lam + c
        return num / den


def hankel_matrix(h: Sequence, m: int, shift: int) -> np.ndarray:
    """(h_{a + b - 2 + shift})_{a, b = 1..m}."""
    out = np.empty((m, m), dtype=object)
    for a in range(m):
        for b in range(m):
            out[a, b] = h[a + b + shift]
    return out


def tbar_minus(h: Sequence, m: int):
    """det of the m x m Hankel matrix starting at hbar_0."""
    return det(hankel_matrix(h, m, 0)) if m > 0 else ONE


def tbar_plus(h: Sequence, m: int):
    """(-1)^m det of the m x m Hankel matrix starting at hbar_1."""
    if m == 0:
        return ONE
    d = det(hankel_matrix(h, m, 1))
    return d if m % 2 == 0 else -d


def t_minus(h: Sequence, m: int):
    """Unbarred Hankel determinant det(h_{a+b-2}) for moments of qbar/p - hbar_0."""
    return tbar_minus(h[1:], m)


def t_plus(h: Sequence, m: int):
    """Unbarred Hankel determinant det(h_{a+b-1}) for moments of qbar/p - hbar_0."""
    return det(hankel_matrix(h[1:], m, 1)) if m > 0 else ONE
