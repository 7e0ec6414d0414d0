"""Poisson brackets evaluated exactly at a point from gradients.

Gradients follow the convention (grad f)_{ij} = d f / d x_{ji}; the pairing is
<A, B> = Tr(AB).  The R-matrix operators use finite sums of the shift maps, so
every bracket value is an exact rational.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exact_core import ZERO, Dual, pairing, q, trace, zeros
from .expr import Evaluator, Expr, dual_env, env_from_matrix
from .maps import gamma, gamma_star


# ---------------------------------------------------------------- projections

def pi_upper(A: np.ndarray) -> np.ndarray:
    return np.triu(A, 1)


def pi_lower(A: np.ndarray) -> np.ndarray:
    return np.tril(A, -1)


def pi_diag(A: np.ndarray) -> np.ndarray:
    out = zeros(A.shape[0])
    for i in range(A.shape[0]):
        out[i, i] = A[i, i]
    return out


def _series(op, A: np.ndarray, start: int, stop: int) -> np.ndarray:
    """sum_{k=start}^{stop} op^k(A)."""
    out = zeros(A.shape[0])
    term = A
    for _ in range(start):
        term = op(term)
    for _ in range(start, stop + 1):
        out = out + term
        term = op(term)
    return out


@dataclass(frozen=True)
class BDOperators:
    """R-operators for the Cremmer-Gervais data on gl_n and for its w0-conjugate."""

    n: int

    @property
    def D(self) -> np.ndarray:
        out = zeros(self.n)
        for i in range(self.n):
            out[i, i] = q(self.n - i)
        return out

    @property
    def Dbar(self) -> np.ndarray:
        out = zeros(self.n)
        for i in range(self.n):
            out[i, i] = q(i + 1)
        return out

    def _cartan(self, eta: np.ndarray, Dm: np.ndarray, shift) -> np.ndarray:
        n = self.n
        eta = pi_diag(eta)
        tr = trace(eta)
        out = zeros(n)
        c = q(n - 1) / (2 * n) * tr - trace(Dm @ eta) / n
        for i in range(n):
            out[i, i] = c + tr * Dm[i, i] / n
        return out - _series(shift, eta, 1, n - 1)

    def R0(self, eta: np.ndarray) -> np.ndarray:
        return self._cartan(eta, self.D, gamma_star)

    def R0bar(self, eta: np.ndarray) -> np.ndarray:
        return self._cartan(eta, self.Dbar, gamma)

    def R_plus(self, xi: np.ndarray) -> np.ndarray:
        n = self.n
        return self.R0(xi) + _series(gamma, pi_upper(xi), 0, n - 2) - _series(gamma_star, pi_lower(xi), 1, n - 1)

    def Rbar_plus(self, xi: np.ndarray) -> np.ndarray:
        n = self.n
        return self.R0bar(xi) + _series(gamma_star, pi_upper(xi), 0, n - 2) - _series(gamma, pi_lower(xi), 1, n - 1)


# ---------------------------------------------------------------- gradients

class GradientTable:
    """Values and gradients of many expressions at one matrix point, sharing one evaluation."""

    def __init__(self, X: np.ndarray):
        self.X = X
        self.n = X.shape[0]
        env, keys = dual_env(env_from_matrix(X))
        self.keys = keys
        self.ev = Evaluator(env)
        self._cache: dict[int, tuple] = {}

    def __call__(self, f: Expr):
        hit = self._cache.get(id(f))
        if hit is not None:
            return hit[1], hit[2]
        v = self.ev(f)
        n = self.n
        nabla = zeros(n)
        if isinstance(v, Dual):
            val = v.val
            for idx, (i, j) in enumerate(self.keys):
                nabla[j - 1, i - 1] = v.d[idx]
        else:
            val = v
        self._cache[id(f)] = (f, val, nabla)
        return val, nabla


def _commutator(A, B):
    return A @ B - B @ A


# ---------------------------------------------------------------- brackets

def bracket_from_gradients(gf: np.ndarray, gg: np.ndarray, X: np.ndarray, ops: BDOperators | None = None):
    ops = ops or BDOperators(X.shape[0])
    left_f, left_g = gf @ X, gg @ X
    right_f, right_g = X @ gf, X @ gg
    return pairing(ops.Rbar_plus(left_f), left_g) - pairing(ops.R_plus(right_f), right_g)


def bracket_main(f: Expr, g: Expr, X: np.ndarray, table: GradientTable | None = None):
    table = table or GradientTable(X)
    _, gf = table(f)
    _, gg = table(g)
    return bracket_from_gradients(gf, gg, X)


def dual_bracket_from_gradients(gf: np.ndarray, gg: np.ndarray, U: np.ndarray, ops: BDOperators | None = None):
    ops = ops or BDOperators(U.shape[0])
    cf, cg = _commutator(gf, U), _commutator(gg, U)
    return pairing(ops.R_plus(cf), cg) - pairing(cf, gg @ U)


def bracket_dual(f: Expr, g: Expr, U: np.ndarray, table: GradientTable | None = None):
    """Bracket on the dual group; f and g are expressions over the entries (i, j) of U."""
    table = table or GradientTable(U)
    _, gf = table(f)
    _, gg = table(g)
    return dual_bracket_from_gradients(gf, gg, U)


def toda_moment_bracket(i: int, j: int, h: Sequence):
    """{hbar_i, hbar_j} at a point given by its moment list."""
    if i == j:
        return ZERO
    if i > j:
        return -toda_moment_bracket(j, i, h)
    acc = ZERO
    for k in range(i, j):
        acc = acc + h[k + 1] * h[i + j - k - 1]
    return acc


def bracket_toda(i: int, j: int) -> Expr:
    """Expression for {hbar_i, hbar_j} over the moment atoms."""
    from .cluster_functions import hbar_atom
    from .expr import Const, Prod

    if i == j:
        return Const(ZERO)
    sign = 1
    if i > j:
        i, j, sign = j, i, -1
    terms = None
    for k in range(i, j):
        t = Prod(((hbar_atom(k + 1), 1), (hbar_atom(i + j - k - 1), 1)))
        terms = t if terms is None else terms + t
    return terms if sign == 1 else -terms


def bracket_toda_fn(f: Expr, g: Expr, env: Mapping):
    """Bracket of two functions of the moments; env maps ('h', i) to moment values."""
    keys = sorted(k for k in env if isinstance(k, tuple) and k and k[0] == "h")
    size = len(keys)
    denv = {k: Dual.seed(env[k], idx, size) for idx, k in enumerate(keys)}
    ev = Evaluator(denv)
    vf, vg = ev(f), ev(g)
    df = vf.d if isinstance(vf, Dual) else [ZERO] * size
    dg = vg.d if isinstance(vg, Dual) else [ZERO] * size
    h = [env[k] for k in keys]
    acc = ZERO
    for a in range(size):
        if df[a] == 0:
            continue
        for b in range(size):
            if dg[b] == 0 or a == b:
                continue
            acc = acc + df[a] * dg[b] * toda_moment_bracket(keys[a][1], keys[b][1], h)
    return acc


# ---------------------------------------------------------------- derived quantities

def omega_matrix(exprs: Mapping[str, Expr], X: np.ndarray) -> dict[tuple[str, str], object]:
    """{x_a, x_b} / (x_a x_b) for every ordered pair of the given functions."""
    table = GradientTable(X)
    grads = {k: table(e) for k, e in exprs.items()}
    out = {}
    labels = list(exprs)
    for a in labels:
        for b in labels:
            va, ga = grads[a]
            vb, gb = grads[b]
            out[(a, b)] = bracket_from_gradients(ga, gb, X) / (va * vb)
    return out


def pullback_bracket_check(kind: str, f: Expr, g: Expr, X: np.ndarray, target_f: Expr | None = None,
                           target_g: Expr | None = None):
    """Return ({f, g}_main(X), value predicted by the target bracket).

    ``kind`` is ``"dual"`` (f, g are pullbacks through X -> U and target_f, target_g
    are the same functions over U) or ``"toda"`` (target functions over the moment atoms).
    """
    from .cluster_functions import moment_env
    from .maps import psi_prime, psi_second

    lhs = bracket_main(f, g, X)
    if kind == "dual":
        U = psi_prime(X)
        rhs = -bracket_dual(target_f, target_g, U)
    elif kind == "toda":
        n = X.shape[0]
        env = moment_env(psi_second(X), 4 * n)
        rhs = bracket_toda_fn(target_f, target_g, env)
    else:
        raise ValueError(f"unknown bracket kind {kind!r}")
    return lhs, rhs
