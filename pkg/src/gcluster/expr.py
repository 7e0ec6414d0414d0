"""Expression DAGs over named atoms, evaluated exactly at sample points.

Nodes are immutable and shared; an :class:`Evaluator` memoizes node values per
point so that deep mutation histories are evaluated once per node.  Evaluation is
generic over exact rationals and :class:`~gcluster.exact_core.Dual` numbers.
"""
from __future__ import annotations

import sys
from typing import Any, Callable, Hashable, Mapping, Sequence

import numpy as np

from .exact_core import ONE, ZERO, Dual, det, q, qdiv

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

Deg = tuple[int, int]


def _deg_add(a: Deg, b: Deg) -> Deg:
    if a[1] == 0 and b[1] == 0:
        return (max(a[0], b[0]), 0)
    return (max(a[0] + b[1], b[0] + a[1]), a[1] + b[1])


def _deg_pow(a: Deg, e: int) -> Deg:
    return (e * a[0], e * a[1]) if e >= 0 else (-e * a[1], -e * a[0])


def _deg_mul(a: Deg, b: Deg) -> Deg:
    return (a[0] + b[0], a[1] + b[1])


def lift(x) -> "Expr":
    return x if isinstance(x, Expr) else Const(q(x))


class Expr:
    """Scalar expression node."""

    __slots__ = ("deg",)

    def _eval(self, ev: "Evaluator"):
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def __add__(self, o):
        return Lin(((ONE, self), (ONE, lift(o))))

    def __radd__(self, o):
        return Lin(((ONE, lift(o)), (ONE, self)))

    def __sub__(self, o):
        return Lin(((ONE, self), (-ONE, lift(o))))

    def __rsub__(self, o):
        return Lin(((ONE, lift(o)), (-ONE, self)))

    def __neg__(self):
        return Lin(((-ONE, self),))

    def __mul__(self, o):
        if not isinstance(o, Expr):
            return Lin(((q(o), self),))
        return Prod(((self, 1), (o, 1)))

    def __rmul__(self, o):
        return self.__mul__(o)

    def __truediv__(self, o):
        if not isinstance(o, Expr):
            return Lin(((qdiv(1, o), self),))
        return Prod(((self, 1), (o, -1)))

    def __rtruediv__(self, o):
        return Prod(((lift(o), 1), (self, -1)))

    def __pow__(self, e: int):
        return Prod(((self, int(e)),))

    def at(self, point) -> Any:
        """Exact value at a point given as a matrix or an atom mapping."""
        return Evaluator(as_env(point))(self)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = q(value)
        self.deg = (0, 0)

    def _eval(self, ev):
        return self.value

    def __repr__(self):
        return f"Const({self.value})"


class Atom(Expr):
    __slots__ = ("key",)

    def __init__(self, key: Hashable):
        self.key = key
        self.deg = (1, 0)

    def _eval(self, ev):
        return ev.env[self.key]

    def __repr__(self):
        return f"Atom({self.key!r})"


class Lin(Expr):
    """Rational linear combination of child expressions."""

    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[tuple[Any, Expr]]):
        self.terms = tuple((q(c), e) for c, e in terms)
        d: Deg = (0, 0)
        first = True
        for _, e in self.terms:
            d = e.deg if first else _deg_add(d, e.deg)
            first = False
        self.deg = d

    def children(self):
        return tuple(e for _, e in self.terms)

    def _eval(self, ev):
        acc = ZERO
        for c, e in self.terms:
            v = ev(e)
            acc = acc + (v if c == 1 else v * c)
        return acc


class Prod(Expr):
    """Product of integer powers of child expressions."""

    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[tuple[Expr, int]]):
        self.factors = tuple((lift(e), int(k)) for e, k in factors if k != 0)
        d: Deg = (0, 0)
        for e, k in self.factors:
            d = _deg_mul(d, _deg_pow(e.deg, k))
        self.deg = d

    def children(self):
        return tuple(e for e, _ in self.factors)

    def _eval(self, ev):
        num = ONE
        den = ONE
        for e, k in self.factors:
            v = ev(e)
            if k > 0:
                num = num * (v if k == 1 else v**k)
            else:
                den = den * (v if k == -1 else v ** (-k))
        if den is ONE:
            return num
        return qdiv(num, den)


class Call(Expr):
    """Scalar-valued function of evaluated children (scalars or matrices)."""

    __slots__ = ("fn", "args", "name")

    def __init__(self, fn: Callable, args: Sequence, deg: Deg, name: str = "call"):
        self.fn = fn
        self.args = tuple(args)
        self.deg = deg
        self.name = name

    def children(self):
        return self.args

    def _eval(self, ev):
        return self.fn(*[ev(a) for a in self.args])


class MatExpr:
    """Matrix-valued node; ``deg`` bounds every entry over a common denominator."""

    __slots__ = ("deg", "shape")

    def _eval(self, ev):
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def at(self, point):
        return Evaluator(as_env(point))(self)


class MatGrid(MatExpr):
    __slots__ = ("grid",)

    def __init__(self, grid: Sequence[Sequence[Expr]]):
        self.grid = tuple(tuple(lift(x) for x in row) for row in grid)
        self.shape = (len(self.grid), len(self.grid[0]) if self.grid else 0)
        num = max((e.deg[0] for row in self.grid for e in row), default=0)
        den = max((e.deg[1] for row in self.grid for e in row), default=0)
        cells = self.shape[0] * self.shape[1]
        self.deg = (num, 0) if den == 0 else (num + (cells - 1) * den, cells * den)

    def children(self):
        return tuple(e for row in self.grid for e in row)

    def _eval(self, ev):
        out = np.empty(self.shape, dtype=object)
        for i, row in enumerate(self.grid):
            for j, e in enumerate(row):
                out[i, j] = ev(e)
        return out


class MatCall(MatExpr):
    """Matrix computed by a Python function from evaluated children."""

    __slots__ = ("fn", "args", "name")

    def __init__(self, fn: Callable, args: Sequence, shape: tuple[int, ...], deg: Deg, name: str = "matcall"):
        self.fn = fn
        self.args = tuple(args)
        self.shape = shape
        self.deg = deg
        self.name = name

    def children(self):
        return self.args

    def _eval(self, ev):
        return self.fn(*[ev(a) for a in self.args])


class Det(Expr):
    __slots__ = ("mat",)

    def __init__(self, mat: MatExpr):
        if len(mat.shape) != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"determinant of non-square node {mat.shape}")
        self.mat = mat
        m = mat.shape[0]
        self.deg = (m * mat.deg[0], m * mat.deg[1])

    def children(self):
        return (self.mat,)

    def _eval(self, ev):
        return det(ev(self.mat))


class Entry(Expr):
    """Entry of a matrix or vector node at a 1-based index."""

    __slots__ = ("mat", "index")

    def __init__(self, mat: MatExpr, *index: int):
        self.mat = mat
        self.index = tuple(index)
        self.deg = mat.deg

    def children(self):
        return (self.mat,)

    def _eval(self, ev):
        return ev(self.mat)[tuple(i - 1 for i in self.index)]


class Evaluator:
    """Memoized evaluation of nodes at one point."""

    def __init__(self, env: Mapping):
        self.env = env
        self.memo: dict[int, tuple[Any, Any]] = {}

    def __call__(self, node):
        hit = self.memo.get(id(node))
        if hit is not None:
            return hit[1]
        v = node._eval(self)
        self.memo[id(node)] = (node, v)
        return v


# ---------------------------------------------------------------- environments

def env_from_matrix(X: np.ndarray) -> dict:
    n, m = X.shape
    return {(i + 1, j + 1): X[i, j] for i in range(n) for j in range(m)}


def as_env(point) -> Mapping:
    if isinstance(point, np.ndarray):
        return env_from_matrix(point)
    return point


def atom_matrix(n: int, m: int | None = None) -> MatGrid:
    """Matrix node whose entries are the atoms (i, j)."""
    m = n if m is None else m
    return MatGrid([[Atom((i, j)) for j in range(1, m + 1)] for i in range(1, n + 1)])


def x(i: int, j: int) -> Atom:
    return Atom((i, j))


def evaluate(f: Expr, point) -> Any:
    return Evaluator(as_env(point))(f)


def dual_env(point: Mapping) -> tuple[dict, list]:
    keys = list(point)
    size = len(keys)
    return {k: Dual.seed(point[k], idx, size) for idx, k in enumerate(keys)}, keys


def grad_keys(f: Expr, point: Mapping) -> tuple[Any, dict]:
    """Value of f and all first partials with respect to the atoms of ``point``."""
    env, keys = dual_env(point)
    v = Evaluator(env)(f)
    if isinstance(v, Dual):
        return v.val, {k: v.d[idx] for idx, k in enumerate(keys)}
    return v, {k: ZERO for k in keys}


def grad_matrix(f: Expr, X: np.ndarray):
    """Value and gradient matrix with (nabla f)_{ij} = d f / d x_{ji}."""
    n = X.shape[0]
    val, parts = grad_keys(f, env_from_matrix(X))
    nabla = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            nabla[i, j] = parts[(j + 1, i + 1)]
    return val, nabla


def polynomial_free(f: Expr) -> bool:
    """True when no division or rational function call appears below f."""
    return f.deg[1] == 0
