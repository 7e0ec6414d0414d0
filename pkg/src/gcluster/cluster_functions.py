"""Named functions on GL_n, on the dual group and on rational functions; signs; initial seeds."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .exact_core import ONE, ZERO, det, identity, q, sub
from .expr import Atom, Call, Const, Det, Expr, MatCall, atom_matrix, env_from_matrix
from .gcs_engine import Seed
from .maps import H, psi_prime, psi_prime_node, psi_second
from .matrix_builders import (
    bracket_matrix,
    build_F,
    build_G_dexchange,
    build_Gij,
    build_Kij,
    build_phi_matrix,
    pencil,
    trailing,
    word,
)
from .quivers import ISO, TM, TP, L, R, dual_quiver, glue, glue_hat, toda_quiver, zero_quiver
from .rational import RationalFunctionPoint, tbar_minus, tbar_plus


# ---------------------------------------------------------------- signs

def sign_dual(m: int, k: int, l: int) -> int:
    """Sign attached to phi_kl on GL_m."""
    if m % 2 == 0:
        e = k * (l + 1)
    else:
        e = (m - 1) // 2 + k * (k - 1) // 2 + l * (l - 1) // 2
    return -1 if e % 2 else 1


def sign_phi(n: int, k: int, l: int) -> int:
    """Sign relating phi_kl on GL_{n-1} pulled back to GL_n with the determinant of Phi_kl(X)."""
    e = ((n - 2) // 2 if n % 2 == 0 else (n - 1) // 2) + k * (k - 1) // 2 + l * (l - 1) // 2
    return -1 if e % 2 else 1


def sign_g(n: int, i: int, j: int) -> int:
    return -1 if ((n + j + 1) * (i + j)) % 2 else 1


# ---------------------------------------------------------------- polynomial coefficients

def poly_coeffs(fn, degree: int) -> list:
    """Coefficients c_0..c_degree of a polynomial given as a callable, by exact interpolation.

    Values may be rationals or dual numbers; only rational weights are used.
    """
    xs = [q(t) for t in range(degree + 1)]
    ys = [fn(t) for t in xs]
    # Newton divided differences, then expansion into the monomial basis
    coef = list(ys)
    for j in range(1, degree + 1):
        for i in range(degree, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [ZERO] * (degree + 1)
    for i in range(degree, -1, -1):
        # out = out * (t - xs[i]) + coef[i]
        new = [ZERO] * (degree + 1)
        for p in range(degree):
            new[p + 1] = new[p + 1] + out[p]
            new[p] = new[p] - out[p] * xs[i]
        new[0] = new[0] + coef[i]
        out = new
    return out


# ---------------------------------------------------------------- the dual group

def phi_matrix_dual(U: np.ndarray, k: int, l: int) -> np.ndarray:
    """Columns: first k of the identity, first l of U, then the first column of U^p, p = 2..m-k-l+1."""
    m = U.shape[0]
    if not (k >= 1 and l >= 1 and k + l <= m):
        raise ValueError(f"phi_kl on GL_{m} needs k, l >= 1 and k + l <= m")
    I = identity(m)
    cols = [I[:, c] for c in range(k)] + [U[:, c] for c in range(l)]
    P = U
    for _ in range(2, m - k - l + 2):
        P = P @ U
        cols.append(P[:, 0])
    return np.column_stack(cols)


def phi_dual(U: np.ndarray, k: int, l: int):
    return sign_dual(U.shape[0], k, l) * det(phi_matrix_dual(U, k, l))


def _minor(U: np.ndarray, rows: Sequence[int], cols: Sequence[int]):
    if len(set(rows)) != len(rows):
        return ZERO
    return det(sub(U, sorted(rows), list(cols)))


def g_dual(U: np.ndarray, i: int, j: int):
    """Sum over nested column subsets of products of minors of U."""
    m = U.shape[0]
    if not (2 <= j <= i <= m):
        raise ValueError(f"g_ij on GL_{m} needs 2 <= j <= i <= m")
    if j == 2:
        return det(sub(U, range(i, m + 1), range(2, m - i + 3)))
    full = list(range(2, m + 1))
    total = ZERO
    sizes = [m - i + 1] + [m - j + t for t in range(2, j - 1)]

    def down(I):
        return [a - 1 for a in I]

    def rec(t: int, prev: list[int], acc):
        nonlocal total
        # prev = I_t; choose I_{t+1}
        last = t + 1 == j - 1
        choices = [full] if last else [list(c) for c in combinations(full, sizes[t])]
        for nxt in choices:
            rows = down(prev) + ([m] if t >= 2 else list(range(m - i + j, m + 1)))
            val = _minor(U, rows, nxt)
            if val == 0:
                continue
            if last:
                total = total + acc * val
            else:
                rec(t + 1, nxt, acc * val)

    for I1 in combinations(full, sizes[0]):
        first = det(sub(U, range(i, m + 1), list(I1)))
        if first == 0:
            continue
        rec(1, list(I1), first)
    return total


def g_dual_via_H(U: np.ndarray, i: int, j: int):
    """The same functions through flag minors of the stabilized matrix H(U)."""
    m = U.shape[0]
    V = H(U)
    out = det(sub(V, range(i, m + 1), range(j, m - i + j + 1)))
    for s in range(2, j):
        out = out * det(sub(V, range(s, m + 1), range(s, m + 1)))
    return out


def c_coeffs(U: np.ndarray) -> list:
    """[c_0, ..., c_m] with det(1 + lam U) = 1 + sum (-1)^{r(m-1)} lam^r c_r and c_0 = 1."""
    m = U.shape[0]
    I = identity(m)
    raw = poly_coeffs(lambda t: det(I + U * t), m)
    return [ONE] + [raw[r] if (r * (m - 1)) % 2 == 0 else -raw[r] for r in range(1, m + 1)]


def ttc_coeffs(X: np.ndarray) -> list:
    """Signed coefficients of det(lam A(X) + B(X)): entry r is (-1)^{rn} times the lam^r coefficient."""
    n = X.shape[0]
    raw = poly_coeffs(lambda t: det(pencil(X, t)), n + 1)
    return [raw[r] if (r * n) % 2 == 0 else -raw[r] for r in range(n + 1)]


# ---------------------------------------------------------------- moments

def moment_env(rf: RationalFunctionPoint, count: int) -> dict:
    return {("h", i): v for i, v in enumerate(rf.moments(count))}


def hbar_atom(i: int) -> Atom:
    return Atom(("h", i))


def tbar_minus_expr(m: int) -> Expr:
    if m == 0:
        return Const(ONE)
    args = [hbar_atom(i) for i in range(2 * m - 1)]
    return Call(lambda *h: tbar_minus(h, m), args, (m, 0), f"tbar-_{m}")


def tbar_plus_expr(m: int) -> Expr:
    if m == 0:
        return Const(ONE)
    args = [hbar_atom(i) for i in range(2 * m)]
    return Call(lambda *h: tbar_plus(h, m), args, (m, 0), f"tbar+_{m}")


def t_minus_expr(m: int) -> Expr:
    """Unbarred t_m^-: Hankel determinant of hbar_1, hbar_2, ..."""
    if m == 0:
        return Const(ONE)
    args = [hbar_atom(i) for i in range(2 * m)]
    return Call(lambda *h: det(np.array([[h[a + b + 1] for b in range(m)] for a in range(m)], dtype=object)),
                args, (m, 0), f"t-_{m}")


def t_plus_expr(m: int) -> Expr:
    """Unbarred t_m^+: Hankel determinant of hbar_2, hbar_3, ..."""
    if m == 0:
        return Const(ONE)
    args = [hbar_atom(i) for i in range(2 * m + 1)]
    return Call(lambda *h: det(np.array([[h[a + b + 2] for b in range(m)] for a in range(m)], dtype=object)),
                args, (m, 0), f"t+_{m}")


# ---------------------------------------------------------------- catalog over X

class FunctionCatalog:
    """Expression nodes for the named functions of X in GL_n, memoized by name and parameters."""

    def __init__(self, n: int):
        if n < 3:
            raise ValueError("n must be at least 3")
        self.n = n
        self.X = atom_matrix(n)
        self._cache: dict[tuple, Expr] = {}
        self._U = None

    def _get(self, key: tuple, make) -> Expr:
        hit = self._cache.get(key)
        if hit is None:
            hit = make()
            self._cache[key] = hit
        return hit

    def _det(self, key, fn, size: int) -> Expr:
        return self._get(key, lambda: Det(MatCall(fn, (self.X,), (size, size), (1, 0), str(key))))

    # entries and simple functions
    def x(self, i: int, j: int) -> Expr:
        return self._get(("x", i, j), lambda: Atom((i, j)))

    def det(self) -> Expr:
        return self._det(("det",), lambda X: X, self.n)

    def phi(self, k: int, l: int) -> Expr:
        size = (self.n - k - l) * (self.n + 1)
        return self._det(("phi", k, l), lambda X: build_phi_matrix(X, k, l), size)

    def g(self, i: int, j: int) -> Expr:
        return self._det(("g", i, j), lambda X: build_Gij(X, i, j), self.n + j - 1)

    def gdex(self) -> Expr:
        return self._det(("gdex",), build_G_dexchange, 2 * self.n - 4)

    def f(self, m: int) -> Expr:
        return self._det(("f", m), lambda X: trailing(build_F(X), m), m)

    def k(self, i: int, j: int) -> Expr:
        n = self.n
        if i == j:
            return self._det(("k", i, i), lambda X: sub(X, range(i, n + 1), range(i, n + 1)), n - i + 1)
        return self._det(("k", i, j), lambda X: build_Kij(X, i, j), n - j + 2)

    def bracket(self, w) -> Expr:
        w = word(w)
        return self._det(("word", str(w)), lambda X: bracket_matrix(w, X), w.size)

    def ttc_all(self) -> Expr:
        return self._get(("ttc",), lambda: MatCall(lambda X: np.array(ttc_coeffs(X), dtype=object), (self.X,),
                                                   (self.n + 1,), (self.n + 1, 0), "ttc"))

    def c(self, r: int) -> Expr:
        def make():
            node = self.ttc_all()
            return Call(lambda v: v[r], (node,), (self.n + 1, 0), f"ttc_{r}")
        return self._get(("c", r), make)

    # pulled back functions on the dual group
    @property
    def U(self):
        if self._U is None:
            self._U = psi_prime_node(self.n, self.X)
        return self._U

    def _udeg(self, cols: int) -> tuple[int, int]:
        d = cols * (2 * self.n - 1)
        return (d, d)

    def phi_U(self, k: int, l: int) -> Expr:
        m = self.n - 1
        return self._get(("phi_U", k, l), lambda: Call(lambda U: phi_dual(U, k, l), (self.U,),
                                                        self._udeg(m * m), f"phi_U_{k}{l}"))

    def g_U(self, i: int, j: int) -> Expr:
        m = self.n - 1
        return self._get(("g_U", i, j), lambda: Call(lambda U: g_dual(U, i, j), (self.U,),
                                                      self._udeg(m * j), f"g_U_{i}{j}"))

    def c_U(self, r: int) -> Expr:
        m = self.n - 1
        return self._get(("c_U", r), lambda: Call(lambda U: c_coeffs(U)[r], (self.U,), self._udeg(m), f"c_U_{r}"))

    def u(self, i: int, j: int) -> Expr:
        return self._get(("u", i, j), lambda: Call(lambda U: U[i - 1, j - 1], (self.U,), self._udeg(1), f"u_{i}{j}"))

    # pulled back functions on rational functions
    def rf_coeff(self, kind: str, i: int) -> Expr:
        """p_i or qbar_i of psi_second(X)."""
        def make():
            def fn(X):
                rf = psi_second(X)
                return (rf.p if kind == "p" else rf.qbar)[i]
            return Call(fn, (self.X,), (1, 1), f"{kind}_{i}")
        return self._get(("rf", kind, i), make)

    def hbar(self, i: int) -> Expr:
        return self._get(("hbar", i), lambda: Call(lambda X: psi_second(X).moments(i + 1)[i], (self.X,),
                                                   (i + 1, i + 1), f"hbar_{i}"))

    def tbar_minus_psi(self, m: int) -> Expr:
        return self._get(("tbar-", m), lambda: Call(lambda X: tbar_minus(psi_second(X).moments(2 * m), m),
                                                    (self.X,), (m * (2 * m), m * (2 * m)), f"tbar-_{m}"))

    def tbar_plus_psi(self, m: int) -> Expr:
        return self._get(("tbar+", m), lambda: Call(lambda X: tbar_plus(psi_second(X).moments(2 * m + 1), m),
                                                    (self.X,), (m * (2 * m + 1), m * (2 * m + 1)), f"tbar+_{m}"))


@lru_cache(maxsize=None)
def catalog(n: int) -> FunctionCatalog:
    return FunctionCatalog(n)


# ---------------------------------------------------------------- initial seeds

def f_variables(n: int, cat: FunctionCatalog | None = None) -> dict[str, Expr]:
    """Variables of the initial extended cluster on Q_n (including isolated c_r)."""
    cat = cat or catalog(n)
    m = n - 1
    out: dict[str, Expr] = {}
    for k in range(1, m):
        for l in range(1, m - k + 1):
            out[L(k, l)] = cat.phi(k, l)
    for i in range(2, m + 1):
        for j in range(2, i + 1):
            out["D" if (i, j) == (m, m) else R(i, j)] = cat.g(i, j)
    for j in range(1, n - 1):
        out[TP(j)] = cat.f(2 * j)
    for j in range(1, n):
        out[TM(j)] = cat.f(2 * j - 1)
    out["A"] = cat.x(1, n)
    out["B"] = cat.det()
    out["C"] = cat.x(n, 1)
    for r in range(1, n - 1):
        out[ISO(r)] = cat.c(r)
    return out


def f_names(n: int) -> dict[str, str]:
    m = n - 1
    out = {}
    for k in range(1, m):
        for l in range(1, m - k + 1):
            out[L(k, l)] = f"phi_{k}{l}"
    for i in range(2, m + 1):
        for j in range(2, i + 1):
            out["D" if (i, j) == (m, m) else R(i, j)] = f"g_{i}{j}"
    for j in range(1, n - 1):
        out[TP(j)] = f"f_{2 * j}"
    for j in range(1, n):
        out[TM(j)] = f"f_{2 * j - 1}"
    out.update({"A": f"x_1{n}", "B": "det X", "C": f"x_{n}1"})
    for r in range(1, n - 1):
        out[ISO(r)] = f"c_{r}"
    return out


def seed_F(n: int, X=None, merge_dashed: bool = False, hat: bool = False) -> Seed:
    """The seed on Q_n (or on the extended quiver for all n x n matrices when ``hat``)."""
    cat = catalog(n)
    Q = glue_hat(n, merge_dashed) if hat else glue(n, merge_dashed)
    variables = f_variables(n, cat)
    det_ = cat.det()
    if hat:
        coeffs = [cat.c(r) for r in range(1, n - 1)]
    else:
        coeffs = [cat.c(r) / det_ for r in range(1, n - 1)]
    string = tuple([Const(ONE)] + coeffs + [Const(ONE)])
    return Seed.create(Q, variables, {L(1, 1): string}, X, f_names(n))


def seed_dual(m: int, U=None, n: int | None = None, merge_dashed: bool = False) -> Seed:
    """Seed on the dual quiver of GL_m over the entries of U.

    With ``n`` given (n = m + 1) the variables carry the extra signs that make the
    pullback to GL_n sign-exact.
    """
    Q = dual_quiver(m, merge_dashed)
    Unode = atom_matrix(m)
    variables: dict[str, Expr] = {}
    names: dict[str, str] = {}
    for k in range(1, m):
        for l in range(1, m - k + 1):
            s = sign_phi(n, k, l) if n else 1
            variables[L(k, l)] = Call(lambda V, k=k, l=l, s=s: s * phi_dual(V, k, l), (Unode,), (m * m, 0), f"phi_{k}{l}")
            names[L(k, l)] = f"phi_{k}{l}(U)"
    for i in range(2, m + 1):
        for j in range(2, i + 1):
            s = sign_g(n, i, j) if n else 1
            variables[R(i, j)] = Call(lambda V, i=i, j=j, s=s: s * g_dual(V, i, j), (Unode,), (m * j, 0), f"g_{i}{j}")
            names[R(i, j)] = f"g_{i}{j}(U)"
    cs = MatCall(lambda V: np.array(c_coeffs(V), dtype=object), (Unode,), (m + 1,), (m, 0), "c(U)")
    variables["(0,0)"] = Call(lambda v: v[m], (cs,), (m, 0), "det U")
    names["(0,0)"] = "det U"
    cvars = [Call(lambda v, r=r: v[r], (cs,), (m, 0), f"c_{r}") for r in range(m + 1)]
    for r in range(1, m):
        variables[ISO(r)] = cvars[r]
        names[ISO(r)] = f"c_{r}(U)"
    string = tuple([Const(ONE)] + cvars[1:m] + [Const(ONE)])
    return Seed.create(Q, variables, {L(1, 1): string}, U, names)


def seed_toda(N: int, rf: RationalFunctionPoint | None = None) -> Seed:
    """Seed on the extended Toda quiver over the moments of a rational function."""
    Q = toda_quiver(N, barred=True)
    variables: dict[str, Expr] = {}
    names: dict[str, str] = {}
    for j in range(1, N + 1):
        variables[TP(j)] = tbar_plus_expr(j)
        variables[TM(j)] = tbar_minus_expr(j)
        names[TP(j)] = f"tbar+_{j}"
        names[TM(j)] = f"tbar-_{j}"
    variables[TM(N + 1)] = tbar_minus_expr(N + 1) / tbar_plus_expr(N)
    names[TM(N + 1)] = f"tbar-_{N + 1}/tbar+_{N}"
    point = None if rf is None else moment_env(rf, 2 * N + 2)
    return Seed.create(Q, variables, {}, point, names)


def seed_zero(n: int, X=None, merge_dashed: bool = False) -> Seed:
    """Seed on Q_n^0, the part of Q_n touched by the mutation sequence W_n."""
    Q = zero_quiver(n, merge_dashed)
    full = f_variables(n)
    names = f_names(n)
    variables = {v: full[v] for v in Q.labels}
    return Seed.create(Q, variables, {}, X, {v: names[v] for v in Q.labels})


def build_initial_seeds(n: int, X, merge_dashed: bool = False) -> dict[str, Seed]:
    U = psi_prime(X)
    rf = psi_second(X)
    return {
        "F": seed_F(n, X, merge_dashed),
        "F_hat": seed_F(n, X, merge_dashed, hat=True),
        "dual": seed_dual(n - 1, U, n, merge_dashed),
        "toda": seed_toda(n - 1, rf),
        "zero": seed_zero(n, X, merge_dashed),
    }


# ---------------------------------------------------------------- homogeneity weights and sign products

def phi_t_weight_printed(n: int, k: int, l: int) -> int:
    """t-weight of phi_kl in the closed form as usually quoted (misses a quadratic term)."""
    return (n * (n - k - l) * (k + l + 4) - n * (n - 1) + l * (l - 1) + k * (k + 1)) // 2


def explicit_weights(n: int, corrected: bool = True) -> dict[str, tuple[int, int]]:
    """(xi, xibar) for every variable of the initial cluster on Q_n under X -> t^{D_n} X s^{Dbar_n}.

    The t-weight of phi_kl is the quoted closed form plus (n-1)p(p-1)/2 with
    p = n - k - l; ``corrected=False`` returns the quoted form unchanged.
    """
    m = n - 1
    out: dict[str, tuple[int, int]] = {"A": (n, n), "C": (1, 1), "B": (n * (n + 1) // 2,) * 2}
    for r in range(1, n - 1):
        out[ISO(r)] = (n * (n + 3) // 2 - r,) * 2
    for i in range(2, m + 1):
        for j in range(2, i + 1):
            xi = (i - j) * (i - j + 1) // 2 + (n - i) * (n - i - 1) // 2 + (j + 1) * n - 1
            xib = n * (n + 1) // 2 + (j + 1) * (j - 2) // 2 + i
            out["D" if (i, j) == (m, m) else R(i, j)] = (xi, xib)
    for mm in range(1, 2 * n - 1):
        if mm % 2 == 0:
            xi, xib = mm * (n + 1) // 2, n * mm - mm * mm // 4
        else:
            xi, xib = (mm - 1) * (n + 1) // 2 + 1, n * mm - (mm * mm - 1) // 4
        out[TP(mm // 2) if mm % 2 == 0 else TM((mm + 1) // 2)] = (xi, xib)
    for k in range(1, m):
        for l in range(1, m - k + 1):
            p = n - k - l
            xi = phi_t_weight_printed(n, k, l) + ((n - 1) * p * (p - 1) // 2 if corrected else 0)
            xib = (n + 1) * (n + 2) // 2 * p - (p - 1) * (p + 2) // 2 - n + k
            out[L(k, l)] = (xi, xib)
    return out


def scale_point(X: np.ndarray, t, s) -> np.ndarray:
    """t^{D_n} X s^{Dbar_n}: row i scaled by t^{n+1-i}, column j by s^j."""
    n = X.shape[0]
    Y = X.copy()
    for i in range(n):
        for j in range(n):
            Y[i, j] = X[i, j] * q(t) ** (n - i) * q(s) ** (j + 1)
    return Y


def dual_signs(n: int) -> dict[str, int]:
    """Signs carried by the pulled back dual variables on Q^dagger_{n-1}."""
    m = n - 1
    out = {}
    for k in range(1, m):
        for l in range(1, m - k + 1):
            out[L(k, l)] = sign_phi(n, k, l)
    for i in range(2, m + 1):
        for j in range(2, i + 1):
            out[R(i, j)] = sign_g(n, i, j)
    return out


def trivial_sign_products(n: int, merge_dashed: bool = False) -> dict[str, int]:
    """For each mutable vertex of Q^dagger_{n-1}: product of neighbour signs, arrows counted with multiplicity."""
    Q = dual_quiver(n - 1, merge_dashed)
    signs = dual_signs(n)
    out = {}
    for v in Q.mutable():
        prod = 1
        for a, b, mult in Q.arrows:
            if v in (a, b):
                other = b if a == v else a
                prod *= signs.get(other, 1) ** mult
        out[v] = prod
    return out
