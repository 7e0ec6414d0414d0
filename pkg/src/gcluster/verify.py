"""Randomized exact identity testing and the consolidated check suites.

An :class:`IdentityCheck` pairs a sampler with an evaluator returning two exact
values.  :func:`check` draws ``trials`` generic points from an RNG stream owned
by the job, resampling points where some denominator vanishes, and passes iff
both sides agree at every point.  A surviving false polynomial identity of
degree d escapes with probability at most (d / |S|)^trials, |S| = 199.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Callable, Sequence

import gmpy2
import numpy as np

from .cluster_functions import (
    c_coeffs,
    catalog,
    explicit_weights,
    f_variables,
    g_dual,
    g_dual_via_H,
    hbar_atom,
    phi_dual,
    scale_point,
    seed_dual,
    seed_F,
    seed_zero,
    sign_g,
    sign_phi,
    trivial_sign_products,
)
from .exact_core import ZERO, DimensionError, det, q, sample_matrix, sub
from .expr import Call, Evaluator, Expr, atom_matrix, env_from_matrix, x
from .gcs_engine import exchange_terms, mutate_seed, y_exponents
from .maps import H_iterate, N_from_X, psi_prime, psi_second, reconstruct_X, u_minor_via_X
from .matrix_builders import word
from .mutation_sequences import build_H, k_value, run_mu, run_W, tail_commutes, word_value
from .poisson import (
    GradientTable,
    bracket_dual,
    bracket_from_gradients,
    bracket_main,
    pullback_bracket_check,
)
from .quivers import L, universal_numbering

LO, HI = -99, 99
SAMPLE_SIZE = HI - LO + 1
RESAMPLE_CAP = 50
DEFAULT_TRIALS = 5


class NonGenericPoint(ZeroDivisionError):
    """Raised by samplers and evaluators when a point falls on an excluded locus."""


# ---------------------------------------------------------------- checks and reports

@dataclass
class IdentityCheck:
    """One identity to test.

    ``evaluate`` maps a sampled point to (lhs, rhs); any ZeroDivisionError
    triggers a resample.  ``sampler`` defaults to an n x n integer matrix with
    nonzero determinant.  Deterministic checks set ``randomized=False`` and are
    evaluated once at the point returned by the sampler (``None`` by default).
    ``expect="fail"`` marks a negative control: it passes when refuted.
    """

    name: str
    n: int
    evaluate: Callable[[Any], tuple[Any, Any]]
    degree: int = 0
    sampler: Callable[[random.Random], Any] | None = None
    trials: int | None = None
    randomized: bool = True
    expect: str = "hold"

    @classmethod
    def from_exprs(cls, name: str, n: int, lhs: Expr, rhs: Expr, **kw) -> "IdentityCheck":
        d = (lhs - rhs).deg

        def evaluate(X):
            ev = Evaluator(env_from_matrix(X))
            return ev(lhs), ev(rhs)

        return cls(name, n, evaluate, d[0] + d[1], **kw)


@dataclass
class CheckResult:
    name: str
    n: int
    trials: int
    resamples: int
    status: str
    bound: float
    failing_point: Any = None
    detail: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        out = {"name": self.name, "n": self.n, "trials": self.trials, "resamples": self.resamples,
               "status": self.status, "failure_bound": self.bound}
        if self.failing_point is not None:
            out["failing_point"] = self.failing_point
        if self.detail:
            out["detail"] = self.detail
        return out


def generic_matrix(n: int) -> Callable[[random.Random], np.ndarray]:
    def draw(rng: random.Random) -> np.ndarray:
        X = sample_matrix(rng, n, LO, HI)
        if det(X) == 0:
            raise NonGenericPoint("singular sample")
        return X
    return draw


def integer_matrix(rows: int, cols: int) -> Callable[[random.Random], np.ndarray]:
    def draw(rng: random.Random) -> np.ndarray:
        M = np.empty((rows, cols), dtype=object)
        for i in range(rows):
            for j in range(cols):
                M[i, j] = q(rng.randint(LO, HI))
        return M
    return draw


def _dump(point) -> Any:
    if isinstance(point, np.ndarray):
        return [[str(v) for v in row] for row in point]
    if isinstance(point, (list, tuple)):
        return [_dump(p) for p in point]
    return str(point)


def check(identity: IdentityCheck, seed: int = 0, trials: int = DEFAULT_TRIALS) -> CheckResult:
    """Run one identity check with the RNG stream derived from (seed, name, n)."""
    rng = random.Random(f"{seed}:{identity.name}:{identity.n}")
    sampler = identity.sampler or (generic_matrix(identity.n) if identity.randomized else (lambda _r: None))
    t = (identity.trials or trials) if identity.randomized else 1
    bound = min(1.0, (identity.degree / SAMPLE_SIZE) ** t) if identity.randomized else 0.0
    resamples = 0
    refuted = None
    for _ in range(t):
        for _attempt in range(RESAMPLE_CAP + 1):
            try:
                point = sampler(rng)
                lhs, rhs = identity.evaluate(point)
            except ZeroDivisionError:
                resamples += 1
                continue
            break
        else:
            return CheckResult(identity.name, identity.n, t, resamples, "inconclusive", bound,
                               detail=f"no generic point after {RESAMPLE_CAP} resamples")
        if lhs != rhs:
            refuted = point
            break
    if identity.expect == "fail":
        status = "pass" if refuted is not None else "fail"
        return CheckResult(identity.name, identity.n, t, resamples, status, bound,
                           detail="negative control: identity must be refuted")
    if refuted is not None:
        return CheckResult(identity.name, identity.n, t, resamples, "fail", bound, _dump(refuted))
    return CheckResult(identity.name, identity.n, t, resamples, "pass", bound)


def run_checks(checks: Sequence[IdentityCheck], seed: int = 0, trials: int = DEFAULT_TRIALS,
               jobs: int = 1) -> list[CheckResult]:
    """Run independent checks, optionally on a bounded thread pool; results keep input order."""
    if jobs <= 1:
        return [check(c, seed, trials) for c in checks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda c: check(c, seed, trials), checks))


def report_json(results: Sequence[CheckResult]) -> str:
    return json.dumps({"checks": [r.to_json() for r in results],
                       "passed": all(r.passed for r in results)}, indent=2, sort_keys=True)


def deterministic(name: str, n: int, fn: Callable[[], bool]) -> IdentityCheck:
    return IdentityCheck(name, n, lambda _p: (bool(fn()), True), randomized=False)


def _require_n(n: int) -> None:
    if n < 4:
        raise ValueError("suites need n >= 4")


# ---------------------------------------------------------------- theorem expressions

def suite_theorem_expressions(n: int, parts: Sequence[str] = ("phi", "g", "c", "bart")) -> list[IdentityCheck]:
    _require_n(n)
    cat = catalog(n)
    m = n - 1
    x1n, xn1, dX = cat.x(1, n), cat.x(n, 1), cat.det()
    out = []
    if "phi" in parts:
        for k in range(1, m):
            for l in range(1, m - k + 1):
                rhs = sign_phi(n, k, l) * cat.phi(k, l) / (x1n * dX) ** (n - k - l)
                out.append(IdentityCheck.from_exprs(f"badphi[{k},{l}]", n, cat.phi_U(k, l), rhs))
    if "g" in parts:
        for i in range(2, m + 1):
            for j in range(2, i + 1):
                rhs = sign_g(n, i, j) * cat.g(i, j) / (x1n ** (j - 1) * dX)
                out.append(IdentityCheck.from_exprs(f"badg[{i},{j}]", n, cat.g_U(i, j), rhs))
    if "c" in parts:
        for r in range(1, n):
            out.append(IdentityCheck.from_exprs(f"badc[{r}]", n, cat.c_U(r), cat.c(r) / (x1n * dX)))
        out.append(IdentityCheck.from_exprs("badc[last]", n, cat.c_U(m), xn1 / x1n))
    if "bart" in parts:
        for mm in range(1, n + 1):
            out.append(IdentityCheck.from_exprs(f"badbart-[{mm}]", n, cat.tbar_minus_psi(mm),
                                                cat.f(2 * mm - 1) / x1n ** (2 * mm - 1)))
        for mm in range(1, n):
            out.append(IdentityCheck.from_exprs(f"badbart+[{mm}]", n, cat.tbar_plus_psi(mm),
                                                cat.f(2 * mm) / x1n ** (2 * mm)))
        out.append(IdentityCheck.from_exprs("badbart[ratio]", n, cat.tbar_minus_psi(n) / cat.tbar_plus_psi(m),
                                            xn1 / x1n))
    return out


# ---------------------------------------------------------------- exchange relations

def dexchange_exprs(n: int, sign: int = 1) -> tuple[Expr, Expr]:
    cat = catalog(n)
    lhs = cat.g(n - 1, n - 1) * cat.gdex()
    rhs = cat.f(2 * n - 3) * cat.g(n - 2, n - 2) + sign * cat.x(n, 1) * cat.f(2 * n - 4) * cat.g(n - 1, n - 2)
    return lhs, rhs


def ger_rhs(n: int, X: np.ndarray, hat: bool = False):
    """Right side of the generalized exchange relation at (1,1) divided by phi_11.

    With ``hat`` the coefficients are c_r and both end terms carry det X.
    """
    cat = catalog(n)
    ev = Evaluator(env_from_matrix(X))
    p12, p21, p11 = ev(cat.phi(1, 2)), ev(cat.phi(2, 1)), ev(cat.phi(1, 1))
    d = ev(cat.det())
    ends = d if hat else 1
    acc = ends * (X[0, n - 1] * p12 ** (n - 1) + X[n - 1, 0] * p21 ** (n - 1))
    for r in range(1, n - 1):
        coeff = ev(cat.c(r)) if hat else ev(cat.c(r)) / d
        acc += coeff * p21 ** r * p12 ** (n - 1 - r)
    return acc / p11


def _ger(n: int, hat: bool):
    def evaluate(X):
        S = mutate_seed(seed_F(n, X, hat=hat), L(1, 1))
        return S.value(L(1, 1)), ger_rhs(n, X, hat)
    return evaluate


def _ger_pullback(n: int):
    def evaluate(X):
        S = mutate_seed(seed_F(n, X), L(1, 1))
        Dd = mutate_seed(seed_dual(n - 1, psi_prime(X), n), L(1, 1))
        x1n = X[0, n - 1]
        return S.value(L(1, 1)), x1n * (x1n * det(X)) ** (n * n - 5 * n + 5) * Dd.value(L(1, 1))
    return evaluate


def _hat_vs_plain(n: int):
    def evaluate(X):
        a = mutate_seed(seed_F(n, X, hat=True), L(1, 1)).value(L(1, 1))
        b = mutate_seed(seed_F(n, X), L(1, 1)).value(L(1, 1))
        return a, det(X) * b
    return evaluate


def _d_mutation(n: int):
    def evaluate(X):
        S = mutate_seed(seed_F(n, X), "D")
        return S.value("D"), catalog(n).gdex().at(X)
    return evaluate


def suite_exchange(n: int) -> list[IdentityCheck]:
    _require_n(n)
    lhs, rhs = dexchange_exprs(n)
    deg = (2 * n - 2) * 2 + 4 * n
    out = [
        IdentityCheck.from_exprs("dexchange", n, lhs, rhs),
        IdentityCheck("dexchange[mutation at D]", n, _d_mutation(n), deg),
        IdentityCheck("ger", n, _ger(n, False), (n - 1) * 6 * n * n),
        IdentityCheck("ger[pullback]", n, _ger_pullback(n), (n - 1) * 6 * n * n),
        IdentityCheck("ger[hat]", n, _ger(n, True), (n - 1) * 6 * n * n),
        IdentityCheck("ger[hat vs plain]", n, _hat_vs_plain(n), (n - 1) * 6 * n * n),
    ]
    return out


def negative_control(n: int = 4) -> IdentityCheck:
    lhs, rhs = dexchange_exprs(n, sign=-1)
    c = IdentityCheck.from_exprs("negative_control[dexchange sign flipped]", n, lhs, rhs)
    c.expect = "fail"
    return c


def suite_negative_control(n: int) -> list[IdentityCheck]:
    return [negative_control(n)]


# ---------------------------------------------------------------- Pluecker and Desnanot-Jacobi

Relation = tuple[str, tuple, tuple[str, str], tuple[tuple[str, str], ...]]


def _w(*parts) -> str:
    return " ".join(str(p) for p in parts if p != "")


def _two(qq: int) -> str:
    return f"2^{qq}" if qq > 0 else ""


def plucker_relations(n: int) -> list[Relation]:
    """Every instance of the word relations with parameters up to n + 1 (legal or not)."""
    out: list[Relation] = []
    for k in range(3, n + 2):
        out.append(("4pluck", (k,), (_w(k - 1, 2), f"~{k - 1}"),
                    ((_w(f"~{k - 2}", 2), f"{k}"), (_w(f"~{k - 1}", 2), f"{k - 1}"))))
    for qq in range(1, n):
        t, t1 = _two(qq), _two(qq - 1)
        for k in range(3, n + 2):
            out.append(("promo4pluck[1]", (qq, k), (_w(t, k - 1, 2), _w("~1", t1, k)),
                        ((_w("~1", t1, k - 1, 2), _w(t, k)), (_w("~1", t1, k, 2), _w(t, k - 1)))))
            out.append(("promo4pluck[2]", (qq, k), (_w("~1", t1, k - 1, 2), _w(t1, k)),
                        ((_w(t1, k - 1, 2), _w("~1", t1, k)), (_w(t1, k, 2), _w("~1", t1, k - 1)))))
    for k1 in range(3, n + 2):
        for k2 in range(3, n + 2):
            out.append(("DJ", (k1, k2), (_w(k1 - 1, k2), _w(f"~{k1 - 1}", k2 - 1)),
                        ((_w(k1, k2 - 1), _w(f"~{k1 - 2}", k2)), (_w(f"~{k1 - 1}", k2), _w(k1 - 1, k2 - 1)))))
            for qq in range(1, n):
                t, t1 = _two(qq), _two(qq - 1)
                out.append(("promoDJ[1]", (qq, k1, k2), (_w(t, k1 - 1, k2), _w("~1", t1, k1, k2 - 1)),
                            ((_w(t, k1, k2 - 1), _w("~1", t1, k1 - 1, k2)),
                             (_w("~1", t1, k1, k2), _w(t, k1 - 1, k2 - 1)))))
                out.append(("promoDJ[2]", (qq, k1, k2), (_w("~1", t1, k1 - 1, k2), _w(t1, k1, k2 - 1)),
                            ((_w("~1", t1, k1, k2 - 1), _w(t1, k1 - 1, k2)),
                             (_w(t1, k1, k2), _w("~1", t1, k1 - 1, k2 - 1)))))
    for k1 in range(2, n + 2):
        for k2 in range(3, n + 2):
            out.append(("barDJ", (k1, k2), (_w(f"~{k1 - 1}", k2 - 1), _w(f"~{k1}", f"~{k2 - 1}")),
                        ((_w(f"~{k1}", k2 - 1), _w(f"~{k1 - 1}", f"~{k2 - 1}")),
                         (_w(f"~{k1 - 1}", k2), _w(f"~{k1}", f"~{k2 - 2}")))))
    for k2 in range(3, n + 2):
        out.append(("bar1DJ", (k2,), (f"{k2 - 1}", _w("~1", f"~{k2 - 1}")),
                    ((_w("~1", k2 - 1), f"~{k2 - 1}"), (f"{k2}", _w("~1", f"~{k2 - 2}")))))
    return out


EXCHANGE4: list[Relation] = [
    ("exchange4", (0,), ("2^3", "~1 3"), (("~1 2^2", "2 3"), ("2^2", "~1 3 2"))),
    ("exchange4", (-1,), ("~1 2^2", "3"), (("~1 3", "2^2"), ("3 2", "~1 2"))),
    ("exchange4", (1,), ("2 3", "~2 2"), (("~1 3", "3 2"), ("2^2", "~2 3"))),
    ("exchange4", (2,), ("3 2", "~3"), (("~2 2", "4"), ("3", "~3 2"))),
    ("exchange4", (-2,), ("2^2", "~2"), (("3", "~1 2"), ("~2 2", "2"))),
]


def relation_legal(rel: Relation, n: int) -> bool:
    words = [rel[2][0], rel[2][1]] + [w for pair in rel[3] for w in pair]
    try:
        for w in words:
            word(w).check(n)
    except DimensionError:
        return False
    return True


def relation_values(rel: Relation, X: np.ndarray) -> tuple[Any, Any]:
    v = lambda w: word_value(word(w), X)
    (a, b), terms = rel[2], rel[3]
    return v(a) * v(b), sum((v(c) * v(d) for c, d in terms), ZERO)


def _relation_check(rel: Relation, n: int) -> IdentityCheck:
    name = f"{rel[0]}{list(rel[1])}"
    deg = word(rel[2][0]).size + word(rel[2][1]).size
    return IdentityCheck(name, n, lambda X: relation_values(rel, X), deg)


def gen_dj_values(A: np.ndarray, a: int, b: int, c: int) -> tuple[Any, Any]:
    """Both sides of the Desnanot-Jacobi identity for an (r+1) x r matrix and rows a < b < c."""
    rows = A.shape[0]
    cols = A.shape[1]

    def hat(*drop: int, col: bool = False):
        keep = [i for i in range(1, rows + 1) if i not in drop]
        cs = list(range(2 if col else 1, cols + 1))
        return det(sub(A, keep, cs)) if keep else q(1)

    return hat(b) * hat(a, c, col=True), hat(c) * hat(a, b, col=True) + hat(a) * hat(b, c, col=True)


def suite_plucker_dj(n: int, include_gen_dj: bool = True) -> list[IdentityCheck]:
    _require_n(n)
    out = [_relation_check(r, n) for r in plucker_relations(n) if relation_legal(r, n)]
    if n == 4:
        out += [_relation_check(r, n) for r in EXCHANGE4]
    if include_gen_dj:
        for r in range(2, n + 1):
            for a, b, c in combinations(range(1, r + 2), 3):
                out.append(IdentityCheck(f"genDJ[r={r},{a},{b},{c}]", n,
                                         lambda A, a=a, b=b, c=c: gen_dj_values(A, a, b, c), 2 * r - 1,
                                         sampler=integer_matrix(r + 1, r)))
    return out


# ---------------------------------------------------------------- compatibility

def _casimirs(n: int) -> dict[str, Expr]:
    cat = catalog(n)
    x1n, xn1, dX = cat.x(1, n), cat.x(n, 1), cat.det()
    out = {"det X": dX, "x1n/xn1": x1n / xn1}
    for r in range(1, n - 1):
        out[f"phat_1{r}"] = (cat.c(r) / x1n) ** (n - 1) * (x1n / xn1) ** r / dX ** (n - 1)
    return out


def omega_at(n: int, X: np.ndarray, include_isolated: bool = False) -> dict[tuple[str, str], Any]:
    S = seed_F(n)
    table = GradientTable(X)
    labels = [v for v in S.quiver.labels if include_isolated or not S.quiver.info[v].isolated]
    grads = {v: table(S.variables[v]) for v in labels}
    out = {}
    for a in labels:
        for b in labels:
            out[(a, b)] = bracket_from_gradients(grads[a][1], grads[b][1], X) / (grads[a][0] * grads[b][0])
    return out


def _log_canonical(n: int, points: int):
    def sampler(rng):
        return [generic_matrix(n)(rng) for _ in range(points)]

    def evaluate(Xs):
        oms = [omega_at(n, X) for X in Xs]
        return [oms[0]] * len(oms), oms
    return sampler, evaluate


def y_bracket_table(n: int, X: np.ndarray, scaled: bool = True) -> tuple[dict, dict]:
    """({x_b, y_a} / (x_b y_a), d_a delta_ab) for mutable a of Q_n and every vertex b."""
    Q = seed_F(n).quiver
    om = omega_at(n, X, include_isolated=True)
    labels = Q.labels
    got, want = {}, {}
    for a in Q.mutable():
        ex = y_exponents(Q, a, scaled)
        for b in labels:
            got[(b, a)] = sum((e * om[(b, c)] for c, e in ex.items()), ZERO)
            want[(b, a)] = q(Q.info[a].d) if a == b else ZERO
    return got, want


def _casimir_brackets(n: int):
    def evaluate(X):
        S = seed_F(n)
        T = GradientTable(X)
        labels = [v for v in S.quiver.labels if not S.quiver.info[v].isolated]
        vals = {}
        for name, C in _casimirs(n).items():
            _, gc = T(C)
            for v in labels:
                vals[(name, v)] = bracket_from_gradients(gc, T(S.variables[v])[1], X)
        return vals, {k: ZERO for k in vals}
    return evaluate


def suite_compatibility(n: int, points: int = 5) -> list[IdentityCheck]:
    _require_n(n)
    sampler, evaluate = _log_canonical(n, points)
    big = 6 * n ** 3
    return [
        IdentityCheck(f"log_canonical[{points} points]", n, evaluate, big, sampler=sampler, trials=1),
        IdentityCheck("y_compatibility", n, lambda X: y_bracket_table(n, X), big),
        IdentityCheck("casimirs", n, _casimir_brackets(n), big),
    ]


# ---------------------------------------------------------------- Poisson maps and brackets

def twomaps_indices(n: int, count: int = 20, seed: int = 0) -> list[tuple[int, int, int, int]]:
    rng = random.Random(f"{seed}:twomaps-indices:{n}")
    m = n - 1
    return [tuple(rng.randint(1, m) for _ in range(4)) for _ in range(count)]


def _dual_pullback(n: int, idx):
    cat = catalog(n)

    def evaluate(X):
        lhs, rhs = [], []
        for i, j, k, l in idx:
            a, b = pullback_bracket_check("dual", cat.u(i, j), cat.u(k, l), X, x(i, j), x(k, l))
            lhs.append(a)
            rhs.append(b)
        return lhs, rhs
    return evaluate


def _toda_pullback(n: int):
    cat = catalog(n)

    def evaluate(X):
        lhs, rhs = [], []
        for i in range(0, 2 * n - 1):
            for j in range(i + 1, 2 * n - 1):
                a, b = pullback_bracket_check("toda", cat.hbar(i), cat.hbar(j), X, hbar_atom(i), hbar_atom(j))
                lhs.append(a)
                rhs.append(b)
        return lhs, rhs
    return evaluate


def _cross_terms(n: int):
    cat = catalog(n)
    m = n - 1

    def evaluate(X):
        T = GradientTable(X)
        vals = []
        rf_terms = [cat.rf_coeff("p", k) for k in range(m)] + [cat.rf_coeff("qbar", k) for k in range(m + 1)]
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                for f in rf_terms:
                    vals.append(bracket_main(cat.u(i, j), f, X, T))
        return vals, [ZERO] * len(vals)
    return evaluate


def _dual_casimirs(m: int):
    U = atom_matrix(m)
    cs = [Call(lambda V, r=r: c_coeffs(V)[r], (U,), (m, 0), f"c_{r}") for r in range(1, m + 1)]
    probes = [x(i, j) for i in range(1, m + 1) for j in range(1, m + 1)]
    probes += [Call(lambda V, k=k, l=l: phi_dual(V, k, l), (U,), (m * m, 0), f"phi_{k}{l}")
               for k in range(1, m) for l in range(1, m - k + 1)]

    def evaluate(Um):
        T = GradientTable(Um)
        vals = [bracket_dual(c, f, Um, T) for c in cs for f in probes]
        # {phi_kl, phi_{m-1,1}} vanishes as well
        last = Call(lambda V: phi_dual(V, m - 1, 1), (U,), (m * m, 0), "phi_last")
        vals += [bracket_dual(f, last, Um, T) for f in probes[m * m:]]
        return vals, [ZERO] * len(vals)
    return evaluate


def suite_poisson(n: int) -> list[IdentityCheck]:
    _require_n(n)
    m = n - 1
    big = 8 * n ** 3
    return [
        IdentityCheck("twomaps[dual]", n, _dual_pullback(n, twomaps_indices(n)), big),
        IdentityCheck("twomaps[toda]", n, _toda_pullback(n), big),
        IdentityCheck("twomaps[cross terms]", n, _cross_terms(n), big),
        IdentityCheck("dual_casimirs", m, _dual_casimirs(m), 4 * m * m, sampler=generic_matrix(m)),
    ]


# ---------------------------------------------------------------- row formulas

def row_formula_values(X: np.ndarray, family: str) -> tuple[list, list]:
    n = X.shape[0]
    T = GradientTable(X)
    e = lambda i, j: X[i - 1, j - 1] if 1 <= j <= n else ZERO
    got, want = [], []
    for k in range(1, n + 1):
        for l in range(1, n + 1):
            if family in ("firstfirst", "lastlast"):
                r = 1 if family == "firstfirst" else n
                got.append(bracket_main(x(r, k), x(r, l), X, T))
                want.append(q(l - k) / n * e(r, k) * e(r, l))
                continue
            if (family == "first>last") != (l <= k):
                continue
            top = l - 1 if l <= k else k
            corr = sum((e(1, k + l - j) * e(n, j) - e(1, j) * e(n, k + l - j) for j in range(1, top + 1)), ZERO)
            got.append(bracket_main(x(1, k), x(n, l), X, T))
            want.append(q(n + l - k - 1) / n * e(1, k) * e(n, l) + corr)
    if family == "det":
        D = catalog(n).det()
        got = [bracket_main(D, x(i, j), X, T) for i in range(1, n + 1) for j in range(1, n + 1)]
        want = [ZERO] * len(got)
    return got, want


ROW_FAMILIES = ("firstfirst", "lastlast", "first>last", "first<last", "det")


def suite_row_formulas(n: int) -> list[IdentityCheck]:
    _require_n(n)
    return [IdentityCheck(f"rows[{f}]", n, lambda X, f=f: row_formula_values(X, f), 4 * n) for f in ROW_FAMILIES]


# ---------------------------------------------------------------- homogeneity

def _scaling_sampler(n: int):
    base = generic_matrix(n)

    def draw(rng):
        X = base(rng)
        t = gmpy2.mpq(rng.randint(1, 99), rng.randint(1, 99)) * rng.choice((1, -1))
        s = gmpy2.mpq(rng.randint(1, 99), rng.randint(1, 99)) * rng.choice((1, -1))
        return X, t, s
    return draw


def _homogeneous(n: int, label: str, f: Expr, w: tuple[int, int]):
    def evaluate(point):
        X, t, s = point
        return f.at(scale_point(X, t, s)), t ** w[0] * s ** w[1] * f.at(X)
    return evaluate


def _y_weights(n: int):
    S = seed_F(n)
    Q = S.quiver

    def evaluate(point):
        X, t, s = point
        Y = scale_point(X, t, s)
        ex, ey = Evaluator(env_from_matrix(X)), Evaluator(env_from_matrix(Y))
        got, want = [], []
        for a in Q.mutable():
            exps = y_exponents(Q, a)
            val = lambda ev: np.prod([ev(S.variables[b]) ** e for b, e in exps.items()])
            got.append(val(ey))
            want.append(val(ex))
        return got, want
    return evaluate


def y_weight_sums(n: int, corrected: bool = True) -> dict[str, tuple[int, int]]:
    w = explicit_weights(n, corrected)
    Q = seed_F(n).quiver
    return {a: tuple(sum(e * w[b][z] for b, e in y_exponents(Q, a).items()) for z in (0, 1)) for a in Q.mutable()}


def suite_homogeneity(n: int) -> list[IdentityCheck]:
    _require_n(n)
    w = explicit_weights(n)
    sampler = _scaling_sampler(n)
    out = []
    for label, f in f_variables(n).items():
        deg = f.deg[0] + f.deg[1]
        out.append(IdentityCheck(f"weights[{label}]", n, _homogeneous(n, label, f, w[label]), deg, sampler=sampler))
    out.append(IdentityCheck("y_weights[numeric]", n, _y_weights(n), 6 * n ** 3, sampler=sampler))
    out.append(deterministic("y_weights[explicit]", n,
                             lambda: all(v == (0, 0) for v in y_weight_sums(n).values())))
    return out


# ---------------------------------------------------------------- maps

def _h_stable(m: int):
    def evaluate(U):
        Hs = H_iterate(U, m + 1)
        return [Hs[m - 2].tolist()] * 3, [Hs[k].tolist() for k in (m - 2, m - 1, m)]
    return evaluate


def _roundtrip(n: int):
    def evaluate(X):
        return reconstruct_X(psi_prime(X), X[0], X[n - 1]).X.tolist(), X.tolist()
    return evaluate


def _nminors(n: int):
    def evaluate(X):
        N = N_from_X(X)
        got, want = [], []
        for i in range(1, n + 1):
            for j in range(1, i):
                if (i, j) == (n, 1):
                    continue
                got.append(det(sub(N, range(i, n + 1), range(j, n + j - i + 1))))
                want.append(k_value(X, i, j) / (k_value(X, i, i) * k_value(X, n + j - i, n + j - i)))
        return got, want
    return evaluate


def _uminors(n: int):
    m = n - 1

    def evaluate(X):
        U = psi_prime(X)
        got, want = [], []
        for k in range(1, m + 1):
            for I in combinations(range(1, m + 1), k):
                for J in combinations(range(1, m + 1), k):
                    got.append(u_minor_via_X(X, list(I), list(J)))
                    want.append(det(sub(U, I, J)))
        return got, want
    return evaluate


def _fiber(n: int):
    def evaluate(X):
        U = psi_prime(X)
        rf = psi_second(X)
        return (rf.qbar[0], det(U)), (det(U), X[n - 1, 0] / X[0, n - 1])
    return evaluate


def suite_maps(n: int, trials: int = 10) -> list[IdentityCheck]:
    _require_n(n)
    out = []
    for m in (3, 4, 5):
        out.append(IdentityCheck("H_stabilizes", m, _h_stable(m), 4 * m * m, sampler=generic_matrix(m), trials=trials))
    out += [
        IdentityCheck("roundtrip", n, _roundtrip(n), 4 * n * n, trials=trials),
        IdentityCheck("Nminors", n, _nminors(n), 4 * n * n),
        IdentityCheck("U(X)minors", n, _uminors(n), 4 * n * n),
        IdentityCheck("fiber[qbar(0) = det U = xn1/x1n]", n, _fiber(n), 4 * n * n),
    ]
    return out


# ---------------------------------------------------------------- mutation sequences

def exchange4_trace(X: np.ndarray) -> list[bool]:
    """For every step of H_4: the old and new values and both exchange monomials match exchange4."""
    numbering = universal_numbering(4)
    S = seed_zero(4, X)
    v = lambda w: word_value(word(w), X)
    out = []
    for st, rel in zip(build_H(4).steps, EXCHANGE4):
        label = numbering[st.vertex]
        (old, new), terms = rel[2], rel[3]
        ev = Evaluator(env_from_matrix(X))
        for lab, val in S.values.items():
            ev.memo[id(S.variables[lab])] = (S.variables[lab], val)
        monos = sorted((ev(t) for t in exchange_terms(S, label)), key=str)
        before = S.value(label)
        S = mutate_seed(S, label)
        predicted = sorted((v(c) * v(d) for c, d in terms), key=str)
        out.append(before == v(old) and S.value(label) == v(new) and monos == predicted and rel[1][0] == st.vertex)
    return out


def suite_mutations(n: int) -> list[IdentityCheck]:
    _require_n(n)
    out = []
    if n == 4:
        out.append(IdentityCheck("exchange4[trace]", n, lambda X: (exchange4_trace(X), [True] * 5), 40))
    out.append(IdentityCheck("run_W", n, lambda X: (run_W(n, X).ok, True), 10 * n ** 3, trials=1))
    out.append(IdentityCheck("tail_commutes", n, lambda X: (tail_commutes(n, X), True), 10 * n ** 3, trials=1))
    for N in sorted({max(3, n - 1), n}):
        out.append(IdentityCheck(f"run_mu[N={N}]", N,
                                 lambda X, N=N: (run_mu(N, psi_second(X)).ok, True), 10 * N ** 3,
                                 sampler=generic_matrix(N + 1), trials=1))
    return out


# ---------------------------------------------------------------- structure and properties

def suite_structure(n: int) -> list[IdentityCheck]:
    _require_n(n)
    return [deterministic("trivialsigns", n, lambda: all(v == 1 for v in trivial_sign_products(n).values()))]


def _involution(n: int):
    def evaluate(X):
        S = seed_F(n, X)
        got = []
        for v in S.quiver.mutable():
            T = mutate_seed(mutate_seed(S, v), v)
            got.append((T.quiver.structure() == S.quiver.structure(), T.values == S.values))
        return got, [(True, True)] * len(got)
    return evaluate


def _antisymmetry_leibniz(n: int):
    cat = catalog(n)
    f, g, h = cat.phi(1, 1), cat.g(n - 1, 2), cat.f(3)

    def evaluate(X):
        T = GradientTable(X)
        fg, gf = bracket_main(f, g, X, T), bracket_main(g, f, X, T)
        ghf = bracket_main(g * h, f, X, T)
        return (fg, ghf), (-gf, g.at(X) * bracket_main(h, f, X, T) + h.at(X) * bracket_main(g, f, X, T))
    return evaluate


def _g_dual_two_ways(m: int):
    def evaluate(U):
        got = [g_dual(U, i, j) for i in range(2, m + 1) for j in range(2, i + 1)]
        want = [g_dual_via_H(U, i, j) for i in range(2, m + 1) for j in range(2, i + 1)]
        return got, want
    return evaluate


def suite_properties(n: int) -> list[IdentityCheck]:
    _require_n(n)
    m = n - 1
    return [
        IdentityCheck("mutation_involution", n, _involution(n), 6 * n ** 3, trials=1),
        IdentityCheck("antisymmetry_leibniz", n, _antisymmetry_leibniz(n), 6 * n ** 3),
        IdentityCheck("fiber_condition", n, _fiber(n), 4 * n * n),
        IdentityCheck("g_dual_two_formulas", m, _g_dual_two_ways(m), 4 * m * m, sampler=generic_matrix(m)),
    ]


SUITES: dict[str, Callable[[int], list[IdentityCheck]]] = {
    "theorem_expressions": suite_theorem_expressions,
    "exchange": suite_exchange,
    "plucker_dj": suite_plucker_dj,
    "compatibility": suite_compatibility,
    "poisson": suite_poisson,
    "row_formulas": suite_row_formulas,
    "homogeneity": suite_homogeneity,
    "maps": suite_maps,
    "mutations": suite_mutations,
    "structure": suite_structure,
    "properties": suite_properties,
    "negative_control": suite_negative_control,
}


def run_suite(name: str, n: int, seed: int = 0, trials: int = DEFAULT_TRIALS, jobs: int = 1) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return run_checks(SUITES[name](n), seed, trials, jobs)
