"""Generalized cluster structures: quivers with multiplicities, extended seeds, mutation.

A :class:`Quiver` stores a nonnegative arrow count for every ordered pair of
vertices together with an explicit set of *opposite pairs*: unordered vertex
pairs that carry one extra arrow in each direction at the same time.  Such
2-cycles cannot live in a skew-symmetric exchange matrix, which is why the
arrow table is kept in full.

A :class:`Seed` attaches an expression DAG to every vertex and a coefficient
string to every vertex of multiplicity greater than one.  Mutation builds the
new variable symbolically and evaluates it once at the seed's base point so that
vanishing divisors are caught immediately.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .exact_core import ONE, is_zero
from .expr import Const, Evaluator, Expr, Prod, as_env

Label = Hashable


class MutationError(ValueError):
    """Mutation was requested at a frozen or unknown vertex."""


class ResampleRequest(ZeroDivisionError):
    """The base point makes an exchange relation degenerate; pick another point."""


@dataclass(frozen=True)
class VertexInfo:
    d: int = 1
    frozen: bool = False
    isolated: bool = False


def _pair(a: Label, b: Label) -> frozenset:
    return frozenset((a, b))


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[tuple[Label, VertexInfo], ...]
    arrows: tuple[tuple[Label, Label, int], ...] = ()
    opposite_pairs: frozenset = frozenset()

    # ------------------------------------------------------------ construction
    @classmethod
    def build(cls, vertices: Iterable[tuple[Label, VertexInfo]], arrows: Iterable[tuple[Label, Label, int]] = (),
              opposite_pairs: Iterable[tuple[Label, Label]] = ()) -> "Quiver":
        verts = tuple(vertices)
        names = [v for v, _ in verts]
        if len(set(names)) != len(names):
            raise ValueError("duplicate vertex labels")
        table: dict[tuple[Label, Label], int] = {}
        known = set(names)
        for a, b, m in arrows:
            if a not in known or b not in known:
                raise ValueError(f"arrow {a}->{b} uses an unknown vertex")
            if a == b:
                raise ValueError(f"loop at {a}")
            table[(a, b)] = table.get((a, b), 0) + int(m)
        pairs = frozenset(_pair(a, b) for a, b in opposite_pairs)
        q = cls(verts, (), pairs)
        return q._with_table(table)

    def _with_table(self, table: Mapping[tuple[Label, Label], int]) -> "Quiver":
        order = {v: i for i, (v, _) in enumerate(self.vertices)}
        arrows = tuple(sorted(((a, b, m) for (a, b), m in table.items() if m > 0),
                              key=lambda t: (order[t[0]], order[t[1]])))
        q = Quiver(self.vertices, arrows, self.opposite_pairs)
        q._validate()
        return q

    def _validate(self) -> None:
        info = self.info
        for a, b, m in self.arrows:
            if m < 0:
                raise ValueError("negative arrow count")
            if info[a].isolated or info[b].isolated:
                raise ValueError(f"isolated vertex touched by {a}->{b}")
        for p in self.opposite_pairs:
            a, b = tuple(p)
            if self.b(a, b) and self.b(b, a):
                raise ValueError(f"opposite pair {a},{b} also has a 2-cycle in the table")
        for a, b, _ in self.arrows:
            if not info[a].frozen and not info[b].frozen and self.b(b, a) > 0:
                raise ValueError(f"2-cycle between mutable vertices {a} and {b}")

    # ------------------------------------------------------------ queries
    @property
    def info(self) -> dict[Label, VertexInfo]:
        return dict(self.vertices)

    @property
    def labels(self) -> list[Label]:
        return [v for v, _ in self.vertices]

    def table(self) -> dict[tuple[Label, Label], int]:
        return {(a, b): m for a, b, m in self.arrows}

    def b(self, a: Label, c: Label) -> int:
        """Plain arrow count a -> c, not counting an opposite pair."""
        for x, y, m in self.arrows:
            if x == a and y == c:
                return m
        return 0

    def count(self, a: Label, c: Label) -> int:
        """Arrow count a -> c including the contribution of an opposite pair."""
        return self.b(a, c) + (1 if _pair(a, c) in self.opposite_pairs else 0)

    def mutable(self) -> list[Label]:
        return [v for v, i in self.vertices if not i.frozen]

    def frozen(self) -> list[Label]:
        return [v for v, i in self.vertices if i.frozen]

    def out_arrows(self, k: Label) -> dict[Label, int]:
        out: dict[Label, int] = {}
        for a, b, m in self.arrows:
            if a == k:
                out[b] = out.get(b, 0) + m
        for p in self.opposite_pairs:
            if k in p:
                (o,) = tuple(p - {k})
                out[o] = out.get(o, 0) + 1
        return out

    def in_arrows(self, k: Label) -> dict[Label, int]:
        out: dict[Label, int] = {}
        for a, b, m in self.arrows:
            if b == k:
                out[a] = out.get(a, 0) + m
        for p in self.opposite_pairs:
            if k in p:
                (o,) = tuple(p - {k})
                out[o] = out.get(o, 0) + 1
        return out

    def neighbours(self, k: Label) -> set[Label]:
        return set(self.out_arrows(k)) | set(self.in_arrows(k))

    def restrict(self, keep: Iterable[Label], freeze: Iterable[Label] = ()) -> "Quiver":
        """Full subquiver on ``keep`` with the vertices in ``freeze`` turned frozen."""
        keep = set(keep)
        freeze = set(freeze)
        verts = tuple((v, replace(i, frozen=i.frozen or v in freeze)) for v, i in self.vertices if v in keep)
        arrows = [(a, b, m) for a, b, m in self.arrows if a in keep and b in keep]
        pairs = [tuple(p) for p in self.opposite_pairs if p <= keep]
        return Quiver.build(verts, arrows, pairs)

    def with_vertex(self, label: Label, info: VertexInfo) -> "Quiver":
        return Quiver.build(self.vertices + ((label, info),), self.arrows, [tuple(p) for p in self.opposite_pairs])

    def with_arrows(self, arrows: Iterable[tuple[Label, Label, int]]) -> "Quiver":
        return Quiver.build(self.vertices, list(self.arrows) + list(arrows), [tuple(p) for p in self.opposite_pairs])

    def set_info(self, label: Label, **kw) -> "Quiver":
        verts = tuple((v, replace(i, **kw) if v == label else i) for v, i in self.vertices)
        return Quiver.build(verts, self.arrows, [tuple(p) for p in self.opposite_pairs])

    def relabel(self, mapping: Mapping[Label, Label]) -> "Quiver":
        f = lambda v: mapping.get(v, v)
        return Quiver.build(((f(v), i) for v, i in self.vertices), ((f(a), f(b), m) for a, b, m in self.arrows),
                            [tuple(f(x) for x in p) for p in self.opposite_pairs])

    def structure(self, ignore_frozen_pairs: bool = False) -> tuple:
        """Canonical comparable form of the quiver."""
        info = self.info
        arrows = {(a, b, m) for a, b, m in self.arrows
                  if not (ignore_frozen_pairs and info[a].frozen and info[b].frozen)}
        return (frozenset(self.vertices), frozenset(arrows), self.opposite_pairs)

    # ------------------------------------------------------------ export
    def to_json(self) -> dict:
        return {
            "vertices": [{"label": str(v), "d": i.d, "frozen": i.frozen, "isolated": i.isolated}
                         for v, i in self.vertices],
            "arrows": [{"i": str(a), "j": str(b), "mult": m} for a, b, m in self.arrows],
            "opposite_pairs": sorted([sorted(str(x) for x in p) for p in self.opposite_pairs]),
        }

    def to_dot(self, name: str = "Q", labels: Mapping[Label, str] | None = None) -> str:
        lines = [f"digraph {json.dumps(name)} {{"]
        for v, i in self.vertices:
            text = str(v) if labels is None or v not in labels else f"{v}\\n{labels[v]}"
            if i.d > 1:
                text += f"\\nd={i.d}"
            shape = "box" if i.frozen else "ellipse"
            style = ', style="dashed"' if i.isolated else ""
            lines.append(f"  {json.dumps(str(v))} [label={json.dumps(text)}, shape={shape}{style}];")
        for a, b, m in self.arrows:
            lab = f' [label="{m}"]' if m > 1 else ""
            lines.append(f"  {json.dumps(str(a))} -> {json.dumps(str(b))}{lab};")
        for p in sorted(self.opposite_pairs, key=lambda s: sorted(map(str, s))):
            a, b = sorted(p, key=str)
            lines.append(f"  {json.dumps(str(a))} -> {json.dumps(str(b))} [dir=both, color=red];")
        lines.append("}")
        return "\n".join(lines)


def mutate_quiver(Q: Quiver, k: Label) -> Quiver:
    """Generalized quiver mutation at the mutable vertex k."""
    info = Q.info
    if k not in info:
        raise MutationError(f"unknown vertex {k!r}")
    if info[k].frozen:
        raise MutationError(f"cannot mutate at frozen vertex {k!r}")
    ins = Q.in_arrows(k)
    outs = Q.out_arrows(k)
    # working counts include opposite pairs as one arrow each way
    work: dict[tuple[Label, Label], int] = {}
    for a, b, m in Q.arrows:
        work[(a, b)] = work.get((a, b), 0) + m
    for p in Q.opposite_pairs:
        a, b = tuple(p)
        work[(a, b)] = work.get((a, b), 0) + 1
        work[(b, a)] = work.get((b, a), 0) + 1
    dk = info[k].d
    for i, bi in ins.items():
        for j, bj in outs.items():
            if i == j:
                continue
            fi, fj = info[i].frozen, info[j].frozen
            if fi and fj:
                continue
            if not fi and not fj:
                w = dk
            elif fi:
                w = info[j].d
            else:
                w = info[i].d
            work[(i, j)] = work.get((i, j), 0) + w * bi * bj
    # reverse arrows at k
    new: dict[tuple[Label, Label], int] = {}
    for (a, b), m in work.items():
        if a == k or b == k:
            new[(b, a)] = new.get((b, a), 0) + m
        else:
            new[(a, b)] = new.get((a, b), 0) + m
    # cancel 2-cycles; pairs that started as opposite pairs survive a zero balance
    pairs = set()
    done = set()
    for (a, b) in list(new):
        key = _pair(a, b)
        if key in done:
            continue
        done.add(key)
        fwd, bwd = new.get((a, b), 0), new.get((b, a), 0)
        if fwd and bwd:
            if key in Q.opposite_pairs and fwd == bwd:
                pairs.add((a, b))
                new[(a, b)] = new[(b, a)] = 0
                continue
            if fwd >= bwd:
                new[(a, b)], new[(b, a)] = fwd - bwd, 0
            else:
                new[(a, b)], new[(b, a)] = 0, bwd - fwd
    out = Quiver(Q.vertices, (), frozenset(_pair(a, b) for a, b in pairs))
    return out._with_table(new)


# ---------------------------------------------------------------- seeds

@dataclass(frozen=True)
class Seed:
    quiver: Quiver
    variables: Mapping[Label, Expr]
    strings: Mapping[Label, tuple[Expr, ...]] = field(default_factory=dict)
    point: Any = None
    values: Mapping[Label, Any] = field(default_factory=dict)
    names: Mapping[Label, str] = field(default_factory=dict)

    @classmethod
    def create(cls, quiver: Quiver, variables: Mapping[Label, Expr], strings: Mapping[Label, Sequence[Expr]] | None = None,
               point=None, names: Mapping[Label, str] | None = None) -> "Seed":
        strings = {k: tuple(v) for k, v in (strings or {}).items()}
        info = quiver.info
        for v in quiver.labels:
            if v not in variables:
                raise ValueError(f"vertex {v!r} has no variable")
        for v, i in info.items():
            if not i.frozen and i.d > 1 and v not in strings:
                raise ValueError(f"special vertex {v!r} needs a string")
        for v, s in strings.items():
            if len(s) != info[v].d + 1:
                raise ValueError(f"string at {v!r} has length {len(s)}, expected {info[v].d + 1}")
        values = {}
        if point is not None:
            ev = Evaluator(as_env(point))
            values = {v: ev(e) for v, e in variables.items()}
        return cls(quiver, dict(variables), strings, point, values, dict(names or {}))

    def value(self, v: Label):
        return self.values[v]

    def evaluate(self, point) -> dict:
        ev = Evaluator(as_env(point))
        return {v: ev(e) for v, e in self.variables.items()}

    def to_json(self) -> dict:
        data = self.quiver.to_json()
        data["variables"] = {str(v): self.names.get(v, f"x[{v}]") for v in self.quiver.labels}
        data["strings"] = [{"vertex": str(v), "coefficients": [f"p[{v}][{r}]" for r in range(len(s))]}
                           for v, s in self.strings.items()]
        return data


def _string(S: Seed, k: Label) -> tuple[Expr, ...]:
    d = S.quiver.info[k].d
    if k in S.strings:
        return S.strings[k]
    return (Const(ONE),) * (d + 1) if d == 1 else ()


def exchange_terms(S: Seed, k: Label) -> list[Expr]:
    """The d_k + 1 monomials of the generalized exchange relation at k."""
    Q = S.quiver
    info = Q.info
    d = info[k].d
    outs = Q.out_arrows(k)
    ins = Q.in_arrows(k)
    p = _string(S, k)
    terms = []
    for r in range(d + 1):
        factors: list[tuple[Expr, int]] = []
        for i, b in outs.items():
            e = r * b if not info[i].frozen else (r * b) // d
            if e:
                factors.append((S.variables[i], e))
        for i, b in ins.items():
            e = (d - r) * b if not info[i].frozen else ((d - r) * b) // d
            if e:
                factors.append((S.variables[i], e))
        mono = Prod(factors) if factors else Const(ONE)
        coeff = p[r]
        terms.append(mono if isinstance(coeff, Const) and coeff.value == 1 else Prod(((coeff, 1), (mono, 1))))
    return terms


def exchange_rhs(S: Seed, k: Label) -> Expr:
    terms = exchange_terms(S, k)
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def mutate_seed(S: Seed, k: Label) -> Seed:
    """Generalized seed mutation at the mutable vertex k."""
    info = S.quiver.info
    if k not in info or info[k].frozen:
        raise MutationError(f"cannot mutate at {k!r}")
    rhs = exchange_rhs(S, k)
    new_var = rhs / S.variables[k]
    values = dict(S.values)
    if S.point is not None:
        ev = Evaluator(as_env(S.point))
        for v, val in S.values.items():
            ev.memo[id(S.variables[v])] = (S.variables[v], val)
        num = ev(rhs)
        if is_zero(S.values[k]) or is_zero(num):
            raise ResampleRequest(f"degenerate exchange at {k!r} for this base point")
        values[k] = ev(new_var)
    variables = dict(S.variables)
    variables[k] = new_var
    strings = dict(S.strings)
    if k in strings:
        strings[k] = tuple(reversed(strings[k]))
    names = dict(S.names)
    names[k] = f"mu[{k}]({names.get(k, k)})"
    return Seed(mutate_quiver(S.quiver, k), variables, strings, S.point, values, names)


def mutate_sequence(S: Seed, path: Iterable[Label]) -> Seed:
    for k in path:
        S = mutate_seed(S, k)
    return S


def y_exponents(Q: Quiver, k: Label, scaled: bool = True) -> dict[Label, int]:
    """Exponents of the y-variable at k: out-arrows minus in-arrows for every neighbour.

    With ``scaled`` the mutable neighbours of a vertex of multiplicity d_k enter
    with exponent d_k times the arrow count, so that y_k is the ratio of the last
    and first terms of the exchange relation.  Frozen neighbours keep the plain
    count, which equals floor(d_k b / d_k).
    """
    if Q.info[k].frozen:
        raise MutationError(f"y-variables live at mutable vertices, got {k!r}")
    info = Q.info
    dk = info[k].d if scaled else 1
    out: dict[Label, int] = {}
    for i, b in Q.out_arrows(k).items():
        w = 1 if info[i].frozen else dk
        out[i] = out.get(i, 0) + w * b
    for i, b in Q.in_arrows(k).items():
        w = 1 if info[i].frozen else dk
        out[i] = out.get(i, 0) - w * b
    return {i: e for i, e in out.items() if e}


def y_variable(S: Seed, k: Label, scaled: bool = True) -> Expr:
    exps = y_exponents(S.quiver, k, scaled)
    if not exps:
        return Const(ONE)
    return Prod([(S.variables[i], e) for i, e in exps.items()])


def pullback_discrepancy(lam: Mapping[Label, int], Q: Quiver, k: Label) -> int:
    """Discrepancy at k for one distinguished factor with exponents ``lam``.

    At a vertex of multiplicity d_k > 1 the contributions of mutable neighbours
    are multiplied by d_k while frozen neighbours contribute as usual.
    """
    info = Q.info
    dk = info[k].d
    total = 0
    for i, b in Q.in_arrows(k).items():
        w = dk if (dk > 1 and not info[i].frozen) else 1
        total += w * b * lam.get(i, 0)
    for j, b in Q.out_arrows(k).items():
        w = dk if (dk > 1 and not info[j].frozen) else 1
        total -= w * b * lam.get(j, 0)
    return total


def pullback_arrows(lam: Mapping[Label, int], Q: Quiver, p: Label) -> list[tuple[Label, Label, int]]:
    """Arrows between a new frozen vertex p and the mutable vertices of Q.

    A negative discrepancy gives arrows from p to k, a positive one arrows from k
    to p; this orientation reproduces the glued quivers used for GL_n.
    """
    out = []
    for k in Q.mutable():
        if Q.info[k].d > 1:
            continue
        delta = pullback_discrepancy(lam, Q, k)
        if delta < 0:
            out.append((p, k, -delta))
        elif delta > 0:
            out.append((k, p, delta))
    return out
