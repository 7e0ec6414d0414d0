"""Combinatorial construction of the quivers used for GL_n.

Vertex labels are strings so that JSON and DOT exports stay readable:

* ``(k,l)``  left triangle of the dual quiver, ``<i,j>`` its right triangle,
* ``(0,0)``  the extra frozen vertex of the dual quiver, ``c1, c2, ...`` isolated ones,
* ``(m,+)`` and ``(m,-)`` the Toda vertices,
* ``A``, ``B``, ``C``, ``D`` the glued vertices of Q_n.
"""
from __future__ import annotations

from .gcs_engine import Quiver, VertexInfo


def L(k: int, l: int) -> str:
    return f"({k},{l})"


def R(i: int, j: int) -> str:
    return f"<{i},{j}>"


def TP(m: int) -> str:
    return f"({m},+)"


def TM(m: int) -> str:
    return f"({m},-)"


def ISO(r: int) -> str:
    return f"c{r}"


def _right(m: int, a: int, b: int) -> str:
    """Right triangle vertex from its lozenge coordinates (a along the lower side, b along the upper)."""
    return R(m + 1 - a, m + 2 - a - b)


def dual_quiver(m: int, merge_dashed: bool = False) -> Quiver:
    """The quiver of the dual structure on GL_m: two triangles, a special vertex of multiplicity m.

    Where a dashed-path arrow runs parallel to a mesh arrow the two are added
    (giving a double arrow) unless ``merge_dashed`` is set.
    """
    if m < 3:
        raise ValueError("the dual quiver needs m >= 3")
    verts = []
    arrows: list[tuple[str, str, int]] = []
    pairs = [(k, l) for k in range(1, m) for l in range(1, m) if k + l <= m]
    for k, l in pairs:
        verts.append((L(k, l), VertexInfo(d=m if (k, l) == (1, 1) else 1)))
    for a, b in pairs:
        verts.append((_right(m, a, b), VertexInfo(frozen=(a, b) == (1, 1))))
    verts.append(("(0,0)", VertexInfo(frozen=True)))
    for r in range(1, m):
        verts.append((ISO(r), VertexInfo(frozen=True, isolated=True)))
    inside = set(pairs)
    # left mesh: south, northeast (not on the upper side l = 1), northwest
    for k, l in pairs:
        if (k - 1, l + 1) in inside:
            arrows.append((L(k, l), L(k - 1, l + 1), 1))
        if l >= 2 and (k + 1, l) in inside:
            arrows.append((L(k, l), L(k + 1, l), 1))
        if (k, l - 1) in inside:
            arrows.append((L(k, l), L(k, l - 1), 1))
    # right mesh: south, northeast (not on the lower side b = 1), northwest
    for a, b in pairs:
        if (a + 1, b - 1) in inside:
            arrows.append((_right(m, a, b), _right(m, a + 1, b - 1), 1))
        if b >= 2 and (a - 1, b) in inside:
            arrows.append((_right(m, a, b), _right(m, a - 1, b), 1))
        if (a, b + 1) in inside:
            arrows.append((_right(m, a, b), _right(m, a, b + 1), 1))
    # bases
    for q in range(2, m + 1):
        arrows.append((R(q, 2), L(q - 1, m - q + 1), 1))
    for q in range(2, m):
        arrows.append((L(q - 1, m - q + 1), R(q + 1, 2), 1))
    dashed = []
    for l in range(1, m - 1):
        dashed += [(L(1, l), L(l + 1, 1)), (L(l + 1, 1), L(1, l + 1))]
    for j in range(3, m + 1):
        dashed += [(R(m, j - 1), R(j - 1, j - 1)), (R(j - 1, j - 1), R(m, j))]
    present = {(a, b) for a, b, _ in arrows}
    for a, b in dashed:
        if merge_dashed and (a, b) in present:
            continue
        arrows.append((a, b, 1))
    arrows += [(L(1, 1), "(0,0)", 1), ("(0,0)", R(2, 2), 1)]
    return Quiver.build(verts, arrows)


def toda_quiver(N: int, barred: bool = True) -> Quiver:
    """Q^T_N, or its extension with the extra frozen vertex (N+1,-) when ``barred``."""
    if N < 2:
        raise ValueError("the Toda quiver needs N >= 2")
    verts = []
    for j in range(1, N + 1):
        verts.append((TP(j), VertexInfo(frozen=j == N)))
    top = N + 1 if barred else N
    for j in range(1, top + 1):
        verts.append((TM(j), VertexInfo(frozen=(j == N + 1) if barred else (j == N))))
    arrows = []
    for j in range(2, N + 1):
        arrows.append((TP(j), TP(j - 1), 1))
        arrows.append((TM(j), TM(j - 1), 1))
    for j in range(1, N):
        arrows.append((TM(j), TP(j), 2))
    for j in range(1, N - 1):
        arrows.append((TP(j), TM(j + 1), 2))
    arrows.append((TP(N - 1), TM(N), 2 if barred else 1))
    if barred:
        arrows.append((TM(N), TP(N), 1))
        arrows.append((TM(N + 1), TM(N), 1))
    return Quiver.build(verts, arrows)


GLUE_DUAL = lambda n: {"(0,0)": "C", R(n - 1, n - 1): "D"}
GLUE_TODA = lambda n: {TP(n - 1): "D", TM(n): "C"}


def dual_pullback_quiver(n: int, merge_dashed: bool = False) -> Quiver:
    """Pullback of the dual quiver on GL_{n-1} to GL_n, before gluing."""
    m = n - 1
    Q = dual_quiver(m, merge_dashed)
    Q = Q.with_vertex("A", VertexInfo(frozen=True)).with_vertex("B", VertexInfo(frozen=True))
    return Q.with_arrows([(L(n - 2, 1), "A", 1), ("A", L(1, 1), 1), (L(n - 2, 1), "B", 1), ("B", R(n - 1, 2), 1)])


def toda_pullback_quiver(n: int) -> Quiver:
    Q = toda_quiver(n - 1, barred=True).with_vertex("A", VertexInfo(frozen=True))
    return Q.with_arrows([("A", TM(1), 1)])


def glue(n: int, merge_dashed: bool = False) -> Quiver:
    """The quiver Q_n: both pullbacks glued along A, C, D, with D unfrozen and D -> C added."""
    Qd = dual_pullback_quiver(n, merge_dashed).relabel(GLUE_DUAL(n))
    Qt = toda_pullback_quiver(n).relabel(GLUE_TODA(n))
    info = dict(Qd.vertices)
    verts = list(Qd.vertices)
    for v, i in Qt.vertices:
        if v in info:
            continue
        verts.append((v, i))
    verts = [(v, VertexInfo(d=i.d, frozen=False if v == "D" else i.frozen, isolated=i.isolated)) for v, i in verts]
    arrows = list(Qd.arrows) + list(Qt.arrows) + [("D", "C", 1)]
    return Quiver.build(verts, arrows)


def glue_hat(n: int, merge_dashed: bool = False) -> Quiver:
    """Q_n with the opposite pair between (1,1) and B."""
    Q = glue(n, merge_dashed)
    return Quiver.build(Q.vertices, Q.arrows, [(L(1, 1), "B")])


# ---------------------------------------------------------------- universal numbering of Q_n^0

def universal_numbering(n: int) -> dict[int, str]:
    """Universal vertex numbers of Q_n^0 mapped to the labels used in Q_n."""
    m = n - 1
    out: dict[int, str] = {0: "D"}
    num = 1
    for k in range(1, n - 2):
        j = n - 1 - k
        for i in range(j, n):
            out[num] = R(i, j)
            num += 1
    out[num] = "B"
    out[num + 1] = "C"
    for k in range(1, n - 1):
        out[num + 1 + k] = L(k, m - k)
    for k in range(1, n):
        out[-2 * k + 1] = TM(n - k)
        if n - k - 1 >= 1:
            out[-2 * k] = TP(n - k - 1)
    return out


def zero_quiver(n: int, merge_dashed: bool = False) -> Quiver:
    """Q_n^0: Q_n without A and the left vertices off the base; base, B, C, (1,-) frozen."""
    Q = glue(n, merge_dashed)
    keep = set(universal_numbering(n).values())
    freeze = {L(k, n - 1 - k) for k in range(1, n - 1)} | {"B", "C", TM(1)}
    return Q.restrict(keep, freeze)


# ---------------------------------------------------------------- the boomerang quiver Q_n^n

def boomerang_positions(n: int) -> list[tuple[int, int]]:
    out = [(i, 1) for i in range(3, n + 2)]
    out += [(i, 2) for i in range(2, n + 1)]
    out += [(i, j) for j in range(3, n + 2) for i in range(1, n + 3 - j)]
    return out


def boomerang_frozen(n: int) -> set[tuple[int, int]]:
    return {(1, j) for j in range(3, n + 2)} | {(2, 2), (n + 1, 1)}


def boomerang_arrows(n: int) -> list[tuple[tuple[int, int], tuple[int, int], int]]:
    """Arrows of Q_n^n as (source, target, multiplicity).

    The arrow |n+1,1| -> |n,2| is double: it joins (1,-) and (1,+), which no
    mutation of the head touches, so it keeps the multiplicity of the Toda quiver.
    """
    pos = set(boomerang_positions(n))
    out = []
    for i in range(2, n + 2):
        for j in range(1, n - i + 3):
            if (i, j) != (2, 2):
                out.append(((i, j), (i - 1, j + 1)))
    for i in range(2, n + 1):
        for j in range(2, n - i + 3):
            if (i, j) != (2, 3):
                out.append(((i, j), (i, j - 1)))
    for i in range(1, n):
        for j in range(2, n - i + 2):
            out.append(((i, j), (i + 1, j)))
    for a in range(1, n):
        out.append(((a, n + 2 - a), (a + 2, 1)))
    for a in range(1, n - 1):
        out.append(((a + 2, 1), (a + 1, n + 1 - a)))
    out.append(((n + 1, 1), (1, n + 1)))
    return [(s, t, 2 if (s, t) == ((n + 1, 1), (n, 2)) else 1) for s, t in out if s in pos and t in pos]


def boomerang_word(n: int, i: int, j: int) -> str | None:
    """Bracket word expected at |i,j| after the head sequence; None for C = |1,3|."""
    if (i, j) == (1, 3):
        return None
    if j >= 3:
        return f"~{j - 2} {n - i - j + 4}"
    if j == 2:
        return f"{n - i + 2}"
    return f"~{n - i + 2}"


def B(i: int, j: int) -> str:
    return f"|{i},{j}|"


def boomerang_quiver(n: int) -> Quiver:
    """Q_n^n on the grid labels |i,j|."""
    frozen = boomerang_frozen(n)
    verts = [(B(i, j), VertexInfo(frozen=(i, j) in frozen)) for i, j in boomerang_positions(n)]
    return Quiver.build(verts, [(B(*s), B(*t), m) for s, t, m in boomerang_arrows(n)])
