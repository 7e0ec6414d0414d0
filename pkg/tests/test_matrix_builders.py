from __future__ import annotations

import re
from pathlib import Path

import pytest

from gcluster.exact_core import DimensionError
from gcluster.matrix_builders import (
    bracket_matrix,
    build_F,
    build_Gij,
    build_phi_matrix,
    demote,
    kij_word,
    promote,
    symbolic_matrix,
    word,
)

GOLDEN = Path(__file__).parent / "golden"


def read_golden(name: str) -> list[list[str]]:
    rows = []
    for line in (GOLDEN / name).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        row: list[str] = []
        for tok in line.split():
            if m := re.fullmatch(r"0\^(\d+)", tok):
                row += ["0"] * int(m.group(1))
            elif m := re.fullmatch(r"x(\d)(\d)\.\.x(\d)(\d)", tok):
                r, c0, _, c1 = map(int, m.groups())
                row += [f"x{r}{c}" for c in range(c0, c1 + 1)]
            else:
                row.append(tok)
        rows.append(row)
    return rows


def as_text(M) -> list[list[str]]:
    return [[str(v) for v in row] for row in M]


def test_golden_phi21_n6():
    assert as_text(build_phi_matrix(symbolic_matrix(6), 2, 1, zero="0")) == read_golden("phi21_n6.txt")


def test_golden_g53_n6():
    assert as_text(build_Gij(symbolic_matrix(6), 5, 3, zero="0")) == read_golden("g53_n6.txt")


def test_golden_f_n4():
    assert as_text(build_F(symbolic_matrix(4), zero="0")) == read_golden("f_n4.txt")


@pytest.mark.parametrize("n", [4, 5, 6])
def test_phi_matrix_sizes(n):
    for k in range(1, n - 1):
        for l in range(1, n - k):
            M = build_phi_matrix(symbolic_matrix(n), k, l, zero="0")
            assert M.shape == ((n - k - l) * (n + 1),) * 2


def test_phi_rejects_illegal_indices():
    with pytest.raises(DimensionError):
        build_phi_matrix(symbolic_matrix(4), 2, 2, zero="0")


def test_word_parsing_and_printing():
    w = word("~1 2^3 4")
    assert str(w) == "[~1 2 2 2 4]"
    assert w.size == 11


def test_promotion_and_demotion():
    assert str(promote("3 2")) == "[2 3 2]"
    assert str(promote("~1 3")) == "[~1 2 3]"
    assert str(promote("~2 2")) == "[~1 3 2]"
    assert str(demote("2 3 2")) == "[~1 3 2]"
    assert str(demote("~1 3")) == "[3]"
    # they commute when both apply
    assert demote(promote("2 3")) == promote(demote("2 3"))


def test_bracket_word_shapes():
    X = symbolic_matrix(4)
    M = bracket_matrix("2 3", X, zero="0")
    assert M.shape == (5, 5)
    with pytest.raises(DimensionError):
        bracket_matrix("4 4", X, zero="0")


def test_kij_word():
    assert str(kij_word(5, 3, 1)) == "[~3 ~3]"
    with pytest.raises(DimensionError):
        kij_word(5, 5, 1)
