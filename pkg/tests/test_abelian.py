import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from gforge.abelian import (det, diagonal, exponent_matrix, h1, h2_corroborate, matmul,
                            smith_normal_form)
from gforge.constructions import load_builtin
from gforge.words import parse_presentation

matrices = st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-30, 30), min_size=c, max_size=c),
                       min_size=r, max_size=r)))


def oracle_diagonal(m):
    d = sympy_snf(Matrix(m), domain=ZZ)
    return sorted(abs(int(d[i, i])) for i in range(min(d.shape)))


@settings(max_examples=300)
@given(matrices)
def test_snf_matches_sympy(m):
    U, D, V = smith_normal_form(m)
    assert matmul(matmul(U, m), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = diagonal(D)
    assert all(x >= 0 for x in diag)
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert sorted(diag) == oracle_diagonal(m)


def test_snf_examples():
    assert diagonal(smith_normal_form([[2, 4], [0, 6]])[1]) == [2, 6]
    assert smith_normal_form([[1, 0], [0, 1]])[1] == [[1, 0], [0, 1]]
    assert smith_normal_form([[0, 0], [0, 0]])[1] == [[0, 0], [0, 0]]


def test_snf_big_entries():
    m = [[2 ** 80, 3 ** 50], [5 ** 40, 7 ** 30]]
    U, D, V = smith_normal_form(m)
    assert matmul(matmul(U, m), V) == D
    assert sorted(diagonal(D)) == oracle_diagonal(m)


def test_exponent_matrices():
    assert exponent_matrix(load_builtin("s")) == [[-1, 0]]
    assert exponent_matrix(load_builtin("lambda")) == [[0] * 5, [0] * 5]
    assert exponent_matrix(load_builtin("b")) == [
        [-1, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1], [0, -1, 0, 0]]


@pytest.mark.parametrize("name, expected", [("s", "Z"), ("b", "0"), ("q", "0"), ("lambda", "Z^5")])
def test_h1_builtins(name, expected):
    assert str(h1(load_builtin(name))) == expected


def test_h1_torsion_and_free():
    p = parse_presentation("gens: x y z\nrel: x^4 y^6\nrel: y^10")
    inv = h1(p)
    assert inv.free_rank == 1 and inv.torsion == (2, 20)  # d1 = gcd = 2, d1 d2 = 40
    assert str(h1(parse_presentation("gens: x"))) == "Z"


def test_h2_corroboration():
    assert h2_corroborate(load_builtin("q")).corroborated
    assert h2_corroborate(load_builtin("b")).corroborated
    assert not h2_corroborate(load_builtin("s")).corroborated
    assert not h2_corroborate(parse_presentation("gens: x")).corroborated
